//! Exact arithmetic in the field Q_p at fixed relative precision.
//!
//! A nonzero element is kept in canonical form
//!
//! ```text
//! x = p^v * (d0 + d1*p + d2*p^2 + ...),   0 <= d_j < p,  d0 != 0,
//! ```
//!
//! where exactly `precision` unit digits are known. The norm is
//! `|x|_p = p^(-v)` and is represented by the integer exponent alone, so every
//! norm comparison in this crate is exact integer logic; nothing is ever
//! rounded through a float. Addition obeys the strong triangle inequality
//! `|x+y|_p <= max(|x|_p, |y|_p)`, with equality whenever `|x|_p != |y|_p`.
//!
//! Precision model: the result of `add`/`sub` on operands with valuations
//! `v1 <= v2` knows `min(N1, N2 + (v2 - v1))` digits before cancellation; if
//! the leading `c` digits cancel, the result loses `c` digits of relative
//! precision. When every known digit cancels the operation reports
//! [`PadicError::PrecisionExhausted`] instead of silently producing zero; the
//! single exception is subtraction of structurally identical operands, which
//! yields an exact zero.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default number of known unit digits: deep enough for a few hundred exact
/// iterations of a cubic map at desk scale.
pub const DEFAULT_PRECISION: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("precision must be at least 1")]
    InvalidPrecision,
    #[error("mixed primes: {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("all known digits cancelled: result is indistinguishable from zero")]
    PrecisionExhausted,
    #[error("valuation left the representable range")]
    ValuationOverflow,
    #[error("unit part must be nonzero and coprime to the prime")]
    NotAUnit,
}

/// A prime number, checked by trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self, PadicError> {
        if value < 2 {
            return Err(PadicError::NotPrime(value));
        }
        if value.is_multiple_of(2) {
            return if value == 2 {
                Ok(Prime(2))
            } else {
                Err(PadicError::NotPrime(value))
            };
        }
        let mut d = 3u64;
        while d.saturating_mul(d) <= value {
            if value.is_multiple_of(d) {
                return Err(PadicError::NotPrime(value));
            }
            d += 2;
        }
        Ok(Prime(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub(crate) fn big(self) -> BigUint {
        BigUint::from(self.0)
    }

    /// p^k as a big integer.
    pub(crate) fn pow_big(self, k: usize) -> BigUint {
        self.big().pow(k as u32)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An exact p-adic norm: `Finite(e)` stands for the value `p^(-e)` and `Zero`
/// for `|0|_p = 0`.
///
/// `Ord` compares norm *values*: `Zero` is strictly smaller than every finite
/// norm and a smaller exponent means a larger norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Zero,
    Finite(i64),
}

impl Norm {
    /// The norm of a unit, `p^0 = 1`.
    pub const ONE: Norm = Norm::Finite(0);

    /// The norm whose value is `p^k`.
    pub fn p_power(k: i64) -> Norm {
        Norm::Finite(-k)
    }

    pub fn exponent(self) -> Option<i64> {
        match self {
            Norm::Zero => None,
            Norm::Finite(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Norm::Zero)
    }

    /// `|x*y| = |x|*|y|`: exponents add, zero absorbs.
    pub fn times(self, other: Norm) -> Norm {
        match (self, other) {
            (Norm::Finite(a), Norm::Finite(b)) => Norm::Finite(a + b),
            _ => Norm::Zero,
        }
    }

    /// `|x/y|`; `None` when the divisor norm is zero.
    pub fn over(self, other: Norm) -> Option<Norm> {
        match (self, other) {
            (_, Norm::Zero) => None,
            (Norm::Zero, _) => Some(Norm::Zero),
            (Norm::Finite(a), Norm::Finite(b)) => Some(Norm::Finite(a - b)),
        }
    }

    pub fn squared(self) -> Norm {
        self.times(self)
    }

    pub fn cubed(self) -> Norm {
        self.times(self).times(self)
    }
}

impl Ord for Norm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Norm::Zero, Norm::Zero) => Ordering::Equal,
            (Norm::Zero, Norm::Finite(_)) => Ordering::Less,
            (Norm::Finite(_), Norm::Zero) => Ordering::Greater,
            // p^(-a) < p^(-b) iff a > b
            (Norm::Finite(a), Norm::Finite(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Zero,
    Finite {
        valuation: i64,
        /// Unit part as an integer in `(0, p^precision)`, not divisible by p.
        unit: BigUint,
        precision: usize,
    },
}

/// An element of Q_p at fixed relative precision.
///
/// Values are immutable after construction; all operations are pure and
/// return fresh values, so they can be freely shared between threads.
#[derive(Debug, Clone)]
pub struct Padic {
    prime: Prime,
    repr: Repr,
}

impl Padic {
    pub fn zero(prime: Prime) -> Padic {
        Padic {
            prime,
            repr: Repr::Zero,
        }
    }

    pub fn one(prime: Prime, precision: usize) -> Padic {
        Padic::from_unit(prime, 0, BigUint::one(), precision).expect("1 is a unit")
    }

    /// Builds `p^valuation * unit` after reducing `unit` modulo `p^precision`.
    pub fn from_unit(
        prime: Prime,
        valuation: i64,
        unit: BigUint,
        precision: usize,
    ) -> Result<Padic, PadicError> {
        if precision == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        let modulus = prime.pow_big(precision);
        let unit = unit % &modulus;
        if unit.is_zero() || (&unit % prime.big()).is_zero() {
            return Err(PadicError::NotAUnit);
        }
        Ok(Padic {
            prime,
            repr: Repr::Finite {
                valuation,
                unit,
                precision,
            },
        })
    }

    /// Canonical expansion of `numerator/denominator` to `precision` unit
    /// digits. Every retained digit is exact.
    pub fn from_rational(
        numerator: i64,
        denominator: i64,
        prime: Prime,
        precision: usize,
    ) -> Result<Padic, PadicError> {
        if denominator == 0 {
            return Err(PadicError::ZeroDenominator);
        }
        if precision == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        if numerator == 0 {
            return Ok(Padic::zero(prime));
        }
        let p_int = BigInt::from(prime.value());
        let mut num = BigInt::from(numerator);
        let mut den = BigInt::from(denominator);
        let mut valuation: i64 = 0;
        while (&num % &p_int).is_zero() {
            num /= &p_int;
            valuation += 1;
        }
        while (&den % &p_int).is_zero() {
            den /= &p_int;
            valuation -= 1;
        }
        let modulus = prime.pow_big(precision);
        let m_int = BigInt::from(modulus.clone());
        let num_res = num.mod_floor_big(&m_int);
        let den_res = den.mod_floor_big(&m_int);
        let den_inv = mod_inv(&den_res, &modulus).expect("denominator unit is invertible");
        let unit = (num_res * den_inv) % &modulus;
        Padic::from_unit(prime, valuation, unit, precision)
    }

    pub fn from_integer(n: i64, prime: Prime, precision: usize) -> Result<Padic, PadicError> {
        Padic::from_rational(n, 1, prime, precision)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// The exponent of p in the canonical expansion; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Finite { valuation, .. } => Some(*valuation),
        }
    }

    /// Number of known unit digits; `None` for zero, which carries no digits.
    pub fn precision(&self) -> Option<usize> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Finite { precision, .. } => Some(*precision),
        }
    }

    /// `|x|_p` as an exact exponent.
    pub fn norm(&self) -> Norm {
        match &self.repr {
            Repr::Zero => Norm::Zero,
            Repr::Finite { valuation, .. } => Norm::Finite(*valuation),
        }
    }

    pub(crate) fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Finite { unit, .. } => Some(unit),
        }
    }

    /// Little-endian unit digits `d0..d_{precision-1}`; empty for zero.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Zero => Vec::new(),
            Repr::Finite {
                unit, precision, ..
            } => {
                let p = self.prime.big();
                let mut digits = Vec::with_capacity(*precision);
                let mut rest = unit.clone();
                for _ in 0..*precision {
                    let d = (&rest % &p).to_u64().expect("digit fits in u64");
                    digits.push(d);
                    rest /= &p;
                }
                digits
            }
        }
    }

    pub fn digit(&self, index: usize) -> u64 {
        match &self.repr {
            Repr::Zero => 0,
            Repr::Finite {
                unit, precision, ..
            } => {
                if index >= *precision {
                    0
                } else {
                    let p = self.prime.big();
                    ((unit / p.pow(index as u32)) % &p)
                        .to_u64()
                        .expect("digit fits in u64")
                }
            }
        }
    }

    pub fn leading_digit(&self) -> Option<u64> {
        if self.is_zero() {
            None
        } else {
            Some(self.digit(0))
        }
    }

    /// Dot-separated digit string `d0.d1.d2...`, capped at `max_digits`.
    /// Zero renders as `"0"`.
    pub fn digit_string(&self, max_digits: usize) -> String {
        match &self.repr {
            Repr::Zero => "0".to_string(),
            Repr::Finite { .. } => {
                let digits = self.digits();
                let shown = digits.len().min(max_digits.max(1));
                digits[..shown]
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            }
        }
    }

    /// Truncates to at most `precision` known digits.
    pub fn with_precision(&self, precision: usize) -> Result<Padic, PadicError> {
        if precision == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        match &self.repr {
            Repr::Zero => Ok(self.clone()),
            Repr::Finite {
                valuation,
                unit,
                precision: have,
            } => {
                if precision >= *have {
                    Ok(self.clone())
                } else {
                    Padic::from_unit(self.prime, *valuation, unit.clone(), precision)
                }
            }
        }
    }

    /// Exact multiplication by `p^k`.
    pub fn shifted(&self, k: i64) -> Result<Padic, PadicError> {
        match &self.repr {
            Repr::Zero => Ok(self.clone()),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => {
                let v = valuation
                    .checked_add(k)
                    .ok_or(PadicError::ValuationOverflow)?;
                Ok(Padic {
                    prime: self.prime,
                    repr: Repr::Finite {
                        valuation: v,
                        unit: unit.clone(),
                        precision: *precision,
                    },
                })
            }
        }
    }

    fn check_prime(&self, other: &Padic) -> Result<(), PadicError> {
        if self.prime != other.prime {
            Err(PadicError::PrimeMismatch(
                self.prime.value(),
                other.prime.value(),
            ))
        } else {
            Ok(())
        }
    }

    pub fn neg(&self) -> Padic {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => {
                let modulus = self.prime.pow_big(*precision);
                Padic {
                    prime: self.prime,
                    repr: Repr::Finite {
                        valuation: *valuation,
                        unit: &modulus - unit,
                        precision: *precision,
                    },
                }
            }
        }
    }

    pub fn add(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.check_prime(other)?;
        let (v1, u1, n1) = match &self.repr {
            Repr::Zero => return Ok(other.clone()),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
        };
        let (v2, u2, n2) = match &other.repr {
            Repr::Zero => return Ok(self.clone()),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
        };
        // Structurally exact cancellation (y = -x digit for digit) yields an
        // exact zero rather than a precision failure.
        if v1 == v2 && n1 == n2 && u1 + u2 == self.prime.pow_big(n1) {
            return Ok(Padic::zero(self.prime));
        }
        let (va, ua, na, vb, ub, nb) = if v1 <= v2 {
            (v1, u1, n1, v2, u2, n2)
        } else {
            (v2, u2, n2, v1, u1, n1)
        };
        let delta = (vb - va) as u64 as usize; // vb >= va, desk-scale gap
        if delta >= na {
            // The larger-valuation operand is invisible inside the window.
            return Ok(Padic {
                prime: self.prime,
                repr: Repr::Finite {
                    valuation: va,
                    unit: ua.clone(),
                    precision: na,
                },
            });
        }
        let known = na.min(nb + delta);
        let modulus = self.prime.pow_big(known);
        let sum = (ua + ub * self.prime.pow_big(delta)) % &modulus;
        if sum.is_zero() {
            return Err(PadicError::PrecisionExhausted);
        }
        let cancelled = big_valuation(&sum, self.prime);
        let valuation = va
            .checked_add(cancelled as i64)
            .ok_or(PadicError::ValuationOverflow)?;
        let unit = sum / self.prime.pow_big(cancelled);
        Ok(Padic {
            prime: self.prime,
            repr: Repr::Finite {
                valuation,
                unit,
                precision: known - cancelled,
            },
        })
    }

    pub fn sub(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.check_prime(other)?;
        let (v1, u1, n1) = match &self.repr {
            Repr::Zero => return Ok(Padic::zero(self.prime)),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
        };
        let (v2, u2, n2) = match &other.repr {
            Repr::Zero => return Ok(Padic::zero(self.prime)),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
        };
        let valuation = v1.checked_add(v2).ok_or(PadicError::ValuationOverflow)?;
        let precision = n1.min(n2);
        let unit = (u1 * u2) % self.prime.pow_big(precision);
        Ok(Padic {
            prime: self.prime,
            repr: Repr::Finite {
                valuation,
                unit,
                precision,
            },
        })
    }

    pub fn div(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.check_prime(other)?;
        let (v2, u2, n2) = match &other.repr {
            Repr::Zero => return Err(PadicError::DivisionByZero),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
        };
        let (v1, u1, n1) = match &self.repr {
            Repr::Zero => return Ok(Padic::zero(self.prime)),
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
        };
        let valuation = v1.checked_sub(v2).ok_or(PadicError::ValuationOverflow)?;
        let precision = n1.min(n2);
        let modulus = self.prime.pow_big(precision);
        let inv = mod_inv(&(u2 % &modulus), &modulus).expect("unit is invertible");
        let unit = (u1 * inv) % &modulus;
        Ok(Padic {
            prime: self.prime,
            repr: Repr::Finite {
                valuation,
                unit,
                precision,
            },
        })
    }

    /// `x^k` for a nonnegative integer exponent; `x^0 = 1`.
    pub fn pow(&self, k: u64) -> Result<Padic, PadicError> {
        match &self.repr {
            Repr::Zero => {
                if k == 0 {
                    Ok(Padic::one(self.prime, DEFAULT_PRECISION))
                } else {
                    Ok(self.clone())
                }
            }
            Repr::Finite {
                valuation,
                unit,
                precision,
            } => {
                if k == 0 {
                    return Ok(Padic::one(self.prime, *precision));
                }
                let v = valuation
                    .checked_mul(k as i64)
                    .ok_or(PadicError::ValuationOverflow)?;
                let modulus = self.prime.pow_big(*precision);
                let u = unit.modpow(&BigUint::from(k), &modulus);
                Ok(Padic {
                    prime: self.prime,
                    repr: Repr::Finite {
                        valuation: v,
                        unit: u,
                        precision: *precision,
                    },
                })
            }
        }
    }
}

/// Two values compare equal iff they share the prime, their valuations match
/// and their digits agree up to the smaller of the two precisions.
impl PartialEq for Padic {
    fn eq(&self, other: &Padic) -> bool {
        if self.prime != other.prime {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Zero, Repr::Zero) => true,
            (
                Repr::Finite {
                    valuation: v1,
                    unit: u1,
                    precision: n1,
                },
                Repr::Finite {
                    valuation: v2,
                    unit: u2,
                    precision: n2,
                },
            ) => {
                if v1 != v2 {
                    return false;
                }
                let modulus = self.prime.pow_big((*n1).min(*n2));
                u1 % &modulus == u2 % &modulus
            }
            _ => false,
        }
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Finite { valuation, .. } => {
                write!(
                    f,
                    "{}^{}*({})",
                    self.prime,
                    valuation,
                    self.digit_string(usize::MAX)
                )
            }
        }
    }
}

/// Exponent of `prime` dividing `n` (n must be nonzero).
pub(crate) fn big_valuation(n: &BigUint, prime: Prime) -> usize {
    debug_assert!(!n.is_zero());
    let p = prime.big();
    let mut v = 0;
    let mut rest = n.clone();
    while (&rest % &p).is_zero() {
        rest /= &p;
        v += 1;
    }
    v
}

/// Modular inverse by extended Euclid; `None` when gcd(a, modulus) != 1.
pub(crate) fn mod_inv(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    let m = BigInt::from(modulus.clone());
    let mut r0 = m.clone();
    let mut r1 = BigInt::from(a % modulus);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    if !r0.is_one() {
        return None;
    }
    let t = ((t0 % &m) + &m) % &m;
    t.to_biguint()
}

trait ModFloorBig {
    fn mod_floor_big(&self, modulus: &BigInt) -> BigUint;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, modulus: &BigInt) -> BigUint {
        let r = ((self % modulus) + modulus) % modulus;
        debug_assert!(!r.is_negative());
        r.to_biguint().expect("nonnegative")
    }
}
