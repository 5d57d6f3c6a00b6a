//! Square roots in Q_p: existence tests and Hensel-lifted computation.
//!
//! A nonzero `x = p^v * u` has a square root iff `v` is even and the unit
//! part is a square in Z_p^*: for odd p this means the leading digit is a
//! quadratic residue mod p; for p = 2 it additionally requires the next two
//! digits to vanish (`u = 1 mod 8`). The root itself is computed by Newton
//! lifting from a seed found by exhaustive search mod p (mod 8 for p = 2),
//! which is trivial at desk-scale primes.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::padic::{mod_inv, Norm, Padic, PadicError, Prime};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HenselError {
    #[error("square root of zero is trivial and handled by the caller")]
    ZeroInput,
    #[error("the value has no square root in Q_p ({0:?})")]
    NoSquareRoot(SqrtReason),
    #[error("|a|_p = 1 is outside the supported parameter range")]
    UnitNormParameter,
    #[error("2-adic square-root tests need at least 3 known digits")]
    InsufficientPrecision,
    #[error(transparent)]
    Arith(#[from] PadicError),
}

/// Why a square root exists or fails to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtReason {
    OddValuation,
    NonresidueUnit,
    P2DigitCondition,
    Ok,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqrtExistence {
    pub exists: bool,
    pub reason: SqrtReason,
}

impl SqrtExistence {
    fn ok() -> Self {
        SqrtExistence {
            exists: true,
            reason: SqrtReason::Ok,
        }
    }

    fn no(reason: SqrtReason) -> Self {
        SqrtExistence {
            exists: false,
            reason,
        }
    }
}

/// Is `x^2 = a0 (mod p)` solvable? Exhaustive search over `1..p`.
pub fn is_quadratic_residue(a0: u64, p: Prime) -> bool {
    debug_assert!(a0 >= 1 && a0 < p.value());
    let p = p.value();
    (1..p).any(|x| (x as u128 * x as u128 % p as u128) as u64 == a0 % p)
}

/// Existence of a square root of a nonzero value, decided from the valuation
/// parity and the leading digits alone.
pub fn sqrt_exists(x: &Padic) -> Result<SqrtExistence, HenselError> {
    if x.is_zero() {
        return Err(HenselError::ZeroInput);
    }
    let p = x.prime();
    if p.value() == 2 && x.precision().unwrap_or(0) < 3 {
        return Err(HenselError::InsufficientPrecision);
    }
    let valuation = x.valuation().expect("nonzero");
    if valuation.rem_euclid(2) != 0 {
        return Ok(SqrtExistence::no(SqrtReason::OddValuation));
    }
    if p.value() == 2 {
        // d0 = 1 always; the unit is a square iff it is 1 mod 8.
        if x.digit(1) == 0 && x.digit(2) == 0 {
            Ok(SqrtExistence::ok())
        } else {
            Ok(SqrtExistence::no(SqrtReason::P2DigitCondition))
        }
    } else if is_quadratic_residue(x.digit(0), p) {
        Ok(SqrtExistence::ok())
    } else {
        Ok(SqrtExistence::no(SqrtReason::NonresidueUnit))
    }
}

/// Square root of `x`, canonicalized deterministically.
///
/// Of the two roots `±y`, returns the one whose leading digit lies in
/// `[1, p/2]` for odd p, and the one congruent to 1 mod 4 for p = 2. For
/// p = 2 the result carries one digit less than the input: the root of a
/// 2-adic number known to N digits is only determined to N-1 digits.
pub fn sqrt(x: &Padic) -> Result<Padic, HenselError> {
    let existence = sqrt_exists(x)?;
    if !existence.exists {
        return Err(HenselError::NoSquareRoot(existence.reason));
    }
    let p = x.prime();
    let n = x.precision().expect("nonzero");
    let valuation = x.valuation().expect("nonzero") / 2;
    let unit = x.unit().expect("nonzero");
    if p.value() == 2 {
        let root = lift_2adic(unit, n);
        let out = Padic::from_unit(p, valuation, root, n - 1)?;
        return Ok(out);
    }
    let root = lift_odd(unit, p, n);
    // Canonical branch: leading digit in the lower half of [1, p-1].
    let lead = (&root % p.big()).try_into().unwrap_or(u64::MAX);
    let root = if lead <= p.value() / 2 {
        root
    } else {
        p.pow_big(n) - root
    };
    Ok(Padic::from_unit(p, valuation, root, n)?)
}

/// Newton lifting of a square root of `unit` mod p^n for odd p, doubling the
/// number of correct digits each step from a seed found mod p.
fn lift_odd(unit: &BigUint, p: Prime, n: usize) -> BigUint {
    let pv = p.value();
    let u0: u64 = (unit % p.big()).try_into().expect("fits");
    let seed = (1..pv)
        .find(|y| (*y as u128 * *y as u128 % pv as u128) as u64 == u0)
        .expect("existence was checked");
    let mut y = BigUint::from(seed);
    let mut k = 1usize;
    while k < n {
        let k2 = (2 * k).min(n);
        let modulus = p.pow_big(k2);
        let u_red = unit % &modulus;
        let y_inv = mod_inv(&(&y % &modulus), &modulus).expect("odd unit");
        let two_inv = mod_inv(&BigUint::from(2u32), &modulus).expect("2 is a unit");
        y = (&y + u_red * y_inv) % &modulus;
        y = (y * two_inv) % &modulus;
        k = k2;
    }
    y
}

/// Digit-by-digit lifting of a square root of `unit = 1 mod 8` through
/// modulus 2^n, keeping the branch congruent to 1 mod 4.
fn lift_2adic(unit: &BigUint, n: usize) -> BigUint {
    let mut y = BigUint::one();
    for k in 3..n {
        // y^2 = unit (mod 2^k); exactly one of y, y + 2^(k-1) survives mod 2^(k+1).
        let next = BigUint::from(2u32).pow((k + 1) as u32);
        let candidate = (&y * &y) % &next;
        let target = unit % &next;
        if candidate != target {
            y += BigUint::from(2u32).pow((k - 1) as u32);
        }
    }
    // y^2 = unit (mod 2^n): y is the root to n-1 digits.
    y % BigUint::from(2u32).pow((n - 1) as u32)
}

/// Does `sqrt(a^2 + 4)` exist in Q_p?
///
/// For `|a|_p < 1` this holds iff p >= 3, or p = 2 with `|a|_2 <= 1/8`;
/// for `|a|_p > 1` it always holds. The unit-norm case is out of scope.
pub fn sqrt_a2_plus_4_exists(a: &Padic) -> Result<bool, HenselError> {
    match a.norm() {
        Norm::Zero => Ok(a.prime().value() >= 3),
        Norm::Finite(0) => Err(HenselError::UnitNormParameter),
        Norm::Finite(v) if v > 0 => {
            // |a|_p < 1
            if a.prime().value() >= 3 {
                Ok(true)
            } else {
                Ok(v >= 3)
            }
        }
        Norm::Finite(_) => Ok(true), // |a|_p > 1
    }
}

/// Does `sqrt(-3)` exist in Q_p? Decided by expanding -3 canonically and
/// applying the existence test; for p >= 5 this is the residue test of
/// `-3 mod p`.
pub fn sqrt_minus_3_exists(p: Prime) -> bool {
    let x = Padic::from_integer(-3, p, 8).expect("valid");
    match sqrt_exists(&x) {
        Ok(e) => e.exists,
        Err(_) => false,
    }
}
