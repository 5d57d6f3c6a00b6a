//! The cubic map `f(x) = x^3 + a*x^2` over Q_p: evaluation, derivative data,
//! fixed points and orbit iteration.
//!
//! Evaluation uses the factored form `x^2 * (x + a)`, which exposes the norm
//! structure `|f(x)| = |x|^2 * |x + a|` that drives the whole basin analysis.
//! The parameter is restricted to `|a|_p != 1`.

use thiserror::Error;

use crate::hensel::{self, HenselError};
use crate::padic::{Norm, Padic, PadicError, Prime};

/// Extra digits used internally when locating fixed points, so that the
/// values handed back certify `|f(x) - x| <= p^-(N-2)` at the working
/// precision N with room to spare.
pub(crate) const GUARD_DIGITS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("the parameter a must be nonzero")]
    ZeroParameter,
    #[error("|a|_p = 1 is outside the supported parameter range")]
    UnitNormParameter,
    #[error("fixed point {label:?} failed its residual check")]
    ResidualCheckFailed { label: FixedPointLabel },
    #[error("linearization law violated for a point inside its hypothesis region")]
    LinearizationViolated,
    #[error(transparent)]
    Hensel(#[from] HenselError),
    #[error(transparent)]
    Arith(#[from] PadicError),
}

/// Which side of `|a|_p = 1` the parameter sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `|a|_p > 1`
    ABig,
    /// `|a|_p < 1`
    ASmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointLabel {
    X1,
    X2,
    X3,
}

impl FixedPointLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            FixedPointLabel::X1 => "x1",
            FixedPointLabel::X2 => "x2",
            FixedPointLabel::X3 => "x3",
        }
    }
}

/// Stability type of a fixed point, decided by `|f'(x)|_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Attractive,
    Indifferent,
    Repelling,
}

impl Stability {
    pub fn from_multiplier_norm(norm: Norm) -> Stability {
        match norm {
            Norm::Zero => Stability::Attractive,
            Norm::Finite(e) if e > 0 => Stability::Attractive,
            Norm::Finite(0) => Stability::Indifferent,
            Norm::Finite(_) => Stability::Repelling,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Attractive => "attractive",
            Stability::Indifferent => "indifferent",
            Stability::Repelling => "repelling",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub label: FixedPointLabel,
    pub value: Padic,
    /// `|f'(value)|_p`.
    pub lambda_norm: Norm,
    pub kind: Stability,
}

/// A recorded orbit `x, f(x), f^2(x), ...` with its exact norm trace.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub start: Padic,
    pub states: Vec<Padic>,
    pub norm_trace: Vec<Norm>,
    pub stopped_early: Option<OrbitStop>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitStop {
    /// Index of the last recorded state.
    pub step: usize,
    pub reason: StopReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    PrecisionExhausted,
    ValuationOverflow,
}

/// The dynamical system `f(x) = x^3 + a*x^2` with exact rational parameter
/// `a = a_num / a_den`, realized p-adically at the working precision.
#[derive(Debug, Clone)]
pub struct CubicMap {
    prime: Prime,
    a: Padic,
    a_num: i64,
    a_den: i64,
    precision: usize,
    regime: Regime,
}

impl CubicMap {
    /// Builds the map from the exact rational parameter. The parameter must
    /// be nonzero with `|a|_p != 1`.
    pub fn from_rational(
        prime: Prime,
        a_num: i64,
        a_den: i64,
        precision: usize,
    ) -> Result<CubicMap, DynamicsError> {
        if a_num == 0 {
            return Err(DynamicsError::ZeroParameter);
        }
        // The parameter is kept at guard precision internally; its digits are
        // exact either way since it comes from a rational.
        let a = Padic::from_rational(a_num, a_den, prime, precision + GUARD_DIGITS)?;
        let regime = match a.norm() {
            Norm::Zero => return Err(DynamicsError::ZeroParameter),
            Norm::Finite(0) => return Err(DynamicsError::UnitNormParameter),
            Norm::Finite(v) if v < 0 => Regime::ABig,
            Norm::Finite(_) => Regime::ASmall,
        };
        Ok(CubicMap {
            prime,
            a,
            a_num,
            a_den,
            precision,
            regime,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn a(&self) -> &Padic {
        &self.a
    }

    pub fn a_rational(&self) -> (i64, i64) {
        (self.a_num, self.a_den)
    }

    /// Working precision N (reported digits). Internally the parameter and
    /// the fixed points carry extra guard digits.
    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn a_valuation(&self) -> i64 {
        self.a.valuation().expect("a is nonzero")
    }

    pub fn a_norm(&self) -> Norm {
        self.a.norm()
    }

    /// `-a`, used as the sphere center of the preimage-of-zero analysis.
    pub fn neg_a(&self) -> Padic {
        self.a.neg()
    }

    /// `f(x) = x^2 * (x + a)`, exact.
    pub fn eval(&self, x: &Padic) -> Result<Padic, PadicError> {
        let shifted = x.add(&self.a)?;
        x.mul(x)?.mul(&shifted)
    }

    /// `f'(x) = 3x^2 + 2ax = x * (3x + 2a)`, exact.
    pub fn derivative(&self, x: &Padic) -> Result<Padic, PadicError> {
        let three = Padic::from_integer(3, self.prime, self.precision + GUARD_DIGITS)?;
        let two_a = self.a.add(&self.a)?;
        x.mul(&three.mul(x)?.add(&two_a)?)
    }

    /// Multiplier norm and stability of a point treated as a fixed point.
    pub fn classify(&self, value: &Padic) -> Result<(Norm, Stability), DynamicsError> {
        let lambda = self.derivative(value)?;
        let norm = lambda.norm();
        Ok((norm, Stability::from_multiplier_norm(norm)))
    }

    /// All fixed points: `x1 = 0` always, and the two roots of
    /// `x^2 + a*x - 1 = 0` whenever `sqrt(a^2 + 4)` exists. In the `|a| > 1`
    /// regime the labels are normalized so that `|x2| = |a| > 1 > |x3|`.
    ///
    /// Every returned point satisfies `|f(x) - x| <= p^-(N-2)` at the working
    /// precision N; the values themselves carry guard digits beyond N.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>, DynamicsError> {
        let zero = Padic::zero(self.prime);
        let (l1, k1) = self.classify(&zero)?;
        let mut points = vec![FixedPoint {
            label: FixedPointLabel::X1,
            value: zero,
            lambda_norm: l1,
            kind: k1,
        }];

        let hi = self.precision + GUARD_DIGITS;
        let a_hi = Padic::from_rational(self.a_num, self.a_den, self.prime, hi)?;
        let four = Padic::from_integer(4, self.prime, hi)?;
        let disc = a_hi.mul(&a_hi)?.add(&four)?;
        if !hensel::sqrt_exists(&disc)?.exists {
            return Ok(points);
        }
        let root = hensel::sqrt(&disc)?;
        let two = Padic::from_integer(2, self.prime, hi)?;
        let neg_a = a_hi.neg();
        let mut plus = neg_a.add(&root)?.div(&two)?;
        let mut minus = neg_a.sub(&root)?.div(&two)?;
        if self.regime == Regime::ABig && plus.norm() < minus.norm() {
            std::mem::swap(&mut plus, &mut minus);
        }
        for (label, value) in [(FixedPointLabel::X2, plus), (FixedPointLabel::X3, minus)] {
            self.check_residual(label, &value)?;
            let (lambda_norm, kind) = self.classify(&value)?;
            points.push(FixedPoint {
                label,
                value,
                lambda_norm,
                kind,
            });
        }
        Ok(points)
    }

    /// Residual bound `|f(x) - x| <= p^-(N-2)`. Cancellation past the known
    /// digits counts as a pass: the residual is then below anything
    /// representable.
    fn check_residual(&self, label: FixedPointLabel, value: &Padic) -> Result<(), DynamicsError> {
        let bound = Norm::Finite(self.precision as i64 - 2);
        match self.eval(value)?.sub(value) {
            Ok(residual) => {
                if residual.norm() <= bound {
                    Ok(())
                } else {
                    Err(DynamicsError::ResidualCheckFailed { label })
                }
            }
            Err(PadicError::PrecisionExhausted) => Ok(()),
            Err(e) => Err(e.into()),
        }
    }

    /// Runs `n` steps of the orbit, recording every state and its norm.
    /// Stops early (with a marker) if cancellation destroys all digits or a
    /// diverging orbit overflows the valuation range.
    pub fn iterate(&self, x0: &Padic, n: usize) -> OrbitRecord {
        let mut states = Vec::with_capacity(n + 1);
        let mut norm_trace = Vec::with_capacity(n + 1);
        states.push(x0.clone());
        norm_trace.push(x0.norm());
        let mut stopped_early = None;
        for step in 0..n {
            let next = match self.eval(&states[step]) {
                Ok(v) => v,
                Err(PadicError::PrecisionExhausted) => {
                    stopped_early = Some(OrbitStop {
                        step,
                        reason: StopReason::PrecisionExhausted,
                    });
                    break;
                }
                Err(PadicError::ValuationOverflow) => {
                    stopped_early = Some(OrbitStop {
                        step,
                        reason: StopReason::ValuationOverflow,
                    });
                    break;
                }
                Err(e) => unreachable!("iteration cannot fail otherwise: {e}"),
            };
            norm_trace.push(next.norm());
            states.push(next);
        }
        OrbitRecord {
            start: x0.clone(),
            states,
            norm_trace,
            stopped_early,
        }
    }

    /// One-step linearization law at a fixed point: whenever
    /// `max(|3x0 + a|*|x - x0|, |x - x0|^2) < |f'(x0)|`, the step satisfies
    /// `|f(x) - f(x0)| = |f'(x0)| * |x - x0|` exactly.
    ///
    /// Returns `true` iff the hypothesis holds (the equality is then checked
    /// and a violation is an error); `false` means the hypothesis fails and
    /// nothing is asserted.
    pub fn check_linearization(&self, fp: &FixedPoint, x: &Padic) -> Result<bool, DynamicsError> {
        let gamma = match x.sub(&fp.value) {
            Ok(g) => g,
            Err(PadicError::PrecisionExhausted) => {
                // x equals the fixed point to every known digit; both sides
                // of the law vanish at this resolution.
                return Ok(!fp.lambda_norm.is_zero());
            }
            Err(e) => return Err(e.into()),
        };
        let gamma_norm = gamma.norm();
        let three = Padic::from_integer(3, self.prime, self.precision + GUARD_DIGITS)?;
        let coeff = three.mul(&fp.value)?.add(&self.a)?;
        let hyp_a = coeff.norm().times(gamma_norm);
        let hyp_b = gamma_norm.squared();
        let lambda = fp.lambda_norm;
        if !(hyp_a.max(hyp_b) < lambda) {
            return Ok(false);
        }
        let rhs = lambda.times(gamma_norm);
        match self.eval(x)?.sub(&self.eval(&fp.value)?) {
            Ok(diff) => {
                if diff.norm() == rhs {
                    Ok(true)
                } else {
                    Err(DynamicsError::LinearizationViolated)
                }
            }
            // Both sides sit below the representable resolution.
            Err(PadicError::PrecisionExhausted) => Ok(true),
            Err(e) => Err(e.into()),
        }
    }
}
