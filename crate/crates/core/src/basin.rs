//! Orbit-fate classification, sphere sampling, stopping-time sets and
//! end-to-end structure verification for both parameter regimes.
//!
//! The classifier never declares a fate heuristically: `TO_X1` and
//! `TO_INFINITY` are only assigned once the orbit enters a region that is
//! provably absorbing (the contraction ball around the origin, the escape
//! region where `|f(x)| = |x|^3`, or the invariant sphere `S_{r1}(0)` in the
//! expanding regime). Everything else stays `UNDECIDED` when the iteration
//! budget runs out.
//!
//! Ball conventions are exact exponent comparisons: `B_r` is strict,
//! `B̄_r` non-strict and `S_r` equality.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{CubicMap, DynamicsError, FixedPoint, FixedPointLabel, Regime, Stability};
use crate::hensel::{self, HenselError};
use crate::padic::{Norm, Padic, PadicError, Prime};
use crate::report::{
    BasinReport, ItemStatus, MapSummary, PointRow, RegionTally, SiegelBoundaryReport, SiegelReport,
    StoppingSummary, TheoremItem, TheoremReport, SCHEMA_VERSION,
};

pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_DEPTH: usize = 3;
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasinError {
    #[error("this analysis only applies to the |a|_p > 1 regime")]
    RegimeMismatch,
    #[error("exhaustive enumeration needs {needed} points but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: usize },
    #[error("sphere radius must be finite")]
    ZeroRadius,
    #[error("sample depth must be between 1 and the working precision")]
    InvalidDepth,
    #[error("Siegel checks require an indifferent fixed point")]
    NotIndifferent,
    #[error("the Siegel boundary dichotomy excludes p = 3")]
    PrimeOutOfScope,
    #[error("empirical finding contradicts the sqrt(-3) prediction: {0}")]
    PredicateMismatch(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Hensel(#[from] HenselError),
    #[error(transparent)]
    Arith(#[from] PadicError),
}

/// The radius ladder `r_k = |a|_p^(-k)` that organizes the expanding-regime
/// case analysis. With `|a|_p = p^(-v(a))` the exponent of `r_k` is
/// `-k * v(a)`.
#[derive(Debug, Clone, Copy)]
pub struct RadiusLadder {
    prime: Prime,
    a_valuation: i64,
}

impl RadiusLadder {
    pub fn new(map: &CubicMap) -> RadiusLadder {
        RadiusLadder {
            prime: map.prime(),
            a_valuation: map.a_valuation(),
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn a_valuation(&self) -> i64 {
        self.a_valuation
    }

    /// `r_k = |a|^(-k)` as an exact norm; `r(0) = 1`.
    pub fn r(&self, k: i64) -> Norm {
        Norm::Finite(-k * self.a_valuation)
    }

    /// `|a|_p` itself.
    pub fn a_norm(&self) -> Norm {
        Norm::Finite(self.a_valuation)
    }
}

/// The fate of one orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Entered the contraction region of the origin.
    ToX1,
    /// Entered the escape region where norms cube forever.
    ToInfinity,
    /// Landed on a sphere that maps into itself.
    SphereInvariant { center: Padic, radius: Norm },
    /// Entered the designated target ball after `stopping_time` steps.
    EnteredTarget { stopping_time: usize },
    /// Entered the attraction ball of one of the nonzero fixed points.
    ConvergesTo(FixedPointLabel),
    /// Budget exhausted (or digits exhausted) without a provable verdict.
    Undecided { precision_exhausted: bool },
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::ToX1 => "to_x1".to_string(),
            Verdict::ToInfinity => "to_infinity".to_string(),
            Verdict::SphereInvariant { .. } => "sphere_invariant".to_string(),
            Verdict::EnteredTarget { .. } => "entered_target".to_string(),
            Verdict::ConvergesTo(label) => format!("converges_to_{}", label.as_str()),
            Verdict::Undecided {
                precision_exhausted: true,
            } => "undecided_precision_exhausted".to_string(),
            Verdict::Undecided { .. } => "undecided".to_string(),
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Undecided { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFate {
    pub verdict: Verdict,
    pub steps_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Exhaustive,
    Random { seed: u64 },
}

/// Points at exact distance `radius` from `center`: `center + p^m * u` with
/// `p^(-m) = radius` and `u` running over units mod `p^depth`.
#[derive(Debug, Clone)]
pub struct SphereSample {
    pub center: Padic,
    pub radius: Norm,
    pub points: Vec<Padic>,
    pub depth: usize,
    pub mode: SampleMode,
}

pub fn sample_sphere(
    center: &Padic,
    radius: Norm,
    depth: usize,
    mode: SampleMode,
    budget: usize,
    precision: usize,
) -> Result<SphereSample, BasinError> {
    let Norm::Finite(offset_valuation) = radius else {
        return Err(BasinError::ZeroRadius);
    };
    if depth == 0 || depth > precision {
        return Err(BasinError::InvalidDepth);
    }
    let prime = center.prime();
    let p = prime.value();
    let units: Vec<BigUint> = match mode {
        SampleMode::Exhaustive => {
            let needed = (p as u128 - 1) * (p as u128).pow(depth as u32 - 1);
            if needed > budget as u128 {
                return Err(BasinError::BudgetExceeded { needed, budget });
            }
            let span = (p as u128).pow(depth as u32);
            (1..span)
                .filter(|u| u % p as u128 != 0)
                .map(BigUint::from)
                .collect()
        }
        SampleMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..budget)
                .map(|_| {
                    let mut u = BigUint::from(rng.random_range(1..p));
                    let mut scale = BigUint::from(p);
                    for _ in 1..depth {
                        u += BigUint::from(rng.random_range(0..p)) * &scale;
                        scale *= p;
                    }
                    u
                })
                .collect()
        }
    };
    let mut points = Vec::with_capacity(units.len());
    for u in units {
        let offset = Padic::from_unit(prime, offset_valuation, u, precision)?;
        let point = center.add(&offset)?;
        debug_assert_eq!(
            distance(&point, center),
            Dist::Norm(radius),
            "sample left its sphere"
        );
        points.push(point);
    }
    Ok(SphereSample {
        center: center.clone(),
        radius,
        points,
        depth,
        mode,
    })
}

/// Points strictly inside `B_radius(center)`: the center itself plus spheres
/// at the next `shells` smaller radii.
pub fn sample_ball(
    center: &Padic,
    radius: Norm,
    shells: usize,
    depth: usize,
    mode: SampleMode,
    budget: usize,
    precision: usize,
) -> Result<Vec<Padic>, BasinError> {
    let Norm::Finite(e) = radius else {
        return Err(BasinError::ZeroRadius);
    };
    let mut points = vec![center.clone()];
    for shell in 1..=shells {
        let rho = Norm::Finite(e + shell as i64);
        points.extend(sample_sphere(center, rho, depth, mode, budget, precision)?.points);
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingTime {
    Finite(usize),
    InfiniteWithinBudget,
}

#[derive(Debug, Clone)]
pub struct StoppingTimeResult {
    pub point: Padic,
    pub time: StoppingTime,
    pub trajectory_len: usize,
}

/// Exact distance, or the admission that every known digit cancelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    Norm(Norm),
    BelowResolution,
}

pub fn distance(x: &Padic, y: &Padic) -> Dist {
    match x.sub(y) {
        Ok(d) => Dist::Norm(d.norm()),
        Err(PadicError::PrecisionExhausted) => Dist::BelowResolution,
        Err(e) => unreachable!("distance cannot fail otherwise: {e}"),
    }
}

/// `|x - center| < radius`, with vanishing distances inside every ball.
pub fn in_open_ball(x: &Padic, center: &Padic, radius: Norm) -> bool {
    match distance(x, center) {
        Dist::Norm(n) => n < radius,
        Dist::BelowResolution => true,
    }
}

/// `|x - center| = radius` exactly.
pub fn on_sphere(x: &Padic, center: &Padic, radius: Norm) -> bool {
    matches!(distance(x, center), Dist::Norm(n) if n == radius)
}

#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub depth: usize,
    pub mode: SampleMode,
    pub budget: usize,
    pub max_iter: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            depth: DEFAULT_DEPTH,
            mode: SampleMode::Exhaustive,
            budget: DEFAULT_BUDGET,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SiegelSpec {
    /// How many sphere radii below the disc radius to probe.
    pub shells: usize,
    /// Cap on sampled points per radius.
    pub per_radius: usize,
    pub depth: usize,
    pub mode: SampleMode,
    pub n_iter: usize,
}

impl Default for SiegelSpec {
    fn default() -> Self {
        SiegelSpec {
            shells: 3,
            per_radius: 34,
            depth: DEFAULT_DEPTH,
            mode: SampleMode::Exhaustive,
            n_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifySpec {
    pub depth: usize,
    pub mode: SampleMode,
    pub budget: usize,
    pub max_iter: usize,
    pub invariance_iters: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            depth: DEFAULT_DEPTH,
            mode: SampleMode::Exhaustive,
            budget: DEFAULT_BUDGET,
            max_iter: DEFAULT_MAX_ITER,
            invariance_iters: 200,
        }
    }
}

/// A map together with its fixed points and radius ladder, ready to classify
/// orbits. Classification of sampled points is pure and independent per
/// point, so samples are evaluated across threads (capped by
/// `PADIC_DYN_THREADS`) and merged back in sample order.
#[derive(Debug)]
pub struct Analyzer {
    map: CubicMap,
    ladder: RadiusLadder,
    fixed_points: Vec<FixedPoint>,
}

impl Analyzer {
    pub fn new(map: CubicMap) -> Result<Analyzer, BasinError> {
        let ladder = RadiusLadder::new(&map);
        let fixed_points = map.fixed_points()?;
        Ok(Analyzer {
            map,
            ladder,
            fixed_points,
        })
    }

    pub fn map(&self) -> &CubicMap {
        &self.map
    }

    pub fn ladder(&self) -> &RadiusLadder {
        &self.ladder
    }

    pub fn fixed_points(&self) -> &[FixedPoint] {
        &self.fixed_points
    }

    pub fn fixed_point(&self, label: FixedPointLabel) -> Option<&FixedPoint> {
        self.fixed_points.iter().find(|fp| fp.label == label)
    }

    /// The theorem hypothesis for the expanding regime asks that
    /// `sqrt(|a|_p)` is no integer power of p, i.e. that `v(a)` is odd.
    pub fn non_theorem_regime(&self) -> bool {
        self.map.regime() == Regime::ABig && self.map.a_valuation() % 2 == 0
    }

    /// Membership in a region whose eventual fate is already proven:
    ///
    /// * `|a| > 1`: `|x| < r1` contracts to the origin, `|x| > |a|` escapes
    ///   by norm cubing, and `|x| = r1` stays on that sphere forever.
    /// * `|a| < 1`: `|x| < 1` contracts, `|x| > 1` escapes. Points with
    ///   `|x| = 1` are left open (the nonzero fixed points live there).
    pub fn decided_region(&self, x: &Padic) -> Option<Verdict> {
        let norm = x.norm();
        match self.map.regime() {
            Regime::ABig => {
                let r1 = self.ladder.r(1);
                if norm < r1 {
                    Some(Verdict::ToX1)
                } else if norm > self.ladder.a_norm() {
                    Some(Verdict::ToInfinity)
                } else if norm == r1 {
                    Some(Verdict::SphereInvariant {
                        center: Padic::zero(self.map.prime()),
                        radius: r1,
                    })
                } else {
                    None
                }
            }
            Regime::ASmall => {
                if norm < Norm::ONE {
                    Some(Verdict::ToX1)
                } else if norm > Norm::ONE {
                    Some(Verdict::ToInfinity)
                } else {
                    None
                }
            }
        }
    }

    /// Iterates `f`, consulting `decided_region` before each step; in the
    /// contracting regime an orbit entering `B_1(x_sigma)` of an attractive
    /// fixed point is classified as converging there.
    pub fn classify_point(&self, x: &Padic, max_iter: usize) -> PointFate {
        let attractive: Vec<&FixedPoint> = self
            .fixed_points
            .iter()
            .filter(|fp| fp.label != FixedPointLabel::X1 && fp.kind == Stability::Attractive)
            .collect();
        let mut current = x.clone();
        for steps in 0..=max_iter {
            if let Some(verdict) = self.decided_region(&current) {
                return PointFate {
                    verdict,
                    steps_used: steps,
                };
            }
            if self.map.regime() == Regime::ASmall {
                for fp in &attractive {
                    if in_open_ball(&current, &fp.value, Norm::ONE) {
                        return PointFate {
                            verdict: Verdict::ConvergesTo(fp.label),
                            steps_used: steps,
                        };
                    }
                }
            }
            if steps == max_iter {
                break;
            }
            match self.map.eval(&current) {
                Ok(next) => current = next,
                Err(_) => {
                    return PointFate {
                        verdict: Verdict::Undecided {
                            precision_exhausted: true,
                        },
                        steps_used: steps,
                    }
                }
            }
        }
        PointFate {
            verdict: Verdict::Undecided {
                precision_exhausted: false,
            },
            steps_used: max_iter,
        }
    }

    /// Least `k >= 1` with `f^k(x)` inside the open target ball. A point
    /// already inside does not get `T = 0`. Orbits that enter the escape
    /// region while already larger than both the target center and radius can
    /// provably never return (norms cube upward), so the search exits early.
    pub fn stopping_time(
        &self,
        x: &Padic,
        target_center: &Padic,
        target_radius: Norm,
        budget: usize,
    ) -> StoppingTimeResult {
        let escape = match self.map.regime() {
            Regime::ABig => self.ladder.a_norm(),
            Regime::ASmall => Norm::ONE,
        };
        let mut current = x.clone();
        for k in 1..=budget {
            match self.map.eval(&current) {
                Ok(next) => current = next,
                Err(_) => {
                    return StoppingTimeResult {
                        point: x.clone(),
                        time: StoppingTime::InfiniteWithinBudget,
                        trajectory_len: k - 1,
                    }
                }
            }
            if in_open_ball(&current, target_center, target_radius) {
                return StoppingTimeResult {
                    point: x.clone(),
                    time: StoppingTime::Finite(k),
                    trajectory_len: k,
                };
            }
            let norm = current.norm();
            if norm > escape && norm > target_center.norm() && norm >= target_radius {
                return StoppingTimeResult {
                    point: x.clone(),
                    time: StoppingTime::InfiniteWithinBudget,
                    trajectory_len: k,
                };
            }
        }
        StoppingTimeResult {
            point: x.clone(),
            time: StoppingTime::InfiniteWithinBudget,
            trajectory_len: budget,
        }
    }

    fn sphere_points(
        &self,
        center: &Padic,
        radius: Norm,
        spec: &SampleSpec,
        seed_salt: u64,
    ) -> Result<Vec<Padic>, BasinError> {
        let precision = self.map.precision();
        let mode = match spec.mode {
            SampleMode::Exhaustive => {
                let p = self.map.prime().value() as u128;
                let needed = (p - 1) * p.pow(spec.depth as u32 - 1);
                if needed <= spec.budget as u128 {
                    SampleMode::Exhaustive
                } else {
                    // Exhaustive enumeration is over budget: fall back to
                    // seeded draws, deterministically salted per region.
                    SampleMode::Random { seed: seed_salt }
                }
            }
            SampleMode::Random { seed } => SampleMode::Random {
                seed: seed.wrapping_add(seed_salt),
            },
        };
        let budget = match mode {
            SampleMode::Exhaustive => spec.budget,
            SampleMode::Random { .. } => spec
                .budget
                .min((self.map.prime().value() as usize).pow(spec.depth as u32)),
        };
        Ok(sample_sphere(center, radius, spec.depth, mode, budget, precision)?.points)
    }

    /// Samples every region of the expanding-regime case analysis, classifies
    /// each point, cross-checks it against the region's predicted behavior,
    /// and explores the stopping-time set
    /// `D[S_{r0}(0) ∪ S_{|a|}(0), B_{r3}(-a)]`.
    pub fn basin_report(&self, spec: &SampleSpec) -> Result<BasinReport, BasinError> {
        if self.map.regime() != Regime::ABig {
            return Err(BasinError::RegimeMismatch);
        }
        let m = -self.map.a_valuation(); // |a| = p^m, m >= 1
        let prime = self.map.prime();
        let n = self.map.precision();
        let zero = Padic::zero(prime);
        let neg_a = self.map.neg_a();
        let r1 = self.ladder.r(1);
        let a_norm = self.ladder.a_norm();

        let mut regions: Vec<RegionTally> = Vec::new();
        let mut rows: Vec<PointRow> = Vec::new();
        let mut salt = 0u64;
        let mut next_salt = || {
            salt += 1;
            salt
        };

        // Checks beyond the bare verdict, per region.
        enum Expect {
            Verdict(Verdict),
            ToX1Within(usize),
            CubingTrace,
            Chain {
                image_norms: Vec<Norm>,
                verdict: Option<Verdict>,
            },
        }

        let run_region = |analyzer: &Analyzer,
                          name: &str,
                          expected: &str,
                          points: Vec<Padic>,
                          expect: Expect,
                          rows: &mut Vec<PointRow>|
         -> Result<RegionTally, BasinError> {
            let fates = parallel_map(&points, |x| analyzer.classify_point(x, spec.max_iter));
            let mut matches = 0usize;
            let mut undecided = 0usize;
            let mut witnesses = Vec::new();
            for (point, fate) in points.iter().zip(fates.iter()) {
                if !fate.verdict.is_decided() {
                    undecided += 1;
                }
                let ok = match &expect {
                    Expect::Verdict(v) => fate.verdict == *v,
                    Expect::ToX1Within(max_steps) => {
                        fate.verdict == Verdict::ToX1 && fate.steps_used <= *max_steps
                    }
                    Expect::CubingTrace => {
                        if fate.verdict != Verdict::ToInfinity {
                            false
                        } else {
                            let record = analyzer.map.iterate(point, 4);
                            record.stopped_early.is_none()
                                && record.norm_trace.windows(2).all(|w| {
                                    match (w[0].exponent(), w[1].exponent()) {
                                        (Some(e0), Some(e1)) => e1 == 3 * e0,
                                        _ => false,
                                    }
                                })
                        }
                    }
                    Expect::Chain {
                        image_norms,
                        verdict,
                    } => {
                        let mut ok = match verdict {
                            Some(v) => fate.verdict == *v,
                            None => fate.verdict.is_decided(),
                        };
                        if ok {
                            let mut state = point.clone();
                            for expected_norm in image_norms {
                                match analyzer.map.eval(&state) {
                                    Ok(next) => {
                                        ok &= next.norm() == *expected_norm;
                                        state = next;
                                    }
                                    Err(_) => {
                                        ok = false;
                                        break;
                                    }
                                }
                            }
                        }
                        ok
                    }
                };
                if ok {
                    matches += 1;
                } else if witnesses.len() < 5 {
                    witnesses.push(PointRow::new(point, n, &fate.verdict, fate.steps_used));
                }
                rows.push(PointRow::new(point, n, &fate.verdict, fate.steps_used));
            }
            Ok(RegionTally {
                region: name.to_string(),
                expected: expected.to_string(),
                points: points.len(),
                matches,
                mismatches: points.len() - matches,
                undecided,
                witnesses,
            })
        };

        // (1) Inside B_{r1}(0): contraction to the origin.
        let mut ball = vec![zero.clone()];
        for shell in [2i64, 3] {
            ball.extend(self.sphere_points(&zero, self.ladder.r(shell), spec, next_salt())?);
        }
        regions.push(run_region(
            self,
            "B_r1(0)",
            "to_x1",
            ball,
            Expect::Verdict(Verdict::ToX1),
            &mut rows,
        )?);

        // (2) The invariant sphere S_{r1}(0).
        let sphere_r1 = self.sphere_points(&zero, r1, spec, next_salt())?;
        regions.push(run_region(
            self,
            "S_r1(0)",
            "sphere_invariant",
            sphere_r1,
            Expect::Verdict(Verdict::SphereInvariant {
                center: zero.clone(),
                radius: r1,
            }),
            &mut rows,
        )?);

        // (3)+(4) Annuli r1 < r < r0 and r0 < r < |a| (empty when m = 1).
        let mut annulus = Vec::new();
        for e in 1..m {
            annulus.extend(self.sphere_points(&zero, Norm::Finite(e), spec, next_salt())?);
        }
        for e in 1..m {
            annulus.extend(self.sphere_points(&zero, Norm::Finite(-e), spec, next_salt())?);
        }
        regions.push(run_region(
            self,
            "S_r(0), r1<r<r0 or r0<r<|a|",
            "to_infinity",
            annulus,
            Expect::Verdict(Verdict::ToInfinity),
            &mut rows,
        )?);

        // (5) Beyond |a|: escape with exact norm cubing.
        let mut beyond = Vec::new();
        for e in [m + 1, m + 2] {
            beyond.extend(self.sphere_points(&zero, Norm::Finite(-e), spec, next_salt())?);
        }
        regions.push(run_region(
            self,
            "S_r(0), r>|a|",
            "to_infinity (norm cubing)",
            beyond,
            Expect::CubingTrace,
            &mut rows,
        )?);

        // (6) S_{r0}(0) feeds S_{|a|}(0); all fates must resolve.
        let sphere_r0 = self.sphere_points(&zero, Norm::ONE, spec, next_salt())?;
        regions.push(run_region(
            self,
            "S_r0(0)",
            "image in S_|a|(0), decided",
            sphere_r0.clone(),
            Expect::Chain {
                image_norms: vec![a_norm],
                verdict: None,
            },
            &mut rows,
        )?);

        // (7) S_{|a|}(0), decomposed into spheres around -a. Sampling around
        // the origin only reaches |x+a| >= p^(-depth+...), so the deep
        // buckets are populated by direct sampling around -a as well.
        let mut sphere_a: Vec<Padic> = self.sphere_points(&zero, a_norm, spec, next_salt())?;
        for e in [3 * m + 1, 3 * m + 2, 3 * m, 2 * m, m] {
            sphere_a.extend(self.sphere_points(&neg_a, Norm::Finite(e), spec, next_salt())?);
        }
        // Keep only genuine members of S_{|a|}(0) (relevant when |x+a| = |a|).
        sphere_a.retain(|x| x.norm() == a_norm);

        let mut buckets: [Vec<Padic>; 7] = Default::default();
        for x in sphere_a {
            let idx = match distance(&x, &neg_a) {
                Dist::BelowResolution => 0,
                Dist::Norm(Norm::Zero) => 0,
                Dist::Norm(d) => {
                    let e = d.exponent().expect("finite");
                    if e > 3 * m {
                        0 // inside B_{r3}(-a)
                    } else if e == 3 * m {
                        1
                    } else if e == 2 * m {
                        2
                    } else if e == m {
                        3
                    } else if e > 2 * m {
                        4 // r3 < r < r2
                    } else if e > m {
                        5 // r2 < r < r1
                    } else {
                        6 // r1 < r <= |a|
                    }
                }
            };
            buckets[idx].push(x);
        }
        let [near, s_r3, s_r2, s_r1_a, ann32, ann21, outer] = buckets;

        regions.push(run_region(
            self,
            "B_r3(-a)",
            "to_x1 within 2 steps",
            near,
            Expect::ToX1Within(2),
            &mut rows,
        )?);
        regions.push(run_region(
            self,
            "S_r3(-a)",
            "image on S_r1(0), sphere_invariant",
            s_r3,
            Expect::Chain {
                image_norms: vec![r1],
                verdict: Some(Verdict::SphereInvariant {
                    center: zero.clone(),
                    radius: r1,
                }),
            },
            &mut rows,
        )?);
        regions.push(run_region(
            self,
            "S_r2(-a)",
            "images on S_r0(0) then S_|a|(0), decided",
            s_r2,
            Expect::Chain {
                image_norms: vec![Norm::ONE, a_norm],
                verdict: None,
            },
            &mut rows,
        )?);
        regions.push(run_region(
            self,
            "S_r1(-a)",
            "image on S_|a|(0), decided",
            s_r1_a,
            Expect::Chain {
                image_norms: vec![a_norm],
                verdict: None,
            },
            &mut rows,
        )?);
        regions.push(run_region(
            self,
            "S_r(-a), r3<r<r2",
            "to_infinity",
            ann32,
            Expect::Verdict(Verdict::ToInfinity),
            &mut rows,
        )?);
        regions.push(run_region(
            self,
            "S_r(-a), r2<r<r1",
            "to_infinity",
            ann21,
            Expect::Verdict(Verdict::ToInfinity),
            &mut rows,
        )?);
        regions.push(run_region(
            self,
            "S_r(-a), r1<r<=|a|",
            "to_infinity",
            outer,
            Expect::Verdict(Verdict::ToInfinity),
            &mut rows,
        )?);

        // Stopping-time exploration over S_{r0}(0) ∪ S_{|a|}(0): membership
        // in the stopping set must coincide with convergence to the origin.
        let mut stopping_points = sphere_r0;
        stopping_points.extend(self.sphere_points(&zero, a_norm, spec, next_salt())?);
        let stopping = self.explore_stopping_set(&stopping_points, spec.max_iter, &mut rows);

        Ok(BasinReport {
            schema_version: SCHEMA_VERSION,
            report: "basin".to_string(),
            map: MapSummary::new(&self.map),
            non_theorem_regime: self.non_theorem_regime(),
            regions,
            stopping,
            rows,
        })
    }

    /// Stopping times into `B_{r3}(-a)` for the given points, cross-checked
    /// against each point's classified fate.
    pub(crate) fn explore_stopping_set(
        &self,
        points: &[Padic],
        budget: usize,
        rows: &mut Vec<PointRow>,
    ) -> StoppingSummary {
        let neg_a = self.map.neg_a();
        let r3 = self.ladder.r(3);
        let n = self.map.precision();
        let results = parallel_map(points, |x| {
            let inside = in_open_ball(x, &neg_a, r3);
            let st = self.stopping_time(x, &neg_a, r3, budget);
            let fate = self.classify_point(x, budget);
            (inside, st, fate)
        });
        let mut summary = StoppingSummary {
            target: "B_r3(-a)".to_string(),
            sampled: points.len(),
            already_inside: 0,
            entered: 0,
            never_within_budget: 0,
            d_members: 0,
            fate_agreements: 0,
            fate_disagreements: 0,
        };
        for (x, (inside, st, fate)) in points.iter().zip(results.iter()) {
            let entered = matches!(st.time, StoppingTime::Finite(_));
            if *inside {
                summary.already_inside += 1;
            }
            if entered {
                summary.entered += 1;
            } else {
                summary.never_within_budget += 1;
            }
            // A point already inside the target counts as a member of the
            // stopping set (it reaches the target in zero steps).
            let member = *inside || entered;
            if member {
                summary.d_members += 1;
            }
            if member == (fate.verdict == Verdict::ToX1) {
                summary.fate_agreements += 1;
            } else {
                summary.fate_disagreements += 1;
            }
            match st.time {
                StoppingTime::Finite(t) => rows.push(PointRow::new(
                    x,
                    n,
                    &Verdict::EnteredTarget { stopping_time: t },
                    t,
                )),
                StoppingTime::InfiniteWithinBudget => {
                    rows.push(PointRow::new(x, n, &fate.verdict, fate.steps_used))
                }
            }
        }
        summary
    }

    /// For each sampled radius `rho < radius`, checks that orbits started on
    /// `S_rho(fp)` keep `|f^k(x) - fp| = rho` exactly for `n_iter` steps.
    pub fn siegel_check(
        &self,
        fp: &FixedPoint,
        radius: Norm,
        spec: &SiegelSpec,
    ) -> Result<SiegelReport, BasinError> {
        if fp.kind != Stability::Indifferent {
            return Err(BasinError::NotIndifferent);
        }
        let Norm::Finite(e) = radius else {
            return Err(BasinError::ZeroRadius);
        };
        let n = self.map.precision();
        let mut radii_exponents = Vec::new();
        let mut tasks: Vec<(Padic, Norm)> = Vec::new();
        for shell in 1..=spec.shells {
            let rho = Norm::Finite(e + shell as i64);
            radii_exponents.push(e + shell as i64);
            let sample_spec = SampleSpec {
                depth: spec.depth,
                mode: spec.mode,
                budget: DEFAULT_BUDGET,
                max_iter: spec.n_iter,
            };
            let points = self.sphere_points(&fp.value, rho, &sample_spec, shell as u64)?;
            for point in points.into_iter().take(spec.per_radius) {
                tasks.push((point, rho));
            }
        }
        let center = fp.value.clone();
        let outcomes = parallel_map(&tasks, |(point, rho)| {
            // Offsets below the center's resolution collapse onto the center
            // itself; invariance is then vacuous.
            if point == &center {
                return None;
            }
            let mut state = point.clone();
            for k in 1..=spec.n_iter {
                state = match self.map.eval(&state) {
                    Ok(s) => s,
                    Err(_) => return Some((point.clone(), k, "precision exhausted".to_string())),
                };
                match distance(&state, &center) {
                    Dist::Norm(d) if d == *rho => {}
                    Dist::Norm(d) => {
                        return Some((
                            point.clone(),
                            k,
                            format!("distance exponent {:?}, expected {:?}", d, rho),
                        ))
                    }
                    Dist::BelowResolution => {
                        return Some((point.clone(), k, "distance collapsed".to_string()))
                    }
                }
            }
            None
        });
        let mut violations = 0usize;
        let mut witness = None;
        for outcome in outcomes.into_iter().flatten() {
            violations += 1;
            if witness.is_none() {
                let (point, k, _why) = outcome;
                witness = Some(PointRow::new(
                    &point,
                    n,
                    &Verdict::Undecided {
                        precision_exhausted: false,
                    },
                    k,
                ));
            }
        }
        Ok(SiegelReport {
            center: fp.value.digit_string(n),
            center_valuation: fp.value.valuation(),
            radii_exponents,
            points: tasks.len(),
            iterations: spec.n_iter,
            violations,
            witness,
        })
    }

    /// Decides whether the maximal Siegel disc at an indifferent fixed point
    /// of the contracting regime is the open or the closed unit ball, from
    /// the existence of `sqrt(-3)`, and verifies the prediction empirically:
    /// an explicit unit witness with `|g^2 + 3x*g + 3| < 1` in the open case,
    /// the norm-one equality over all unit residues in the closed case.
    pub fn siegel_boundary(&self, fp: &FixedPoint) -> Result<SiegelBoundaryReport, BasinError> {
        if self.map.regime() != Regime::ASmall {
            return Err(BasinError::RegimeMismatch);
        }
        let prime = self.map.prime();
        if prime.value() == 3 {
            return Err(BasinError::PrimeOutOfScope);
        }
        if fp.label == FixedPointLabel::X1 {
            return Err(BasinError::NotIndifferent);
        }
        let open = hensel::sqrt_minus_3_exists(prime);
        let n = self.map.precision();
        let hi = fp.value.precision().unwrap_or(n);
        let mut witness_digits = None;
        let mut witness_exponent = None;
        let mut residues_checked = 0usize;
        if open {
            // Root of z^2 + 3x*z + 3 = 0 via the quadratic formula with
            // discriminant -3 - 9*a*x (the fixed point satisfies
            // x^2 = 1 - a*x).
            let three = Padic::from_integer(3, prime, hi)?;
            let nine = Padic::from_integer(9, prime, hi)?;
            let disc = Padic::from_integer(-3, prime, hi)?
                .sub(&nine.mul(self.map.a())?.mul(&fp.value)?)?;
            if !hensel::sqrt_exists(&disc)?.exists {
                return Err(BasinError::PredicateMismatch(format!(
                    "sqrt(-3) exists in Q_{prime} but the discriminant has no root"
                )));
            }
            let root = hensel::sqrt(&disc)?;
            let two = Padic::from_integer(2, prime, hi)?;
            let gamma = three.mul(&fp.value)?.neg().add(&root)?.div(&two)?;
            if gamma.norm() != Norm::ONE {
                return Err(BasinError::PredicateMismatch(
                    "quadratic root is not a unit".to_string(),
                ));
            }
            let expr = gamma
                .mul(&gamma)?
                .add(&three.mul(&fp.value)?.mul(&gamma)?)?
                .add(&three)?;
            let below_one = match expr.norm() {
                Norm::Zero => true,
                Norm::Finite(e) => e > 0,
            };
            if !below_one {
                return Err(BasinError::PredicateMismatch(format!(
                    "witness expression has norm exponent {:?}",
                    expr.norm()
                )));
            }
            witness_digits = Some(gamma.digit_string(n));
            witness_exponent = expr.norm().exponent();
        } else {
            // |g^2 + 3x*g + 3| = 1 for every unit g is decided mod p.
            let p = prime.value();
            let x0 = fp.value.digit(0);
            for u in 1..p {
                let expr = (u as u128 * u as u128 + 3 * x0 as u128 * u as u128 + 3) % p as u128;
                if expr == 0 {
                    return Err(BasinError::PredicateMismatch(format!(
                        "unit residue {u} kills the expression mod {p} although sqrt(-3) does not exist"
                    )));
                }
                residues_checked += 1;
            }
        }
        let discs_coincide = match (
            self.fixed_point(FixedPointLabel::X2),
            self.fixed_point(FixedPointLabel::X3),
        ) {
            (Some(x2), Some(x3)) => in_open_ball(&x2.value, &x3.value, Norm::ONE),
            _ => false,
        };
        Ok(SiegelBoundaryReport {
            fixed_point: fp.label.as_str().to_string(),
            boundary: if open { "open_ball" } else { "closed_ball" }.to_string(),
            sqrt_minus_3_exists: open,
            witness_digits,
            witness_expression_exponent: witness_exponent,
            residues_checked,
            discs_coincide,
        })
    }

    /// Runs the regime-appropriate checklist and reports PASS/FAIL/UNDECIDED
    /// per item.
    pub fn verify_theorem(&self, spec: &VerifySpec) -> Result<TheoremReport, BasinError> {
        match self.map.regime() {
            Regime::ABig => self.verify_a_big(spec),
            Regime::ASmall => self.verify_a_small(spec),
        }
    }

    fn verify_a_big(&self, spec: &VerifySpec) -> Result<TheoremReport, BasinError> {
        let n = self.map.precision();
        let r1 = self.ladder.r(1);
        let a_norm = self.ladder.a_norm();
        let mut items = Vec::new();

        let x2 = self.fixed_point(FixedPointLabel::X2);
        let x3 = self.fixed_point(FixedPointLabel::X3);
        items.push(TheoremItem::pass_if(
            "fixed_point_count",
            self.fixed_points.len() == 3,
            format!("{} fixed points (3 expected)", self.fixed_points.len()),
        ));

        if let (Some(x2), Some(x3)) = (x2, x3) {
            items.push(TheoremItem::pass_if(
                "fixed_point_norms",
                x2.value.norm() == a_norm && x3.value.norm() == r1,
                format!(
                    "|x2| = |a| = p^{}, |x3| = r1 = p^{}",
                    -x2.value.norm().exponent().unwrap_or(0),
                    -x3.value.norm().exponent().unwrap_or(0),
                ),
            ));
            let x1 = self
                .fixed_point(FixedPointLabel::X1)
                .expect("always present");
            items.push(TheoremItem::pass_if(
                "classification",
                x1.kind == Stability::Attractive
                    && x2.kind == Stability::Repelling
                    && x3.kind == Stability::Indifferent,
                format!(
                    "x1 {}, x2 {}, x3 {}",
                    x1.kind.as_str(),
                    x2.kind.as_str(),
                    x3.kind.as_str()
                ),
            ));
        }

        let sample_spec = SampleSpec {
            depth: spec.depth,
            mode: spec.mode,
            budget: spec.budget,
            max_iter: spec.max_iter,
        };
        let basin = self.basin_report(&sample_spec)?;
        let basin_clean = basin
            .regions
            .iter()
            .all(|r| r.mismatches == 0 && r.undecided == 0)
            && basin.stopping.fate_disagreements == 0;
        let basin_status = if self.non_theorem_regime() {
            ItemStatus::Undecided
        } else if basin_clean {
            ItemStatus::Pass
        } else {
            ItemStatus::Fail
        };
        items.push(TheoremItem::new(
            "basin_structure",
            basin_status,
            format!(
                "{} regions, {} points, {} mismatches, {} undecided, {} stopping disagreements{}",
                basin.regions.len(),
                basin.regions.iter().map(|r| r.points).sum::<usize>(),
                basin.regions.iter().map(|r| r.mismatches).sum::<usize>(),
                basin.regions.iter().map(|r| r.undecided).sum::<usize>(),
                basin.stopping.fate_disagreements,
                if self.non_theorem_regime() {
                    "; v(a) even: hypothesis sqrt(|a|) not a power of p fails"
                } else {
                    ""
                }
            ),
        ));

        let mut siegel_reports = Vec::new();
        if let Some(x3) = x3 {
            if x3.kind == Stability::Indifferent {
                let siegel_spec = SiegelSpec {
                    n_iter: spec.invariance_iters,
                    depth: spec.depth,
                    mode: spec.mode,
                    ..SiegelSpec::default()
                };
                let siegel = self.siegel_check(x3, r1, &siegel_spec)?;
                items.push(TheoremItem::pass_if(
                    "siegel_disc_x3",
                    siegel.violations == 0,
                    format!(
                        "{} points, {} iterations, {} violations",
                        siegel.points, siegel.iterations, siegel.violations
                    ),
                ));
                siegel_reports.push(siegel);

                // The whole disc B_{r1}(x3) sits on the sphere S_{r1}(0).
                let disc_points =
                    sample_ball(&x3.value, r1, 2, spec.depth, spec.mode, spec.budget, n)?;
                let on_sphere_count = disc_points.iter().filter(|x| x.norm() == r1).count();
                items.push(TheoremItem::pass_if(
                    "siegel_disc_inside_sphere_r1",
                    on_sphere_count == disc_points.len(),
                    format!(
                        "{on_sphere_count}/{} sampled disc points have |x| = r1",
                        disc_points.len()
                    ),
                ));
            }
        }

        let rows = basin.rows.clone();
        Ok(TheoremReport {
            schema_version: SCHEMA_VERSION,
            report: "verify_theorem".to_string(),
            map: MapSummary::new(&self.map),
            non_theorem_regime: self.non_theorem_regime(),
            items,
            fixed_points: self
                .fixed_points
                .iter()
                .map(|fp| crate::report::FixedPointRow::new(fp, n))
                .collect(),
            basin_regions: Some(basin.regions),
            stopping: Some(basin.stopping),
            siegel: siegel_reports,
            siegel_boundary: Vec::new(),
            rows,
        })
    }

    fn verify_a_small(&self, spec: &VerifySpec) -> Result<TheoremReport, BasinError> {
        let prime = self.map.prime();
        let p = prime.value();
        let n = self.map.precision();
        let zero = Padic::zero(prime);
        let mut items = Vec::new();
        let mut rows = Vec::new();
        let mut siegel_reports = Vec::new();
        let mut boundary_reports = Vec::new();

        let sigma: Vec<&FixedPoint> = self
            .fixed_points
            .iter()
            .filter(|fp| fp.label != FixedPointLabel::X1)
            .collect();

        if sigma.is_empty() {
            items.push(TheoremItem::new(
                "fixed_point_count",
                ItemStatus::Undecided,
                "x2, x3 do not exist (p = 2 with |a| > 1/8): only x1 is analyzed".to_string(),
            ));
        } else {
            items.push(TheoremItem::pass_if(
                "fixed_point_norms",
                sigma.iter().all(|fp| fp.value.norm() == Norm::ONE),
                "x2, x3 on the unit sphere".to_string(),
            ));
            let want = if p == 3 {
                Stability::Attractive
            } else {
                Stability::Indifferent
            };
            items.push(TheoremItem::pass_if(
                "classification",
                sigma.iter().all(|fp| fp.kind == want),
                format!("x2, x3 expected {}", want.as_str()),
            ));
        }

        // A(x1) = B_1(0): interior contracts, boundary keeps unit norm.
        let interior = sample_ball(&zero, Norm::ONE, 2, spec.depth, spec.mode, spec.budget, n)?;
        let fates = parallel_map(&interior, |x| self.classify_point(x, spec.max_iter));
        let interior_ok = fates.iter().all(|f| f.verdict == Verdict::ToX1);
        for (x, f) in interior.iter().zip(fates.iter()) {
            rows.push(PointRow::new(x, n, &f.verdict, f.steps_used));
        }
        items.push(TheoremItem::pass_if(
            "basin_x1_interior",
            interior_ok,
            format!("{} sampled points of B_1(0) contract to x1", interior.len()),
        ));

        let sample_spec = SampleSpec {
            depth: spec.depth,
            mode: spec.mode,
            budget: spec.budget,
            max_iter: spec.max_iter,
        };
        let boundary = self.sphere_points(&zero, Norm::ONE, &sample_spec, 17)?;
        let boundary_results = parallel_map(&boundary, |x| {
            let record = self.map.iterate(x, spec.invariance_iters);
            record.stopped_early.is_none() && record.norm_trace.iter().all(|t| *t == Norm::ONE)
        });
        let boundary_ok = boundary_results.iter().all(|ok| *ok);
        items.push(TheoremItem::pass_if(
            "basin_x1_boundary",
            boundary_ok,
            format!(
                "{} sampled points of S_1(0) keep unit norm for {} iterations",
                boundary.len(),
                spec.invariance_iters
            ),
        ));

        if !sigma.is_empty() && p != 3 {
            for fp in &sigma {
                let boundary_report = self.siegel_boundary(fp)?;
                items.push(TheoremItem::pass_if(
                    &format!("siegel_boundary_{}", fp.label.as_str()),
                    true,
                    format!(
                        "{} (sqrt(-3) {})",
                        boundary_report.boundary,
                        if boundary_report.sqrt_minus_3_exists {
                            "exists"
                        } else {
                            "does not exist"
                        }
                    ),
                ));
                boundary_reports.push(boundary_report);

                let siegel_spec = SiegelSpec {
                    n_iter: spec.invariance_iters,
                    depth: spec.depth,
                    mode: spec.mode,
                    ..SiegelSpec::default()
                };
                let siegel = self.siegel_check(fp, Norm::ONE, &siegel_spec)?;
                items.push(TheoremItem::pass_if(
                    &format!("siegel_interior_{}", fp.label.as_str()),
                    siegel.violations == 0,
                    format!(
                        "{} points, {} iterations, {} violations",
                        siegel.points, siegel.iterations, siegel.violations
                    ),
                ));
                siegel_reports.push(siegel);
            }

            // Centers are |2|_p apart; for p >= 5 the open unit discs are
            // disjoint, for p = 2 they coincide.
            if let (Some(x2), Some(x3)) = (
                self.fixed_point(FixedPointLabel::X2),
                self.fixed_point(FixedPointLabel::X3),
            ) {
                let two = Padic::from_integer(2, prime, n)?;
                let sep = match distance(&x2.value, &x3.value) {
                    Dist::Norm(d) => d == two.norm(),
                    Dist::BelowResolution => false,
                };
                if p >= 5 {
                    items.push(TheoremItem::pass_if(
                        "siegel_discs_disjoint",
                        sep,
                        "|x2 - x3| = |2|_p = 1: the open unit discs are disjoint".to_string(),
                    ));
                } else {
                    let coincide = in_open_ball(&x2.value, &x3.value, Norm::ONE);
                    items.push(TheoremItem::pass_if(
                        "siegel_discs_coincide",
                        sep && coincide,
                        "|x2 - x3| = |2|_2 < 1: both discs are the same ball".to_string(),
                    ));
                }
            }
        }

        if !sigma.is_empty() && p == 3 {
            // Attractors: sampled points of B_1(x_sigma) converge, and the
            // one-step law |f(x) - x_sigma| = r^3 holds on spheres r >= 1.
            let threshold = Norm::Finite(25);
            let mut all_converge = true;
            let mut checked = 0usize;
            for fp in &sigma {
                let points = sample_ball(
                    &fp.value,
                    Norm::ONE,
                    2,
                    spec.depth,
                    spec.mode,
                    spec.budget,
                    n,
                )?;
                let converged = parallel_map(&points, |x| {
                    let mut state = x.clone();
                    for _ in 0..spec.max_iter {
                        match distance(&state, &fp.value) {
                            Dist::BelowResolution => return true,
                            Dist::Norm(d) if d <= threshold => return true,
                            _ => {}
                        }
                        state = match self.map.eval(&state) {
                            Ok(s) => s,
                            Err(_) => return false,
                        };
                    }
                    false
                });
                checked += points.len();
                all_converge &= converged.iter().all(|c| *c);
                for x in &points {
                    rows.push(PointRow::new(x, n, &Verdict::ConvergesTo(fp.label), 0));
                }
            }
            items.push(TheoremItem::pass_if(
                "attractors_x_sigma",
                all_converge,
                format!("{checked} sampled points of B_1(x_sigma) reach distance <= p^-25"),
            ));

            let mut law_ok = true;
            for fp in &sigma {
                for e in [0i64, -1] {
                    let points =
                        self.sphere_points(&fp.value, Norm::Finite(e), &sample_spec, 29)?;
                    let expected = Norm::Finite(3 * e);
                    for x in &points {
                        let image = self.map.eval(x)?;
                        law_ok &= matches!(
                            distance(&image, &fp.value),
                            Dist::Norm(d) if d == expected
                        );
                    }
                }
            }
            items.push(TheoremItem::pass_if(
                "cubing_contraction_spheres",
                law_ok,
                "|f(x) - x_sigma| = r^3 on sampled spheres r in {1, p}".to_string(),
            ));
        }

        Ok(TheoremReport {
            schema_version: SCHEMA_VERSION,
            report: "verify_theorem".to_string(),
            map: MapSummary::new(&self.map),
            non_theorem_regime: false,
            items,
            fixed_points: self
                .fixed_points
                .iter()
                .map(|fp| crate::report::FixedPointRow::new(fp, n))
                .collect(),
            basin_regions: None,
            stopping: None,
            siegel: siegel_reports,
            siegel_boundary: boundary_reports,
            rows,
        })
    }
}

/// Deterministic parallel map: contiguous chunks, results merged in input
/// order. `PADIC_DYN_THREADS` caps the worker count.
pub(crate) fn parallel_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = thread_count(items.len());
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        for (chunk_items, chunk_out) in items.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(|| {
                for (item, slot) in chunk_items.iter().zip(chunk_out.iter_mut()) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter()
        .map(|o| o.expect("filled by worker"))
        .collect()
}

fn thread_count(items: usize) -> usize {
    let cap = std::env::var("PADIC_DYN_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1);
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    cap.unwrap_or(available).min(items.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn analyzer(pv: u64, num: i64, den: i64) -> Analyzer {
        let map = CubicMap::from_rational(p(pv), num, den, 32).unwrap();
        Analyzer::new(map).unwrap()
    }

    #[test]
    fn radius_ladder() {
        let a = analyzer(5, 1, 5);
        assert_eq!(a.ladder().r(0), Norm::ONE);
        assert_eq!(a.ladder().r(1), Norm::Finite(1)); // 1/5
        assert_eq!(a.ladder().r(3), Norm::Finite(3)); // 1/125
        assert_eq!(a.ladder().a_norm(), Norm::Finite(-1)); // 5
    }

    #[test]
    fn decided_region_examples() {
        let a = analyzer(5, 1, 5);
        // |25| = 1/25 < r1.
        let x = Padic::from_integer(25, p(5), 32).unwrap();
        assert_eq!(a.decided_region(&x), Some(Verdict::ToX1));
        // |1/25| = 25 > |a| = 5.
        let x = Padic::from_rational(1, 25, p(5), 32).unwrap();
        assert_eq!(a.decided_region(&x), Some(Verdict::ToInfinity));
        // |5| = r1: invariant sphere.
        let x = Padic::from_integer(5, p(5), 32).unwrap();
        assert!(matches!(
            a.decided_region(&x),
            Some(Verdict::SphereInvariant { radius, .. }) if radius == Norm::Finite(1)
        ));
        // |1| = 1 is undecided pointwise in the expanding regime.
        let x = Padic::from_integer(1, p(5), 32).unwrap();
        assert_eq!(a.decided_region(&x), None);

        // Contracting regime: |1/7| = 7 > 1 escapes after one cube.
        let a = analyzer(7, 7, 1);
        let x = Padic::from_rational(1, 7, p(7), 32).unwrap();
        assert_eq!(a.decided_region(&x), Some(Verdict::ToInfinity));
    }

    #[test]
    fn classify_near_minus_a_contracts_quickly() {
        let a = analyzer(5, 1, 5);
        // x = -a + c with |c| < r3 = 1/125.
        let c = Padic::from_integer(625, p(5), 32).unwrap();
        let x = a.map().neg_a().add(&c).unwrap();
        let fate = a.classify_point(&x, 50);
        assert_eq!(fate.verdict, Verdict::ToX1);
        assert!(fate.steps_used <= 2, "steps {}", fate.steps_used);
    }

    #[test]
    fn classify_point_on_invariant_sphere() {
        let a = analyzer(5, 1, 5);
        let x = Padic::from_integer(5, p(5), 32).unwrap();
        let fate = a.classify_point(&x, 50);
        assert!(matches!(fate.verdict, Verdict::SphereInvariant { .. }));
        assert_eq!(fate.steps_used, 0);
    }

    #[test]
    fn classify_annulus_escapes_in_finitely_many_steps() {
        // |a| = 125: spheres with r1 < r < r0 exist (e.g. |x| = 1/5) and
        // escape after finitely many steps.
        let a = analyzer(5, 1, 125);
        let x = Padic::from_integer(5, p(5), 32).unwrap();
        let fate = a.classify_point(&x, 50);
        assert_eq!(fate.verdict, Verdict::ToInfinity);
        assert!(fate.steps_used >= 1);
    }

    #[test]
    fn exhaustive_sphere_enumeration() {
        // Norm 5 around the origin: points u/5, u a unit mod 5.
        let center = Padic::zero(p(5));
        let s = sample_sphere(
            &center,
            Norm::Finite(-1),
            1,
            SampleMode::Exhaustive,
            100,
            32,
        )
        .unwrap();
        assert_eq!(s.points.len(), 4);
        for point in &s.points {
            assert_eq!(point.norm(), Norm::Finite(-1));
        }

        // Unit sphere in Q_3 at depth 2: units mod 9.
        let center = Padic::zero(p(3));
        let s = sample_sphere(&center, Norm::ONE, 2, SampleMode::Exhaustive, 100, 32).unwrap();
        assert_eq!(s.points.len(), 6);
    }

    #[test]
    fn exhaustive_budget_is_enforced() {
        let center = Padic::zero(p(5));
        let err = sample_sphere(&center, Norm::ONE, 3, SampleMode::Exhaustive, 10, 32).unwrap_err();
        assert!(matches!(
            err,
            BasinError::BudgetExceeded { needed: 100, .. }
        ));
    }

    #[test]
    fn random_sphere_draws_sit_on_the_sphere() {
        let a = analyzer(7, 7, 1);
        let x2 = a.fixed_point(FixedPointLabel::X2).unwrap();
        let s = sample_sphere(
            &x2.value,
            Norm::Finite(1),
            1,
            SampleMode::Random { seed: 1 },
            10,
            32,
        )
        .unwrap();
        assert_eq!(s.points.len(), 10);
        for point in &s.points {
            assert!(on_sphere(point, &x2.value, Norm::Finite(1)));
        }
    }

    #[test]
    fn stopping_time_immediately_inside_r3_ball() {
        // x in B_{r3}(-a) maps into B_{r1}(0) in one step.
        let a = analyzer(5, 1, 5);
        let c = Padic::from_integer(625, p(5), 32).unwrap();
        let x = a.map().neg_a().add(&c).unwrap();
        let zero = Padic::zero(p(5));
        let st = a.stopping_time(&x, &zero, a.ladder().r(1), 50);
        assert_eq!(st.time, StoppingTime::Finite(1));
    }

    #[test]
    fn stopping_time_escaping_orbit_exits_early() {
        let a = analyzer(5, 1, 5);
        let x = Padic::from_rational(1, 25, p(5), 32).unwrap();
        let neg_a = a.map().neg_a();
        let st = a.stopping_time(&x, &neg_a, a.ladder().r(3), 1000);
        assert_eq!(st.time, StoppingTime::InfiniteWithinBudget);
        assert!(
            st.trajectory_len < 10,
            "no early exit: {}",
            st.trajectory_len
        );
    }

    #[test]
    fn stopping_time_confirmed_by_re_simulation() {
        let a = analyzer(5, 1, 5);
        let neg_a = a.map().neg_a();
        let r3 = a.ladder().r(3);
        // Sweep a sphere of S_{r3}(-a): its image lies on S_{r1}(0); track
        // whatever stopping times arise and confirm them independently.
        let sample =
            sample_sphere(&neg_a, Norm::Finite(3), 2, SampleMode::Exhaustive, 100, 32).unwrap();
        for x in &sample.points {
            let st = a.stopping_time(x, &neg_a, r3, 100);
            if let StoppingTime::Finite(t) = st.time {
                let record = a.map().iterate(x, t);
                assert!(in_open_ball(&record.states[t], &neg_a, r3));
                for state in &record.states[1..t] {
                    assert!(!in_open_ball(state, &neg_a, r3));
                }
            }
        }
    }

    #[test]
    fn basin_report_is_clean_for_the_reference_map() {
        let a = analyzer(5, 1, 5);
        let spec = SampleSpec {
            depth: 2,
            max_iter: 200,
            ..SampleSpec::default()
        };
        let report = a.basin_report(&spec).unwrap();
        assert!(!report.non_theorem_regime);
        for region in &report.regions {
            assert_eq!(
                region.mismatches, 0,
                "region {} has mismatches: {:?}",
                region.region, region.witnesses
            );
            assert_eq!(region.undecided, 0, "region {}", region.region);
        }
        assert_eq!(report.stopping.fate_disagreements, 0);
        assert!(report.stopping.d_members >= report.stopping.already_inside);
    }

    #[test]
    fn basin_report_covers_interior_annuli_when_they_exist() {
        // |a| = 125 (m = 3): the annuli between the ladder radii are
        // populated and everything still matches.
        let a = analyzer(5, 1, 125);
        let spec = SampleSpec {
            depth: 2,
            max_iter: 200,
            ..SampleSpec::default()
        };
        let report = a.basin_report(&spec).unwrap();
        let annulus = report
            .regions
            .iter()
            .find(|r| r.region.starts_with("S_r(0), r1<r<r0"))
            .unwrap();
        assert!(annulus.points > 0);
        for region in &report.regions {
            assert_eq!(region.mismatches, 0, "region {}", region.region);
            assert_eq!(region.undecided, 0, "region {}", region.region);
        }
    }

    #[test]
    fn sphere_r1_orbits_never_leave_the_sphere() {
        let a = analyzer(5, 1, 5);
        let r1 = a.ladder().r(1);
        let sample =
            sample_sphere(&Padic::zero(p(5)), r1, 2, SampleMode::Exhaustive, 100, 32).unwrap();
        for x in &sample.points {
            let record = a.map().iterate(x, 200);
            assert!(record.stopped_early.is_none());
            assert!(record.norm_trace.iter().all(|n| *n == r1));
        }
    }

    #[test]
    fn annulus_image_law_squares_radius_times_a() {
        // For r1 < |x| < |a| with |x| != r0: |f(x)| = |x|^2 * |a| exactly.
        let a = analyzer(5, 1, 125);
        let v_a = a.map().a_valuation(); // -3
        for e in [1i64, 2, -1, -2] {
            let sample = sample_sphere(
                &Padic::zero(p(5)),
                Norm::Finite(e),
                2,
                SampleMode::Exhaustive,
                100,
                32,
            )
            .unwrap();
            for x in &sample.points {
                let image = a.map().eval(x).unwrap();
                assert_eq!(image.norm(), Norm::Finite(2 * e + v_a), "|x| exponent {e}");
            }
        }
    }

    #[test]
    fn basin_report_rejects_contracting_regime() {
        let a = analyzer(7, 7, 1);
        assert!(matches!(
            a.basin_report(&SampleSpec::default()),
            Err(BasinError::RegimeMismatch)
        ));
    }

    #[test]
    fn non_theorem_regime_is_flagged() {
        // v(a) = -2 even: sqrt(|a|) = 5 is a power of p.
        let a = analyzer(5, 1, 25);
        assert!(a.non_theorem_regime());
        let a = analyzer(5, 1, 5);
        assert!(!a.non_theorem_regime());
        let a = analyzer(5, 25, 1); // v(a) = 2 even, contracting: not flagged
        assert!(!a.non_theorem_regime());
    }

    #[test]
    fn siegel_spheres_are_invariant_around_x3() {
        let a = analyzer(5, 1, 5);
        let x3 = a.fixed_point(FixedPointLabel::X3).unwrap();
        let spec = SiegelSpec {
            shells: 3,
            per_radius: 10,
            depth: 2,
            mode: SampleMode::Exhaustive,
            n_iter: 50,
        };
        let report = a.siegel_check(x3, a.ladder().r(1), &spec).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.points > 0);
    }

    #[test]
    fn siegel_check_requires_indifference() {
        let a = analyzer(5, 1, 5);
        let x2 = a.fixed_point(FixedPointLabel::X2).unwrap();
        assert!(matches!(
            a.siegel_check(x2, a.ladder().r(1), &SiegelSpec::default()),
            Err(BasinError::NotIndifferent)
        ));
    }

    #[test]
    fn siegel_boundary_open_at_p7() {
        let a = analyzer(7, 7, 1);
        let x2 = a.fixed_point(FixedPointLabel::X2).unwrap();
        let report = a.siegel_boundary(x2).unwrap();
        assert_eq!(report.boundary, "open_ball");
        assert!(report.sqrt_minus_3_exists);
        assert!(report.witness_digits.is_some());
        assert!(report.witness_expression_exponent.is_none_or(|e| e > 0));
        assert!(!report.discs_coincide);
    }

    #[test]
    fn siegel_boundary_closed_at_p5() {
        let a = analyzer(5, 5, 1);
        let x3 = a.fixed_point(FixedPointLabel::X3).unwrap();
        let report = a.siegel_boundary(x3).unwrap();
        assert_eq!(report.boundary, "closed_ball");
        assert!(!report.sqrt_minus_3_exists);
        assert_eq!(report.residues_checked, 4);
        assert!(!report.discs_coincide);
    }

    #[test]
    fn siegel_discs_coincide_at_p2() {
        let a = analyzer(2, 8, 1);
        let x2 = a.fixed_point(FixedPointLabel::X2).unwrap();
        let report = a.siegel_boundary(x2).unwrap();
        assert_eq!(report.boundary, "closed_ball");
        assert!(report.discs_coincide);
    }

    #[test]
    fn siegel_boundary_rejects_p3_and_wrong_regime() {
        let a = analyzer(3, 3, 1);
        let x2 = a.fixed_point(FixedPointLabel::X2).unwrap();
        assert!(matches!(
            a.siegel_boundary(x2),
            Err(BasinError::PrimeOutOfScope)
        ));
        let a = analyzer(5, 1, 5);
        let x3 = a.fixed_point(FixedPointLabel::X3).unwrap();
        assert!(matches!(
            a.siegel_boundary(x3),
            Err(BasinError::RegimeMismatch)
        ));
    }

    #[test]
    fn verify_expanding_regime_passes() {
        let a = analyzer(5, 1, 5);
        let spec = VerifySpec {
            depth: 2,
            max_iter: 200,
            invariance_iters: 50,
            ..VerifySpec::default()
        };
        let report = a.verify_theorem(&spec).unwrap();
        for item in &report.items {
            assert_eq!(
                item.status,
                ItemStatus::Pass,
                "{}: {}",
                item.name,
                item.details
            );
        }
        assert!(report.passes(true));
    }

    #[test]
    fn verify_contracting_regime_p3_attractors() {
        let a = analyzer(3, 3, 1);
        let spec = VerifySpec {
            depth: 2,
            max_iter: 100,
            invariance_iters: 50,
            ..VerifySpec::default()
        };
        let report = a.verify_theorem(&spec).unwrap();
        let attractors = report
            .items
            .iter()
            .find(|i| i.name == "attractors_x_sigma")
            .unwrap();
        assert_eq!(
            attractors.status,
            ItemStatus::Pass,
            "{}",
            attractors.details
        );
        let interior = report
            .items
            .iter()
            .find(|i| i.name == "basin_x1_interior")
            .unwrap();
        assert_eq!(interior.status, ItemStatus::Pass);
        assert!(report.passes(true));
    }

    #[test]
    fn verify_contracting_regime_p2_coincident_discs() {
        let a = analyzer(2, 8, 1);
        let spec = VerifySpec {
            depth: 3,
            max_iter: 100,
            invariance_iters: 50,
            ..VerifySpec::default()
        };
        let report = a.verify_theorem(&spec).unwrap();
        let coincide = report
            .items
            .iter()
            .find(|i| i.name == "siegel_discs_coincide")
            .unwrap();
        assert_eq!(coincide.status, ItemStatus::Pass, "{}", coincide.details);
        assert!(report.passes(true));
    }

    #[test]
    fn verify_flags_non_theorem_regime() {
        let a = analyzer(5, 1, 25);
        let spec = VerifySpec {
            depth: 2,
            max_iter: 100,
            invariance_iters: 30,
            ..VerifySpec::default()
        };
        let report = a.verify_theorem(&spec).unwrap();
        assert!(report.non_theorem_regime);
        let basin = report
            .items
            .iter()
            .find(|i| i.name == "basin_structure")
            .unwrap();
        assert_eq!(basin.status, ItemStatus::Undecided);
    }

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<usize> = (0..1000).collect();
        let out = parallel_map(&items, |x| x * 2);
        assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
