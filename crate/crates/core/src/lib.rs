//! Exact p-adic arithmetic and an analyzer for the cubic dynamical system
//! `f(x) = x^3 + a*x^2` over Q_p with `|a|_p != 1`.
//!
//! * [`padic`] — the field Q_p at fixed relative precision, with exact
//!   integer-exponent norms.
//! * [`hensel`] — square-root existence tests and Hensel-lifted roots.
//! * [`dynamics`] — the cubic map, its fixed points and classification.
//! * [`basin`] — orbit fates, sphere sampling, stopping times, Siegel discs
//!   and end-to-end structure verification.
//! * [`report`] — JSON report shapes and the CSV projection.

pub mod basin;
pub mod dynamics;
pub mod hensel;
pub mod padic;
pub mod report;

pub use basin::{
    distance, in_open_ball, on_sphere, sample_ball, sample_sphere, Analyzer, BasinError, Dist,
    PointFate, RadiusLadder, SampleMode, SampleSpec, SiegelSpec, SphereSample, StoppingTime,
    StoppingTimeResult, Verdict, VerifySpec, DEFAULT_BUDGET, DEFAULT_DEPTH, DEFAULT_MAX_ITER,
};
pub use dynamics::{
    CubicMap, DynamicsError, FixedPoint, FixedPointLabel, OrbitRecord, OrbitStop, Regime,
    Stability, StopReason,
};
pub use hensel::{
    is_quadratic_residue, sqrt, sqrt_a2_plus_4_exists, sqrt_exists, sqrt_minus_3_exists,
    HenselError, SqrtExistence, SqrtReason,
};
pub use padic::{Norm, Padic, PadicError, Prime, DEFAULT_PRECISION};
pub use report::{
    rows_to_csv, to_json, BasinReport, FixedPointRow, FixedPointsReport, ItemStatus, MapSummary,
    OrbitReport, OrbitStep, PointRow, RegionTally, SiegelBoundaryReport, SiegelReport,
    StoppingSummary, TheoremItem, TheoremReport, SCHEMA_VERSION,
};
