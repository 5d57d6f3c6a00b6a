//! Serializable report shapes and the CSV projection.
//!
//! JSON is the canonical machine format: every report carries
//! `"schema_version": 1`, the map parameters as exact rationals, per-region
//! tallies and witnesses as digit strings. CSV is a flat projection with one
//! row per sampled point: `digits,valuation,verdict,steps`.

use serde::Serialize;

use crate::basin::Verdict;
use crate::dynamics::{CubicMap, FixedPoint, Regime};
use crate::padic::Padic;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct MapSummary {
    pub p: u64,
    /// The parameter as an exact rational `n/d`.
    pub a: String,
    pub a_valuation: i64,
    pub regime: String,
    pub precision: usize,
}

impl MapSummary {
    pub fn new(map: &CubicMap) -> MapSummary {
        let (num, den) = map.a_rational();
        MapSummary {
            p: map.prime().value(),
            a: if den == 1 {
                format!("{num}")
            } else {
                format!("{num}/{den}")
            },
            a_valuation: map.a_valuation(),
            regime: match map.regime() {
                Regime::ABig => "a_big".to_string(),
                Regime::ASmall => "a_small".to_string(),
            },
            precision: map.precision(),
        }
    }
}

/// One sampled point: digit string, valuation, verdict and step count.
#[derive(Debug, Clone, Serialize)]
pub struct PointRow {
    pub digits: String,
    pub valuation: Option<i64>,
    pub verdict: String,
    pub steps: usize,
}

impl PointRow {
    pub fn new(point: &Padic, max_digits: usize, verdict: &Verdict, steps: usize) -> PointRow {
        PointRow {
            digits: point.digit_string(max_digits),
            valuation: point.valuation(),
            verdict: verdict.label(),
            steps,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionTally {
    pub region: String,
    pub expected: String,
    pub points: usize,
    pub matches: usize,
    pub mismatches: usize,
    pub undecided: usize,
    /// Up to a handful of mismatch witnesses.
    pub witnesses: Vec<PointRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StoppingSummary {
    /// Target ball description.
    pub target: String,
    pub sampled: usize,
    /// Points already inside the target (counted as members of the
    /// finite-stopping-time set).
    pub already_inside: usize,
    /// Points entering the target at some step >= 1.
    pub entered: usize,
    pub never_within_budget: usize,
    pub d_members: usize,
    /// Agreement between "member of the stopping set" and "orbit converges
    /// to x1".
    pub fate_agreements: usize,
    pub fate_disagreements: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasinReport {
    pub schema_version: u32,
    pub report: String,
    pub map: MapSummary,
    pub non_theorem_regime: bool,
    pub regions: Vec<RegionTally>,
    pub stopping: StoppingSummary,
    /// Flat per-point rows; projected to CSV, omitted from JSON.
    #[serde(skip)]
    pub rows: Vec<PointRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ItemStatus {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremItem {
    pub name: String,
    pub status: ItemStatus,
    pub details: String,
}

impl TheoremItem {
    pub fn new(name: &str, status: ItemStatus, details: String) -> TheoremItem {
        TheoremItem {
            name: name.to_string(),
            status,
            details,
        }
    }

    pub fn pass_if(name: &str, ok: bool, details: String) -> TheoremItem {
        TheoremItem::new(
            name,
            if ok {
                ItemStatus::Pass
            } else {
                ItemStatus::Fail
            },
            details,
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SiegelReport {
    pub center: String,
    pub center_valuation: Option<i64>,
    /// Norm exponents of the checked radii.
    pub radii_exponents: Vec<i64>,
    pub points: usize,
    pub iterations: usize,
    pub violations: usize,
    pub witness: Option<PointRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiegelBoundaryReport {
    pub fixed_point: String,
    /// "open_ball" or "closed_ball".
    pub boundary: String,
    pub sqrt_minus_3_exists: bool,
    /// For the open case: a unit offset whose quadratic expression drops
    /// below norm one.
    pub witness_digits: Option<String>,
    pub witness_expression_exponent: Option<i64>,
    /// For the closed case: number of unit residues passing the norm-one
    /// equality.
    pub residues_checked: usize,
    /// The two maximal discs share every point (p = 2).
    pub discs_coincide: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub schema_version: u32,
    pub report: String,
    pub map: MapSummary,
    pub non_theorem_regime: bool,
    pub items: Vec<TheoremItem>,
    pub fixed_points: Vec<FixedPointRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basin_regions: Option<Vec<RegionTally>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopping: Option<StoppingSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub siegel: Vec<SiegelReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub siegel_boundary: Vec<SiegelBoundaryReport>,
    #[serde(skip)]
    pub rows: Vec<PointRow>,
}

impl TheoremReport {
    pub fn passes(&self, strict: bool) -> bool {
        self.items.iter().all(|i| match i.status {
            ItemStatus::Pass => true,
            ItemStatus::Fail => false,
            ItemStatus::Undecided => !strict,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointRow {
    pub label: String,
    pub digits: String,
    pub valuation: Option<i64>,
    pub norm_exponent: Option<i64>,
    pub lambda_exponent: Option<i64>,
    pub kind: String,
}

impl FixedPointRow {
    pub fn new(fp: &FixedPoint, max_digits: usize) -> FixedPointRow {
        FixedPointRow {
            label: fp.label.as_str().to_string(),
            digits: fp.value.digit_string(max_digits),
            valuation: fp.value.valuation(),
            norm_exponent: fp.value.norm().exponent(),
            lambda_exponent: fp.lambda_norm.exponent(),
            kind: fp.kind.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointsReport {
    pub schema_version: u32,
    pub report: String,
    pub map: MapSummary,
    pub points: Vec<FixedPointRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitStep {
    pub step: usize,
    pub valuation: Option<i64>,
    pub norm_exponent: Option<i64>,
    pub digits: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub schema_version: u32,
    pub report: String,
    pub map: MapSummary,
    pub start: String,
    pub trace: Vec<OrbitStep>,
    pub verdict: String,
    pub steps_used: usize,
    pub stopped_early: Option<String>,
}

/// Pretty JSON with a trailing newline; byte-stable across runs for equal
/// inputs.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report types always serialize");
    s.push('\n');
    s
}

/// `digits,valuation,verdict,steps` rows, one per sampled point.
pub fn rows_to_csv(rows: &[PointRow]) -> String {
    let mut out = String::from("digits,valuation,verdict,steps\n");
    for row in rows {
        let valuation = row.valuation.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.digits, valuation, row.verdict, row.steps
        ));
    }
    out
}
