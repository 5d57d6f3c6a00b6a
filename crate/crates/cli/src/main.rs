//! Command-line front end: configure a map, run analyses, emit reports.
//!
//! Exit codes: 0 success, 1 failed verification items, 2 invalid
//! configuration (including `|a|_p = 1`), 3 precision exhausted.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use padic_dyn_core::{
    report, Analyzer, BasinError, CubicMap, DynamicsError, FixedPointsReport, HenselError, Norm,
    OrbitReport, OrbitStep, Padic, PadicError, PointRow, Prime, SampleMode, StopReason,
    TheoremReport, VerifySpec, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "padic-dyn",
    version,
    about = "Exact p-adic analyzer for the cubic dynamical system f(x) = x^3 + a*x^2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and classify the fixed points of the map.
    FixedPoints {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Iterate a starting point, print its norm trace and orbit fate.
    Orbit {
        #[command(flatten)]
        common: CommonArgs,
        /// Starting point as an exact rational n/d.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Run the full structural checklist for the map's regime.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Treat UNDECIDED items as failures for the exit code.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Prime p.
    #[arg(long)]
    p: u64,
    /// Map parameter as an exact rational n/d; decimal input is not accepted.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Working precision: number of exact unit digits per value.
    #[arg(long, default_value_t = 32)]
    precision: usize,
    /// Iteration budget per orbit.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Enumeration depth: unit digits fixed per sampled sphere.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Sphere sampling mode.
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    /// Seed for random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated points per sphere.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

enum AppError {
    Config(String),
    Precision(String),
    Analysis(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Precision(_) => 3,
            AppError::Analysis(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Config(m) | AppError::Precision(m) | AppError::Analysis(m) => m,
        }
    }
}

fn classify_padic_error(e: &PadicError) -> Option<AppError> {
    match e {
        PadicError::PrecisionExhausted => Some(AppError::Precision(e.to_string())),
        _ => None,
    }
}

impl From<PadicError> for AppError {
    fn from(e: PadicError) -> AppError {
        classify_padic_error(&e).unwrap_or(AppError::Config(e.to_string()))
    }
}

impl From<DynamicsError> for AppError {
    fn from(e: DynamicsError) -> AppError {
        match &e {
            DynamicsError::ZeroParameter | DynamicsError::UnitNormParameter => {
                AppError::Config(format!(
                    "{e}: the analysis assumes a nonzero parameter with |a|_p != 1; \
                     the unit-norm case is out of scope"
                ))
            }
            DynamicsError::Arith(inner) => {
                classify_padic_error(inner).unwrap_or(AppError::Analysis(e.to_string()))
            }
            DynamicsError::Hensel(HenselError::Arith(inner)) => {
                classify_padic_error(inner).unwrap_or(AppError::Analysis(e.to_string()))
            }
            _ => AppError::Analysis(e.to_string()),
        }
    }
}

impl From<BasinError> for AppError {
    fn from(e: BasinError) -> AppError {
        match &e {
            BasinError::Arith(inner) => {
                classify_padic_error(inner).unwrap_or(AppError::Analysis(e.to_string()))
            }
            BasinError::Dynamics(inner) => inner.clone().into(),
            BasinError::Hensel(HenselError::Arith(inner)) => {
                classify_padic_error(inner).unwrap_or(AppError::Analysis(e.to_string()))
            }
            BasinError::BudgetExceeded { .. }
            | BasinError::InvalidDepth
            | BasinError::ZeroRadius
            | BasinError::RegimeMismatch => AppError::Config(e.to_string()),
            _ => AppError::Analysis(e.to_string()),
        }
    }
}

fn parse_rational(s: &str) -> Result<(i64, i64), AppError> {
    let bad = |_| {
        AppError::Config(format!(
            "`{s}` is not an exact rational of the form n or n/d"
        ))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let num: i64 = n.trim().parse().map_err(bad)?;
            let den: i64 = d.trim().parse().map_err(bad)?;
            if den == 0 {
                return Err(AppError::Config("denominator must be nonzero".to_string()));
            }
            Ok((num, den))
        }
        None => Ok((s.trim().parse().map_err(bad)?, 1)),
    }
}

fn build_map(common: &CommonArgs) -> Result<CubicMap, AppError> {
    if common.precision == 0 {
        return Err(AppError::Config("precision must be at least 1".to_string()));
    }
    let prime = Prime::new(common.p)?;
    let (num, den) = parse_rational(&common.a)?;
    Ok(CubicMap::from_rational(prime, num, den, common.precision)?)
}

fn emit(common: &CommonArgs, body: String) -> Result<(), AppError> {
    match &common.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| AppError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn norm_text(p: u64, norm: Norm) -> String {
    match norm.exponent() {
        None => "0".to_string(),
        Some(e) => format!("{p}^{}", -e),
    }
}

fn cmd_fixed_points(common: &CommonArgs) -> Result<u8, AppError> {
    let map = build_map(common)?;
    let points = map.fixed_points().map_err(AppError::from)?;
    let n = map.precision();
    match common.format {
        Format::Text => {
            let mut body = String::new();
            for fp in &points {
                body.push_str(&format!(
                    "{}: value={} |x|={} |lambda|={} kind={}\n",
                    fp.label.as_str(),
                    fp.value.digit_string(n),
                    norm_text(common.p, fp.value.norm()),
                    norm_text(common.p, fp.lambda_norm),
                    fp.kind.as_str(),
                ));
            }
            emit(common, body)?;
        }
        Format::Json => {
            let report = FixedPointsReport {
                schema_version: SCHEMA_VERSION,
                report: "fixed_points".to_string(),
                map: report::MapSummary::new(&map),
                points: points
                    .iter()
                    .map(|fp| report::FixedPointRow::new(fp, n))
                    .collect(),
            };
            emit(common, report::to_json(&report))?;
        }
        Format::Csv => {
            let mut body = String::from("label,digits,valuation,lambda_exponent,kind\n");
            for fp in &points {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fp.label.as_str(),
                    fp.value.digit_string(n),
                    fp.value
                        .valuation()
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                    fp.lambda_norm
                        .exponent()
                        .map(|e| e.to_string())
                        .unwrap_or_default(),
                    fp.kind.as_str(),
                ));
            }
            emit(common, body)?;
        }
    }
    Ok(0)
}

fn cmd_orbit(common: &CommonArgs, x: &str) -> Result<u8, AppError> {
    let map = build_map(common)?;
    let (num, den) = parse_rational(x)?;
    let start = Padic::from_rational(num, den, map.prime(), common.precision)?;
    let analyzer = Analyzer::new(map).map_err(AppError::from)?;
    let fate = analyzer.classify_point(&start, common.max_iter);
    let trace_len = (fate.steps_used + 1).min(common.max_iter);
    let record = analyzer.map().iterate(&start, trace_len);
    let n = common.precision;
    let steps: Vec<OrbitStep> = record
        .states
        .iter()
        .enumerate()
        .map(|(step, state)| OrbitStep {
            step,
            valuation: state.valuation(),
            norm_exponent: state.norm().exponent(),
            digits: state.digit_string(8),
        })
        .collect();
    let stopped = record.stopped_early.map(|s| match s.reason {
        StopReason::PrecisionExhausted => "precision_exhausted".to_string(),
        StopReason::ValuationOverflow => "valuation_overflow".to_string(),
    });
    match common.format {
        Format::Text => {
            let mut body = String::new();
            for s in &steps {
                let norm = match s.norm_exponent {
                    None => "0".to_string(),
                    Some(e) => format!("{}^{}", common.p, -e),
                };
                body.push_str(&format!(
                    "step {:>3}: |x| = {:<10} x = {}\n",
                    s.step, norm, s.digits
                ));
            }
            if let Some(reason) = &stopped {
                body.push_str(&format!("orbit stopped early: {reason}\n"));
            }
            body.push_str(&format!(
                "verdict: {} (steps_used={})\n",
                fate.verdict.label(),
                fate.steps_used
            ));
            emit(common, body)?;
        }
        Format::Json => {
            let report = OrbitReport {
                schema_version: SCHEMA_VERSION,
                report: "orbit".to_string(),
                map: report::MapSummary::new(analyzer.map()),
                start: start.digit_string(n),
                trace: steps,
                verdict: fate.verdict.label(),
                steps_used: fate.steps_used,
                stopped_early: stopped,
            };
            emit(common, report::to_json(&report))?;
        }
        Format::Csv => {
            let rows: Vec<PointRow> = record
                .states
                .iter()
                .enumerate()
                .map(|(step, state)| PointRow {
                    digits: state.digit_string(n),
                    valuation: state.valuation(),
                    verdict: fate.verdict.label(),
                    steps: step,
                })
                .collect();
            emit(common, report::rows_to_csv(&rows))?;
        }
    }
    Ok(0)
}

fn verify_report(common: &CommonArgs) -> Result<TheoremReport, AppError> {
    let map = build_map(common)?;
    let analyzer = Analyzer::new(map).map_err(AppError::from)?;
    let mode = match common.mode {
        Mode::Exhaustive => SampleMode::Exhaustive,
        Mode::Random => SampleMode::Random { seed: common.seed },
    };
    let spec = VerifySpec {
        depth: common.depth,
        mode,
        budget: common.budget,
        max_iter: common.max_iter,
        invariance_iters: 200,
    };
    analyzer.verify_theorem(&spec).map_err(AppError::from)
}

fn cmd_verify(common: &CommonArgs, strict: bool) -> Result<u8, AppError> {
    let report = verify_report(common)?;
    match common.format {
        Format::Text => {
            let mut body = String::new();
            body.push_str(&format!(
                "map: p={} a={} regime={}{}\n",
                report.map.p,
                report.map.a,
                report.map.regime,
                if report.non_theorem_regime {
                    " [NON_THEOREM_REGIME]"
                } else {
                    ""
                }
            ));
            for item in &report.items {
                let status = match item.status {
                    report::ItemStatus::Pass => "PASS",
                    report::ItemStatus::Fail => "FAIL",
                    report::ItemStatus::Undecided => "UNDECIDED",
                };
                body.push_str(&format!("{status:<9} {} — {}\n", item.name, item.details));
            }
            emit(common, body)?;
        }
        Format::Json => emit(common, report::to_json(&report))?,
        Format::Csv => emit(common, report::rows_to_csv(&report.rows))?,
    }
    Ok(if report.passes(strict) { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::FixedPoints { common } => cmd_fixed_points(common),
        Command::Orbit { common, x } => cmd_orbit(common, x),
        Command::Verify { common, strict } => cmd_verify(common, *strict),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
