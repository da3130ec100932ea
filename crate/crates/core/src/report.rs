//! Run configuration, report assembly and serialization for the command line.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    classify_lambda, classify_points, classify_time, threshold_bisect, MinimizeOptions, Quantity, SignReport,
    ThresholdOptions, ThresholdResult, NEGATIVE_THRESHOLD,
};
use crate::calculus::{ComplexVector, Point};
use crate::chern::curvature_numeric;
use crate::error::{GeometryError, Result};
use crate::flow::{check_end_time, flow_trace, time_grid, FlowTrace, DEFAULT_STOP_FRACTION};
use crate::hopf::{hopf_curvature, HopfFamily, LambdaMetric};
use crate::verify::{run_suite, SuiteReport};

pub const CSV_HEADER: [&str; 6] = ["t", "lambda", "det_factor", "min_hsc", "min_hbc", "verdict"];
/// Closed-form vs numeric curvature, relative to the largest component.
pub const ORACLE_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tensor,
    MinBisec,
    Flow,
    Threshold,
    ScanLambda,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(GeometryError::InvalidInput(format!("unknown format '{other}'"))),
        }
    }
}

/// One complex entry: `a`, `a+bi` or `a-bi`.
fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || GeometryError::InvalidInput(format!("malformed complex literal '{s}'"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let (re, im) = body.split_at(split);
    let im = &im[1..];
    if im.is_empty() || im.starts_with(['+', '-']) {
        return Err(bad());
    }
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    let sign = if bytes[split] == b'-' { -1.0 } else { 1.0 };
    Ok(Complex64::new(re, sign * im))
}

/// Comma-separated complex literals, whitespace ignored.
pub fn parse_point(s: &str) -> Result<Point> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(GeometryError::InvalidInput("empty point literal".into()));
    }
    let entries = compact.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    ComplexVector::new(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub t0: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub t: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub z: Option<Point>,
    pub starts: usize,
    pub samples: Option<usize>,
    pub seed: u64,
    pub quantity: Quantity,
    pub resolution: f64,
    pub near_tmax: bool,
    pub out: Option<String>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            n: None,
            t0: None,
            lambda: None,
            lambda_min: None,
            lambda_max: None,
            t: None,
            t_end: None,
            steps: None,
            z: None,
            starts: MinimizeOptions::default().starts,
            samples: None,
            seed: 42,
            quantity: Quantity::Hbc,
            resolution: 1e-4,
            near_tmax: false,
            out: None,
            format: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_some() && self.t.is_some() {
            return Err(GeometryError::InvalidInput("give either --lambda or --t, not both".into()));
        }
        if self.starts == 0 {
            return Err(GeometryError::InvalidInput("--starts must be positive".into()));
        }
        if self.samples == Some(0) {
            return Err(GeometryError::InvalidInput("--samples must be positive".into()));
        }
        if let (Some(z), Some(n)) = (&self.z, self.n) {
            if z.dim() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, got: z.dim() });
            }
        }
        Ok(())
    }

    fn minimize(&self) -> MinimizeOptions {
        MinimizeOptions { starts: self.starts, seed: self.seed, ..MinimizeOptions::default() }
    }

    fn require_n(&self) -> Result<usize> {
        self.n
            .or_else(|| self.z.as_ref().map(|z| z.dim()))
            .ok_or_else(|| GeometryError::InvalidInput("--n is required".into()))
    }

    fn family(&self) -> Result<HopfFamily> {
        let t0 = self.t0.ok_or_else(|| GeometryError::InvalidInput("--T0 is required".into()))?;
        HopfFamily::new(self.require_n()?, t0)
    }

    fn require_lambda(&self) -> Result<f64> {
        self.lambda.ok_or_else(|| GeometryError::InvalidInput("--lambda is required".into()))
    }

    fn output_format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Flow => Format::Csv,
            _ => Format::Json,
        })
    }
}

/// Numerical thresholds in force for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub negative_threshold: f64,
    pub oracle_relative: f64,
    pub minimizer_tol: f64,
    pub minimizer_max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let m = MinimizeOptions::default();
        Self {
            negative_threshold: NEGATIVE_THRESHOLD,
            oracle_relative: ORACLE_TOLERANCE,
            minimizer_tol: m.tol,
            minimizer_max_iter: m.max_iter,
        }
    }
}

/// One curvature component with 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub k: usize,
    pub j: usize,
    pub i: usize,
    pub q: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorResult {
    pub n: usize,
    pub lambda: f64,
    pub z: Point,
    pub components: Vec<Component>,
    /// `max |numeric - closed| / max |closed|`.
    pub deviation: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "data")]
pub enum Results {
    Tensor(TensorResult),
    MinBisec(SignReport),
    Flow(FlowTrace),
    Threshold(ThresholdResult),
    ScanLambda(Vec<SignReport>),
    Verify(SuiteReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub results: Results,
}

impl Report {
    fn new(config: &RunConfig, results: Results) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            tolerances: Tolerances::default(),
            results,
        }
    }

    /// Suggested process exit code: 1 for a failed suite, 3 for a tolerance breach.
    pub fn exit_code(&self) -> i32 {
        match &self.results {
            Results::Verify(s) if !s.passed => 1,
            Results::Tensor(t) if !t.within_tolerance => 3,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|s| s + "\n")
            .map_err(|e| GeometryError::InvalidInput(format!("serialization failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| GeometryError::InvalidInput(format!("malformed report: {e}")))
    }

    /// Renders in the configured format.
    pub fn render(&self) -> Result<String> {
        match self.config.output_format() {
            Format::Json => self.to_json(),
            Format::Csv => match &self.results {
                Results::Flow(trace) => flow_csv(trace),
                Results::ScanLambda(reports) => scan_csv(reports),
                _ => Err(GeometryError::InvalidInput("csv output is only available for flow and scan-lambda".into())),
            },
        }
    }

    /// Plain-text summary of a verification run, one line per check.
    pub fn verify_text(&self) -> Option<String> {
        let Results::Verify(suite) = &self.results else { return None };
        let mut out = String::new();
        for c in &suite.checks {
            let _ = writeln!(out, "{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.detail);
        }
        let failed = suite.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "seed {}: {} checks, {} failed", suite.seed, suite.checks.len(), failed);
        Some(out)
    }
}

/// 17 significant digits.
pub fn format_double(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_rows(rows: impl Iterator<Item = [String; 6]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| GeometryError::InvalidInput(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| GeometryError::InvalidInput(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| GeometryError::InvalidInput(format!("csv: {e}")))
}

pub fn flow_csv(trace: &FlowTrace) -> Result<String> {
    csv_rows(trace.rows.iter().map(|r| {
        [
            format_double(r.t),
            format_double(r.lambda),
            format_double(r.det_factor),
            format_double(r.min_hsc),
            format_double(r.min_hbc),
            r.verdict.as_str().to_string(),
        ]
    }))
}

/// A lambda scan has no time axis; `t` and `det_factor` are left empty.
pub fn scan_csv(reports: &[SignReport]) -> Result<String> {
    csv_rows(reports.iter().map(|r| {
        [
            String::new(),
            format_double(r.lambda),
            String::new(),
            format_double(r.min_hsc),
            format_double(r.min_hbc),
            r.verdict.as_str().to_string(),
        ]
    }))
}

pub fn cmd_tensor(cfg: &RunConfig) -> Result<Report> {
    let n = cfg.require_n()?;
    let lambda = cfg.require_lambda()?;
    let z = cfg.z.clone().unwrap_or_else(|| ComplexVector::basis(n, 0));
    let metric = LambdaMetric::new(n, lambda)?;
    let closed = hopf_curvature(&metric, &z)?;
    let numeric = curvature_numeric(&metric, &z)?;
    let deviation = numeric.relative_deviation(&closed);
    let mut components = Vec::with_capacity(n.pow(4));
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for q in 0..n {
                    components.push(Component { k: k + 1, j: j + 1, i: i + 1, q: q + 1, value: closed.get(k, j, i, q) });
                }
            }
        }
    }
    Ok(Report::new(
        cfg,
        Results::Tensor(TensorResult { n, lambda, z, components, deviation, within_tolerance: deviation <= ORACLE_TOLERANCE }),
    ))
}

pub fn cmd_min_bisec(cfg: &RunConfig) -> Result<Report> {
    let opts = cfg.minimize();
    let samples = cfg.samples.unwrap_or(50);
    let rep = match (cfg.lambda, cfg.t) {
        (Some(lambda), None) => match &cfg.z {
            Some(z) => classify_points(z.dim(), lambda, None, std::slice::from_ref(z), &opts)?,
            None => classify_lambda(cfg.require_n()?, lambda, samples, &opts)?,
        },
        (None, Some(t)) => {
            let fam = cfg.family()?;
            match &cfg.z {
                Some(z) => {
                    let lambda = crate::hopf::lambda_of_t(&fam, t)?;
                    classify_points(fam.n(), lambda, Some(t), std::slice::from_ref(z), &opts)?
                }
                None => classify_time(&fam, t, samples, &opts)?,
            }
        }
        _ => return Err(GeometryError::InvalidInput("min-bisec needs --lambda, or --T0 with --t".into())),
    };
    Ok(Report::new(cfg, Results::MinBisec(rep)))
}

pub fn cmd_flow(cfg: &RunConfig) -> Result<Report> {
    let fam = cfg.family()?;
    let t_end = cfg.t_end.unwrap_or(DEFAULT_STOP_FRACTION * fam.t_max());
    check_end_time(&fam, t_end, cfg.near_tmax)?;
    let times = time_grid(t_end, cfg.steps.unwrap_or(8));
    let trace = flow_trace(&fam, &times, cfg.samples.unwrap_or(20), &cfg.minimize())?;
    Ok(Report::new(cfg, Results::Flow(trace)))
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<Report> {
    let fam = cfg.family()?;
    let opts = ThresholdOptions { resolution: cfg.resolution, samples: cfg.samples.unwrap_or(8), minimize: cfg.minimize() };
    let res = threshold_bisect(&fam, cfg.quantity, &opts)?;
    Ok(Report::new(cfg, Results::Threshold(res)))
}

pub fn cmd_scan_lambda(cfg: &RunConfig) -> Result<Report> {
    let n = cfg.require_n()?;
    let lo = cfg.lambda_min.unwrap_or(-3.0);
    let hi = cfg.lambda_max.unwrap_or(0.99);
    if !(lo <= hi) {
        return Err(GeometryError::InvalidInput(format!("empty lambda range [{lo}, {hi}]")));
    }
    let lambdas = match cfg.lambda {
        Some(l) => vec![l],
        None => time_grid(hi - lo, cfg.steps.unwrap_or(9)).into_iter().map(|s| lo + s).collect(),
    };
    let opts = cfg.minimize();
    let samples = cfg.samples.unwrap_or(20);
    let reports = lambdas.iter().map(|&l| classify_lambda(n, l, samples, &opts)).collect::<Result<Vec<_>>>()?;
    Ok(Report::new(cfg, Results::ScanLambda(reports)))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    Ok(Report::new(cfg, Results::Verify(run_suite(cfg.seed))))
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.command {
        Command::Tensor => cmd_tensor(cfg),
        Command::MinBisec => cmd_min_bisec(cfg),
        Command::Flow => cmd_flow(cfg),
        Command::Threshold => cmd_threshold(cfg),
        Command::ScanLambda => cmd_scan_lambda(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

/// Process exit code for a failed run: 3 for numerical breakdown, 2 otherwise.
pub fn error_exit_code(err: &GeometryError) -> i32 {
    match err {
        GeometryError::ConvergenceFailure(_)
        | GeometryError::SymmetryViolation(_)
        | GeometryError::SingularMatrix(_)
        | GeometryError::BracketInvalid { .. } => 3,
        _ => 2,
    }
}
