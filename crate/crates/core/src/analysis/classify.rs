use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contraction::{hsc, FramePair};
use super::minimize::{best_of, min_hbc_stream, min_hsc_stream, stream_rng, MinimizeOptions, Minimum};
use crate::calculus::{ComplexVector, Point};
use crate::error::{GeometryError, Result};
use crate::hopf::{hopf_curvature, lambda_of_t, HopfFamily, LambdaMetric};

/// Values below this are genuinely negative; `[-NEGATIVE_THRESHOLD, 0)` is noise.
pub const NEGATIVE_THRESHOLD: f64 = 1e-9;

/// Stream reserved for drawing sample points.
const POINT_STREAM: u64 = u32::MAX as u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Nonneg,
    Negative,
    GapExplored,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Nonneg => "nonneg",
            Verdict::Negative => "negative",
            Verdict::GapExplored => "gap-explored",
        }
    }
}

/// Which curvature region a parameter falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `lambda in [0, 1)`: bisectional curvature claimed non-negative.
    Nonneg,
    /// `lambda in [-1, 0)`: no claim either way.
    Gap,
    /// `lambda < -1`: sectional (hence bisectional) curvature claimed to go negative.
    Negative,
}

pub fn regime(lambda: f64) -> Regime {
    if lambda >= 0.0 {
        Regime::Nonneg
    } else if lambda >= -1.0 {
        Regime::Gap
    } else {
        Regime::Negative
    }
}

/// A point, frame and the curvature value it attains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub z: Point,
    pub frame: FramePair,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub t: Option<f64>,
    pub lambda: f64,
    pub min_hbc: f64,
    pub min_hsc: f64,
    /// Frame attaining `min_hbc`.
    pub minimizer: Witness,
    /// Constructed negativity witness (only for `lambda < -1`).
    pub witness: Option<Witness>,
    pub verdict: Verdict,
    pub samples: usize,
    pub starts: usize,
    pub seed: u64,
}

/// A unit `xi` with `sum_i zbar^i xi^i = 0`, paired with itself, for `lambda < -1`.
///
/// Built by projecting the standard basis vector least aligned with `z` onto
/// the orthogonal complement of `z`. Its sectional curvature is
/// `b^2 (lambda + 1) / |z|^8` with `a = 0`, `b = |z|^2`.
pub fn negative_witness(lambda: f64, z: &Point) -> Result<FramePair> {
    if !(lambda < -1.0) {
        return Err(GeometryError::ParameterOutOfRange(format!("witness needs lambda < -1, got {lambda}")));
    }
    let n = z.dim();
    if n < 2 {
        return Err(GeometryError::ParameterOutOfRange("witness needs n >= 2".into()));
    }
    z.require_nonzero()?;
    let m = (0..n)
        .min_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm()))
        .expect("n >= 2");
    let r2 = z.norm_sqr();
    let coeff = z[m].conj() / r2;
    let xi: Vec<Complex64> = (0..n)
        .map(|i| if i == m { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) } - z[i] * coeff)
        .collect();
    FramePair::diagonal(&ComplexVector::new(xi)?)
}

/// Expected sectional curvature of the witness frame.
pub fn witness_value(lambda: f64, z: &Point) -> f64 {
    let r2 = z.norm_sqr();
    let b = r2;
    b * b * (lambda + 1.0) / r2.powi(4)
}

/// `samples` points on the unit sphere, fixed by `seed`.
pub fn sample_points(n: usize, samples: usize, seed: u64) -> Vec<Point> {
    let mut rng = stream_rng(seed, POINT_STREAM, 0);
    (0..samples).map(|_| ComplexVector::random_unit(n, &mut rng)).collect()
}

struct SampleOutcome {
    hbc: Minimum,
    hsc: Minimum,
    z: Point,
}

fn pick_min<'a>(outcomes: &'a [SampleOutcome], key: impl Fn(&SampleOutcome) -> &Minimum) -> &'a SampleOutcome {
    let best = best_of(outcomes.iter().map(&key).cloned().collect()).expect("non-empty");
    outcomes.iter().find(|o| *key(o) == best).expect("present")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Hsc,
    Hbc,
}

impl std::str::FromStr for Quantity {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hsc" => Ok(Quantity::Hsc),
            "hbc" => Ok(Quantity::Hbc),
            other => Err(GeometryError::InvalidInput(format!("unknown quantity '{other}' (expected hsc or hbc)"))),
        }
    }
}

/// Empirical minimum of one curvature quantity of `omega_lambda` over
/// sampled unit points. For `lambda < -1` the negativity witness at the first
/// sample is among the starts.
pub fn empirical_min(n: usize, lambda: f64, quantity: Quantity, samples: usize, opts: &MinimizeOptions) -> Result<f64> {
    if samples == 0 {
        return Err(GeometryError::InvalidInput("at least one sample point is required".into()));
    }
    let metric = LambdaMetric::new(n, lambda)?;
    let points = sample_points(n, samples, opts.seed);
    let seeded = if lambda < -1.0 { Some(negative_witness(lambda, &points[0])?) } else { None };
    let mins = points
        .par_iter()
        .enumerate()
        .map(|(s, z)| {
            let r = hopf_curvature(&metric, z)?;
            let extra: Vec<FramePair> = seeded.iter().filter(|_| s == 0).cloned().collect();
            match quantity {
                Quantity::Hbc => min_hbc_stream(&r, opts, &extra, s as u64),
                Quantity::Hsc => {
                    let xis: Vec<ComplexVector> = extra.into_iter().map(|f| f.xi).collect();
                    min_hsc_stream(&r, opts, &xis, s as u64)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(mins).expect("non-empty").value)
}

/// Empirical curvature minima of `omega_lambda` over sampled unit points.
pub fn classify_lambda(n: usize, lambda: f64, samples: usize, opts: &MinimizeOptions) -> Result<SignReport> {
    classify_inner(n, lambda, None, samples, opts)
}

/// Sign classification of `omega(t)`. The curvature of `omega(t)` is that of
/// `omega_lambda(t)` up to the positive factor `1 + T0 - n t`, so signs are
/// read off the rescaled metric.
pub fn classify_time(fam: &HopfFamily, t: f64, samples: usize, opts: &MinimizeOptions) -> Result<SignReport> {
    let lambda = lambda_of_t(fam, t)?;
    classify_inner(fam.n(), lambda, Some(t), samples, opts)
}

fn classify_inner(
    n: usize,
    lambda: f64,
    t: Option<f64>,
    samples: usize,
    opts: &MinimizeOptions,
) -> Result<SignReport> {
    if samples == 0 {
        return Err(GeometryError::InvalidInput("at least one sample point is required".into()));
    }
    classify_points(n, lambda, t, &sample_points(n, samples, opts.seed), opts)
}

/// Classification over caller-supplied points.
pub fn classify_points(
    n: usize,
    lambda: f64,
    t: Option<f64>,
    points: &[Point],
    opts: &MinimizeOptions,
) -> Result<SignReport> {
    if points.is_empty() {
        return Err(GeometryError::InvalidInput("at least one sample point is required".into()));
    }
    let metric = LambdaMetric::new(n, lambda)?;
    let reg = regime(lambda);

    let witness = if reg == Regime::Negative {
        let z = points[0].clone();
        let frame = negative_witness(lambda, &z)?;
        let value = hsc(&hopf_curvature(&metric, &z)?, &frame.xi)?;
        Some(Witness { z, frame, value })
    } else {
        None
    };

    let outcomes = points
        .par_iter()
        .enumerate()
        .map(|(s, z)| {
            let r = hopf_curvature(&metric, z)?;
            let (extra_pair, extra_xi) = match (&witness, s) {
                (Some(w), 0) => (vec![w.frame.clone()], vec![w.frame.xi.clone()]),
                _ => (vec![], vec![]),
            };
            Ok(SampleOutcome {
                hbc: min_hbc_stream(&r, opts, &extra_pair, s as u64)?,
                hsc: min_hsc_stream(&r, opts, &extra_xi, s as u64)?,
                z: z.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best_hbc = pick_min(&outcomes, |o| &o.hbc);
    let best_hsc = pick_min(&outcomes, |o| &o.hsc);
    let min_hbc = best_hbc.hbc.value;
    let verdict = match reg {
        Regime::Gap => Verdict::GapExplored,
        _ if min_hbc < -NEGATIVE_THRESHOLD => Verdict::Negative,
        _ => Verdict::Nonneg,
    };
    Ok(SignReport {
        t,
        lambda,
        min_hbc,
        min_hsc: best_hsc.hsc.value,
        minimizer: Witness { z: best_hbc.z.clone(), frame: best_hbc.hbc.frame.clone(), value: min_hbc },
        witness,
        verdict,
        samples: points.len(),
        starts: opts.starts,
        seed: opts.seed,
    })
}
