//! Empirical location of the curvature sign change along the flow.
//!
//! The predicate is "empirical minimum < -1e-9" at time `t`, bisected inside
//! `[T0/n, (2 T0 + 1)/(2n)]`. On this family both HSC and HBC stay
//! non-negative up to and including `lambda = -1`, i.e. the upper bracket end,
//! so the predicate is usually false on the whole closed bracket. In that case
//! one probe at `hi + resolution` decides whether the change sits at the upper
//! end; the bisection then runs on `[lo, hi + resolution]` and `t*` is clamped
//! back into the bracket. If the probe is also false the bracket is reported
//! as invalid.

use serde::{Deserialize, Serialize};

use super::classify::{empirical_min, Quantity, NEGATIVE_THRESHOLD};
use super::minimize::MinimizeOptions;
use crate::error::{GeometryError, Result};
use crate::hopf::{lambda_of_t, thresholds, HopfFamily};

pub const MIN_RESOLUTION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub resolution: f64,
    pub samples: usize,
    pub minimize: MinimizeOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { resolution: 1e-4, samples: 8, minimize: MinimizeOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub quantity: Quantity,
    pub t_star: f64,
    /// Seeding bracket `[T0/n, (2 T0 + 1)/(2n)]`.
    pub bracket: [f64; 2],
    /// Last false / first true time of the predicate.
    pub final_interval: [f64; 2],
    /// True when the upper bracket end had to be probed from outside.
    pub probed_beyond: bool,
    pub evaluations: usize,
    pub resolution: f64,
    pub seed: u64,
}

struct Predicate<'a> {
    fam: &'a HopfFamily,
    quantity: Quantity,
    opts: &'a ThresholdOptions,
    calls: usize,
}

impl Predicate<'_> {
    fn negative_at(&mut self, t: f64) -> Result<bool> {
        self.calls += 1;
        let lambda = lambda_of_t(self.fam, t)?;
        let m = empirical_min(self.fam.n(), lambda, self.quantity, self.opts.samples, &self.opts.minimize)?;
        Ok(m < -NEGATIVE_THRESHOLD)
    }
}

pub fn threshold_bisect(fam: &HopfFamily, quantity: Quantity, opts: &ThresholdOptions) -> Result<ThresholdResult> {
    if !(opts.resolution >= MIN_RESOLUTION) || !opts.resolution.is_finite() {
        return Err(GeometryError::ParameterOutOfRange(format!(
            "resolution {} must be >= {MIN_RESOLUTION}",
            opts.resolution
        )));
    }
    let th = thresholds(fam);
    let (lo, hi) = (th.nonneg_end, th.neg_start);
    let invalid = || GeometryError::BracketInvalid { lo, hi };
    let mut pred = Predicate { fam, quantity, opts, calls: 0 };

    if pred.negative_at(lo)? {
        return Err(invalid());
    }
    let mut probed_beyond = false;
    let mut b = hi;
    if !pred.negative_at(hi)? {
        let probe = hi + opts.resolution;
        if probe >= th.t_max || !pred.negative_at(probe)? {
            return Err(invalid());
        }
        probed_beyond = true;
        b = probe;
    }
    let mut a = lo;
    while b - a > opts.resolution {
        let mid = 0.5 * (a + b);
        if pred.negative_at(mid)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    let t_star = (0.5 * (a + b)).clamp(lo, hi);
    Ok(ThresholdResult {
        quantity,
        t_star,
        bracket: [lo, hi],
        final_interval: [a, b],
        probed_beyond,
        evaluations: pred.calls,
        resolution: opts.resolution,
        seed: opts.minimize.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> ThresholdOptions {
        ThresholdOptions { samples: 4, minimize: MinimizeOptions { starts: 8, ..Default::default() }, ..Default::default() }
    }

    #[test]
    fn hsc_threshold_in_bracket() {
        let fam = HopfFamily::new(2, 1.0).unwrap();
        let r = threshold_bisect(&fam, Quantity::Hsc, &fast()).unwrap();
        assert!(r.t_star >= 0.5 && r.t_star <= 0.75, "{r:?}");
        assert!(r.final_interval[1] - r.final_interval[0] <= 1e-4);
        // sign change sits at lambda = -1
        assert!((r.t_star - 0.75).abs() <= 1e-4);
    }

    #[test]
    fn zero_t0_bracket() {
        let fam = HopfFamily::new(2, 0.0).unwrap();
        let r = threshold_bisect(&fam, Quantity::Hbc, &fast()).unwrap();
        assert!(r.t_star >= 0.0 && r.t_star <= 0.25);
    }

    #[test]
    fn reproducible() {
        let fam = HopfFamily::new(3, 2.0).unwrap();
        let a = threshold_bisect(&fam, Quantity::Hbc, &fast()).unwrap();
        let b = threshold_bisect(&fam, Quantity::Hbc, &fast()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_fine_resolution() {
        let fam = HopfFamily::new(2, 1.0).unwrap();
        let opts = ThresholdOptions { resolution: 1e-9, ..fast() };
        assert!(matches!(threshold_bisect(&fam, Quantity::Hsc, &opts), Err(GeometryError::ParameterOutOfRange(_))));
    }
}
