//! The verification suite behind `chernflow verify`: the acceptance criteria
//! plus every invariant of the library, each reduced to one pass/fail line.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    alternating_descent, classify_time, empirical_min, hbc, hopf_hsc_ab, hsc, min_hbc, negative_witness,
    threshold_bisect, ABForm, FramePair, MinimizeOptions, Quantity, ThresholdOptions, Verdict, NEGATIVE_THRESHOLD,
};
use crate::calculus::{
    hermitian_inverse_det, hermitian_min_eigen, wirtinger_derivative_with_step, ComplexVector, HermitianMatrix, Point,
    Wirtinger,
};
use crate::chern::{christoffel_numeric, curvature_numeric, curvature_numeric_with_steps, levi_form, ricci_numeric};
use crate::error::Result;
use crate::flow::{euler_flow, exact_flow_metric, FlowState, HopfExtension};
use crate::hopf::{
    hopf_christoffel, hopf_curvature, hopf_det, hopf_metric, hopf_metric_inverse, lambda_of_t, ricci_closed,
    thresholds, HopfFamily, LambdaMetric,
};
use crate::report::{cmd_min_bisec, cmd_tensor, flow_csv, Command, Report, RunConfig, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

type Outcome = Result<(bool, String)>;
type CheckFn = fn(u64) -> Outcome;

fn rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(tag);
    r
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Random Hopf sample: `n` in 2..=4, `lambda` in [-3, 0.99), `|z|` in [0.5, 2).
fn hopf_sample(r: &mut ChaCha8Rng) -> Result<(LambdaMetric, Point)> {
    let n = r.random_range(2..=4);
    let lambda = r.random_range(-3.0..0.99);
    let radius = r.random_range(0.5..2.0);
    Ok((LambdaMetric::new(n, lambda)?, ComplexVector::random_unit(n, r).scale(re(radius))))
}

fn random_hermitian(n: usize, r: &mut ChaCha8Rng) -> Result<HermitianMatrix> {
    HermitianMatrix::from_fn(n, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

fn fmt(x: f64) -> String {
    format!("{x:.3e}")
}

fn c1_curvature_oracle(seed: u64) -> Outcome {
    let start = Instant::now();
    let mut r = rng(seed, 1);
    let samples = (0..100).map(|_| hopf_sample(&mut r)).collect::<Result<Vec<_>>>()?;
    let devs = samples
        .par_iter()
        .map(|(m, z)| Ok(curvature_numeric(m, z)?.relative_deviation(&hopf_curvature(m, z)?)))
        .collect::<Result<Vec<f64>>>()?;
    let worst = devs.into_iter().fold(0.0, f64::max);
    let fast = start.elapsed() <= Duration::from_secs(10);
    Ok((
        worst <= 1e-5 && fast,
        format!("100 samples, worst relative deviation {} (tol 1e-5){}", fmt(worst), if fast { "" } else { ", over 10 s" }),
    ))
}

fn c2_identities(seed: u64) -> Outcome {
    let mut r = rng(seed, 2);
    let (mut inv, mut det_h, mut det_w, mut rep) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (m, z) = hopf_sample(&mut r)?;
        let n = m.n();
        let h = hopf_metric(&m, &z)?;
        let hinv = hopf_metric_inverse(&m, &z)?;
        for i in 0..n {
            for k in 0..n {
                let s: Complex64 = (0..n).map(|j| hinv.get(i, j) * h.get(k, j)).sum();
                inv = inv.max((s - re(if i == k { 1.0 } else { 0.0 })).norm());
            }
        }
        let want = (1.0 - m.lambda()) * z.norm_sqr().powi(-(n as i32));
        let (_, det) = hermitian_inverse_det(&h)?;
        det_h = det_h.max((det.re - want).abs() / want).max(det.im.abs() / want);

        let fam = HopfFamily::new(n, r.random_range(0.0..3.0))?;
        let t = r.random_range(0.0..0.999) * fam.t_max();
        let w = exact_flow_metric(&fam, t, &z)?;
        let want = fam.det_factor(t).powi(n as i32 - 1) * z.norm_sqr().powi(-(n as i32));
        let (_, det) = hermitian_inverse_det(&w)?;
        det_w = det_w.max((det.re - want).abs() / want);
        let hl = hopf_metric(&LambdaMetric::new(n, lambda_of_t(&fam, t)?)?, &z)?;
        rep = rep.max(hl.max_abs_diff(&w.scale(1.0 / fam.det_factor(t))) / hl.max_abs());
    }
    let worst = inv.max(det_h).max(det_w).max(rep);
    Ok((
        worst <= 1e-10,
        format!(
            "inverse {}, det h {}, det omega(t) {}, rescaling {} (tol 1e-10)",
            fmt(inv),
            fmt(det_h),
            fmt(det_w),
            fmt(rep)
        ),
    ))
}

fn c3_ricci_invariance(seed: u64) -> Outcome {
    let mut r = rng(seed, 3);
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let fam = HopfFamily::new(n, 1.0)?;
        let flat = LambdaMetric::new(n, 0.0)?;
        for _ in 0..10 {
            let z = ComplexVector::random_unit(n, &mut r);
            let closed = ricci_closed(&flat, &z)?;
            for frac in [0.0, 0.3, 0.6, 0.9] {
                let ric = ricci_numeric(&FlowState::new(fam, frac * fam.t_max())?, &z)?;
                worst = worst.max(ric.max_abs_diff(&closed));
            }
        }
    }
    Ok((worst <= 1e-6, format!("T0 = 1, n in {{2, 3}}, 10 unit points, worst {} (tol 1e-6)", fmt(worst))))
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

fn c4_nonneg(seed: u64) -> Outcome {
    let opts = MinimizeOptions { seed, ..Default::default() };
    let mut worst = f64::INFINITY;
    for n in [2, 3] {
        let fam = HopfFamily::new(n, 1.0)?;
        for t in grid(0.0, thresholds(&fam).nonneg_end, 10) {
            worst = worst.min(empirical_min(n, lambda_of_t(&fam, t)?, Quantity::Hbc, 50, &opts)?);
        }
    }
    Ok((worst >= -NEGATIVE_THRESHOLD, format!("smallest min_hbc {} (floor -1e-9)", fmt(worst))))
}

fn c5_negativity(seed: u64) -> Outcome {
    let opts = MinimizeOptions { seed, ..Default::default() };
    let (mut formula, mut largest, mut ok) = (0.0f64, f64::NEG_INFINITY, true);
    for n in [2, 3] {
        let fam = HopfFamily::new(n, 1.0)?;
        let th = thresholds(&fam);
        let hi = 0.999 * th.t_max;
        for k in 1..=10 {
            let t = th.neg_start + (hi - th.neg_start) * k as f64 / 10.0;
            let rep = classify_time(&fam, t, 10, &opts)?;
            let Some(w) = &rep.witness else { return Ok((false, format!("no witness at t = {t}"))) };
            let ab = ABForm::from_frame(&w.z, &w.frame.xi)?;
            let expect = ab.b().powi(2) * (rep.lambda + 1.0) / ab.z_norm8();
            formula = formula.max((w.value - expect).abs());
            largest = largest.max(w.value);
            ok &= ab.a() <= 1e-20 && w.value < -1e-6 && rep.min_hbc <= w.value && rep.verdict == Verdict::Negative;
        }
    }
    ok &= formula <= 1e-10;
    Ok((ok, format!("largest witness value {}, formula residue {} (tol 1e-10)", fmt(largest), fmt(formula))))
}

fn c6_ab_form(seed: u64) -> Outcome {
    let mut r = rng(seed, 6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (m, z) = hopf_sample(&mut r)?;
        let xi = ComplexVector::random_unit(m.n(), &mut r);
        let v = hsc(&hopf_curvature(&m, &z)?, &xi)?;
        worst = worst.max((v - hopf_hsc_ab(m.lambda(), &ABForm::from_frame(&z, &xi)?)).abs());
    }
    Ok((worst <= 1e-10, format!("1000 frames, worst {} (tol 1e-10)", fmt(worst))))
}

fn hsc_floor(seed: u64, lambdas: &[f64]) -> Result<f64> {
    let opts = MinimizeOptions { seed, ..Default::default() };
    let mut worst = f64::INFINITY;
    for &l in lambdas {
        for n in 2..=4 {
            worst = worst.min(empirical_min(n, l, Quantity::Hsc, 10, &opts)?);
        }
    }
    Ok(worst)
}

fn c7_hsc_boundary(seed: u64) -> Outcome {
    let worst = hsc_floor(seed, &[-1.0])?;
    Ok((worst >= -NEGATIVE_THRESHOLD, format!("lambda = -1, n in 2..=4, min HSC {} (floor -1e-9)", fmt(worst))))
}

fn c8_flow_exactness(seed: u64) -> Outcome {
    let mut r = rng(seed, 8);
    let fam = HopfFamily::new(2, 1.0)?;
    let points: Vec<Point> = (0..20)
        .map(|_| {
            let radius = r.random_range(0.5..2.0);
            ComplexVector::random_unit(2, &mut r).scale(re(radius))
        })
        .collect();
    let t_end = 0.9 * fam.t_max();
    let res = euler_flow(&FlowState::new(fam, 0.0)?, &points, 1e-3, t_end, &HopfExtension)?;
    let dev = res.max_deviation(|z| exact_flow_metric(&fam, t_end, z))?;
    Ok((dev <= 1e-5, format!("{} Euler steps, 20 points, worst entry {} (tol 1e-5)", res.steps, fmt(dev))))
}

fn c9_threshold(seed: u64) -> Outcome {
    let opts = ThresholdOptions { minimize: MinimizeOptions { seed, ..Default::default() }, ..Default::default() };
    let mut ok = true;
    let mut parts = Vec::new();
    for (t0, n) in [(1.0, 2), (2.0, 3), (0.0, 2)] {
        let fam = HopfFamily::new(n, t0)?;
        match threshold_bisect(&fam, Quantity::Hbc, &opts) {
            Ok(res) => {
                ok &= res.t_star >= res.bracket[0] && res.t_star <= res.bracket[1];
                parts.push(format!("(T0={t0}, n={n}) t* = {:.6} in [{:.6}, {:.6}]", res.t_star, res.bracket[0], res.bracket[1]));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("(T0={t0}, n={n}) {e}"));
            }
        }
    }
    Ok((ok, parts.join("; ")))
}

fn calculus_linearity(seed: u64) -> Outcome {
    let mut r = rng(seed, 101);
    let f = |z: &Point| z[0] * z[0] * z[1].conj() + re(z.norm_sqr());
    let g = |z: &Point| (z[1] * z[0].conj()).exp();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let z = ComplexVector::random_unit(2, &mut r);
        let (a, b) = (Complex64::new(r.random_range(-2.0..2.0), 0.3), Complex64::new(-0.7, r.random_range(-2.0..2.0)));
        let comb = |w: &Point| a * f(w) + b * g(w);
        let step = 1e-5;
        for kind in [Wirtinger::Holomorphic, Wirtinger::Antiholomorphic] {
            for k in 0..2 {
                let lhs = wirtinger_derivative_with_step(&comb, &z, k, kind, step)?;
                let rhs = a * wirtinger_derivative_with_step(&f, &z, k, kind, step)?
                    + b * wirtinger_derivative_with_step(&g, &z, k, kind, step)?;
                // difference quotients carry rounding of order eps |f| / step
                let floor = 8.0 * f64::EPSILON * comb(&z).norm().max(f(&z).norm() + g(&z).norm()) / step;
                let d = (lhs - rhs).norm();
                worst = worst.max(d);
                ok &= d <= 1e-12 + floor;
            }
        }
    }
    Ok((ok, format!("worst {} (tol 1e-12 above the rounding floor)", fmt(worst))))
}

fn calculus_conjugation(seed: u64) -> Outcome {
    let mut r = rng(seed, 102);
    let f = |z: &Point| z[0] * z[1].conj() * z[1] + (z[0] * Complex64::new(0.0, 1.0)).exp();
    let cf = |z: &Point| f(z).conj();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let z = ComplexVector::random_unit(2, &mut r).scale(re(1.3));
        for k in 0..2 {
            let a = wirtinger_derivative_with_step(&f, &z, k, Wirtinger::Antiholomorphic, 1e-5)?;
            let b = wirtinger_derivative_with_step(&cf, &z, k, Wirtinger::Holomorphic, 1e-5)?.conj();
            worst = worst.max((a - b).norm());
        }
    }
    Ok((worst <= 1e-12, format!("worst {} (tol 1e-12)", fmt(worst))))
}

fn calculus_inverse_symmetry(seed: u64) -> Outcome {
    let mut r = rng(seed, 103);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.random_range(2..=6);
        let m = random_hermitian(n, &mut r)?.add_scaled(n as f64, &HermitianMatrix::identity(n))?;
        let (inv, _) = hermitian_inverse_det(&m)?;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((inv.get(i, j) - inv.get(j, i).conj()).norm());
            }
        }
    }
    Ok((worst <= 1e-12, format!("worst {} (tol 1e-12)", fmt(worst))))
}

fn calculus_eigen_floor(seed: u64) -> Outcome {
    let mut r = rng(seed, 104);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = r.random_range(1..=8);
        let m = random_hermitian(n, &mut r)?;
        let (mu, _) = hermitian_min_eigen(&m)?;
        let norm = m.frobenius_norm();
        for _ in 0..20 {
            let v = ComplexVector::random_unit(n, &mut r);
            worst = worst.min((m.quadratic_form(&v) - mu) / norm.max(f64::MIN_POSITIVE));
        }
    }
    Ok((worst >= -1e-10, format!("smallest (v*Mv - mu)/|M| {} (floor -1e-10)", fmt(worst))))
}

fn hopf_positive_definite(seed: u64) -> Outcome {
    let mut r = rng(seed, 201);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (m, z) = hopf_sample(&mut r)?;
        let h = hopf_metric(&m, &z)?;
        let (mu, _) = hermitian_min_eigen(&h)?;
        let r2 = z.norm_sqr();
        let low = (1.0 - m.lambda()) / r2;
        let high = 1.0 / r2;
        let (lo_exp, hi_exp) = if low < high { (low, high) } else { (high, low) };
        worst = worst.max((mu - lo_exp).abs() / lo_exp);
        // the other eigenvalues all equal the second distinct one
        let values = crate::calculus::hermitian_eigenvalues(&h)?;
        let spread = values.iter().map(|v| (v - lo_exp).abs().min((v - hi_exp).abs())).fold(0.0, f64::max);
        worst = worst.max(spread / hi_exp);
        if !(mu > 0.0) {
            return Ok((false, format!("non-positive eigenvalue {mu} at lambda = {}", m.lambda())));
        }
    }
    Ok((worst <= 1e-10, format!("eigenvalues vs (1 - lambda)/|z|^2 and 1/|z|^2, worst {} (tol 1e-10)", fmt(worst))))
}

fn hopf_transpose_inverse(seed: u64) -> Outcome {
    let mut r = rng(seed, 202);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (m, z) = hopf_sample(&mut r)?;
        let h = hopf_metric(&m, &z)?;
        let hinv = hopf_metric_inverse(&m, &z)?;
        for i in 0..m.n() {
            for k in 0..m.n() {
                let s: Complex64 = (0..m.n()).map(|j| hinv.get(i, j) * h.get(k, j)).sum();
                worst = worst.max((s - re(if i == k { 1.0 } else { 0.0 })).norm());
            }
        }
    }
    Ok((worst <= 1e-12, format!("worst {} (tol 1e-12)", fmt(worst))))
}

fn hopf_oracle(seed: u64) -> Outcome {
    let mut r = rng(seed, 203);
    let samples = (0..100).map(|_| hopf_sample(&mut r)).collect::<Result<Vec<_>>>()?;
    let devs = samples
        .par_iter()
        .map(|(m, z)| {
            let cg = hopf_christoffel(m, z)?;
            let g = christoffel_numeric(m, z)?.max_abs_diff(&cg) / cg.max_abs();
            let rr = curvature_numeric(m, z)?.relative_deviation(&hopf_curvature(m, z)?);
            Ok((g, rr))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let g = devs.iter().map(|d| d.0).fold(0.0, f64::max);
    let rr = devs.iter().map(|d| d.1).fold(0.0, f64::max);
    Ok((g <= 1e-5 && rr <= 1e-5, format!("christoffel {}, curvature {} (tol 1e-5)", fmt(g), fmt(rr))))
}

fn hopf_ricci_lambda_free(seed: u64) -> Outcome {
    let mut r = rng(seed, 204);
    for _ in 0..50 {
        let (m, z) = hopf_sample(&mut r)?;
        let other = LambdaMetric::new(m.n(), r.random_range(-5.0..0.999))?;
        if ricci_closed(&m, &z)? != ricci_closed(&other, &z)? {
            return Ok((false, format!("differs between lambda = {} and {}", m.lambda(), other.lambda())));
        }
    }
    Ok((true, "bitwise identical across lambda at 50 points".into()))
}

fn hopf_curvature_symmetry(seed: u64) -> Outcome {
    let mut r = rng(seed, 205);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (m, z) = hopf_sample(&mut r)?;
        worst = worst.max(hopf_curvature(&m, &z)?.chern_symmetry_defect());
    }
    Ok((worst <= 1e-12, format!("worst defect {} (tol 1e-12)", fmt(worst))))
}

fn hopf_scale_covariance(seed: u64) -> Outcome {
    let mut r = rng(seed, 206);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (m, z) = hopf_sample(&mut r)?;
        let c = Complex64::from_polar(r.random_range(0.3..3.0), r.random_range(0.0..std::f64::consts::TAU));
        let base = hopf_curvature(&m, &z)?;
        let scaled = hopf_curvature(&m, &z.scale(c))?;
        let factor = c.norm_sqr().powi(-2);
        let expect = crate::tensor::CurvatureTensor::from_fn(z.scale(c), |k, j, i, q| base.get(k, j, i, q) * factor);
        worst = worst.max(scaled.relative_deviation(&expect));
    }
    Ok((worst <= 1e-10, format!("worst relative {} (tol 1e-10)", fmt(worst))))
}

fn chern_oracle(seed: u64) -> Outcome {
    let mut r = rng(seed, 301);
    let samples = (0..100).map(|_| hopf_sample(&mut r)).collect::<Result<Vec<_>>>()?;
    let devs = samples
        .par_iter()
        .map(|(m, z)| {
            let cg = hopf_christoffel(m, z)?;
            let g = christoffel_numeric(m, z)?.max_abs_diff(&cg) / cg.max_abs();
            let rr = curvature_numeric(m, z)?.relative_deviation(&hopf_curvature(m, z)?);
            let cr = ricci_closed(m, z)?;
            let ric = ricci_numeric(m, z)?.max_abs_diff(&cr) / cr.max_abs();
            Ok(g.max(rr).max(ric))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = devs.into_iter().fold(0.0, f64::max);
    Ok((worst <= 1e-5, format!("christoffel, curvature and Ricci, worst relative {} (tol 1e-5)", fmt(worst))))
}

fn chern_step_halving(seed: u64) -> Outcome {
    let mut r = rng(seed, 302);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (m, z) = hopf_sample(&mut r)?;
        let s = z.norm().max(1.0);
        let full = curvature_numeric_with_steps(&m, &z, 1e-5 * s, 1e-4 * s)?;
        let half = curvature_numeric_with_steps(&m, &z, 0.5e-5 * s, 0.5e-4 * s)?;
        worst = worst.max(full.relative_deviation(&half));
    }
    Ok((worst <= 4e-5, format!("worst relative change {} (tol 4e-5)", fmt(worst))))
}

fn chern_trace_route(seed: u64) -> Outcome {
    let mut r = rng(seed, 303);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (m, z) = hopf_sample(&mut r)?;
        let log_det = |w: &Point| re(hopf_det(&m, w).map_or(f64::NAN, f64::ln));
        let trace = levi_form(&log_det, &z, crate::calculus::outer_step(&z))?.scale(-1.0);
        worst = worst.max(ricci_numeric(&m, &z)?.max_abs_diff(&trace));
    }
    Ok((worst <= 1e-6, format!("worst {} (tol 1e-6)", fmt(worst))))
}

fn analysis_realness(seed: u64) -> Outcome {
    let mut r = rng(seed, 401);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (m, z) = hopf_sample(&mut r)?;
        let t = hopf_curvature(&m, &z)?;
        let xi = ComplexVector::random_unit(m.n(), &mut r);
        let eta = ComplexVector::random_unit(m.n(), &mut r);
        worst = worst.max(t.contract(&xi, &eta)?.im.abs());
    }
    Ok((worst <= 1e-9, format!("1000 frames, largest imaginary part {} (tol 1e-9)", fmt(worst))))
}

fn analysis_homogeneity(seed: u64) -> Outcome {
    let mut r = rng(seed, 402);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (m, z) = hopf_sample(&mut r)?;
        let t = hopf_curvature(&m, &z)?;
        let xi = ComplexVector::random_unit(m.n(), &mut r);
        let eta = ComplexVector::random_unit(m.n(), &mut r);
        let c = Complex64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let d = Complex64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let lhs = hbc(&t, &xi.scale(c), &eta.scale(d))?;
        let rhs = c.norm_sqr() * d.norm_sqr() * hbc(&t, &xi, &eta)?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok((worst <= 1e-12, format!("worst relative {} (tol 1e-12)", fmt(worst))))
}

fn analysis_ab_form(seed: u64) -> Outcome {
    let mut r = rng(seed, 403);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (m, z) = hopf_sample(&mut r)?;
        let xi = ComplexVector::random_unit(m.n(), &mut r).scale(re(r.random_range(0.5..2.0)));
        let v = hsc(&hopf_curvature(&m, &z)?, &xi)?;
        worst = worst.max((v - hopf_hsc_ab(m.lambda(), &ABForm::from_frame(&z, &xi)?)).abs());
    }
    Ok((worst <= 1e-10, format!("worst {} (tol 1e-10)", fmt(worst))))
}

fn analysis_nonneg(seed: u64) -> Outcome {
    let opts = MinimizeOptions { seed, ..Default::default() };
    let mut worst = f64::INFINITY;
    for l in [0.0, 0.25, 0.5, 0.9, 0.99] {
        for n in [2, 3] {
            worst = worst.min(empirical_min(n, l, Quantity::Hbc, 50, &opts)?);
        }
    }
    Ok((worst >= -NEGATIVE_THRESHOLD, format!("smallest min_hbc {} (floor -1e-9)", fmt(worst))))
}

fn analysis_hsc_nonneg(seed: u64) -> Outcome {
    let worst = hsc_floor(seed, &[-1.0, -0.5])?;
    Ok((worst >= -NEGATIVE_THRESHOLD, format!("smallest min HSC {} (floor -1e-9)", fmt(worst))))
}

fn analysis_negativity(seed: u64) -> Outcome {
    let mut r = rng(seed, 406);
    let opts = MinimizeOptions { seed, ..Default::default() };
    let (mut formula, mut ok) = (0.0f64, true);
    for l in [-1.1, -2.0, -5.0] {
        for n in 2..=4 {
            let z = ComplexVector::random_unit(n, &mut r).scale(re(r.random_range(0.5..2.0)));
            let t = hopf_curvature(&LambdaMetric::new(n, l)?, &z)?;
            let w = negative_witness(l, &z)?;
            let v = hsc(&t, &w.xi)?;
            let ab = ABForm::from_frame(&z, &w.xi)?;
            formula = formula.max((v - ab.b().powi(2) * (l + 1.0) / ab.z_norm8()).abs());
            // no witness among the starts here
            ok &= min_hbc(&t, &opts, &[])?.value <= v + 1e-9;
        }
    }
    ok &= formula <= 1e-10;
    Ok((ok, format!("formula residue {} (tol 1e-10), unseeded min_hbc below witness: {ok}", fmt(formula))))
}

fn analysis_monotone(seed: u64) -> Outcome {
    let mut r = rng(seed, 407);
    let mut iterates = 0;
    for _ in 0..100 {
        let (m, z) = hopf_sample(&mut r)?;
        let t = hopf_curvature(&m, &z)?;
        let start = FramePair::new(&ComplexVector::random_unit(m.n(), &mut r), &ComplexVector::random_unit(m.n(), &mut r))?;
        let d = alternating_descent(&t, &start, 200, 1e-10)?;
        iterates += d.history.len();
        if d.history.windows(2).any(|w| w[1] > w[0]) {
            return Ok((false, "value increased between iterates".into()));
        }
    }
    Ok((true, format!("{iterates} iterates over 100 runs, none increasing")))
}

fn flow_ricci_constancy(seed: u64) -> Outcome {
    let mut r = rng(seed, 501);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let n = r.random_range(2..=4);
        let fam = HopfFamily::new(n, r.random_range(0.0..3.0))?;
        let z = ComplexVector::random_unit(n, &mut r);
        let first = ricci_numeric(&FlowState::new(fam, 0.0)?, &z)?;
        for frac in [0.25, 0.5, 0.75, 0.95] {
            worst = worst.max(ricci_numeric(&FlowState::new(fam, frac * fam.t_max())?, &z)?.max_abs_diff(&first));
        }
    }
    Ok((worst <= 1e-6, format!("worst change {} (tol 1e-6)", fmt(worst))))
}

fn flow_time_derivative(seed: u64) -> Outcome {
    let mut r = rng(seed, 502);
    let delta = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(2..=4);
        let fam = HopfFamily::new(n, r.random_range(0.0..3.0))?;
        let z = ComplexVector::random_unit(n, &mut r).scale(re(r.random_range(0.5..2.0)));
        let t = r.random_range(delta..0.99 * fam.t_max());
        let plus = exact_flow_metric(&fam, t + delta, &z)?;
        let minus = exact_flow_metric(&fam, t - delta, &z)?;
        let d = plus.add_scaled(-1.0, &minus)?.scale(1.0 / (2.0 * delta));
        worst = worst.max(d.max_abs_diff(&ricci_closed(&LambdaMetric::new(n, 0.0)?, &z)?.scale(-1.0)));
    }
    Ok((worst <= 1e-6, format!("worst {} (tol 1e-6)", fmt(worst))))
}

fn flow_determinant(seed: u64) -> Outcome {
    let mut r = rng(seed, 503);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.random_range(2..=4);
        let fam = HopfFamily::new(n, r.random_range(0.0..3.0))?;
        let z = ComplexVector::random_unit(n, &mut r).scale(re(r.random_range(0.5..2.0)));
        let t = r.random_range(0.0..0.999) * fam.t_max();
        let (_, det) = hermitian_inverse_det(&exact_flow_metric(&fam, t, &z)?)?;
        let want = fam.det_factor(t).powi(n as i32 - 1) * z.norm_sqr().powi(-(n as i32));
        worst = worst.max((det.re - want).abs() / want);
    }
    Ok((worst <= 1e-10, format!("worst relative {} (tol 1e-10)", fmt(worst))))
}

fn flow_reparametrization(seed: u64) -> Outcome {
    let mut r = rng(seed, 504);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.random_range(2..=4);
        let fam = HopfFamily::new(n, r.random_range(0.0..3.0))?;
        let z = ComplexVector::random_unit(n, &mut r).scale(re(r.random_range(0.5..2.0)));
        let t = r.random_range(0.0..0.999) * fam.t_max();
        let w = exact_flow_metric(&fam, t, &z)?;
        let h = hopf_metric(&LambdaMetric::new(n, lambda_of_t(&fam, t)?)?, &z)?.scale(fam.det_factor(t));
        worst = worst.max(w.max_abs_diff(&h) / w.max_abs());
    }
    Ok((worst <= 1e-12, format!("worst relative {} (tol 1e-12)", fmt(worst))))
}

fn small_reports(seed: u64) -> Result<Vec<Report>> {
    let tensor = RunConfig {
        n: Some(3),
        lambda: Some(-1.5),
        z: Some(ComplexVector::new(vec![Complex64::new(0.3, -0.2), re(1.1), Complex64::new(0.0, 0.7)])?),
        seed,
        ..RunConfig::new(Command::Tensor)
    };
    let bisec = RunConfig { n: Some(2), t0: Some(1.0), t: Some(0.9), samples: Some(4), starts: 8, seed, ..RunConfig::new(Command::MinBisec) };
    Ok(vec![cmd_tensor(&tensor)?, cmd_min_bisec(&bisec)?])
}

fn report_round_trip(seed: u64) -> Outcome {
    for rep in small_reports(seed)? {
        if Report::from_json(&rep.to_json()?)? != rep {
            return Ok((false, "re-parsed report differs".into()));
        }
    }
    Ok((true, "tensor and min-bisec reports re-parse to equal values".into()))
}

fn report_determinism(seed: u64) -> Outcome {
    let a = small_reports(seed)?.iter().map(Report::to_json).collect::<Result<Vec<_>>>()?;
    let b = small_reports(seed)?.iter().map(Report::to_json).collect::<Result<Vec<_>>>()?;
    Ok((a == b, format!("two runs, {} bytes, identical: {}", a.iter().map(String::len).sum::<usize>(), a == b)))
}

fn report_csv_schema(seed: u64) -> Outcome {
    let fam = HopfFamily::new(2, 1.0)?;
    let opts = MinimizeOptions { starts: 4, seed, ..Default::default() };
    let trace = crate::flow::flow_trace(&fam, &[0.0, 0.6, 0.9], 2, &opts)?;
    let text = flow_csv(&trace)?;
    let mut lines = text.lines();
    let header_ok = lines.next() == Some(CSV_HEADER.join(",").as_str());
    let mut fields_ok = true;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        fields_ok &= fields.len() == 6;
        for f in &fields[..5] {
            let mantissa = f.split('e').next().unwrap_or("");
            let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
            fields_ok &= digits == 17 && f.parse::<f64>().is_ok();
        }
    }
    Ok((header_ok && fields_ok, format!("header ok: {header_ok}, 17-digit fields ok: {fields_ok}")))
}

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("criterion-1", "closed-form curvature vs finite-difference oracle", c1_curvature_oracle),
    ("criterion-2", "algebraic identities", c2_identities),
    ("criterion-3", "Ricci invariance along the flow", c3_ricci_invariance),
    ("criterion-4", "non-negative bisectional curvature for t <= T0/n", c4_nonneg),
    ("criterion-5", "negativity witnesses for t > (2T0+1)/(2n)", c5_negativity),
    ("criterion-6", "(a,b)-form of the sectional curvature", c6_ab_form),
    ("criterion-7", "sectional curvature at lambda = -1", c7_hsc_boundary),
    ("criterion-8", "Euler integration vs exact flow", c8_flow_exactness),
    ("criterion-9", "threshold inside the bracket", c9_threshold),
    ("calculus.linearity", "Wirtinger linearity", calculus_linearity),
    ("calculus.conjugation", "conjugation duality", calculus_conjugation),
    ("calculus.inverse-symmetry", "inverse of Hermitian is Hermitian", calculus_inverse_symmetry),
    ("calculus.eigen-floor", "Rayleigh quotients above the minimum eigenvalue", calculus_eigen_floor),
    ("hopf.positive-definite", "metric eigenvalues", hopf_positive_definite),
    ("hopf.transpose-inverse", "transpose-inverse contract", hopf_transpose_inverse),
    ("hopf.oracle", "connection and curvature vs oracle", hopf_oracle),
    ("hopf.ricci-lambda-free", "Ricci form independent of lambda", hopf_ricci_lambda_free),
    ("hopf.curvature-symmetry", "curvature conjugate symmetry", hopf_curvature_symmetry),
    ("hopf.scale-covariance", "curvature scale covariance", hopf_scale_covariance),
    ("chern.oracle", "numeric pipeline agreement", chern_oracle),
    ("chern.step-halving", "step robustness", chern_step_halving),
    ("chern.trace-route", "Ricci via log det", chern_trace_route),
    ("analysis.realness", "real contractions", analysis_realness),
    ("analysis.homogeneity", "bisectional homogeneity", analysis_homogeneity),
    ("analysis.ab-form", "(a,b)-form on scaled directions", analysis_ab_form),
    ("analysis.nonneg", "bisectional minimum for lambda in [0, 1)", analysis_nonneg),
    ("analysis.hsc-nonneg", "sectional minimum for lambda in [-1, 0)", analysis_hsc_nonneg),
    ("analysis.negativity", "witness formula and unseeded minimum", analysis_negativity),
    ("analysis.monotone", "alternating descent is non-increasing", analysis_monotone),
    ("flow.ricci-constancy", "Ricci constant in time", flow_ricci_constancy),
    ("flow.time-derivative", "exact solution solves the flow", flow_time_derivative),
    ("flow.determinant", "determinant law", flow_determinant),
    ("flow.reparametrization", "rescaling to the lambda family", flow_reparametrization),
    ("report.round-trip", "JSON round trip", report_round_trip),
    ("report.determinism", "identical bytes for identical config", report_determinism),
    ("report.csv-schema", "CSV header and number format", report_csv_schema),
];

/// Ids of every check, in run order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

fn run_one(seed: u64, (id, title, f): &(&str, &str, CheckFn)) -> Check {
    let (passed, detail) = match f(seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { id: id.to_string(), title: title.to_string(), passed, detail }
}

/// Runs only the checks whose id satisfies `select`.
pub fn run_selected(seed: u64, select: impl Fn(&str) -> bool + Sync) -> SuiteReport {
    let checks: Vec<Check> = CHECKS.par_iter().filter(|c| select(c.0)).map(|c| run_one(seed, c)).collect();
    SuiteReport { seed, passed: checks.iter().all(|c| c.passed), checks }
}

pub fn run_suite(seed: u64) -> SuiteReport {
    run_selected(seed, |_| true)
}
