//! Chern-Ricci flow `d omega / dt = -Ric(omega)` on the Hopf family.
//!
//! The exact solution is `omega(t) = omega_0 - t Ric(omega_0)`, with
//! coefficients `((1 + T0 - n t) delta_{ij}|z|^2 - (T0 - n t) zbar^i z^j) / |z|^4`.
//! A pointwise explicit Euler integrator is provided as an independent check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_time, MinimizeOptions, Verdict, Witness};
use crate::calculus::{Definiteness, HermitianMatrix, Point};
use crate::chern::{ricci_numeric, ConstantMetric, FnMetric, MetricField};
use crate::error::{GeometryError, Result};
use crate::hopf::{hopf_metric, lambda_of_t, HopfFamily, LambdaMetric};

/// Runs stop at this fraction of `T_max` unless explicitly allowed further.
pub const DEFAULT_STOP_FRACTION: f64 = 0.999;
pub const DEFAULT_DT: f64 = 1e-3;

/// `T_max = (T0 + 1)/n`.
pub fn max_time(fam: &HopfFamily) -> f64 {
    fam.t_max()
}

/// Rejects `t_end` outside `[0, 0.999 T_max]`, or `[0, T_max)` when `near_tmax` is set.
pub fn check_end_time(fam: &HopfFamily, t_end: f64, near_tmax: bool) -> Result<()> {
    let limit = DEFAULT_STOP_FRACTION * fam.t_max();
    if near_tmax {
        fam.require_time(t_end)
    } else if !(t_end >= 0.0 && t_end <= limit) {
        Err(GeometryError::ParameterOutOfRange(format!(
            "t_end = {t_end} beyond the default stop {limit} (0.999 T_max)"
        )))
    } else {
        Ok(())
    }
}

/// Coefficient matrix of `omega(t)` at `z`.
pub fn exact_flow_metric(fam: &HopfFamily, t: f64, z: &Point) -> Result<HermitianMatrix> {
    fam.require_time(t)?;
    z.require_dim(fam.n())?;
    z.require_nonzero()?;
    let s = fam.t0() - fam.n() as f64 * t;
    let r2 = z.norm_sqr();
    let r4 = r2 * r2;
    Ok(HermitianMatrix::from_fn(fam.n(), |i, j| {
        let d = if i == j { (1.0 + s) * r2 } else { 0.0 };
        (Complex64::new(d, 0.0) - z[i].conj() * z[j] * s) / r4
    })?
    .with_definiteness(Definiteness::Positive))
}

/// `omega(t)` as a metric field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub fam: HopfFamily,
    pub t: f64,
}

impl FlowState {
    pub fn new(fam: HopfFamily, t: f64) -> Result<Self> {
        fam.require_time(t)?;
        Ok(Self { fam, t })
    }

    pub fn lambda(&self) -> f64 {
        lambda_of_t(&self.fam, self.t).expect("validated at construction")
    }
}

impl MetricField for FlowState {
    fn evaluate(&self, z: &Point) -> Result<HermitianMatrix> {
        exact_flow_metric(&self.fam, self.t, z)
    }

    fn label(&self) -> String {
        format!("flow(n={}, T0={}, t={})", self.fam.n(), self.fam.t0(), self.t)
    }

    fn is_closed_form(&self) -> bool {
        true
    }
}

/// Supplies `Ric` at a point from the current metric matrix there, by
/// extending that single matrix to a metric field near the point.
pub trait RicciSource: Sync {
    fn ricci(&self, z: &Point, g: &HermitianMatrix) -> Result<HermitianMatrix>;
}

/// Extends `g` as the member `c h_lambda` of the Hopf family that agrees with
/// it at `z`, then differentiates numerically.
#[derive(Debug, Clone, Copy, Default)]
pub struct HopfExtension;

/// Fits `g = c h_lambda` at `z`: with `T = |z|^2 tr g` and
/// `Q = sum z^i g_{i jbar} zbar^j`, `T = c (n - lambda)` and `Q = c (1 - lambda)`.
pub fn fit_hopf_member(z: &Point, g: &HermitianMatrix) -> Result<(f64, f64)> {
    let n = g.dim();
    z.require_dim(n)?;
    let r2 = z.norm_sqr();
    let trace: f64 = (0..n).map(|i| g.get(i, i).re).sum::<f64>() * r2;
    let q = g.quadratic_form(&z.conj());
    let c = (trace - q) / (n as f64 - 1.0);
    if !(c > 0.0) {
        return Err(GeometryError::NotPositiveDefinite(Some(format!("fitted scale {c} at z = {:?}", z.as_slice()))));
    }
    Ok((c, 1.0 - q / c))
}

impl RicciSource for HopfExtension {
    fn ricci(&self, z: &Point, g: &HermitianMatrix) -> Result<HermitianMatrix> {
        let (c, lambda) = fit_hopf_member(z, g)?;
        let member = LambdaMetric::new(g.dim(), lambda)
            .map_err(|e| GeometryError::NotPositiveDefinite(Some(format!("fitted lambda {lambda}: {e}"))))?;
        let field = FnMetric::new("hopf extension", move |w: &Point| Ok(hopf_metric(&member, w)?.scale(c)));
        ricci_numeric(&field, z)
    }
}

/// Extends `g` as a constant field; its Ricci form vanishes.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantExtension;

impl RicciSource for ConstantExtension {
    fn ricci(&self, z: &Point, g: &HermitianMatrix) -> Result<HermitianMatrix> {
        ricci_numeric(&ConstantMetric(g.clone()), z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerResult {
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
    pub points: Vec<Point>,
    pub metrics: Vec<HermitianMatrix>,
}

impl EulerResult {
    /// Largest entrywise deviation from `reference` over all points.
    pub fn max_deviation(&self, reference: impl Fn(&Point) -> Result<HermitianMatrix>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (z, g) in self.points.iter().zip(&self.metrics) {
            worst = worst.max(g.max_abs_diff(&reference(z)?));
        }
        Ok(worst)
    }
}

fn evolve_point<S: RicciSource + ?Sized>(
    g0: HermitianMatrix,
    z: &Point,
    dt: f64,
    t_end: f64,
    source: &S,
) -> Result<(HermitianMatrix, usize)> {
    let mut g = g0;
    let mut t = 0.0;
    let mut steps = 0;
    while t < t_end {
        let h = dt.min(t_end - t);
        let ric = source.ricci(z, &g)?;
        g = g.add_scaled(-h, &ric)?.with_definiteness(Definiteness::Unknown);
        // exact step count avoids a drifting sum of h
        steps += 1;
        t = if h < dt { t_end } else { steps as f64 * dt };
        if g.check_definiteness()? != Definiteness::Positive {
            return Err(GeometryError::NotPositiveDefinite(Some(format!(
                "evolved metric at t = {t}, z = {:?}",
                z.as_slice()
            ))));
        }
    }
    Ok((g, steps))
}

/// Explicit Euler `g <- g - dt Ric(g)` independently at each point.
pub fn euler_flow<G, S>(g0: &G, points: &[Point], dt: f64, t_end: f64, source: &S) -> Result<EulerResult>
where
    G: MetricField + ?Sized,
    S: RicciSource + ?Sized,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(GeometryError::ParameterOutOfRange(format!("dt = {dt} must be positive")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(GeometryError::ParameterOutOfRange(format!("t_end = {t_end} must be >= 0")));
    }
    let evolved = points
        .par_iter()
        .map(|z| {
            let g = g0.evaluate(z)?.with_definiteness(Definiteness::Unknown);
            if g.check_definiteness()? != Definiteness::Positive {
                return Err(GeometryError::NotPositiveDefinite(Some(format!("initial metric at z = {:?}", z.as_slice()))));
            }
            evolve_point(g, z, dt, t_end, source)
        })
        .collect::<Result<Vec<_>>>()?;
    let steps = evolved.first().map_or(0, |e| e.1);
    Ok(EulerResult {
        t_end,
        dt,
        steps,
        points: points.to_vec(),
        metrics: evolved.into_iter().map(|e| e.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub lambda: f64,
    pub det_factor: f64,
    pub min_hsc: f64,
    pub min_hbc: f64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub fam: HopfFamily,
    pub rows: Vec<TraceRow>,
}

/// `steps` equally spaced times `k t_end / (steps - 1)`, `k = 0..steps`.
pub fn time_grid(t_end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..steps).map(|k| k as f64 * t_end / (steps - 1) as f64).collect(),
    }
}

/// One curvature classification per time, in time order.
pub fn flow_trace(fam: &HopfFamily, times: &[f64], samples: usize, opts: &MinimizeOptions) -> Result<FlowTrace> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeometryError::ParameterOutOfRange("trace times must be strictly increasing".into()));
    }
    for &t in times {
        fam.require_time(t)?;
    }
    let rows = times
        .iter()
        .map(|&t| {
            let rep = classify_time(fam, t, samples, opts)?;
            Ok(TraceRow {
                t,
                lambda: rep.lambda,
                det_factor: fam.det_factor(t),
                min_hsc: rep.min_hsc,
                min_hbc: rep.min_hbc,
                verdict: rep.verdict,
                witness: rep.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowTrace { fam: *fam, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sample_points;
    use crate::calculus::{hermitian_inverse_det, hermitian_min_eigen, ComplexVector};
    use crate::hopf::ricci_closed;

    fn fam(n: usize, t0: f64) -> HopfFamily {
        HopfFamily::new(n, t0).unwrap()
    }

    fn spread_points(n: usize, count: usize, seed: u64) -> Vec<Point> {
        sample_points(n, count, seed)
            .into_iter()
            .enumerate()
            .map(|(k, z)| z.scale(Complex64::new(0.5 + 1.5 * k as f64 / (count.max(2) - 1) as f64, 0.0)))
            .collect()
    }

    #[test]
    fn basis_point_example() {
        let f = fam(2, 1.0);
        let z = ComplexVector::basis(2, 0);
        for t in [0.0, 0.3, 0.7] {
            let g = exact_flow_metric(&f, t, &z).unwrap();
            let want = HermitianMatrix::diagonal(&[1.0, 2.0 - 2.0 * t]);
            assert!(g.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn max_time_examples() {
        assert_eq!(max_time(&fam(2, 1.0)), 1.0);
        assert!((max_time(&fam(3, 0.0)) - 1.0 / 3.0).abs() < 1e-15);
        let f = fam(2, 1.0);
        let z = ComplexVector::basis(2, 1);
        let g = exact_flow_metric(&f, 1.0 - 1e-6, &z).unwrap();
        let (mu, _) = hermitian_min_eigen(&g).unwrap();
        assert!((mu - 2e-6).abs() < 1e-12, "{mu}");
        assert!(matches!(exact_flow_metric(&f, 1.0, &z), Err(GeometryError::ParameterOutOfRange(_))));
    }

    #[test]
    fn reparametrization_and_determinant() {
        let f = fam(3, 2.0);
        for (k, z) in spread_points(3, 20, 7).iter().enumerate() {
            let t = 0.95 * f.t_max() * k as f64 / 19.0;
            let g = exact_flow_metric(&f, t, z).unwrap();
            let h = hopf_metric(&LambdaMetric::new(3, lambda_of_t(&f, t).unwrap()).unwrap(), z).unwrap();
            assert!(g.max_abs_diff(&h.scale(f.det_factor(t))) <= 1e-12 * g.max_abs());
            let (_, det) = hermitian_inverse_det(&g).unwrap();
            let want = f.det_factor(t).powi(2) * z.norm_sqr().powi(-3);
            assert!((det.re - want).abs() <= 1e-10 * want);
        }
    }

    #[test]
    fn ricci_is_constant_in_time() {
        let f = fam(2, 1.0);
        let z = ComplexVector::new(vec![Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.77)]).unwrap();
        let closed = ricci_closed(&LambdaMetric::new(2, 0.0).unwrap(), &z).unwrap();
        for frac in [0.0, 0.3, 0.6, 0.9] {
            let ric = ricci_numeric(&FlowState::new(f, frac * f.t_max()).unwrap(), &z).unwrap();
            assert!(ric.max_abs_diff(&closed) < 1e-6);
        }
    }

    #[test]
    fn time_derivative_is_minus_ricci() {
        let f = fam(3, 1.0);
        let delta = 1e-5;
        for z in spread_points(3, 5, 11) {
            let closed = ricci_closed(&LambdaMetric::new(3, 0.0).unwrap(), &z).unwrap();
            for t in [0.1, 0.4] {
                let plus = exact_flow_metric(&f, t + delta, &z).unwrap();
                let minus = exact_flow_metric(&f, t - delta, &z).unwrap();
                let d = plus.add_scaled(-1.0, &minus).unwrap().scale(1.0 / (2.0 * delta));
                assert!(d.max_abs_diff(&closed.scale(-1.0)) < 1e-6);
            }
        }
    }

    #[test]
    fn fit_recovers_member() {
        let z = ComplexVector::new(vec![Complex64::new(0.3, -1.1), Complex64::new(0.5, 0.2), Complex64::new(-0.7, 0.0)]).unwrap();
        let g = hopf_metric(&LambdaMetric::new(3, -1.7).unwrap(), &z).unwrap().scale(2.5);
        let (c, l) = fit_hopf_member(&z, &g).unwrap();
        assert!((c - 2.5).abs() < 1e-12 && (l + 1.7).abs() < 1e-12);
    }

    #[test]
    fn euler_matches_exact_solution() {
        let f = fam(2, 1.0);
        let points = spread_points(2, 20, 3);
        let t_end = 0.9;
        let res = euler_flow(&FlowState::new(f, 0.0).unwrap(), &points, 1e-3, t_end, &HopfExtension).unwrap();
        assert_eq!(res.steps, 900);
        let dev = res.max_deviation(|z| exact_flow_metric(&f, t_end, z)).unwrap();
        assert!(dev <= 1e-5, "{dev}");
    }

    #[test]
    fn euler_step_independent() {
        let f = fam(2, 1.0);
        let points = spread_points(2, 3, 5);
        let g0 = FlowState::new(f, 0.0).unwrap();
        let coarse = euler_flow(&g0, &points, 1e-3, 0.5, &HopfExtension).unwrap();
        let fine = euler_flow(&g0, &points, 1e-4, 0.5, &HopfExtension).unwrap();
        let worst = coarse
            .metrics
            .iter()
            .zip(&fine.metrics)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn flat_metric_does_not_move() {
        let g0 = ConstantMetric(HermitianMatrix::identity(2));
        let points = spread_points(2, 4, 1);
        let res = euler_flow(&g0, &points, 1e-2, 0.5, &ConstantExtension).unwrap();
        for g in &res.metrics {
            assert_eq!(g.max_abs_diff(&HermitianMatrix::identity(2)), 0.0);
        }
    }

    #[test]
    fn euler_reports_loss_of_positivity() {
        let f = fam(2, 1.0);
        let points = spread_points(2, 2, 9);
        let err = euler_flow(&FlowState::new(f, 0.0).unwrap(), &points, 1e-2, 1.2, &HopfExtension).unwrap_err();
        assert!(matches!(err, GeometryError::NotPositiveDefinite(Some(_))));
    }

    #[test]
    fn end_time_guard() {
        let f = fam(2, 1.0);
        assert!(check_end_time(&f, 0.99, false).is_ok());
        assert!(check_end_time(&f, 0.9995, false).is_err());
        assert!(check_end_time(&f, 0.9995, true).is_ok());
        assert!(check_end_time(&f, 1.0, true).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = time_grid(0.99, 8);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[7], 0.99);
    }

    #[test]
    fn trace_examples() {
        let f = fam(2, 1.0);
        let opts = MinimizeOptions { starts: 8, ..Default::default() };
        let tr = flow_trace(&f, &[0.0, 0.25, 0.5], 6, &opts).unwrap();
        assert!(tr.rows.iter().all(|r| r.verdict == Verdict::Nonneg));
        let tr = flow_trace(&f, &[0.8, 0.9, 0.99], 6, &opts).unwrap();
        assert!(tr.rows.iter().all(|r| r.verdict == Verdict::Negative));
        assert!(tr.rows.windows(2).all(|w| w[1].lambda < w[0].lambda && w[1].det_factor > 0.0));
        let tr = flow_trace(&f, &[0.6], 6, &opts).unwrap();
        assert_eq!(tr.rows[0].verdict, Verdict::GapExplored);
        assert!(flow_trace(&f, &[0.5, 0.4], 6, &opts).is_err());
    }
}
