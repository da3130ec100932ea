//! Finite-difference Chern geometry of an arbitrary Hermitian metric field.
//!
//! This is the independent route against which every closed form in
//! [`crate::hopf`] is checked: Christoffel symbols from first Wirtinger
//! derivatives of `g`, curvature by differencing those symbols again, and the
//! Chern-Ricci form as `-d dbar log det g`.

use num_complex::Complex64;

use crate::calculus::{
    combine, first_step, hermitian_inverse_det, mixed_wirtinger_with_step, outer_step, Definiteness,
    HermitianMatrix, Point, ScalarField, Wirtinger,
};
use crate::error::{GeometryError, Result};
use crate::tensor::{Christoffel, CurvatureTensor};

/// A Hermitian metric `g_{i jbar}(z)` given as a pure function of the point.
pub trait MetricField: Sync {
    fn evaluate(&self, z: &Point) -> Result<HermitianMatrix>;

    fn label(&self) -> String;

    /// True when `evaluate` is a literal closed-form formula.
    fn is_closed_form(&self) -> bool {
        false
    }
}

/// Metric field backed by a closure.
pub struct FnMetric<F> {
    label: String,
    f: F,
}

impl<F> FnMetric<F>
where
    F: Fn(&Point) -> Result<HermitianMatrix> + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { label: label.into(), f }
    }
}

impl<F> MetricField for FnMetric<F>
where
    F: Fn(&Point) -> Result<HermitianMatrix> + Sync,
{
    fn evaluate(&self, z: &Point) -> Result<HermitianMatrix> {
        (self.f)(z)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// The same matrix at every point.
#[derive(Debug, Clone)]
pub struct ConstantMetric(pub HermitianMatrix);

impl MetricField for ConstantMetric {
    fn evaluate(&self, z: &Point) -> Result<HermitianMatrix> {
        z.require_dim(self.0.dim())?;
        Ok(self.0.clone())
    }

    fn label(&self) -> String {
        "constant".into()
    }

    fn is_closed_form(&self) -> bool {
        true
    }
}

fn positive_definite(g: &HermitianMatrix, z: &Point) -> Result<()> {
    match g.check_definiteness()? {
        Definiteness::Positive => Ok(()),
        _ => Err(GeometryError::NotPositiveDefinite(Some(format!("at z = {:?}", z.as_slice())))),
    }
}

/// Entrywise holomorphic derivative `d g_{i jbar} / dz^k` as a row-major array.
fn metric_derivative<G: MetricField + ?Sized>(g: &G, z: &Point, k: usize, step: f64) -> Result<Vec<Complex64>> {
    let re = Complex64::new(step, 0.0);
    let im = Complex64::new(0.0, step);
    let xp = g.evaluate(&z.displaced(k, re))?;
    let xm = g.evaluate(&z.displaced(k, -re))?;
    let yp = g.evaluate(&z.displaced(k, im))?;
    let ym = g.evaluate(&z.displaced(k, -im))?;
    let inv2h = 1.0 / (2.0 * step);
    Ok((0..xp.entries().len())
        .map(|e| {
            let dx = (xp.entries()[e] - xm.entries()[e]) * inv2h;
            let dy = (yp.entries()[e] - ym.entries()[e]) * inv2h;
            combine(dx, dy, Wirtinger::Holomorphic)
        })
        .collect())
}

pub fn christoffel_numeric<G: MetricField + ?Sized>(g: &G, z: &Point) -> Result<Christoffel> {
    christoffel_numeric_with_step(g, z, first_step(z))
}

/// `Gamma^p_{ki} = sum_j g^{p jbar} d_k g_{i jbar}` with `g^{p jbar}` the
/// transpose inverse, i.e. `(g^{-1})_{jp}`.
pub fn christoffel_numeric_with_step<G: MetricField + ?Sized>(
    g: &G,
    z: &Point,
    step: f64,
) -> Result<Christoffel> {
    z.require_nonzero()?;
    let base = g.evaluate(z)?;
    let n = base.dim();
    z.require_dim(n)?;
    positive_definite(&base, z)?;
    let (inv, _) = hermitian_inverse_det(&base)?;
    let derivs = (0..n).map(|k| metric_derivative(g, z, k, step)).collect::<Result<Vec<_>>>()?;
    Ok(Christoffel::from_fn(n, |p, k, i| {
        (0..n).map(|j| inv.get(j, p) * derivs[k][i * n + j]).sum()
    }))
}

pub fn curvature_numeric<G: MetricField + ?Sized>(g: &G, z: &Point) -> Result<CurvatureTensor> {
    curvature_numeric_with_steps(g, z, first_step(z), outer_step(z))
}

/// Two-level differencing: `R_{k jbar i}^p = -dbar_j Gamma^p_{ki}` from
/// Christoffel symbols at displaced points, lowered with `g_{p qbar}(z)`.
/// The raw (unsymmetrized) tensor is returned.
pub fn curvature_numeric_with_steps<G: MetricField + ?Sized>(
    g: &G,
    z: &Point,
    inner: f64,
    outer: f64,
) -> Result<CurvatureTensor> {
    z.require_nonzero()?;
    let base = g.evaluate(z)?;
    let n = base.dim();
    z.require_dim(n)?;
    positive_definite(&base, z)?;

    let re = Complex64::new(outer, 0.0);
    let im = Complex64::new(0.0, outer);
    let inv2h = 1.0 / (2.0 * outer);
    // mixed[j][(p, k, i)] = -dbar_j Gamma^p_{ki}
    let mut mixed = Vec::with_capacity(n);
    for j in 0..n {
        let xp = christoffel_numeric_with_step(g, &z.displaced(j, re), inner)?;
        let xm = christoffel_numeric_with_step(g, &z.displaced(j, -re), inner)?;
        let yp = christoffel_numeric_with_step(g, &z.displaced(j, im), inner)?;
        let ym = christoffel_numeric_with_step(g, &z.displaced(j, -im), inner)?;
        let d: Vec<Complex64> = (0..xp.data().len())
            .map(|e| {
                let dx = (xp.data()[e] - xm.data()[e]) * inv2h;
                let dy = (yp.data()[e] - ym.data()[e]) * inv2h;
                -combine(dx, dy, Wirtinger::Antiholomorphic)
            })
            .collect();
        mixed.push(d);
    }
    Ok(CurvatureTensor::from_fn(z.clone(), |k, j, i, q| {
        (0..n).map(|p| base.get(p, q) * mixed[j][(p * n + k) * n + i]).sum()
    }))
}

/// Matrix of `d_i dbar_j f` for a scalar field.
pub fn levi_form<F: ScalarField + ?Sized>(f: &F, z: &Point, step: f64) -> Result<HermitianMatrix> {
    let n = z.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(mixed_wirtinger_with_step(f, z, i, j, step)?);
        }
    }
    HermitianMatrix::from_entries(n, entries)
}

pub fn ricci_numeric<G: MetricField + ?Sized>(g: &G, z: &Point) -> Result<HermitianMatrix> {
    ricci_numeric_with_step(g, z, outer_step(z))
}

/// Coefficients of the Chern-Ricci form, `Ric_{i jbar} = -d_i dbar_j log det g`.
pub fn ricci_numeric_with_step<G: MetricField + ?Sized>(g: &G, z: &Point, step: f64) -> Result<HermitianMatrix> {
    z.require_nonzero()?;
    let base = g.evaluate(z)?;
    z.require_dim(base.dim())?;
    positive_definite(&base, z)?;
    // Errors inside the stencil surface as NaN and are caught below.
    let log_det = |w: &Point| -> Complex64 {
        match g.evaluate(w).and_then(|m| hermitian_inverse_det(&m)) {
            Ok((_, det)) => Complex64::new(det.re.ln(), 0.0),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    let levi = levi_form(&log_det, z, step)
        .map_err(|_| GeometryError::NotPositiveDefinite(Some("log det g undefined near z".into())))?;
    Ok(levi.scale(-1.0).with_definiteness(Definiteness::Unknown))
}
