use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{ComplexVector, Point};
use crate::error::{GeometryError, Result};
use crate::tensor::CurvatureTensor;

/// Imaginary residue above which a contraction is rejected as non-Hermitian.
pub const SYMMETRY_RESIDUE: f64 = 1e-6;

/// A pair of unit directions `(xi, eta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePair {
    pub xi: ComplexVector,
    pub eta: ComplexVector,
}

impl FramePair {
    /// Normalizes both vectors.
    pub fn new(xi: &ComplexVector, eta: &ComplexVector) -> Result<Self> {
        if xi.dim() != eta.dim() {
            return Err(GeometryError::DimensionMismatch { expected: xi.dim(), got: eta.dim() });
        }
        Ok(Self { xi: xi.normalized()?, eta: eta.normalized()? })
    }

    pub fn diagonal(xi: &ComplexVector) -> Result<Self> {
        Self::new(xi, xi)
    }
}

/// Holomorphic bisectional curvature `R(xi, conj xi, eta, conj eta)`.
pub fn hbc(r: &CurvatureTensor, xi: &ComplexVector, eta: &ComplexVector) -> Result<f64> {
    let raw = r.contract(xi, eta)?;
    let scale = (r.max_abs() * xi.norm_sqr() * eta.norm_sqr()).max(1.0);
    if raw.im.abs() > SYMMETRY_RESIDUE * scale {
        return Err(GeometryError::SymmetryViolation(raw.im.abs()));
    }
    Ok(raw.re)
}

/// Holomorphic sectional curvature `R(xi, conj xi, xi, conj xi)`.
pub fn hsc(r: &CurvatureTensor, xi: &ComplexVector) -> Result<f64> {
    hbc(r, xi, xi)
}

/// `sum_i zbar^i v^i`
fn zbar_dot(z: &Point, v: &ComplexVector) -> Complex64 {
    z.inner(v)
}

/// Bisectional curvature of the Hopf metric without building the tensor:
///
/// ```text
/// |eta|^2 (|z|^2|xi|^2 - |zbar.xi|^2) / |z|^6
///   + lambda | |z|^2 (eta . conj xi) - (zbar.eta)(z . conj xi) |^2 / |z|^8
///   + (lambda^2 - 2 lambda) |zbar.eta|^2 (|z|^2|xi|^2 - |zbar.xi|^2) / |z|^8
/// ```
pub fn hopf_hbc_closed(lambda: f64, z: &Point, xi: &ComplexVector, eta: &ComplexVector) -> Result<f64> {
    z.require_nonzero()?;
    xi.require_dim(z.dim())?;
    eta.require_dim(z.dim())?;
    if !(lambda < 1.0) {
        return Err(GeometryError::ParameterOutOfRange(format!("lambda = {lambda} must be < 1")));
    }
    let r2 = z.norm_sqr();
    let r6 = r2 * r2 * r2;
    let r8 = r6 * r2;
    let zx = zbar_dot(z, xi);
    let ze = zbar_dot(z, eta);
    let transverse_xi = r2 * xi.norm_sqr() - zx.norm_sqr();
    // eta . conj(xi) = <xi, eta>,  z . conj(xi) = conj(zbar . xi)
    let mixed = xi.inner(eta) * r2 - ze * zx.conj();
    Ok(eta.norm_sqr() * transverse_xi / r6
        + lambda * mixed.norm_sqr() / r8
        + (lambda * lambda - 2.0 * lambda) * ze.norm_sqr() * transverse_xi / r8)
}

/// `a = |zbar.xi|^2`, `b = |z|^2 |xi|^2` and the normalizer `|z|^8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ABForm {
    a: f64,
    b: f64,
    z_norm8: f64,
}

impl ABForm {
    pub fn new(a: f64, b: f64, z_norm8: f64) -> Result<Self> {
        if !(a >= 0.0) || a > b {
            return Err(GeometryError::ParameterOutOfRange(format!("need 0 <= a <= b, got a = {a}, b = {b}")));
        }
        if !(z_norm8 > 0.0) {
            return Err(GeometryError::ParameterOutOfRange(format!("|z|^8 = {z_norm8} must be positive")));
        }
        Ok(Self { a, b, z_norm8 })
    }

    /// Computes `(a, b)` from a point and direction; rounding that pushes `a`
    /// past `b` (xi parallel to z) is clamped.
    pub fn from_frame(z: &Point, xi: &ComplexVector) -> Result<Self> {
        z.require_nonzero()?;
        xi.require_dim(z.dim())?;
        let r2 = z.norm_sqr();
        let b = r2 * xi.norm_sqr();
        let a = zbar_dot(z, xi).norm_sqr().min(b);
        Self::new(a, b, r2.powi(4))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn z_norm8(&self) -> f64 {
        self.z_norm8
    }
}

/// `((b - a) a (lambda - 1)^2 + (b - a)^2 (lambda + 1)) / |z|^8`
pub fn hopf_hsc_ab(lambda: f64, f: &ABForm) -> f64 {
    let gap = f.b - f.a;
    (gap * f.a * (lambda - 1.0).powi(2) + gap * gap * (lambda + 1.0)) / f.z_norm8
}
