//! Wirtinger derivatives of smooth, generally non-holomorphic fields on
//! complex n-space by real-coordinate central differences:
//! `d/dz^k = (d/dx^k - i d/dy^k)/2`, `d/dzbar^k = (d/dx^k + i d/dy^k)/2`.

use num_complex::Complex64;

use super::vector::Point;
use crate::error::{GeometryError, Result};

/// Relative step for first derivatives.
pub const FIRST_STEP: f64 = 1e-5;
/// Relative step for a derivative level composed on top of another one.
pub const OUTER_STEP: f64 = 1e-4;

pub fn first_step(z: &Point) -> f64 {
    FIRST_STEP * z.norm().max(1.0)
}

pub fn outer_step(z: &Point) -> f64 {
    OUTER_STEP * z.norm().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wirtinger {
    Holomorphic,
    Antiholomorphic,
}

/// A complex-valued field evaluated away from the origin.
pub trait ScalarField {
    fn eval(&self, z: &Point) -> Complex64;
}

impl<F> ScalarField for F
where
    F: Fn(&Point) -> Complex64,
{
    fn eval(&self, z: &Point) -> Complex64 {
        self(z)
    }
}

fn check(z: &Point, indices: &[usize]) -> Result<()> {
    z.require_nonzero()?;
    for &k in indices {
        if k >= z.dim() {
            return Err(GeometryError::DimensionMismatch { expected: z.dim(), got: k + 1 });
        }
    }
    Ok(())
}

/// Combines the real partials `(d/dx, d/dy)` into a Wirtinger derivative.
pub fn combine(dx: Complex64, dy: Complex64, kind: Wirtinger) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    match kind {
        Wirtinger::Holomorphic => (dx - i * dy) * 0.5,
        Wirtinger::Antiholomorphic => (dx + i * dy) * 0.5,
    }
}

/// `df/dz^k` or `df/dzbar^k` at `z` (0-based `k`) with the default step.
pub fn wirtinger_derivative<F: ScalarField + ?Sized>(
    f: &F,
    z: &Point,
    k: usize,
    kind: Wirtinger,
) -> Result<Complex64> {
    wirtinger_derivative_with_step(f, z, k, kind, first_step(z))
}

pub fn wirtinger_derivative_with_step<F: ScalarField + ?Sized>(
    f: &F,
    z: &Point,
    k: usize,
    kind: Wirtinger,
    step: f64,
) -> Result<Complex64> {
    check(z, &[k])?;
    let re = Complex64::new(step, 0.0);
    let im = Complex64::new(0.0, step);
    let dx = (f.eval(&z.displaced(k, re)) - f.eval(&z.displaced(k, -re))) / (2.0 * step);
    let dy = (f.eval(&z.displaced(k, im)) - f.eval(&z.displaced(k, -im))) / (2.0 * step);
    Ok(combine(dx, dy, kind))
}

/// Mixed second derivative `d^2 f / dz^i dzbar^j` with the default outer step.
pub fn mixed_wirtinger<F: ScalarField + ?Sized>(f: &F, z: &Point, i: usize, j: usize) -> Result<Complex64> {
    mixed_wirtinger_with_step(f, z, i, j, outer_step(z))
}

/// Uses `d_i dbar_j = (f_{x_i x_j} + f_{y_i y_j} + i (f_{x_i y_j} - f_{y_i x_j}))/4`,
/// each real second partial taken by the four-point product stencil. All
/// evaluation points lie within `2 * step` of `z`.
pub fn mixed_wirtinger_with_step<F: ScalarField + ?Sized>(
    f: &F,
    z: &Point,
    i: usize,
    j: usize,
    step: f64,
) -> Result<Complex64> {
    check(z, &[i, j])?;
    let re = Complex64::new(step, 0.0);
    let im = Complex64::new(0.0, step);
    let second = |a: usize, da: Complex64, b: usize, db: Complex64| {
        let pp = f.eval(&z.displaced(a, da).displaced(b, db));
        let pm = f.eval(&z.displaced(a, da).displaced(b, -db));
        let mp = f.eval(&z.displaced(a, -da).displaced(b, db));
        let mm = f.eval(&z.displaced(a, -da).displaced(b, -db));
        (pp - pm - mp + mm) / (4.0 * step * step)
    };
    let xx = second(i, re, j, re);
    let yy = second(i, im, j, im);
    let xy = second(i, re, j, im);
    let yx = second(i, im, j, re);
    Ok((xx + yy + Complex64::new(0.0, 1.0) * (xy - yx)) * 0.25)
}
