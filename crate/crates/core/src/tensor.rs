//! Dense connection and curvature arrays.
//!
//! Index convention (0-based in code, 1-based in reports):
//! - `Christoffel::get(p, k, i)` is `Gamma^p_{ki}`, the coefficient of the
//!   Chern connection with upper index `p`. It is *not* symmetric in `(k, i)`.
//! - `CurvatureTensor::get(k, j, i, q)` is `R_{k jbar i qbar}`, stored in
//!   exactly that order. Only the Chern symmetry
//!   `R_{k jbar i qbar} = conj(R_{j kbar q ibar})` holds; swapping the pairs
//!   `(k, j) <-> (i, q)` is not a symmetry for non-Kähler metrics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{ComplexVector, Point};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Christoffel {
    n: usize,
    data: Vec<Complex64>,
}

impl Christoffel {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for p in 0..n {
            for k in 0..n {
                for i in 0..n {
                    data.push(f(p, k, i));
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, k: usize, i: usize) -> Complex64 {
        self.data[(p * self.n + k) * self.n + i]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTensor {
    n: usize,
    components: Vec<Complex64>,
    base_point: Point,
}

impl CurvatureTensor {
    pub fn from_fn(
        base_point: Point,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Self {
        let n = base_point.dim();
        let mut components = Vec::with_capacity(n * n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for q in 0..n {
                        components.push(f(k, j, i, q));
                    }
                }
            }
        }
        Self { n, components, base_point }
    }

    pub fn zeros(base_point: Point) -> Self {
        Self::from_fn(base_point, |_, _, _, _| Complex64::new(0.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base_point(&self) -> &Point {
        &self.base_point
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize, i: usize, q: usize) -> Complex64 {
        let n = self.n;
        self.components[((k * n + j) * n + i) * n + q]
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Componentwise deviation relative to the largest component of `reference`.
    pub fn relative_deviation(&self, reference: &Self) -> f64 {
        self.max_abs_diff(reference) / reference.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Largest `|R_{k jbar i qbar} - conj(R_{j kbar q ibar})|`.
    pub fn chern_symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for q in 0..n {
                        worst = worst.max((self.get(k, j, i, q) - self.get(j, k, q, i).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Projection onto the Chern-symmetric part, `(R + R^dagger)/2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.base_point.clone(), |k, j, i, q| {
            (self.get(k, j, i, q) + self.get(j, k, q, i).conj()) * 0.5
        })
    }

    /// Raw contraction `R_{k jbar i qbar} xi^k conj(xi^j) eta^i conj(eta^q)`.
    pub fn contract(&self, xi: &ComplexVector, eta: &ComplexVector) -> Result<Complex64> {
        xi.require_dim(self.n)?;
        eta.require_dim(self.n)?;
        let n = self.n;
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..n {
            for j in 0..n {
                let xx = xi[k] * xi[j].conj();
                let mut inner = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for q in 0..n {
                        inner += self.get(k, j, i, q) * eta[i] * eta[q].conj();
                    }
                }
                total += xx * inner;
            }
        }
        Ok(total)
    }
}
