use std::ops::Index;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// A vector in complex n-space. Entries are finite and `n >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexVector(Vec<Complex64>);

/// Coordinates on the universal cover `C^n \ {0}` of a Hopf manifold.
pub type Point = ComplexVector;

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(GeometryError::InvalidInput("vector must have at least one entry".into()));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(GeometryError::InvalidInput("vector entries must be finite".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_k` (0-based `k`).
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index {k} out of range for dimension {n}");
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Uniformly distributed direction on the unit sphere of `C^n`.
    pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let v = Self(v);
            let norm = v.norm();
            if norm > 1e-8 {
                return v.scale(Complex64::new(1.0 / norm, 0.0));
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `sum conj(self_i) other_i`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|x| x.conj()).collect())
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(GeometryError::SingularPoint);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Copy with entry `k` shifted by `delta`.
    pub fn displaced(&self, k: usize, delta: Complex64) -> Self {
        let mut v = self.0.clone();
        v[k] += delta;
        Self(v)
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        if self.0.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            Err(GeometryError::SingularPoint)
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            Err(GeometryError::DimensionMismatch { expected: n, got: self.dim() })
        } else {
            Ok(())
        }
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVector {
    type Error = GeometryError;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ComplexVector> for Vec<Complex64> {
    fn from(v: ComplexVector) -> Self {
        v.0
    }
}
