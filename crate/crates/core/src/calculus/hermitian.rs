use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::hermitian_min_eigen;
use super::vector::ComplexVector;
use crate::error::{GeometryError, Result};

/// Below this magnitude a determinant is treated as zero.
pub const SINGULAR_DET: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    Positive,
    NotPositive,
    Unknown,
}

/// Dense `n x n` Hermitian matrix, row-major.
///
/// Construction symmetrizes the input as `(M + M*)/2`, so entry `[j][i]` is
/// always the exact conjugate of entry `[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix {
    n: usize,
    entries: Vec<Complex64>,
    definiteness: Definiteness,
}

impl HermitianMatrix {
    /// Builds from row-major entries, symmetrizing.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(GeometryError::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(GeometryError::InvalidInput("matrix entries must be finite".into()));
        }
        let mut m = Self { n, entries, definiteness: Definiteness::Unknown };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self::from_entries(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, entries, definiteness: Definiteness::Positive }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = Complex64::new(d, 0.0);
        }
        let definiteness = if diag.iter().all(|&d| d > 0.0) {
            Definiteness::Positive
        } else {
            Definiteness::NotPositive
        };
        Self { n, entries, definiteness }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Complex64::new(0.0, 0.0); n * n],
            definiteness: Definiteness::NotPositive,
        }
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            let d = self.entries[i * n + i].re;
            self.entries[i * n + i] = Complex64::new(d, 0.0);
            for j in (i + 1)..n {
                let avg = (self.entries[i * n + j] + self.entries[j * n + i].conj()) * 0.5;
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg.conj();
            }
        }
    }

    /// Records a definiteness status known from outside (e.g. an analytic
    /// eigenvalue formula).
    pub fn with_definiteness(mut self, d: Definiteness) -> Self {
        self.definiteness = d;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn definiteness(&self) -> Definiteness {
        self.definiteness
    }

    /// Resolves an `Unknown` status with an eigenvalue computation.
    pub fn check_definiteness(&self) -> Result<Definiteness> {
        match self.definiteness {
            Definiteness::Unknown => {
                let (mu, _) = hermitian_min_eigen(self)?;
                Ok(if mu > 0.0 { Definiteness::Positive } else { Definiteness::NotPositive })
            }
            d => Ok(d),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let definiteness = match self.definiteness {
            Definiteness::Unknown => Definiteness::Unknown,
            d if c > 0.0 => d,
            _ => Definiteness::Unknown,
        };
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| x * c).collect(),
            definiteness,
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(GeometryError::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(Self {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b * c).collect(),
            definiteness: Definiteness::Unknown,
        })
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `v* M v`, real for Hermitian `M`.
    pub fn quadratic_form(&self, v: &ComplexVector) -> f64 {
        let mv = self.mul_vec(v);
        v.as_slice().iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Plain matrix product as a row-major vector (not necessarily Hermitian).
    pub fn matmul(&self, other: &Self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.n + j]
    }
}

/// Inverse and determinant by LU factorization with partial pivoting.
///
/// The returned inverse is the ordinary matrix inverse `M^{-1}` (so that
/// `M M^{-1} = I`); for a positive-definite input the determinant is real up
/// to rounding.
pub fn hermitian_inverse_det(m: &HermitianMatrix) -> Result<(HermitianMatrix, Complex64)> {
    let (inv, det) = lu_inverse(m)?;
    let inv = HermitianMatrix::from_entries(m.dim(), inv)?.with_definiteness(m.definiteness());
    Ok((inv, det))
}

fn lu_inverse(m: &HermitianMatrix) -> Result<(Vec<Complex64>, Complex64)> {
    let n = m.dim();
    let mut lu = m.entries().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = Complex64::new(1.0, 0.0);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| lu[a * n + col].norm().total_cmp(&lu[b * n + col].norm()))
            .expect("non-empty pivot range");
        if lu[pivot * n + col].norm() == 0.0 {
            return Err(GeometryError::SingularMatrix(0.0));
        }
        if pivot != col {
            for k in 0..n {
                lu.swap(col * n + k, pivot * n + k);
            }
            perm.swap(col, pivot);
            det = -det;
        }
        let d = lu[col * n + col];
        det *= d;
        for r in (col + 1)..n {
            let factor = lu[r * n + col] / d;
            lu[r * n + col] = factor;
            for k in (col + 1)..n {
                let sub = factor * lu[col * n + k];
                lu[r * n + k] -= sub;
            }
        }
    }
    if det.norm() < SINGULAR_DET {
        return Err(GeometryError::SingularMatrix(det.norm()));
    }

    let mut inv = vec![Complex64::new(0.0, 0.0); n * n];
    for c in 0..n {
        // Solve L U x = P e_c.
        let mut x: Vec<Complex64> = (0..n)
            .map(|r| if perm[r] == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        for r in 0..n {
            for k in 0..r {
                let sub = lu[r * n + k] * x[k];
                x[r] -= sub;
            }
        }
        for r in (0..n).rev() {
            for k in (r + 1)..n {
                let sub = lu[r * n + k] * x[k];
                x[r] -= sub;
            }
            x[r] /= lu[r * n + r];
        }
        for r in 0..n {
            inv[r * n + c] = x[r];
        }
    }
    Ok((inv, det))
}
