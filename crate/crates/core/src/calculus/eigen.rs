use num_complex::Complex64;

use super::hermitian::HermitianMatrix;
use super::vector::ComplexVector;
use crate::error::{GeometryError, Result};

const MAX_SWEEPS: usize = 64;

/// Smallest eigenvalue of a Hermitian matrix together with a unit eigenvector.
///
/// The `n x n` complex problem `M = A + iB` is solved as the real symmetric
/// `2n x 2n` problem `[[A, -B], [B, A]]` with cyclic Jacobi rotations. Every
/// eigenvalue of `M` appears twice in the embedding and a real eigenvector
/// `(x, y)` maps back to the complex eigenvector `x + iy`.
pub fn hermitian_min_eigen(m: &HermitianMatrix) -> Result<(f64, ComplexVector)> {
    let n = m.dim();
    let (values, vectors) = jacobi_embedded(m)?;
    let size = 2 * n;
    let (best, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v: Vec<Complex64> = (0..n)
        .map(|r| Complex64::new(vectors[r * size + best], vectors[(r + n) * size + best]))
        .collect();
    let v = ComplexVector::new(v)?.normalized()?;
    Ok((values[best], v))
}

/// All eigenvalues of `m` in ascending order.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi_embedded(m)?;
    values.sort_by(f64::total_cmp);
    // each eigenvalue is doubled in the real embedding
    Ok(values.into_iter().step_by(2).collect())
}

fn jacobi_embedded(m: &HermitianMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.dim();
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            let c = m.get(i, j);
            a[i * size + j] = c.re;
            a[(i + n) * size + (j + n)] = c.re;
            a[i * size + (j + n)] = -c.im;
            a[(i + n) * size + j] = c.im;
        }
    }
    let mut v = vec![0.0; size * size];
    for i in 0..size {
        v[i * size + i] = 1.0;
    }

    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok((vec![0.0; size], v));
    }
    let target = f64::EPSILON * scale;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..size)
            .flat_map(|p| ((p + 1)..size).map(move |q| (p, q)))
            .map(|(p, q)| a[p * size + q] * a[p * size + q])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            let values = (0..size).map(|i| a[i * size + i]).collect();
            return Ok((values, v));
        }
        for p in 0..size {
            for q in (p + 1)..size {
                let apq = a[p * size + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * size + p];
                let aqq = a[q * size + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[k * size + p];
                    let akq = a[k * size + q];
                    a[k * size + p] = c * akp - s * akq;
                    a[k * size + q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[p * size + k];
                    let aqk = a[q * size + k];
                    a[p * size + k] = c * apk - s * aqk;
                    a[q * size + k] = s * apk + c * aqk;
                }
                for k in 0..size {
                    let vkp = v[k * size + p];
                    let vkq = v[k * size + q];
                    v[k * size + p] = c * vkp - s * vkq;
                    v[k * size + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(GeometryError::ConvergenceFailure(format!(
        "Jacobi eigen solver exceeded {MAX_SWEEPS} sweeps"
    )))
}
