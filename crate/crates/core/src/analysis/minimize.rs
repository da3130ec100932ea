//! Global minimization of holomorphic (bi)sectional curvature over unit frames.
//!
//! For fixed `eta`, `HBC(., eta)` is the Hermitian form
//! `xi^T A(eta) conj(xi)` with `A(eta)_{kj} = sum_{iq} R_{k jbar i qbar} eta^i conj(eta^q)`,
//! minimized exactly by the bottom eigenvector; symmetrically for `eta` with
//! `B(xi)_{iq} = sum_{kj} R_{k jbar i qbar} xi^k conj(xi^j)`. Alternating the two
//! exact block minimizations gives a non-increasing value sequence.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contraction::{hbc, hsc, FramePair};
use crate::calculus::{hermitian_min_eigen, ComplexVector, HermitianMatrix};
use crate::error::{GeometryError, Result};
use crate::tensor::CurvatureTensor;

/// Slack allowed for an iterate to exceed its predecessor, relative to the
/// size of the block forms (eigen-solver rounding scales with the matrix norm,
/// not with the value itself).
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { starts: 32, max_iter: 200, tol: 1e-10, seed: 42 }
    }
}

/// Deterministic generator for stream `(a, b)` under a base seed.
pub(crate) fn stream_rng(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((a << 32) | (b & 0xffff_ffff));
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub value: f64,
    pub frame: FramePair,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub minimum: Minimum,
    /// Objective after initialization and after every full alternation.
    pub history: Vec<f64>,
}

fn form_over_xi(r: &CurvatureTensor, eta: &ComplexVector) -> Result<HermitianMatrix> {
    let n = r.dim();
    HermitianMatrix::from_fn(n, |k, j| {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for q in 0..n {
                s += r.get(k, j, i, q) * eta[i] * eta[q].conj();
            }
        }
        s
    })
}

fn form_over_eta(r: &CurvatureTensor, xi: &ComplexVector) -> Result<HermitianMatrix> {
    let n = r.dim();
    HermitianMatrix::from_fn(n, |i, q| {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..n {
            for j in 0..n {
                s += r.get(k, j, i, q) * xi[k] * xi[j].conj();
            }
        }
        s
    })
}

/// Minimizes `v^T M conj(v)` over unit `v`: the bottom eigenvector `w` of `M`
/// gives `v = conj(w)`.
fn block_min(m: &HermitianMatrix) -> Result<(f64, ComplexVector)> {
    let (mu, w) = hermitian_min_eigen(m)?;
    Ok((mu, w.conj()))
}

/// Alternating minimization of the bisectional curvature from one start.
/// `r` must be Chern-symmetric.
pub fn alternating_descent(r: &CurvatureTensor, start: &FramePair, max_iter: usize, tol: f64) -> Result<Descent> {
    start.xi.require_dim(r.dim())?;
    let mut xi = start.xi.clone();
    let mut eta = start.eta.clone();
    let mut value = hbc(r, &xi, &eta)?;
    let mut history = vec![value];
    let n = r.dim() as f64;
    let scale = (r.max_abs() * n * n).max(1.0);
    for iter in 1..=max_iter {
        let (_, new_xi) = block_min(&form_over_xi(r, &eta)?)?;
        let (mu, new_eta) = block_min(&form_over_eta(r, &new_xi)?)?;
        if mu > value + MONOTONE_SLACK * scale {
            return Err(GeometryError::ConvergenceFailure(format!(
                "alternating descent increased from {value} to {mu}"
            )));
        }
        let change = value - mu;
        if mu <= value {
            xi = new_xi;
            eta = new_eta;
            value = mu;
        }
        history.push(value);
        // measured against the tensor size: near T_max the entries reach 1e3
        // and eigen-solver noise alone exceeds an absolute 1e-10
        if change.abs() <= tol * value.abs().max(r.max_abs()).max(1.0) {
            return Ok(Descent { minimum: Minimum { value, frame: FramePair { xi, eta }, iterations: iter }, history });
        }
    }
    Err(GeometryError::ConvergenceFailure(format!(
        "alternating descent did not settle within {max_iter} iterations (value {value})"
    )))
}

fn better(a: &Minimum, b: &Minimum) -> bool {
    match a.value.total_cmp(&b.value) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => frame_key(&a.frame) < frame_key(&b.frame),
    }
}

fn frame_key(f: &FramePair) -> Vec<(u64, u64)> {
    f.xi.as_slice()
        .iter()
        .chain(f.eta.as_slice())
        .map(|c| (c.re.to_bits(), c.im.to_bits()))
        .collect()
}

/// Picks the smallest value, ties broken by the lexicographically smallest frame.
pub(crate) fn best_of(mut results: Vec<Minimum>) -> Option<Minimum> {
    let mut best = results.pop()?;
    for m in results {
        if better(&m, &best) {
            best = m;
        }
    }
    Some(best)
}

/// Minimum bisectional curvature over unit `(xi, eta)` from `opts.starts`
/// random starts plus any `extra` starting frames. The tensor is symmetrized
/// before minimization.
pub fn min_hbc(r: &CurvatureTensor, opts: &MinimizeOptions, extra: &[FramePair]) -> Result<Minimum> {
    min_hbc_stream(r, opts, extra, 0)
}

pub(crate) fn min_hbc_stream(
    r: &CurvatureTensor,
    opts: &MinimizeOptions,
    extra: &[FramePair],
    stream: u64,
) -> Result<Minimum> {
    let n = r.dim();
    if r.max_abs() == 0.0 {
        let e = ComplexVector::basis(n, 0);
        return Ok(Minimum { value: 0.0, frame: FramePair { xi: e.clone(), eta: e }, iterations: 0 });
    }
    let sym = r.symmetrized();
    // Each random start is run twice: as drawn, and with eta replaced by its
    // block minimizer for the drawn xi. The greedy xi-first sweep has wide
    // flat basins (e.g. xi parallel to z on the Hopf family) that the
    // eta-first sweep avoids, and vice versa.
    let mut starts = Vec::with_capacity(2 * opts.starts + extra.len());
    for s in 0..opts.starts {
        let mut rng = stream_rng(opts.seed, stream, s as u64);
        let xi = ComplexVector::random_unit(n, &mut rng);
        let eta = ComplexVector::random_unit(n, &mut rng);
        let (_, eta_first) = block_min(&form_over_eta(&sym, &xi)?)?;
        starts.push(FramePair { xi: xi.clone(), eta });
        starts.push(FramePair { xi, eta: eta_first });
    }
    starts.extend(extra.iter().cloned());
    if starts.is_empty() {
        return Err(GeometryError::InvalidInput("at least one start is required".into()));
    }
    let results = starts
        .par_iter()
        .map(|s| alternating_descent(&sym, s, opts.max_iter, opts.tol).map(|d| d.minimum))
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(results).expect("non-empty"))
}

/// Riemannian gradient descent with Armijo backtracking for the sectional
/// curvature `f(xi) = R(xi, conj xi, xi, conj xi)` on the unit sphere.
pub fn sectional_descent(r: &CurvatureTensor, start: &ComplexVector, max_iter: usize, tol: f64) -> Result<Minimum> {
    let n = r.dim();
    start.require_dim(n)?;
    let mut xi = start.normalized()?;
    let mut value = hsc(r, &xi)?;
    let mut step = 1.0 / r.max_abs().max(1e-300);
    let mut iterations = 0;
    for iter in 1..=max_iter {
        iterations = iter;
        // d f / d conj(xi) = A(xi)^T xi + B(xi)^T xi
        let a = form_over_xi(r, &xi)?;
        let b = form_over_eta(r, &xi)?;
        let grad: Vec<Complex64> = (0..n)
            .map(|m| (0..n).map(|k| (a.get(k, m) + b.get(k, m)) * xi[k]).sum())
            .collect();
        let radial: Complex64 = xi.as_slice().iter().zip(&grad).map(|(x, g)| x.conj() * g).sum();
        let tangent: Vec<Complex64> = grad.iter().zip(xi.as_slice()).map(|(g, x)| g - x * radial.re).collect();
        let gnorm2: f64 = tangent.iter().map(|g| g.norm_sqr()).sum();
        if gnorm2.sqrt() <= 1e-12 * r.max_abs().max(1.0) {
            break;
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial = ComplexVector::new(
                xi.as_slice().iter().zip(&tangent).map(|(x, g)| x - g * (2.0 * step)).collect(),
            )?
            .normalized()?;
            let tv = hsc(r, &trial)?;
            if tv <= value - 1e-4 * 2.0 * step * gnorm2 {
                accepted = Some((trial, tv));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, tv)) = accepted else { break };
        let change = value - tv;
        xi = trial;
        value = tv;
        step *= 2.0;
        if change <= tol {
            break;
        }
    }
    Ok(Minimum { value, frame: FramePair { xi: xi.clone(), eta: xi }, iterations })
}

/// Minimum sectional curvature over unit `xi` (multi-start gradient descent).
pub fn min_hsc(r: &CurvatureTensor, opts: &MinimizeOptions, extra: &[ComplexVector]) -> Result<Minimum> {
    min_hsc_stream(r, opts, extra, 0)
}

pub(crate) fn min_hsc_stream(
    r: &CurvatureTensor,
    opts: &MinimizeOptions,
    extra: &[ComplexVector],
    stream: u64,
) -> Result<Minimum> {
    let n = r.dim();
    if r.max_abs() == 0.0 {
        let e = ComplexVector::basis(n, 0);
        return Ok(Minimum { value: 0.0, frame: FramePair { xi: e.clone(), eta: e }, iterations: 0 });
    }
    let sym = r.symmetrized();
    let mut starts: Vec<ComplexVector> = (0..opts.starts)
        .map(|s| ComplexVector::random_unit(n, &mut stream_rng(opts.seed ^ 0x5eC7, stream, s as u64)))
        .collect();
    starts.extend(extra.iter().cloned());
    if starts.is_empty() {
        return Err(GeometryError::InvalidInput("at least one start is required".into()));
    }
    // gradient descent converges linearly at best; give it more room than the
    // exact block minimization
    let max_iter = opts.max_iter * 10;
    let results = starts
        .par_iter()
        .map(|s| sectional_descent(&sym, s, max_iter, opts.tol * 1e-2))
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(results).expect("non-empty"))
}
