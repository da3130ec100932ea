//! Closed-form geometry of the Hopf metric family
//! `h_{i jbar} = (delta_{ij} |z|^2 - lambda zbar^i z^j) / |z|^4`, `lambda < 1`,
//! on `(C^n \ {0}) / (z ~ alpha z)`.
//!
//! Every function evaluates the literal formula at the given `z`; no
//! unitary or scaling reduction is applied.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{Definiteness, HermitianMatrix, Point};
use crate::chern::MetricField;
use crate::error::{GeometryError, Result};
use crate::tensor::{Christoffel, CurvatureTensor};

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The flow family: dimension `n >= 2` and initial parameter `T0 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfFamily {
    n: usize,
    t0: f64,
}

impl HopfFamily {
    pub fn new(n: usize, t0: f64) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::ParameterOutOfRange(format!("dimension n = {n} must be >= 2")));
        }
        if !(t0 >= 0.0) || !t0.is_finite() {
            return Err(GeometryError::ParameterOutOfRange(format!("T0 = {t0} must be finite and >= 0")));
        }
        Ok(Self { n, t0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Maximal existence time `(T0 + 1)/n`.
    pub fn t_max(&self) -> f64 {
        (self.t0 + 1.0) / self.n as f64
    }

    /// Conformal factor `1 + T0 - n t` relating `omega(t)` to `omega_lambda(t)`.
    pub fn det_factor(&self, t: f64) -> f64 {
        1.0 + self.t0 - self.n as f64 * t
    }

    pub(crate) fn require_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t < self.t_max()) {
            return Err(GeometryError::ParameterOutOfRange(format!(
                "t = {t} outside [0, T_max = {})",
                self.t_max()
            )));
        }
        Ok(())
    }
}

/// The rescaled metric `omega_lambda` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaMetric {
    n: usize,
    lambda: f64,
}

impl LambdaMetric {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if n < 1 {
            return Err(GeometryError::ParameterOutOfRange("dimension must be >= 1".into()));
        }
        if !(lambda < 1.0) || !lambda.is_finite() {
            return Err(GeometryError::ParameterOutOfRange(format!("lambda = {lambda} must be finite and < 1")));
        }
        Ok(Self { n, lambda })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn check(&self, z: &Point) -> Result<f64> {
        z.require_dim(self.n)?;
        z.require_nonzero()?;
        Ok(z.norm_sqr())
    }
}

impl MetricField for LambdaMetric {
    fn evaluate(&self, z: &Point) -> Result<HermitianMatrix> {
        hopf_metric(self, z)
    }

    fn label(&self) -> String {
        format!("hopf(n={}, lambda={})", self.n, self.lambda)
    }

    fn is_closed_form(&self) -> bool {
        true
    }
}

/// Diagonal identification `z ~ (alpha_1 z^1, ..., alpha_n z^n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfQuotient {
    alpha: Vec<Complex64>,
}

impl HopfQuotient {
    pub fn new(alpha: Vec<Complex64>) -> Result<Self> {
        let first = alpha
            .first()
            .ok_or_else(|| GeometryError::ParameterOutOfRange("empty multiplier list".into()))?
            .norm();
        if alpha.iter().any(|a| (a.norm() - first).abs() > 1e-12 * first.max(1.0)) {
            return Err(GeometryError::ParameterOutOfRange("multipliers must have equal moduli".into()));
        }
        if (first - 1.0).abs() <= 1e-12 || first == 0.0 {
            return Err(GeometryError::ParameterOutOfRange(format!("multiplier modulus {first} must differ from 1 and 0")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn apply(&self, z: &Point) -> Result<Point> {
        z.require_dim(self.alpha.len())?;
        Point::new(z.as_slice().iter().zip(&self.alpha).map(|(w, a)| w * a).collect())
    }
}

pub fn hopf_metric(m: &LambdaMetric, z: &Point) -> Result<HermitianMatrix> {
    let r2 = m.check(z)?;
    let r4 = r2 * r2;
    Ok(HermitianMatrix::from_fn(m.n, |i, j| {
        (re(delta(i, j) * r2) - z[i].conj() * z[j] * m.lambda) / r4
    })?
    .with_definiteness(Definiteness::Positive))
}

/// The transpose inverse `h^{i jbar}`, satisfying `sum_j h^{i jbar} h_{k jbar} = delta_{ik}`.
pub fn hopf_metric_inverse(m: &LambdaMetric, z: &Point) -> Result<HermitianMatrix> {
    let r2 = m.check(z)?;
    let c = m.lambda / ((1.0 - m.lambda) * r2);
    Ok(HermitianMatrix::from_fn(m.n, |i, j| (re(delta(i, j)) + z[i] * z[j].conj() * c) * r2)?
        .with_definiteness(Definiteness::Positive))
}

/// `det h = (1 - lambda) |z|^{-2n}`.
pub fn hopf_det(m: &LambdaMetric, z: &Point) -> Result<f64> {
    let r2 = m.check(z)?;
    Ok((1.0 - m.lambda) * r2.powi(-(m.n as i32)))
}

/// `Gamma^p_{ki} = lambda zbar^i zbar^k z^p / |z|^4 - (lambda delta_{pk} zbar^i + delta_{ip} zbar^k) / |z|^2`.
pub fn hopf_christoffel(m: &LambdaMetric, z: &Point) -> Result<Christoffel> {
    let r2 = m.check(z)?;
    let l = m.lambda;
    Ok(Christoffel::from_fn(m.n, |p, k, i| {
        z[i].conj() * z[k].conj() * z[p] * (l / (r2 * r2))
            - (z[i].conj() * (l * delta(p, k)) + z[k].conj() * delta(i, p)) / r2
    }))
}

/// Chern curvature `R_{k jbar i qbar}` of `omega_lambda`:
///
/// ```text
/// delta_{iq} (delta_{jk}|z|^2 - zbar^k z^j) / |z|^6
///   + lambda (delta_{ij}|z|^2 - zbar^i z^j)(delta_{kq}|z|^2 - zbar^k z^q) / |z|^8
///   + (lambda^2 - 2 lambda) zbar^i z^q (delta_{kj}|z|^2 - zbar^k z^j) / |z|^8
/// ```
pub fn hopf_curvature(m: &LambdaMetric, z: &Point) -> Result<CurvatureTensor> {
    let r2 = m.check(z)?;
    let l = m.lambda;
    let r6 = r2 * r2 * r2;
    let r8 = r6 * r2;
    // p(a, b) = delta_{ab}|z|^2 - zbar^a z^b
    let p = |a: usize, b: usize| re(delta(a, b) * r2) - z[a].conj() * z[b];
    Ok(CurvatureTensor::from_fn(z.clone(), |k, j, i, q| {
        p(k, j) * delta(i, q) / r6
            + p(i, j) * p(k, q) * (l / r8)
            + z[i].conj() * z[q] * p(k, j) * ((l * l - 2.0 * l) / r8)
    }))
}

/// `Ric(omega_lambda)_{i jbar} = n (delta_{ij}|z|^2 - zbar^i z^j) / |z|^4`; independent of lambda.
pub fn ricci_closed(m: &LambdaMetric, z: &Point) -> Result<HermitianMatrix> {
    let r2 = m.check(z)?;
    let n = m.n as f64;
    Ok(HermitianMatrix::from_fn(m.n, |i, j| {
        (re(delta(i, j) * r2) - z[i].conj() * z[j]) * (n / (r2 * r2))
    })?
    .with_definiteness(Definiteness::NotPositive))
}

/// `lambda(t) = (T0 - n t) / (1 + T0 - n t)`.
pub fn lambda_of_t(fam: &HopfFamily, t: f64) -> Result<f64> {
    fam.require_time(t)?;
    let nt = fam.n as f64 * t;
    Ok((fam.t0 - nt) / (1.0 + fam.t0 - nt))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `T0/n`: end of the interval with non-negative bisectional curvature.
    pub nonneg_end: f64,
    /// `(2 T0 + 1)/(2n)`: start of the interval where it fails.
    pub neg_start: f64,
    /// `(T0 + 1)/n`.
    pub t_max: f64,
}

pub fn thresholds(fam: &HopfFamily) -> Thresholds {
    let n = fam.n as f64;
    Thresholds {
        nonneg_end: fam.t0 / n,
        neg_start: (2.0 * fam.t0 + 1.0) / (2.0 * n),
        t_max: fam.t_max(),
    }
}

/// Largest `|alpha_i conj(alpha_j) h_{i jbar}(alpha z) - h_{i jbar}(z)|`, the
/// failure of the metric to descend to the quotient.
pub fn quotient_invariance(m: &LambdaMetric, q: &HopfQuotient, z: &Point) -> Result<f64> {
    let here = hopf_metric(m, z)?;
    let there = hopf_metric(m, &q.apply(z)?)?;
    let a = q.alpha();
    let mut worst: f64 = 0.0;
    for i in 0..m.n {
        for j in 0..m.n {
            let pulled = a[i] * a[j].conj() * there.get(i, j);
            worst = worst.max((pulled - here.get(i, j)).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{hermitian_eigenvalues, hermitian_inverse_det, ComplexVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lm(n: usize, lambda: f64) -> LambdaMetric {
        LambdaMetric::new(n, lambda).unwrap()
    }

    fn e(n: usize, k: usize) -> Point {
        ComplexVector::basis(n, k)
    }

    fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Point {
        let r = rng.random_range(0.5..2.0);
        ComplexVector::random_unit(n, rng).scale(re(r))
    }

    #[test]
    fn metric_at_first_basis_vector() {
        for lambda in [-2.0, 0.0, 0.5] {
            let h = hopf_metric(&lm(2, lambda), &e(2, 0)).unwrap();
            assert!(h.max_abs_diff(&HermitianMatrix::diagonal(&[1.0 - lambda, 1.0])) < 1e-15);
        }
    }

    #[test]
    fn metric_lambda_zero_is_conformally_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = random_point(3, &mut rng);
        let h = hopf_metric(&lm(3, 0.0), &z).unwrap();
        assert!(h.max_abs_diff(&HermitianMatrix::identity(3).scale(1.0 / z.norm_sqr())) < 1e-15);
    }

    #[test]
    fn metric_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let z = random_point(3, &mut rng);
            let c = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let m = lm(3, rng.random_range(-3.0..0.99));
            let scaled = hopf_metric(&m, &z.scale(c)).unwrap();
            let expect = hopf_metric(&m, &z).unwrap().scale(1.0 / c.norm_sqr());
            assert!(scaled.max_abs_diff(&expect) < 1e-12 * expect.max_abs());
        }
    }

    #[test]
    fn metric_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.random_range(2..=4);
            let lambda = rng.random_range(-3.0..0.99);
            let z = random_point(n, &mut rng);
            let r2 = z.norm_sqr();
            let ev = hermitian_eigenvalues(&hopf_metric(&lm(n, lambda), &z).unwrap()).unwrap();
            let mut expect = vec![1.0 / r2; n];
            expect[0] = (1.0 - lambda) / r2;
            expect.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-10, "{ev:?} vs {expect:?}");
            }
        }
    }

    #[test]
    fn lambda_at_least_one_rejected() {
        assert!(matches!(LambdaMetric::new(2, 1.0), Err(GeometryError::ParameterOutOfRange(_))));
        assert!(matches!(LambdaMetric::new(2, 1.5), Err(GeometryError::ParameterOutOfRange(_))));
        assert_eq!(hopf_metric(&lm(2, 0.5), &ComplexVector::zeros(2)), Err(GeometryError::SingularPoint));
    }

    #[test]
    fn inverse_examples() {
        let inv = hopf_metric_inverse(&lm(2, 0.5), &e(2, 0)).unwrap();
        assert!(inv.max_abs_diff(&HermitianMatrix::diagonal(&[2.0, 1.0])) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = random_point(3, &mut rng);
        let inv = hopf_metric_inverse(&lm(3, 0.0), &z).unwrap();
        assert!(inv.max_abs_diff(&HermitianMatrix::identity(3).scale(z.norm_sqr())) < 1e-15);
    }

    #[test]
    fn transpose_inverse_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(2..=4);
            let m = lm(n, rng.random_range(-3.0..0.99));
            let z = random_point(n, &mut rng);
            let h = hopf_metric(&m, &z).unwrap();
            let hinv = hopf_metric_inverse(&m, &z).unwrap();
            let (numeric, _) = hermitian_inverse_det(&h).unwrap();
            for i in 0..n {
                for k in 0..n {
                    let s: Complex64 = (0..n).map(|j| hinv.get(i, j) * h.get(k, j)).sum();
                    assert!((s - re(delta(i, k))).norm() < 1e-12);
                    // transpose of the ordinary inverse
                    assert!((hinv.get(i, k) - numeric.get(k, i)).norm() < 1e-10 * hinv.max_abs());
                }
            }
        }
    }

    #[test]
    fn determinant() {
        let z = ComplexVector::new(vec![Complex64::new(0.6, 0.8), Complex64::new(0.0, 0.0)]).unwrap();
        assert!((hopf_det(&lm(2, 0.0), &z).unwrap() - 1.0).abs() < 1e-15);

        // n=2, lambda=0.5, |z|^2=2 -> 0.125, checked against a numeric determinant
        let z = ComplexVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let m = lm(2, 0.5);
        let (_, det) = hermitian_inverse_det(&hopf_metric(&m, &z).unwrap()).unwrap();
        assert!((det.re - 0.125).abs() < 1e-15);
        assert!((hopf_det(&m, &z).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn initial_metric_determinant() {
        // omega_0 = (1 + T0) omega_lambda at lambda = T0/(1+T0)
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let n = rng.random_range(2..=4);
            let t0: f64 = rng.random_range(0.0..3.0);
            let z = random_point(n, &mut rng);
            let omega0 = hopf_metric(&lm(n, t0 / (1.0 + t0)), &z).unwrap().scale(1.0 + t0);
            let (_, det) = hermitian_inverse_det(&omega0).unwrap();
            let expect = (1.0 + t0).powi(n as i32 - 1) * z.norm_sqr().powi(-(n as i32));
            assert!((det.re - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn christoffel_examples() {
        for lambda in [-2.0, 0.0, 0.5] {
            let g = hopf_christoffel(&lm(2, lambda), &e(2, 0)).unwrap();
            assert!((g.get(1, 0, 1) - re(-1.0)).norm() < 1e-15);
            assert!((g.get(1, 1, 0) - re(-lambda)).norm() < 1e-15);
            assert!((g.get(0, 0, 0) - re(-1.0)).norm() < 1e-15);
        }
        let g = hopf_christoffel(&lm(3, 0.0), &e(3, 0)).unwrap();
        for p in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    let expect = -delta(i, p) * delta(k, 0);
                    assert_eq!(g.get(p, k, i), re(expect));
                }
            }
        }
    }

    #[test]
    fn curvature_examples() {
        for lambda in [-2.0, 0.0, 0.5] {
            let r = hopf_curvature(&lm(2, lambda), &e(2, 0)).unwrap();
            assert!((r.get(1, 1, 1, 1) - re(1.0 + lambda)).norm() < 1e-14);
            assert!((r.get(1, 1, 0, 0) - re((1.0 - lambda).powi(2))).norm() < 1e-14);
            assert!(r.get(0, 0, 1, 1).norm() < 1e-15);
            assert!(r.get(0, 0, 0, 0).norm() < 1e-15);
        }
    }

    #[test]
    fn curvature_symmetry_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(2..=4);
            let m = lm(n, rng.random_range(-3.0..0.99));
            let z = random_point(n, &mut rng);
            let r = hopf_curvature(&m, &z).unwrap();
            assert!(r.chern_symmetry_defect() < 1e-12);
            let c = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let scaled = hopf_curvature(&m, &z.scale(c)).unwrap();
            let n4 = c.norm_sqr().powi(2);
            let expect = CurvatureTensor::from_fn(z.scale(c), |k, j, i, q| r.get(k, j, i, q) / n4);
            assert!(scaled.relative_deviation(&expect) < 1e-10);
        }
    }

    #[test]
    fn ricci_examples() {
        let ric = ricci_closed(&lm(2, 0.3), &e(2, 0)).unwrap();
        assert!(ric.max_abs_diff(&HermitianMatrix::diagonal(&[0.0, 2.0])) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = random_point(3, &mut rng);
        let ric = ricci_closed(&lm(3, 0.3), &z).unwrap();
        // kernel direction: Ric as a matrix annihilates conj(z)
        let kernel = ric.mul_vec(&z.conj());
        assert!(kernel.iter().all(|c| c.norm() < 1e-14));
        // bitwise lambda-independence
        for lambda in [-3.0, -1.0, 0.0, 0.9] {
            assert_eq!(ricci_closed(&lm(3, lambda), &z).unwrap(), ric);
        }
    }

    #[test]
    fn lambda_of_t_values() {
        let fam = HopfFamily::new(2, 1.0).unwrap();
        assert!((lambda_of_t(&fam, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((lambda_of_t(&fam, 0.75).unwrap() + 1.0).abs() < 1e-15);
        assert!((lambda_of_t(&fam, 0.9).unwrap() + 4.0).abs() < 1e-12);
        assert!((lambda_of_t(&fam, 0.5).unwrap()).abs() < 1e-15);
        assert!(lambda_of_t(&fam, 1.0).is_err());
        assert!(lambda_of_t(&fam, -0.1).is_err());
        let mut prev = f64::INFINITY;
        for k in 0..100 {
            let l = lambda_of_t(&fam, k as f64 * 0.0099).unwrap();
            assert!(l < prev && l < 1.0);
            prev = l;
        }
        assert!(lambda_of_t(&fam, fam.t_max() - 1e-9).unwrap() < -1e8);
    }

    #[test]
    fn threshold_values() {
        let th = thresholds(&HopfFamily::new(2, 1.0).unwrap());
        assert_eq!((th.nonneg_end, th.neg_start, th.t_max), (0.5, 0.75, 1.0));
        let th = thresholds(&HopfFamily::new(2, 0.0).unwrap());
        assert_eq!((th.nonneg_end, th.neg_start, th.t_max), (0.0, 0.25, 0.5));
        let th = thresholds(&HopfFamily::new(3, 2.0).unwrap());
        assert!((th.nonneg_end - 2.0 / 3.0).abs() < 1e-15);
        assert!((th.neg_start - 5.0 / 6.0).abs() < 1e-15);
        assert!((th.t_max - 1.0).abs() < 1e-15);
        assert!(th.nonneg_end < th.neg_start && th.neg_start < th.t_max);
    }

    #[test]
    fn family_validation() {
        assert!(HopfFamily::new(1, 1.0).is_err());
        assert!(HopfFamily::new(2, -0.1).is_err());
        assert!(HopfFamily::new(2, 0.0).is_ok());
    }

    #[test]
    fn quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = HopfQuotient::new(vec![re(2.0), re(2.0)]).unwrap();
        let q2 = HopfQuotient::new(vec![Complex64::from_polar(2.0, 0.7), Complex64::from_polar(2.0, -2.1)]).unwrap();
        for _ in 0..50 {
            let z = random_point(2, &mut rng);
            let m = lm(2, rng.random_range(-3.0..0.99));
            assert!(quotient_invariance(&m, &q, &z).unwrap() <= 1e-10);
            assert!(quotient_invariance(&m, &q2, &z).unwrap() <= 1e-10);
        }
        assert!(matches!(HopfQuotient::new(vec![re(2.0), re(3.0)]), Err(GeometryError::ParameterOutOfRange(_))));
        assert!(matches!(HopfQuotient::new(vec![re(1.0), re(-1.0)]), Err(GeometryError::ParameterOutOfRange(_))));
    }
}
