//! Acceptance criteria 1-10, one PASS/FAIL line each.
//!
//! Quantities with an elementary closed form are recomputed here from
//! scratch (own determinant, own metric entries, own (a,b) values) rather
//! than through the library paths they check.

use std::process::Command;
use std::time::{Duration, Instant};

use chernflow::analysis::{
    classify_time, empirical_min, hsc, threshold_bisect, MinimizeOptions, Quantity, ThresholdOptions,
};
use chernflow::calculus::{ComplexVector, Point};
use chernflow::chern::{curvature_numeric, ricci_numeric};
use chernflow::flow::{euler_flow, exact_flow_metric, FlowState, HopfExtension};
use chernflow::hopf::{hopf_curvature, hopf_metric, hopf_metric_inverse, lambda_of_t, HopfFamily, LambdaMetric};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    ComplexVector::random_unit(n, rng).scale(c(radius, 0.0))
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut d = c(1.0, 0.0);
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).unwrap();
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        let pivot = a[col][col];
        d *= pivot;
        for r in col + 1..n {
            let f = a[r][col] / pivot;
            for k in col..n {
                let v = a[col][k];
                a[r][k] -= f * v;
            }
        }
    }
    d
}

/// `(delta_ij |z|^2 - lambda zbar^i z^j) / |z|^4`, entry by entry.
fn metric_entries(lambda: f64, z: &Point) -> Vec<Vec<Complex64>> {
    let n = z.dim();
    let r2: f64 = (0..n).map(|i| z[i].norm_sqr()).sum();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (c(if i == j { r2 } else { 0.0 }, 0.0) - z[i].conj() * z[j] * lambda) / (r2 * r2))
                .collect()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let lambda: f64 = rng.random_range(-3.0..0.99);
        let radius = rng.random_range(0.5..2.0);
        let z = random_point(n, radius, &mut rng);
        let m = LambdaMetric::new(n, lambda).unwrap();
        let closed = hopf_curvature(&m, &z).unwrap();
        let numeric = curvature_numeric(&m, &z).unwrap();
        let scale = closed.max_abs();
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for q in 0..n {
                        worst = worst.max((numeric.get(k, j, i, q) - closed.get(k, j, i, q)).norm() / scale);
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("worst componentwise relative deviation {worst:.3e}");
    if worst <= 1e-5 && elapsed <= Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(format!("{detail}, {:.1} s", elapsed.as_secs_f64()))
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let lambda: f64 = rng.random_range(-3.0..0.99);
        let z = random_point(n, rng.random_range(0.5..2.0), &mut rng);
        let r2 = z.norm_sqr();
        let m = LambdaMetric::new(n, lambda).unwrap();

        // sum_j h^{i jbar} h_{k jbar} = delta_ik
        let h = hopf_metric(&m, &z).unwrap();
        let hinv = hopf_metric_inverse(&m, &z).unwrap();
        for i in 0..n {
            for k in 0..n {
                let s: Complex64 = (0..n).map(|j| hinv.get(i, j) * h.get(k, j)).sum();
                worst = worst.max((s - c(if i == k { 1.0 } else { 0.0 }, 0.0)).norm());
            }
        }

        let want = (1.0 - lambda) * r2.powi(-(n as i32));
        worst = worst.max((det(metric_entries(lambda, &z)) - c(want, 0.0)).norm() / want);

        let t0 = rng.random_range(0.0..3.0);
        let fam = HopfFamily::new(n, t0).unwrap();
        let t = rng.random_range(0.0..0.999) * (t0 + 1.0) / n as f64;
        let factor = 1.0 + t0 - n as f64 * t;
        let w = exact_flow_metric(&fam, t, &z).unwrap();
        let rows: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| w.get(i, j)).collect()).collect();
        let want = factor.powi(n as i32 - 1) * r2.powi(-(n as i32));
        worst = worst.max((det(rows) - c(want, 0.0)).norm() / want);

        // omega_lambda = omega(t) / (1 + T0 - n t) with lambda = (T0 - n t)/(1 + T0 - n t)
        let lam_t = (t0 - n as f64 * t) / factor;
        let expect = metric_entries(lam_t, &z);
        let size = expect.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((w.get(i, j) / factor - expect[i][j]).norm() / size);
            }
        }
    }
    let detail = format!("worst relative residue {worst:.3e}");
    if worst <= 1e-10 { Ok(detail) } else { Err(detail) }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        let fam = HopfFamily::new(n, 1.0).unwrap();
        for _ in 0..5 {
            let z = random_point(n, 1.0, &mut rng);
            let r2 = z.norm_sqr();
            for frac in [0.0, 0.3, 0.6, 0.9] {
                let t = frac * fam.t_max();
                let ric = ricci_numeric(&FlowState::new(fam, t).unwrap(), &z).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let d = if i == j { r2 } else { 0.0 };
                        let want = (c(d, 0.0) - z[i].conj() * z[j]) * (n as f64 / (r2 * r2));
                        worst = worst.max((ric.get(i, j) - want).norm());
                    }
                }
            }
        }
    }
    let detail = format!("worst entry deviation {worst:.3e}");
    if worst <= 1e-6 { Ok(detail) } else { Err(detail) }
}

fn criterion_4() -> Outcome {
    let opts = MinimizeOptions { starts: 32, ..Default::default() };
    let mut worst = f64::INFINITY;
    for n in [2usize, 3] {
        let fam = HopfFamily::new(n, 1.0).unwrap();
        let end = 1.0 / n as f64;
        for k in 0..10 {
            let t = end * k as f64 / 9.0;
            let lambda = lambda_of_t(&fam, t).unwrap();
            worst = worst.min(empirical_min(n, lambda, Quantity::Hbc, 50, &opts).unwrap());
        }
    }
    let detail = format!("smallest min_hbc {worst:.3e}");
    if worst >= -1e-9 { Ok(detail) } else { Err(detail) }
}

fn criterion_5() -> Outcome {
    let opts = MinimizeOptions::default();
    let mut largest = f64::NEG_INFINITY;
    let mut residue: f64 = 0.0;
    for n in [2usize, 3] {
        let fam = HopfFamily::new(n, 1.0).unwrap();
        let lo = 3.0 / (2.0 * n as f64);
        let hi = 0.999 * 2.0 / n as f64;
        for k in 1..=10 {
            let t = lo + (hi - lo) * k as f64 / 10.0;
            let lambda = (1.0 - n as f64 * t) / (2.0 - n as f64 * t);
            let rep = classify_time(&fam, t, 10, &opts).unwrap();
            let w = rep.witness.ok_or(format!("no witness at t = {t}"))?;
            let (z, xi) = (&w.z, &w.frame.xi);
            let zx: Complex64 = (0..n).map(|i| z[i].conj() * xi[i]).sum();
            if zx.norm() > 1e-12 {
                return Err(format!("witness not orthogonal to z at t = {t}"));
            }
            let r2 = z.norm_sqr();
            let b = r2 * xi.norm_sqr();
            let formula = b * b * (lambda + 1.0) / r2.powi(4);
            let value = hsc(&hopf_curvature(&LambdaMetric::new(n, lambda).unwrap(), z).unwrap(), xi).unwrap();
            residue = residue.max((value - formula).abs());
            largest = largest.max(value);
            if rep.min_hbc > value {
                return Err(format!("min_hbc {} above witness {value} at t = {t}", rep.min_hbc));
            }
        }
    }
    let detail = format!("largest witness HSC {largest:.3e}, formula residue {residue:.3e}");
    if largest < -1e-6 && residue <= 1e-10 { Ok(detail) } else { Err(detail) }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=4);
        let lambda: f64 = rng.random_range(-3.0..0.99);
        let z = random_point(n, rng.random_range(0.5..2.0), &mut rng);
        let xi = ComplexVector::random_unit(n, &mut rng);
        let r2 = z.norm_sqr();
        let zx: Complex64 = (0..n).map(|i| z[i].conj() * xi[i]).sum();
        let (a, b) = (zx.norm_sqr(), r2 * xi.norm_sqr());
        let expr = ((b - a) * a * (lambda - 1.0).powi(2) + (b - a).powi(2) * (lambda + 1.0)) / r2.powi(4);
        let v = hsc(&hopf_curvature(&LambdaMetric::new(n, lambda).unwrap(), &z).unwrap(), &xi).unwrap();
        worst = worst.max((v - expr).abs());
    }
    let detail = format!("worst |contraction - (a,b)-form| {worst:.3e}");
    if worst <= 1e-10 { Ok(detail) } else { Err(detail) }
}

fn criterion_7() -> Outcome {
    let opts = MinimizeOptions::default();
    let mut worst = f64::INFINITY;
    for n in 2..=4 {
        worst = worst.min(empirical_min(n, -1.0, Quantity::Hsc, 20, &opts).unwrap());
    }
    let detail = format!("min HSC at lambda = -1: {worst:.3e}");
    if worst >= -1e-9 { Ok(detail) } else { Err(detail) }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let fam = HopfFamily::new(2, 1.0).unwrap();
    let points: Vec<Point> = (0..20)
        .map(|_| {
            let radius = rng.random_range(0.5..2.0);
            random_point(2, radius, &mut rng)
        })
        .collect();
    let t_end = 0.9 * fam.t_max();
    let res = euler_flow(&FlowState::new(fam, 0.0).unwrap(), &points, 1e-3, t_end, &HopfExtension).unwrap();
    let mut worst: f64 = 0.0;
    for (z, g) in points.iter().zip(&res.metrics) {
        // omega(t) = (1 + T0 - n t) h_{lambda(t)}
        let factor = 2.0 - 2.0 * t_end;
        let exact = metric_entries((1.0 - 2.0 * t_end) / factor, z);
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((g.get(i, j) - exact[i][j] * factor).norm());
            }
        }
    }
    let detail = format!("{} steps, worst entry deviation {worst:.3e}", res.steps);
    if worst <= 1e-5 { Ok(detail) } else { Err(detail) }
}

fn criterion_9() -> Outcome {
    let opts = ThresholdOptions { resolution: 1e-4, ..Default::default() };
    let mut parts = Vec::new();
    let mut ok = true;
    for (t0, n) in [(1.0, 2usize), (2.0, 3), (0.0, 2)] {
        let fam = HopfFamily::new(n, t0).unwrap();
        let (lo, hi) = (t0 / n as f64, (2.0 * t0 + 1.0) / (2.0 * n as f64));
        match threshold_bisect(&fam, Quantity::Hbc, &opts) {
            Ok(r) => {
                ok &= r.t_star >= lo && r.t_star <= hi;
                parts.push(format!("(T0={t0}, n={n}) t* = {:.6} in [{lo:.6}, {hi:.6}]", r.t_star));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("(T0={t0}, n={n}) {e}"));
            }
        }
    }
    let detail = parts.join("; ");
    if ok { Ok(detail) } else { Err(detail) }
}

fn criterion_10() -> Outcome {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_chernflow"))
            .args(["verify", "--seed", "42"])
            .output()
            .map_err(|e| format!("cannot launch binary: {e}"))?;
        Ok::<_, String>((out, start.elapsed()))
    };
    let (a, ta) = run()?;
    let (b, tb) = run()?;
    let code = a.status.code();
    if code != Some(0) || b.status.code() != Some(0) {
        return Err(format!("exit codes {:?} / {:?}\n{}", code, b.status.code(), String::from_utf8_lossy(&a.stdout)));
    }
    if a.stdout != b.stdout {
        return Err("outputs differ between runs".into());
    }
    let slowest = ta.max(tb);
    if slowest > Duration::from_secs(60) {
        return Err(format!("took {:.1} s", slowest.as_secs_f64()));
    }
    Ok(format!("exit 0 twice, {} identical bytes", a.stdout.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed-form curvature vs oracle", criterion_1),
        ("algebraic identities", criterion_2),
        ("Ricci invariance", criterion_3),
        ("non-negativity on [0, T0/n]", criterion_4),
        ("negativity past (2T0+1)/(2n)", criterion_5),
        ("(a,b)-form identity", criterion_6),
        ("HSC boundary at lambda = -1", criterion_7),
        ("flow exactness", criterion_8),
        ("threshold bracket", criterion_9),
        ("verify determinism and exit code", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
