//! Operator assemblies against brute-force loop oracles, plus the
//! structural invariants (linearity, quadrature consistency, degenerate
//! bounds, convergence).

use ndarray::Array2;
use quadnn::integral_ops::{
    Fredholm2dAssembly, Fredholm3dAssembly, FredholmAssembly, Volterra2dAssembly,
    VolterraAssembly,
};
use quadnn::quadrature::{map_rule, Family, QuadratureRule};
use quadnn::rng::SeededRng;
use quadnn_oracles as oracles;

/// Random smooth kernel/integrand family driven by a handful of drawn
/// coefficients.
fn random_coeffs(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.uniform_in(-2.0, 2.0)).collect()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn fredholm_matches_naive_oracle_on_random_cases() {
    let mut rng = SeededRng::new(31);
    for case in 0..20 {
        let n = 4 + (case % 9);
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let a = rng.uniform_in(-2.0, 1.0);
        let b = a + rng.uniform_in(0.5, 3.0);
        let mapped = map_rule(&rule, a, b).unwrap();
        let c = random_coeffs(&mut rng, 3);
        let kernel = move |x: f64, t: f64| c[0] + c[1] * x * t + c[2] * (0.3 * (x - t)).sin();
        let u: Vec<f64> = mapped.mapped_nodes.iter().map(|&t| (0.5 * t).cos() + t).collect();
        let asm = FredholmAssembly::new(&kernel, &mapped.mapped_nodes.clone(), &mapped).unwrap();
        let fast = asm.apply(&u).unwrap();
        let naive = oracles::naive_fredholm(
            &kernel,
            &mapped.mapped_nodes,
            &mapped.mapped_nodes,
            &rule.weights,
            mapped.scale,
            &u,
        );
        for (f, n) in fast.iter().zip(&naive) {
            assert!(rel_diff(*f, *n) < 1e-12, "case {case}: {f} vs {n}");
        }
    }
}

#[test]
fn volterra_matches_naive_oracle_on_random_cases() {
    let mut rng = SeededRng::new(37);
    for case in 0..20 {
        let n = 4 + (case % 9);
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let upper = rng.uniform_in(0.5, 2.5);
        let x: Vec<f64> = map_rule(&rule, 0.0, upper).unwrap().mapped_nodes;
        let c = random_coeffs(&mut rng, 3);
        let kernel = move |x: f64, t: f64| c[0] + c[1] * (x - t) + c[2] * x * t;
        let d = random_coeffs(&mut rng, 2);
        let u_fn = move |t: f64| d[0] * t + (d[1] * t).cos();
        let asm = VolterraAssembly::new(&kernel, |_| 0.0, |x| x, &x, &rule).unwrap();
        let mut u_inner = asm.inner_nodes.clone();
        u_inner.mapv_inplace(&u_fn);
        let fast = asm.apply(&u_inner).unwrap();
        let naive = oracles::naive_volterra(
            &kernel,
            &|_| 0.0,
            &|x| x,
            &x,
            &rule.nodes,
            &rule.weights,
            &u_fn,
        );
        for (f, n) in fast.iter().zip(&naive) {
            assert!(rel_diff(*f, *n) < 1e-12, "case {case}: {f} vs {n}");
        }
    }
}

#[test]
fn fredholm_2d_matches_naive_oracle_on_random_cases() {
    let mut rng = SeededRng::new(41);
    for case in 0..20 {
        let n = 3 + (case % 4);
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let rx = map_rule(&rule, 0.0, rng.uniform_in(0.5, 2.0)).unwrap();
        let ry = map_rule(&rule, -1.0, rng.uniform_in(0.0, 1.5)).unwrap();
        let c = random_coeffs(&mut rng, 3);
        let kernel =
            move |x: f64, y: f64, s: f64, t: f64| c[0] + c[1] * x * t + c[2] * (y + s);
        let d = random_coeffs(&mut rng, 2);
        let u_fn = move |s: f64, t: f64| d[0] * s * t + d[1];
        let asm = Fredholm2dAssembly::new(&kernel, &rx, &ry).unwrap();
        let mut u = Array2::zeros((n, n));
        for (i, &s) in rx.mapped_nodes.iter().enumerate() {
            for (j, &t) in ry.mapped_nodes.iter().enumerate() {
                u[(i, j)] = u_fn(s, t);
            }
        }
        let fast = asm.apply(&u).unwrap();
        let naive = oracles::naive_fredholm_2d(
            &kernel,
            &rx.mapped_nodes,
            &ry.mapped_nodes,
            &rule.weights,
            &rule.weights,
            rx.scale,
            ry.scale,
            &u_fn,
        );
        for i in 0..n {
            for j in 0..n {
                assert!(rel_diff(fast[(i, j)], naive[i][j]) < 1e-12, "case {case} ({i},{j})");
            }
        }
    }
}

#[test]
fn volterra_2d_matches_naive_oracle_on_random_cases() {
    let mut rng = SeededRng::new(43);
    for case in 0..20 {
        let n = 3 + (case % 4);
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let x = map_rule(&rule, 0.0, rng.uniform_in(0.5, 1.5)).unwrap().mapped_nodes;
        let y = map_rule(&rule, 0.0, rng.uniform_in(0.5, 2.0)).unwrap().mapped_nodes;
        let c = random_coeffs(&mut rng, 2);
        let kernel = move |x: f64, _y: f64, s: f64, t: f64| (c[0] * (x - s)).exp() + c[1] * t;
        let d = random_coeffs(&mut rng, 2);
        let u_fn = move |s: f64, t: f64| d[0] * (s + t) + d[1] * s * t;
        let asm = Volterra2dAssembly::new(
            &kernel,
            |_| 0.0,
            |x| x,
            |_| 0.0,
            |y| y,
            &x,
            &y,
            &rule,
            &rule,
        )
        .unwrap();
        let pts = asm.inner_points_flat();
        let rows = n * n;
        let mut u = Array2::zeros((rows, rows));
        for r in 0..rows {
            for cidx in 0..rows {
                let row = r * rows + cidx;
                u[(r, cidx)] = u_fn(pts[(row, 0)], pts[(row, 1)]);
            }
        }
        let fast = asm.apply(&u).unwrap();
        let naive = oracles::naive_volterra_2d(
            &kernel,
            &|_| 0.0,
            &|x| x,
            &|_| 0.0,
            &|y| y,
            &x,
            &y,
            &rule.nodes,
            &rule.weights,
            &rule.nodes,
            &rule.weights,
            &u_fn,
        );
        for i in 0..n {
            for j in 0..n {
                assert!(rel_diff(fast[(i, j)], naive[i][j]) < 1e-12, "case {case} ({i},{j})");
            }
        }
    }
}

#[test]
fn fredholm_3d_matches_naive_oracle_on_random_cases() {
    let mut rng = SeededRng::new(47);
    for case in 0..20 {
        let n = 3 + (case % 3);
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let rx = map_rule(&rule, 0.0, 1.0).unwrap();
        let ry = map_rule(&rule, -1.0, 1.0).unwrap();
        let rz = map_rule(&rule, 1.0, rng.uniform_in(1.5, 2.5)).unwrap();
        let c = random_coeffs(&mut rng, 2);
        let kernel = move |_x: f64, y: f64, _z: f64, s: f64, t: f64, r: f64| {
            c[0] * (s * t).exp() + c[1] * y * r
        };
        let d = random_coeffs(&mut rng, 2);
        let u_fn = move |s: f64, t: f64, r: f64| d[0] * s * t + d[1] * r;
        let asm = Fredholm3dAssembly::new(&kernel, &rx, &ry, &rz).unwrap();
        let mut u = Vec::new();
        for &s in &rx.mapped_nodes {
            for &t in &ry.mapped_nodes {
                for &r in &rz.mapped_nodes {
                    u.push(u_fn(s, t, r));
                }
            }
        }
        let fast = asm.apply(&u).unwrap();
        let naive = oracles::naive_fredholm_3d(
            &kernel,
            &rx.mapped_nodes,
            &ry.mapped_nodes,
            &rz.mapped_nodes,
            &rule.weights,
            &rule.weights,
            &rule.weights,
            rx.scale * ry.scale * rz.scale,
            &u_fn,
        );
        for (f, nref) in fast.iter().zip(&naive) {
            assert!(rel_diff(*f, *nref) < 1e-12, "case {case}: {f} vs {nref}");
        }
    }
}

#[test]
fn operators_are_linear() {
    let n = 10;
    let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
    let mapped = map_rule(&rule, 0.0, 1.0).unwrap();
    let x = mapped.mapped_nodes.clone();
    let fred = FredholmAssembly::new(|x, t| (x * t).cos(), &x, &mapped).unwrap();
    let volt = VolterraAssembly::new(|x, t| x - t + 1.0, |_| 0.0, |x| x, &x, &rule).unwrap();

    let u: Vec<f64> = x.iter().map(|&t| t.exp()).collect();
    let v: Vec<f64> = x.iter().map(|&t| (3.0 * t).sin()).collect();
    let (alpha, beta) = (1.7, -0.4);
    let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
    let lhs = fred.apply(&combo).unwrap();
    let fu = fred.apply(&u).unwrap();
    let fv = fred.apply(&v).unwrap();
    for i in 0..n {
        let rhs = alpha * fu[i] + beta * fv[i];
        assert!(rel_diff(lhs[i], rhs) < 1e-12);
    }

    let mut u2 = volt.inner_nodes.clone();
    u2.mapv_inplace(|t| t.exp());
    let mut v2 = volt.inner_nodes.clone();
    v2.mapv_inplace(|t| (3.0 * t).sin());
    let mut combo2 = Array2::zeros(volt.inner_nodes.dim());
    for ((c, a), b) in combo2.iter_mut().zip(u2.iter()).zip(v2.iter()) {
        *c = alpha * a + beta * b;
    }
    let lhs2 = volt.apply(&combo2).unwrap();
    let vu = volt.apply(&u2).unwrap();
    let vv = volt.apply(&v2).unwrap();
    for i in 0..n {
        let rhs = alpha * vu[i] + beta * vv[i];
        assert!(rel_diff(lhs2[i], rhs) < 1e-12);
    }
}

/// Fredholm with kernel 1 degenerates to plain quadrature of u.
#[test]
fn kernel_one_reduces_to_quadrature()
{
    let n = 14;
    let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
    let mapped = map_rule(&rule, 0.25, 1.75).unwrap();
    let x = mapped.mapped_nodes.clone();
    let asm = FredholmAssembly::new(|_, _| 1.0, &x, &mapped).unwrap();
    let u: Vec<f64> = x.iter().map(|&t| t * t + (2.0 * t).sin()).collect();
    let direct = mapped.integrate(&u).unwrap();
    for v in asm.apply(&u).unwrap() {
        assert!((v - direct).abs() < 1e-13);
    }
}

/// Coincident bounds produce a zero integral at that evaluation point.
#[test]
fn degenerate_volterra_bounds_give_zero() {
    let rule = QuadratureRule::new(Family::Legendre, 8).unwrap();
    let x = vec![0.0, 0.3, 0.9];
    let asm = VolterraAssembly::new(|_, _| 1.0, |_| 0.0, |x| x, &x, &rule).unwrap();
    let mut u = asm.inner_nodes.clone();
    u.mapv_inplace(|t| 1.0 + t);
    let vals = asm.apply(&u).unwrap();
    assert_eq!(vals[0], 0.0, "h(0) = g(0) must give a zero integral");
    assert!(vals[1] > 0.0);
}

/// Gauss error for a smooth kernel decreases monotonically as n doubles.
#[test]
fn smooth_kernel_convergence_is_monotone() {
    // ∫_0^x (x - t) e^t dt = e^x - x - 1
    let mut prev = f64::INFINITY;
    for n in [4usize, 8, 16, 32] {
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let x = map_rule(&rule, 0.0, 1.0).unwrap().mapped_nodes;
        let asm = VolterraAssembly::new(|x, t| x - t, |_| 0.0, |x| x, &x, &rule).unwrap();
        let mut u = asm.inner_nodes.clone();
        u.mapv_inplace(f64::exp);
        let vals = asm.apply(&u).unwrap();
        let mut err: f64 = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            err = err.max((vals[i] - (xi.exp() - xi - 1.0)).abs());
        }
        assert!(
            err < prev || err < 1e-13,
            "error rose from {prev:.3e} to {err:.3e} at n={n}"
        );
        prev = err;
    }
    assert!(prev < 1e-13, "final error {prev:.3e}");
}

/// A singularity-matched Gauss-Jacobi inner rule evaluates the Abel
/// operator far more accurately than Gauss-Legendre at the same n.
#[test]
fn abel_jacobi_inner_rule_beats_legendre() {
    // ∫_0^x t / sqrt(x - t) dt = (4/3) x^{3/2}
    let n = 30;
    let legendre = QuadratureRule::new(Family::Legendre, n).unwrap();
    let x = map_rule(&legendre, 0.0, 1.0).unwrap().mapped_nodes;
    let truth: Vec<f64> = x.iter().map(|&v| 4.0 / 3.0 * v.powf(1.5)).collect();

    let plain = VolterraAssembly::new(
        |x, t| 1.0 / (x - t).sqrt(),
        |_| 0.0,
        |x| x,
        &x,
        &legendre,
    )
    .unwrap();
    let mut u = plain.inner_nodes.clone();
    let plain_vals = plain.apply(&u).unwrap();

    let jacobi = QuadratureRule::new(Family::Jacobi { alpha: -0.5, beta: 0.0 }, n).unwrap();
    // kernel with the (1-r)^{-1/2} factor folded into the Jacobi weight
    let matched = VolterraAssembly::new(
        |x, _| (x / 2.0).powf(-0.5),
        |_| 0.0,
        |x| x,
        &x,
        &jacobi,
    )
    .unwrap();
    u = matched.inner_nodes.clone();
    let matched_vals = matched.apply(&u).unwrap();

    let err = |vals: &[f64]| -> f64 {
        vals.iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (e_plain, e_matched) = (err(&plain_vals), err(&matched_vals));
    assert!(e_matched < 1e-10, "matched rule error {e_matched:.2e}");
    assert!(e_plain > 100.0 * e_matched, "legendre {e_plain:.2e} vs jacobi {e_matched:.2e}");
}
