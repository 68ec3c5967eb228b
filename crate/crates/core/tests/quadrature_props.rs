//! Property tests for the quadrature rules, checked against the closed-form
//! moment tables and explicit-sum polynomial evaluations of the oracle
//! crate.

use proptest::prelude::*;
use quadnn::quadrature::{
    hermite_eval, jacobi_eval, laguerre_eval, map_rule, monte_carlo, trapezoid, Family,
    QuadratureRule,
};
use quadnn_oracles as oracles;

fn all_families() -> Vec<Family> {
    vec![
        Family::Legendre,
        Family::Chebyshev1,
        Family::Chebyshev2,
        Family::Chebyshev3,
        Family::Chebyshev4,
        Family::Jacobi { alpha: 0.5, beta: -0.3 },
        Family::Jacobi { alpha: 2.0, beta: 3.0 },
        Family::Jacobi { alpha: 1.0, beta: 1.0 },
        Family::Laguerre { alpha: 0.0 },
        Family::Laguerre { alpha: 0.5 },
        Family::Laguerre { alpha: 2.0 },
        Family::Hermite,
    ]
}

/// An n-point rule integrates x^k exactly for k <= 2n-1.
#[test]
fn monomial_exactness_through_degree_2n_minus_1() {
    for family in all_families() {
        for n in 1..=12usize {
            let rule = QuadratureRule::new(family, n).unwrap();
            for k in 0..2 * n {
                let est = rule.integrate_fn(|x| x.powi(k as i32));
                let truth = oracles::moment(family, k);
                // zero moments are judged against the absolute-value integral
                let scale = rule.integrate_fn(|x| x.abs().powi(k as i32));
                let err = (est - truth).abs() / truth.abs().max(scale).max(1e-300);
                assert!(
                    err < 1e-10,
                    "{family:?} n={n} k={k}: est {est:.15e} truth {truth:.15e} err {err:.2e}"
                );
            }
        }
    }
}

/// Basis polynomials of total product degree <= 2n-1 are discretely
/// orthogonal under the rule. Finite-domain families are checked in
/// absolute terms; the unbounded families' polynomial values grow by many
/// orders of magnitude, so their inner products are normalized first.
#[test]
fn discrete_orthogonality() {
    let n = 9usize;
    let finite: Vec<(Family, fn(&Family, usize, f64) -> f64)> = vec![
        (Family::Legendre, |_, k, x| jacobi_eval(0.0, 0.0, k, x).unwrap().0),
        (Family::Chebyshev1, |_, k, x| jacobi_eval(-0.5, -0.5, k, x).unwrap().0),
        (Family::Chebyshev2, |_, k, x| jacobi_eval(0.5, 0.5, k, x).unwrap().0),
        (Family::Chebyshev3, |_, k, x| jacobi_eval(-0.5, 0.5, k, x).unwrap().0),
        (Family::Chebyshev4, |_, k, x| jacobi_eval(0.5, -0.5, k, x).unwrap().0),
        (Family::Jacobi { alpha: 1.5, beta: 0.5 }, |f, k, x| {
            let Family::Jacobi { alpha, beta } = f else { unreachable!() };
            jacobi_eval(*alpha, *beta, k, x).unwrap().0
        }),
    ];
    for (family, basis) in finite {
        let rule = QuadratureRule::new(family, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i == j || i + j > 2 * n - 1 {
                    continue;
                }
                let ip = rule.integrate_fn(|x| basis(&family, i, x) * basis(&family, j, x));
                assert!(ip.abs() < 1e-9, "{family:?}: <phi_{i}, phi_{j}> = {ip:.2e}");
            }
        }
    }
    for family in [Family::Laguerre { alpha: 0.0 }, Family::Hermite] {
        let rule = QuadratureRule::new(family, n).unwrap();
        let eval = |k: usize, x: f64| match family {
            Family::Laguerre { alpha } => laguerre_eval(alpha, k, x).unwrap().0,
            Family::Hermite => hermite_eval(k, x).0,
            _ => unreachable!(),
        };
        for i in 0..n {
            for j in 0..n {
                if i == j || i + j > 2 * n - 1 {
                    continue;
                }
                let ip = rule.integrate_fn(|x| eval(i, x) * eval(j, x));
                let ni = rule.integrate_fn(|x| eval(i, x) * eval(i, x));
                let nj = rule.integrate_fn(|x| eval(j, x) * eval(j, x));
                let rel = ip.abs() / (ni * nj).sqrt();
                assert!(rel < 1e-9, "{family:?}: normalized <phi_{i}, phi_{j}> = {rel:.2e}");
            }
        }
    }
}

#[test]
fn symmetric_families_kill_odd_integrands() {
    for family in [
        Family::Legendre,
        Family::Chebyshev1,
        Family::Chebyshev2,
        Family::Hermite,
        Family::Jacobi { alpha: 0.75, beta: 0.75 },
    ] {
        for n in [3usize, 6, 11] {
            let rule = QuadratureRule::new(family, n).unwrap();
            let v = rule.integrate_fn(|x| x.powi(3) - 2.0 * x);
            assert!(v.abs() < 1e-12, "{family:?} n={n}: odd integrand gave {v:.2e}");
            let s = rule.integrate_fn(|x| (0.8 * x).sin());
            assert!(s.abs() < 1e-12, "{family:?} n={n}: sin gave {s:.2e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Nodes of the n-rule strictly interlace nodes of the (n+1)-rule.
    #[test]
    fn node_interlacing(n in 1usize..11, fam_idx in 0usize..12) {
        let family = all_families()[fam_idx];
        let a = QuadratureRule::new(family, n).unwrap();
        let b = QuadratureRule::new(family, n + 1).unwrap();
        for i in 0..n {
            prop_assert!(b.nodes[i] < a.nodes[i], "{family:?} n={n} i={i}");
            prop_assert!(a.nodes[i] < b.nodes[i + 1], "{family:?} n={n} i={i}");
        }
    }

    /// Mapping preserves the invariants on random intervals.
    #[test]
    fn mapped_rules_stay_inside(a in -5.0f64..5.0, len in 0.1f64..8.0, n in 1usize..20) {
        let rule = QuadratureRule::new(Family::Legendre, n).unwrap();
        let b = a + len;
        let m = map_rule(&rule, a, b).unwrap();
        prop_assert!((m.scale - len / 2.0).abs() < 1e-14);
        for (i, &x) in m.mapped_nodes.iter().enumerate() {
            prop_assert!(x >= a && x <= b);
            let expect = m.scale * rule.nodes[i] + (a + b) / 2.0;
            prop_assert!((x - expect).abs() < 1e-13);
        }
    }
}

/// For f = e^x on [0, 1] with 16 evaluations, the Gaussian rule beats both
/// comparators by many orders of magnitude.
#[test]
fn gauss_beats_trapezoid_and_monte_carlo_at_16_points() {
    let truth = std::f64::consts::E - 1.0;
    let rule = QuadratureRule::new(Family::Legendre, 16).unwrap();
    let mapped = map_rule(&rule, 0.0, 1.0).unwrap();
    let gauss_err = (mapped.integrate_fn(f64::exp) - truth).abs();

    let samples: Vec<f64> = (0..16).map(|i| (i as f64 / 15.0).exp()).collect();
    let trap_err = (trapezoid(&samples, 0.0, 1.0).unwrap() - truth).abs();
    let mc_err = (monte_carlo(f64::exp, 0.0, 1.0, 16, 42).unwrap() - truth).abs();

    assert!(gauss_err < 1e-12, "gauss error {gauss_err:.2e}");
    assert!(gauss_err < trap_err, "gauss {gauss_err:.2e} !< trapezoid {trap_err:.2e}");
    assert!(gauss_err < mc_err, "gauss {gauss_err:.2e} !< monte carlo {mc_err:.2e}");
    // the comparators sit in their expected error ranges
    assert!(trap_err > 1e-5 && trap_err < 1e-2, "trapezoid error {trap_err:.2e}");
    assert!(mc_err > 1e-4, "monte carlo error {mc_err:.2e}");
}

/// Polynomial evaluation matches the explicit-sum formulas.
#[test]
fn evaluations_match_explicit_sums() {
    // T_n(cos θ) = cos(nθ) up to the normalization binding J^(-1/2,-1/2) to T_n.
    let theta = 0.3f64;
    let x = theta.cos();
    let (j3, _) = jacobi_eval(-0.5, -0.5, 3, x).unwrap();
    let j3_at_1 = jacobi_eval(-0.5, -0.5, 3, 1.0).unwrap().0;
    let t3 = (3.0 * theta).cos();
    assert!((j3 / j3_at_1 - t3).abs() < 1e-12, "Chebyshev relation violated");
    let oracle = oracles::jacobi_explicit_sum(-0.5, -0.5, 3, x);
    assert!((j3 - oracle).abs() < 1e-12);

    for n in 0..8 {
        for &x in &[-0.9, -0.2, 0.4, 0.95] {
            let (j, _) = jacobi_eval(0.7, -0.4, n, x).unwrap();
            let o = oracles::jacobi_explicit_sum(0.7, -0.4, n, x);
            assert!((j - o).abs() < 1e-10 * o.abs().max(1.0), "jacobi n={n} x={x}");
        }
        for &x in &[0.1, 1.3, 4.0] {
            let (l, _) = laguerre_eval(1.2, n, x).unwrap();
            let o = oracles::laguerre_explicit_sum(1.2, n, x);
            assert!((l - o).abs() < 1e-10 * o.abs().max(1.0), "laguerre n={n} x={x}");
            let (h, _) = hermite_eval(n, x);
            let oh = oracles::hermite_explicit_sum(n, x);
            assert!((h - oh).abs() < 1e-9 * oh.abs().max(1.0), "hermite n={n} x={x}");
        }
    }
}

/// Monte Carlo statistical accuracy and bit-level determinism.
#[test]
fn monte_carlo_behaves() {
    let est = monte_carlo(|x| x, 0.0, 1.0, 100_000, 777).unwrap();
    assert!((est - 0.5).abs() < 0.01);
    let a = monte_carlo(|x| x * x, -1.0, 2.0, 12_345, 9).unwrap();
    let b = monte_carlo(|x| x * x, -1.0, 2.0, 12_345, 9).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}
