//! Convergence and structural properties of the L1 Caputo scheme, checked
//! against closed-form monomial derivatives.

use proptest::prelude::*;
use quadnn::fractional::{l1_weights, CaputoMatrix};
use quadnn_oracles::caputo_monomial;

fn uniform_grid(h_inv: usize) -> Vec<f64> {
    (0..=h_inv).map(|i| i as f64 / h_inv as f64).collect()
}

/// Max grid error for u = x^2 against the closed form.
fn l1_error(h_inv: usize, alpha: f64) -> f64 {
    let grid = uniform_grid(h_inv);
    let m = CaputoMatrix::new(&grid, alpha).unwrap();
    let u: Vec<f64> = grid.iter().map(|&x| x * x).collect();
    let approx = m.apply(&u).unwrap();
    grid.iter()
        .zip(&approx)
        .skip(1)
        .map(|(&x, &a)| (a - caputo_monomial(2, alpha, x)).abs())
        .fold(0.0, f64::max)
}

/// Empirical order >= 1.2 (theory: 2 - α) as h halves from 1/16 to 1/256,
/// and the sign matches the positive closed form.
#[test]
fn l1_convergence_order_and_sign() {
    for alpha in [0.25, 0.5, 0.75] {
        let coarse = l1_error(16, alpha);
        let fine = l1_error(256, alpha);
        let order = (coarse / fine).log2() / 4.0;
        assert!(
            order >= 1.2,
            "alpha={alpha}: empirical order {order:.3} (errors {coarse:.3e} -> {fine:.3e})"
        );

        // positive everywhere for the increasing monomial
        let grid = uniform_grid(64);
        let m = CaputoMatrix::new(&grid, alpha).unwrap();
        let u: Vec<f64> = grid.iter().map(|&x| x * x).collect();
        for (i, v) in m.apply(&u).unwrap().into_iter().enumerate().skip(1) {
            assert!(v > 0.0, "alpha={alpha}: negative value {v} at row {i}");
        }
    }
}

#[test]
fn linear_monomial_closed_form() {
    // d^{1/2} x / dx^{1/2} = 2 sqrt(x/π); the two-point grid is exact for
    // linear u because the L1 scheme interpolates piecewise-linearly.
    let nu = l1_weights(&[0.0, 1.0], 0.5).unwrap();
    let value = nu[1];
    assert!((value - caputo_monomial(1, 0.5, 1.0)).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Rows sum to zero and the matrix is lower triangular for arbitrary
    /// strictly increasing grids.
    #[test]
    fn row_sums_and_triangularity_on_random_grids(
        increments in proptest::collection::vec(0.01f64..1.0, 2..12),
        alpha in 0.05f64..0.95,
    ) {
        let mut grid = vec![0.0];
        for inc in increments {
            grid.push(grid.last().unwrap() + inc);
        }
        let m = CaputoMatrix::new(&grid, alpha).unwrap();
        let n = grid.len();
        for i in 0..n {
            let row_sum: f64 = (0..n).map(|j| m.matrix[(i, j)]).sum();
            prop_assert!(row_sum.abs() < 1e-10, "row {i} sums to {row_sum:.2e}");
            for j in (i + 1)..n {
                prop_assert_eq!(m.matrix[(i, j)], 0.0);
            }
        }
    }

    /// apply is linear in u.
    #[test]
    fn apply_is_linear(alpha in 0.05f64..0.95, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let grid = uniform_grid(24);
        let m = CaputoMatrix::new(&grid, alpha).unwrap();
        let u: Vec<f64> = grid.iter().map(|&x| x.exp()).collect();
        let v: Vec<f64> = grid.iter().map(|&x| (2.0 * x).sin()).collect();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
        let lhs = m.apply(&combo).unwrap();
        let mu = m.apply(&u).unwrap();
        let mv = m.apply(&v).unwrap();
        for i in 0..grid.len() {
            let rhs = a * mu[i] + b * mv[i];
            prop_assert!((lhs[i] - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }
}

/// As α approaches 1 the Caputo derivative approaches the classical one.
#[test]
fn near_integer_order_approaches_classical_derivative() {
    let grid = uniform_grid(512);
    let m = CaputoMatrix::new(&grid, 0.999).unwrap();
    let u: Vec<f64> = grid.iter().map(|&x| x * x).collect();
    let vals = m.apply(&u).unwrap();
    let at_one = vals[grid.len() - 1];
    assert!(
        (at_one - 2.0).abs() / 2.0 < 0.05,
        "alpha=0.999 at x=1: {at_one} (classical 2)"
    );
}
