//! L1 discretization of the Caputo fractional derivative of order
//! `α ∈ (0, 1)`, its lower-triangular operational matrix, and the
//! composition with integer-order derivatives for orders `p > 1`.
//!
//! On a strictly increasing grid `x_0 < x_1 < ... < x_n` anchored at the
//! lower terminal `x_0`, the derivative at `x_n` is approximated by the
//! linear combination `Σ_k ν_k u(x_k)` with
//!
//! ```text
//! μ_k = ((x_n - x_k)^{1-α} - (x_n - x_{k+1})^{1-α}) / (x_{k+1} - x_k)
//! ν_k = (μ_{k-1} - μ_k) / Γ(2-α),   μ_{-1} = μ_n = 0.
//! ```
//!
//! The weights are oriented so that an increasing `u` has a positive
//! derivative; the arrangement is pinned by the closed-form oracle
//! `d^α x / dx^α = x^{1-α} / Γ(2-α)` in the tests. Grids may be
//! non-equidistant.

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FractionalError {
    #[error("fractional order must lie in (0, 1), got {0}")]
    BadOrder(f64),
    #[error("grid must be strictly increasing with at least 2 points")]
    BadGrid,
    #[error("expected {expected} grid values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("composed order must satisfy p > 1 with a non-zero fractional part, got {0}")]
    BadComposedOrder(f64),
}

fn check_grid(grid: &[f64]) -> Result<(), FractionalError> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FractionalError::BadGrid);
    }
    Ok(())
}

/// L1 weights `ν` such that `Σ_k ν_k u(x_k)` approximates the Caputo
/// derivative of order `alpha` at the last grid point.
pub fn l1_weights(grid: &[f64], alpha: f64) -> Result<Vec<f64>, FractionalError> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(FractionalError::BadOrder(alpha));
    }
    check_grid(grid)?;
    let n = grid.len() - 1;
    let xn = grid[n];
    let e = 1.0 - alpha;
    // Γ(2-α) ∈ [Γ(1), Γ(2)] here; evaluated in log space anyway.
    let inv_gamma = (-libm::lgamma(2.0 - alpha)).exp();
    let mu = |k: usize| -> f64 {
        ((xn - grid[k]).powf(e) - (xn - grid[k + 1]).powf(e)) / (grid[k + 1] - grid[k])
    };
    let mut nu = vec![0.0; n + 1];
    for (k, slot) in nu.iter_mut().enumerate() {
        let prev = if k == 0 { 0.0 } else { mu(k - 1) };
        let cur = if k == n { 0.0 } else { mu(k) };
        *slot = (prev - cur) * inv_gamma;
    }
    Ok(nu)
}

/// Lower-triangular operational matrix `M` with `(M u)_i ≈ d^α u / dx^α`
/// at grid point `i`. The first row is zero (the derivative at the lower
/// terminal is not defined by the scheme), and every row sums to zero, so
/// constants map to zero.
#[derive(Debug, Clone)]
pub struct CaputoMatrix {
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub matrix: Array2<f64>,
}

impl CaputoMatrix {
    pub fn new(grid: &[f64], alpha: f64) -> Result<Self, FractionalError> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(FractionalError::BadOrder(alpha));
        }
        check_grid(grid)?;
        let n = grid.len();
        let mut m = Array2::zeros((n, n));
        for i in 1..n {
            let nu = l1_weights(&grid[..=i], alpha)?;
            for (k, &v) in nu.iter().enumerate() {
                m[(i, k)] = v;
            }
        }
        Ok(CaputoMatrix { alpha, grid: grid.to_vec(), matrix: m })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Matrix-vector product `M u`.
    pub fn apply(&self, u_on_grid: &[f64]) -> Result<Vec<f64>, FractionalError> {
        let n = self.len();
        if u_on_grid.len() != n {
            return Err(FractionalError::LengthMismatch { expected: n, got: u_on_grid.len() });
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += self.matrix[(i, k)] * u_on_grid[k];
            }
            out[i] = acc;
        }
        Ok(out)
    }
}

/// Caputo derivative of order `p = v + α` with `v = ⌊p⌋ ≥ 1` and
/// `α ∈ (0, 1)`, given the `v`-th integer derivative sampled on the grid.
///
/// Integer `p` is rejected; callers differentiate directly in that case.
pub fn caputo_higher(
    grid: &[f64],
    p: f64,
    dv_on_grid: &[f64],
) -> Result<Vec<f64>, FractionalError> {
    if p <= 1.0 {
        return Err(FractionalError::BadComposedOrder(p));
    }
    let alpha = p - p.floor();
    if alpha == 0.0 {
        return Err(FractionalError::BadComposedOrder(p));
    }
    let m = CaputoMatrix::new(grid, alpha)?;
    m.apply(dv_on_grid)
}
