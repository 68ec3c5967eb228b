//! Brute-force reference implementations used only by quadnn's test
//! suites: closed-form moment tables for every quadrature weight family,
//! naive loop-based operator application, closed-form Caputo derivatives of
//! monomials, and finite-difference helpers.
//!
//! Everything here favors the dumbest possible formulation. When a result
//! disagrees with the main crate, the closed-form mathematics in this crate
//! is treated as correct.

use quadnn::quadrature::Family;

/// Exact binomial coefficient in f64 (valid far beyond the k <= 25 range
/// used by the moment tables).
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `∫ x^k ω(x) dx` over the family's reference domain, from closed forms
/// (Beta/Gamma identities; Jacobi uses the integration-by-parts recurrence
/// seeded with the Beta-function value of the zeroth moment).
pub fn moment(family: Family, k: usize) -> f64 {
    match family {
        Family::Legendre => {
            if k % 2 == 1 {
                0.0
            } else {
                2.0 / (k as f64 + 1.0)
            }
        }
        Family::Chebyshev1 => chebyshev1_moment(k),
        Family::Chebyshev2 => {
            if k % 2 == 1 {
                0.0
            } else {
                let m = k / 2;
                std::f64::consts::PI / 2.0 * binomial(k, m)
                    / ((m as f64 + 1.0) * 4.0_f64.powi(m as i32))
            }
        }
        // ω3 = sqrt((1+x)/(1-x)) = (1+x)/sqrt(1-x^2), so its moments are
        // first-kind moments of x^k + x^{k+1}; likewise ω4 with a minus.
        Family::Chebyshev3 => chebyshev1_moment(k) + chebyshev1_moment(k + 1),
        Family::Chebyshev4 => chebyshev1_moment(k) - chebyshev1_moment(k + 1),
        Family::Jacobi { alpha, beta } => jacobi_moment(alpha, beta, k),
        Family::Laguerre { alpha } => libm::exp(libm::lgamma(alpha + k as f64 + 1.0)),
        Family::Hermite => {
            if k % 2 == 1 {
                0.0
            } else {
                libm::exp(libm::lgamma((k as f64 + 1.0) / 2.0))
            }
        }
    }
}

fn chebyshev1_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        std::f64::consts::PI * binomial(k, k / 2) / 2.0_f64.powi(k as i32)
    }
}

fn jacobi_moment(alpha: f64, beta: f64, k: usize) -> f64 {
    let i0 = libm::exp(
        (alpha + beta + 1.0) * std::f64::consts::LN_2 + libm::lgamma(alpha + 1.0)
            + libm::lgamma(beta + 1.0)
            - libm::lgamma(alpha + beta + 2.0),
    );
    if k == 0 {
        return i0;
    }
    let i1 = (beta - alpha) / (alpha + beta + 2.0) * i0;
    if k == 1 {
        return i1;
    }
    let (mut prev, mut cur) = (i0, i1);
    for m in 1..k {
        let mf = m as f64;
        let next = ((beta - alpha) * cur + mf * prev) / (mf + alpha + beta + 2.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All moments `m_0 .. m_max_k` of a family.
pub fn moments(family: Family, max_k: usize) -> Vec<f64> {
    (0..=max_k).map(|k| moment(family, k)).collect()
}

/// Closed-form Caputo derivative of `x^m`:
/// `Γ(m+1)/Γ(m+1-α) · x^{m-α}` (zero at x = 0).
pub fn caputo_monomial(m: u32, alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mf = m as f64;
    let c = libm::exp(libm::lgamma(mf + 1.0) - libm::lgamma(mf + 1.0 - alpha));
    c * x.powf(mf - alpha)
}

/// Plain-loop quadrature `scale · Σ w_i f(x_i)`.
pub fn naive_quadrature(nodes: &[f64], weights: &[f64], scale: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..nodes.len() {
        acc += weights[i] * f(nodes[i]);
    }
    scale * acc
}

/// Naive Fredholm application: evaluates the kernel itself, entry by entry.
pub fn naive_fredholm(
    kernel: &dyn Fn(f64, f64) -> f64,
    x: &[f64],
    r: &[f64],
    weights: &[f64],
    scale: f64,
    u_at_r: &[f64],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for &xi in x {
        let mut acc = 0.0;
        for j in 0..r.len() {
            acc += kernel(xi, r[j]) * u_at_r[j] * weights[j];
        }
        out.push(scale * acc);
    }
    out
}

/// Naive Volterra application; derives its own inner nodes from the
/// reference rule and samples `u` there.
#[allow(clippy::too_many_arguments)]
pub fn naive_volterra(
    kernel: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    h: &dyn Fn(f64) -> f64,
    x: &[f64],
    ref_nodes: &[f64],
    ref_weights: &[f64],
    u: &dyn Fn(f64) -> f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for &xi in x {
        let half_len = (h(xi) - g(xi)) / 2.0;
        let mid = (h(xi) + g(xi)) / 2.0;
        let mut acc = 0.0;
        for j in 0..ref_nodes.len() {
            let t = half_len * ref_nodes[j] + mid;
            acc += kernel(xi, t) * u(t) * ref_weights[j];
        }
        out.push(half_len * acc);
    }
    out
}

/// Naive 2-D Fredholm application over the tensor grid.
#[allow(clippy::too_many_arguments)]
pub fn naive_fredholm_2d(
    kernel: &dyn Fn(f64, f64, f64, f64) -> f64,
    x: &[f64],
    y: &[f64],
    wx: &[f64],
    wy: &[f64],
    sx: f64,
    sy: f64,
    u: &dyn Fn(f64, f64) -> f64,
) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; y.len()]; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let mut acc = 0.0;
            for (k, &sk) in x.iter().enumerate() {
                for (l, &tl) in y.iter().enumerate() {
                    acc += kernel(xi, yj, sk, tl) * u(sk, tl) * wx[k] * wy[l];
                }
            }
            out[i][j] = sx * sy * acc;
        }
    }
    out
}

/// Naive 2-D Volterra application with per-axis variable bounds.
#[allow(clippy::too_many_arguments)]
pub fn naive_volterra_2d(
    kernel: &dyn Fn(f64, f64, f64, f64) -> f64,
    g1: &dyn Fn(f64) -> f64,
    h1: &dyn Fn(f64) -> f64,
    g2: &dyn Fn(f64) -> f64,
    h2: &dyn Fn(f64) -> f64,
    x: &[f64],
    y: &[f64],
    ref_x_nodes: &[f64],
    ref_x_weights: &[f64],
    ref_y_nodes: &[f64],
    ref_y_weights: &[f64],
    u: &dyn Fn(f64, f64) -> f64,
) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; y.len()]; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        let sxi = (h1(xi) - g1(xi)) / 2.0;
        let mxi = (h1(xi) + g1(xi)) / 2.0;
        for (j, &yj) in y.iter().enumerate() {
            let syj = (h2(yj) - g2(yj)) / 2.0;
            let myj = (h2(yj) + g2(yj)) / 2.0;
            let mut acc = 0.0;
            for (k, &rk) in ref_x_nodes.iter().enumerate() {
                let s = sxi * rk + mxi;
                for (l, &rl) in ref_y_nodes.iter().enumerate() {
                    let t = syj * rl + myj;
                    acc += kernel(xi, yj, s, t) * u(s, t) * ref_x_weights[k] * ref_y_weights[l];
                }
            }
            out[i][j] = sxi * syj * acc;
        }
    }
    out
}

/// Naive 3-D Fredholm application over the tensor grid; output flattened
/// row-major over (x, y, z).
#[allow(clippy::too_many_arguments)]
pub fn naive_fredholm_3d(
    kernel: &dyn Fn(f64, f64, f64, f64, f64, f64) -> f64,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    wx: &[f64],
    wy: &[f64],
    wz: &[f64],
    scale: f64,
    u: &dyn Fn(f64, f64, f64) -> f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() * y.len() * z.len());
    for &xi in x {
        for &yj in y {
            for &zk in z {
                let mut acc = 0.0;
                for (l, &sl) in x.iter().enumerate() {
                    for (m, &tm) in y.iter().enumerate() {
                        for (p, &rp) in z.iter().enumerate() {
                            acc += kernel(xi, yj, zk, sl, tm, rp)
                                * u(sl, tm, rp)
                                * wx[l]
                                * wy[m]
                                * wz[p];
                        }
                    }
                }
                out.push(scale * acc);
            }
        }
    }
    out
}

/// Central finite difference of order 1 or 2.
pub fn central_derivative(f: &dyn Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => panic!("central_derivative supports orders 1 and 2"),
    }
}

/// Explicit-sum Jacobi polynomial (the Pochhammer form), kept deliberately
/// close to the defining formula; only reliable for moderate n.
pub fn jacobi_explicit_sum(alpha: f64, beta: f64, n: usize, x: f64) -> f64 {
    // prefactor (α+1)_n / n!
    let mut lead = 1.0;
    for i in 0..n {
        lead *= (alpha + 1.0 + i as f64) / (i as f64 + 1.0);
    }
    let mut sum = 0.0;
    for k in 0..=n {
        // (α+β+n+1)_k / (α+1)_k
        let mut ratio = 1.0;
        for i in 0..k {
            ratio *= (alpha + beta + n as f64 + 1.0 + i as f64) / (alpha + 1.0 + i as f64);
        }
        sum += binomial(n, k) * ratio * ((x - 1.0) / 2.0).powi(k as i32);
    }
    lead * sum
}

/// Explicit-sum generalized Laguerre polynomial.
pub fn laguerre_explicit_sum(alpha: f64, n: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=n {
        // binom(n+α, n-k) via Gamma
        let b = libm::exp(
            libm::lgamma(n as f64 + alpha + 1.0)
                - libm::lgamma((n - k) as f64 + 1.0)
                - libm::lgamma(k as f64 + alpha + 1.0),
        );
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut kfact = 1.0;
        for i in 1..=k {
            kfact *= i as f64;
        }
        sum += sign * b * x.powi(k as i32) / kfact;
    }
    sum
}

/// Explicit-sum physicists' Hermite polynomial.
pub fn hermite_explicit_sum(n: usize, x: f64) -> f64 {
    let mut nfact = 1.0;
    for i in 1..=n {
        nfact *= i as f64;
    }
    let mut sum = 0.0;
    for k in 0..=(n / 2) {
        let mut kfact = 1.0;
        for i in 1..=k {
            kfact *= i as f64;
        }
        let mut mfact = 1.0;
        for i in 1..=(n - 2 * k) {
            mfact *= i as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (2.0 * x).powi((n - 2 * k) as i32) / (kfact * mfact);
    }
    nfact * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_masses() {
        assert!((moment(Family::Legendre, 0) - 2.0).abs() < 1e-15);
        assert!((moment(Family::Chebyshev1, 0) - std::f64::consts::PI).abs() < 1e-15);
        assert!((moment(Family::Hermite, 0) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((moment(Family::Laguerre { alpha: 0.0 }, 0) - 1.0).abs() < 1e-12);
        for k in 0..10 {
            let a = moment(Family::Jacobi { alpha: 0.0, beta: 0.0 }, k);
            let b = moment(Family::Legendre, k);
            assert!((a - b).abs() < 1e-12, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn chebyshev_moment_values() {
        assert!((moment(Family::Chebyshev1, 2) - std::f64::consts::PI / 2.0).abs() < 1e-14);
        assert!((moment(Family::Chebyshev2, 2) - std::f64::consts::PI / 8.0).abs() < 1e-14);
        assert!((moment(Family::Chebyshev3, 1) - std::f64::consts::PI / 2.0).abs() < 1e-14);
        assert!((moment(Family::Chebyshev4, 1) + std::f64::consts::PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn caputo_monomial_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((caputo_monomial(1, 0.5, 1.0) - 2.0 / sqrt_pi).abs() < 1e-14);
        assert!((caputo_monomial(2, 0.5, 1.0) - 8.0 / (3.0 * sqrt_pi)).abs() < 1e-14);
        assert_eq!(caputo_monomial(3, 0.7, 0.0), 0.0);
    }

    #[test]
    fn explicit_sums_match_known_values() {
        // L_1(x) = 1 - x; L_2^{(1)}(0) = 3
        assert!((laguerre_explicit_sum(0.0, 1, 0.4) - 0.6).abs() < 1e-14);
        assert!((laguerre_explicit_sum(1.0, 2, 0.0) - 3.0).abs() < 1e-13);
        // H_3 = 8x^3 - 12x
        let x = 0.8;
        assert!((hermite_explicit_sum(3, x) - (8.0 * x.powi(3) - 12.0 * x)).abs() < 1e-12);
        // J_2^{(0,0)}(1) = 1
        assert!((jacobi_explicit_sum(0.0, 0.0, 2, 1.0) - 1.0).abs() < 1e-13);
    }
}
