//! Gaussian quadrature rules for the seven classical orthogonal-polynomial
//! families, plus the comparator integrators (composite trapezoid and plain
//! Monte Carlo).
//!
//! A rule approximates `∫ f(x) ω(x) dx ≈ Σ w_i f(x_i)` on the family's
//! reference domain. Finite-domain rules can be mapped to an arbitrary
//! interval `[a, b]` with [`map_rule`]; the map scales the result by
//! `(b - a) / 2`.
//!
//! Chebyshev nodes and weights use their closed forms. Legendre, Jacobi,
//! Laguerre and Hermite nodes are found by Newton iteration on the
//! polynomial's three-term recurrence, started from the usual
//! Chebyshev-angle/asymptotic guesses, and all arithmetic is done in f64.

use thiserror::Error;

use crate::rng::SeededRng;

/// Errors produced while constructing or using quadrature rules.
#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("a quadrature rule needs at least one node")]
    EmptyRule,
    #[error("jacobi parameters must both be > -1 (alpha = {alpha}, beta = {beta})")]
    BadJacobiParams { alpha: f64, beta: f64 },
    #[error("laguerre parameter must be > -1 (alpha = {alpha})")]
    BadLaguerreParam { alpha: f64 },
    #[error("newton iteration for {family:?} with n = {n} failed to converge at node {index}")]
    RootNotConverged { family: Family, n: usize, index: usize },
    #[error("{family:?} rules live on an unbounded domain and cannot be mapped to [a, b]")]
    UnmappableFamily { family: Family },
    #[error("interval bounds must be finite with a < b (a = {a}, b = {b})")]
    BadInterval { a: f64, b: f64 },
    #[error("expected {expected} function values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("composite trapezoid needs at least 2 samples")]
    TooFewSamples,
}

/// One of the Gaussian quadrature families.
///
/// Each family pairs an orthogonal-polynomial system with its weight
/// function `ω(x)` and reference domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `ω = 1` on `[-1, 1]`.
    Legendre,
    /// `ω = (1 - x²)^{-1/2}` on `(-1, 1)`.
    Chebyshev1,
    /// `ω = (1 - x²)^{1/2}` on `[-1, 1]`.
    Chebyshev2,
    /// `ω = (1 - x)^{-1/2} (1 + x)^{1/2}` on `(-1, 1)`.
    Chebyshev3,
    /// `ω = (1 - x)^{1/2} (1 + x)^{-1/2}` on `(-1, 1)`.
    Chebyshev4,
    /// `ω = (1 - x)^α (1 + x)^β` on `(-1, 1)`, `α, β > -1`.
    Jacobi { alpha: f64, beta: f64 },
    /// `ω = x^α e^{-x}` on `[0, ∞)`, `α > -1`.
    Laguerre { alpha: f64 },
    /// `ω = e^{-x²}` on `(-∞, ∞)`.
    Hermite,
}

impl Family {
    /// Reference integration domain of the family.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Family::Legendre
            | Family::Chebyshev1
            | Family::Chebyshev2
            | Family::Chebyshev3
            | Family::Chebyshev4
            | Family::Jacobi { .. } => (-1.0, 1.0),
            Family::Laguerre { .. } => (0.0, f64::INFINITY),
            Family::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Whether `ω` is even, so that nodes mirror about zero.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Family::Legendre | Family::Chebyshev1 | Family::Chebyshev2 | Family::Hermite => true,
            Family::Jacobi { alpha, beta } => alpha == beta,
            _ => false,
        }
    }

    /// Whether the reference domain is a finite interval.
    pub fn is_finite_domain(&self) -> bool {
        !matches!(self, Family::Laguerre { .. } | Family::Hermite)
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        match *self {
            Family::Jacobi { alpha, beta } if alpha <= -1.0 || beta <= -1.0 => {
                Err(QuadratureError::BadJacobiParams { alpha, beta })
            }
            Family::Laguerre { alpha } if alpha <= -1.0 => {
                Err(QuadratureError::BadLaguerreParam { alpha })
            }
            _ => Ok(()),
        }
    }
}

/// Legendre polynomial value and derivative, `(P_n(x), P_n'(x))`, via the
/// three-term recurrence.
pub fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        let d2 = ((2.0 * kf - 1.0) * (p1 + x * d1) - (kf - 1.0) * d0) / kf;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

fn jacobi_value(alpha: f64, beta: f64, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let ab = alpha + beta;
        let c1 = 2.0 * kf * (kf + ab) * (2.0 * kf + ab - 2.0);
        let c2 = (2.0 * kf + ab - 1.0)
            * ((2.0 * kf + ab) * (2.0 * kf + ab - 2.0) * x + alpha * alpha - beta * beta);
        let c3 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * (2.0 * kf + ab);
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Jacobi polynomial value and derivative, `(J_n^{(α,β)}(x), d/dx J_n^{(α,β)}(x))`.
///
/// The derivative uses the parameter-shift identity
/// `d/dx J_n^{(α,β)} = (n + α + β + 1)/2 · J_{n-1}^{(α+1,β+1)}`.
pub fn jacobi_eval(alpha: f64, beta: f64, n: usize, x: f64) -> Result<(f64, f64), QuadratureError> {
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(QuadratureError::BadJacobiParams { alpha, beta });
    }
    let value = jacobi_value(alpha, beta, n, x);
    let derivative = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_value(alpha + 1.0, beta + 1.0, n - 1, x)
    };
    Ok((value, derivative))
}

fn laguerre_value(alpha: f64, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 1.0 + alpha - x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0 + alpha - x) * p1 - (kf - 1.0 + alpha) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Generalized Laguerre polynomial value and derivative.
///
/// The derivative uses `d/dx L_n^{(α)} = -L_{n-1}^{(α+1)}`.
pub fn laguerre_eval(alpha: f64, n: usize, x: f64) -> Result<(f64, f64), QuadratureError> {
    if alpha <= -1.0 {
        return Err(QuadratureError::BadLaguerreParam { alpha });
    }
    let value = laguerre_value(alpha, n, x);
    let derivative = if n == 0 {
        0.0
    } else {
        -laguerre_value(alpha + 1.0, n - 1, x)
    };
    Ok((value, derivative))
}

/// Physicists' Hermite polynomial value and derivative.
///
/// The derivative uses `H_n' = 2n H_{n-1}`.
pub fn hermite_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = 2.0 * x;
    for k in 1..n {
        let p2 = 2.0 * x * p1 - 2.0 * (k as f64) * p0;
        p0 = p1;
        p1 = p2;
    }
    (p1, 2.0 * n as f64 * p0)
}

const NEWTON_MAX_ITER: usize = 100;
// Convergence is judged on the Newton step |P/P'|, which stays meaningful
// even for families whose polynomial values span many orders of magnitude.
const NEWTON_STEP_TOL: f64 = 1e-14;

/// Nodes and weights for one family on its reference domain.
///
/// Invariants established by [`QuadratureRule::new`]: nodes are strictly
/// ascending and interior to the domain, all weights are positive, and
/// symmetric families have exactly mirrored nodes and weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub family: Family,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the n-point rule for `family`.
    pub fn new(family: Family, n: usize) -> Result<Self, QuadratureError> {
        if n == 0 {
            return Err(QuadratureError::EmptyRule);
        }
        family.validate()?;
        let (mut nodes, mut weights) = match family {
            Family::Legendre => legendre_rule(n)?,
            Family::Chebyshev1 => chebyshev1_rule(n),
            Family::Chebyshev2 => chebyshev2_rule(n),
            Family::Chebyshev3 => chebyshev3_rule(n),
            Family::Chebyshev4 => chebyshev4_rule(n),
            Family::Jacobi { alpha, beta } => jacobi_rule(alpha, beta, n)?,
            Family::Laguerre { alpha } => laguerre_rule(alpha, n)?,
            Family::Hermite => hermite_rule(n)?,
        };
        if family.is_symmetric() {
            symmetrize(&mut nodes, &mut weights);
        }
        let ordered = nodes.windows(2).all(|w| w[0] < w[1]);
        let positive = weights.iter().all(|&w| w > 0.0 && w.is_finite());
        if !ordered || !positive {
            return Err(QuadratureError::RootNotConverged { family, n, index: 0 });
        }
        Ok(QuadratureRule { family, n, nodes, weights })
    }

    /// `Σ w_i f_values[i]` on the reference domain.
    pub fn integrate(&self, f_values: &[f64]) -> Result<f64, QuadratureError> {
        if f_values.len() != self.n {
            return Err(QuadratureError::LengthMismatch { expected: self.n, got: f_values.len() });
        }
        Ok(self
            .weights
            .iter()
            .zip(f_values)
            .map(|(w, f)| w * f)
            .sum())
    }

    /// Evaluates `f` at the nodes and integrates.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// A finite-domain rule mapped affinely onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct MappedRule {
    pub base: QuadratureRule,
    pub a: f64,
    pub b: f64,
    pub mapped_nodes: Vec<f64>,
    /// `(b - a) / 2`; multiplies every integral computed with this rule.
    pub scale: f64,
}

/// Maps a finite-domain rule onto `[a, b]` via `x ↦ (b-a)/2·x + (a+b)/2`.
pub fn map_rule(rule: &QuadratureRule, a: f64, b: f64) -> Result<MappedRule, QuadratureError> {
    if !rule.family.is_finite_domain() {
        return Err(QuadratureError::UnmappableFamily { family: rule.family });
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::BadInterval { a, b });
    }
    let scale = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let mapped_nodes = rule.nodes.iter().map(|&x| scale * x + mid).collect();
    Ok(MappedRule { base: rule.clone(), a, b, mapped_nodes, scale })
}

impl MappedRule {
    /// `scale · Σ w_i f_values[i]` with `f_values` sampled at the mapped nodes.
    pub fn integrate(&self, f_values: &[f64]) -> Result<f64, QuadratureError> {
        Ok(self.scale * self.base.integrate(f_values)?)
    }

    /// Evaluates `f` at the mapped nodes and integrates.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.scale
            * self
                .mapped_nodes
                .iter()
                .zip(&self.base.weights)
                .map(|(&x, &w)| w * f(x))
                .sum::<f64>()
    }
}

/// Composite trapezoid rule over equally spaced samples of `[a, b]`.
pub fn trapezoid(f_values: &[f64], a: f64, b: f64) -> Result<f64, QuadratureError> {
    if f_values.len() < 2 {
        return Err(QuadratureError::TooFewSamples);
    }
    let n = f_values.len();
    let h = (b - a) / (n as f64 - 1.0);
    let mut sum = 0.0;
    for i in 1..n {
        sum += f_values[i] + f_values[i - 1];
    }
    Ok(h / 2.0 * sum)
}

/// Plain Monte Carlo estimate `(b-a)/n · Σ f(U_i)` with `U_i ~ Uniform[a, b)`.
///
/// Sampling uses the crate's seeded generator, so a fixed seed gives a
/// bit-identical result on every platform.
pub fn monte_carlo(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64, QuadratureError> {
    if n_samples == 0 || !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::BadInterval { a, b });
    }
    let mut rng = SeededRng::new(seed);
    let mut sum = 0.0;
    for _ in 0..n_samples {
        let x = a + (b - a) * rng.uniform();
        sum += f(x);
    }
    Ok((b - a) / n_samples as f64 * sum)
}

fn legendre_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-angle guess; roots come out in descending order.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_eval(n, z);
            let step = p / d;
            z -= step;
            if step.abs() <= NEWTON_STEP_TOL * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::RootNotConverged { family: Family::Legendre, n, index: i });
        }
        let (_, dp) = legendre_eval(n, z);
        nodes[n - 1 - i] = z;
        weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    Ok((nodes, weights))
}

fn chebyshev1_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut nodes: Vec<f64> = (1..=n)
        .map(|k| ((2.0 * k as f64 - 1.0) / (2.0 * nf) * std::f64::consts::PI).cos())
        .collect();
    nodes.reverse();
    let weights = vec![std::f64::consts::PI / nf; n];
    (nodes, weights)
}

fn chebyshev2_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = n as f64 + 1.0;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let theta = k as f64 * std::f64::consts::PI / m;
        nodes.push(theta.cos());
        weights.push(std::f64::consts::PI / m * theta.sin().powi(2));
    }
    (nodes, weights)
}

// Third and fourth kind rules follow from the half-angle form of the
// corresponding polynomials: V_n(cos θ) ∝ cos((n+1/2)θ) and
// W_n(cos θ) ∝ sin((n+1/2)θ).
fn chebyshev3_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = 2.0 * n as f64 + 1.0;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let theta = (2.0 * k as f64 - 1.0) * std::f64::consts::PI / m;
        nodes.push(theta.cos());
        weights.push(4.0 * std::f64::consts::PI / m * (theta / 2.0).cos().powi(2));
    }
    (nodes, weights)
}

fn chebyshev4_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = 2.0 * n as f64 + 1.0;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let theta = 2.0 * k as f64 * std::f64::consts::PI / m;
        nodes.push(theta.cos());
        weights.push(4.0 * std::f64::consts::PI / m * (theta / 2.0).sin().powi(2));
    }
    (nodes, weights)
}

fn jacobi_rule(alpha: f64, beta: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let family = Family::Jacobi { alpha, beta };
    let nf = n as f64;
    // Roots of J_k strictly interlace those of J_{k-1}; building degree by
    // degree gives every root a guaranteed bracket, inside which Newton is
    // safeguarded by bisection. This stays robust over the whole
    // (α, β) > -1 range where asymptotic initial guesses are not.
    let mut roots = vec![(beta - alpha) / (alpha + beta + 2.0)];
    for k in 2..=n {
        let mut brackets = Vec::with_capacity(k + 1);
        brackets.push(-1.0);
        brackets.extend(&roots);
        brackets.push(1.0);
        let mut next = Vec::with_capacity(k);
        for w in brackets.windows(2) {
            let root = bracketed_newton(|x| jacobi_eval(alpha, beta, k, x), w[0], w[1])?
                .ok_or(QuadratureError::RootNotConverged { family, n, index: next.len() })?;
            next.push(root);
        }
        roots = next;
    }
    let ln_prefactor = (alpha + beta + 1.0) * std::f64::consts::LN_2
        + libm::lgamma(nf + alpha + 1.0)
        + libm::lgamma(nf + beta + 1.0)
        - libm::lgamma(nf + 1.0)
        - libm::lgamma(nf + alpha + beta + 1.0);
    let mut weights = Vec::with_capacity(n);
    for &z in &roots {
        let (_, d) = jacobi_eval(alpha, beta, n, z)?;
        let w = (ln_prefactor - (1.0 - z * z).ln() - 2.0 * d.abs().ln()).exp();
        weights.push(w);
    }
    Ok((roots, weights))
}

/// Newton iteration confined to a sign-changing bracket; steps that would
/// leave the bracket fall back to bisection.
fn bracketed_newton(
    eval: impl Fn(f64) -> Result<(f64, f64), QuadratureError>,
    mut lo: f64,
    mut hi: f64,
) -> Result<Option<f64>, QuadratureError> {
    let (flo, _) = eval(lo)?;
    let (fhi, _) = eval(hi)?;
    if flo == 0.0 {
        return Ok(Some(lo));
    }
    if fhi == 0.0 {
        return Ok(Some(hi));
    }
    if flo.signum() == fhi.signum() {
        return Ok(None);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = eval(x)?;
        if p == 0.0 {
            return Ok(Some(x));
        }
        if p.signum() == flo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let step = p / dp;
        let newton_x = x - step;
        let next = if dp.is_finite() && newton_x > lo && newton_x < hi {
            newton_x
        } else {
            0.5 * (lo + hi)
        };
        let moved = (next - x).abs();
        x = next;
        if moved <= NEWTON_STEP_TOL * x.abs().max(1.0) || (hi - lo) <= f64::EPSILON * 2.0 {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn laguerre_rule(alpha: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let family = Family::Laguerre { alpha };
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut z = match i {
            0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
            1 => nodes[0] + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                nodes[i - 1]
                    + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                        * (nodes[i - 1] - nodes[i - 2])
                        / (1.0 + 0.3 * alpha)
            }
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = laguerre_eval(alpha, n, z)?;
            let step = p / d;
            z -= step;
            if step.abs() <= NEWTON_STEP_TOL * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::RootNotConverged { family, n, index: i });
        }
        nodes[i] = z;
        let lnp1 = laguerre_value(alpha, n + 1, z).abs().ln();
        let ln_w = libm::lgamma(nf + alpha + 1.0) - libm::lgamma(nf + 1.0) + z.ln()
            - 2.0 * ((nf + 1.0).ln() + lnp1);
        weights[i] = ln_w.exp();
    }
    Ok((nodes, weights))
}

fn hermite_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let nf = n as f64;
    let m = n.div_ceil(2);
    // Positive-side roots in descending order; mirrored afterwards.
    let mut pos = vec![0.0; m];
    let mut wts = vec![0.0; m];
    for i in 0..m {
        let mut z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => pos[0] - 1.14 * nf.powf(0.426) / pos[0],
            2 => 1.86 * pos[1] - 0.86 * pos[0],
            3 => 1.91 * pos[2] - 0.91 * pos[1],
            _ => 2.0 * pos[i - 1] - pos[i - 2],
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = hermite_eval(n, z);
            let step = p / d;
            z -= step;
            if step.abs() <= NEWTON_STEP_TOL * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::RootNotConverged { family: Family::Hermite, n, index: i });
        }
        pos[i] = z;
        let (_, d) = hermite_eval(n, z);
        let ln_w = (nf + 1.0) * std::f64::consts::LN_2
            + libm::lgamma(nf + 1.0)
            + 0.5 * std::f64::consts::PI.ln()
            - 2.0 * d.abs().ln();
        wts[i] = ln_w.exp();
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..m {
        nodes.push(-pos[i]);
        weights.push(wts[i]);
    }
    // `pos` is descending, so the negated half is ascending already; append
    // the mirrored positive half (for odd n, pos[m-1] is the center root
    // and must not be duplicated).
    let upper = if n % 2 == 1 { m - 1 } else { m };
    for i in (0..upper).rev() {
        nodes.push(pos[i]);
        weights.push(wts[i]);
    }
    Ok((nodes, weights))
}

/// Forces exact mirror symmetry on a sorted node/weight set.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let s = (nodes[j] - nodes[i]) / 2.0;
        nodes[i] = -s;
        nodes[j] = s;
        let w = (weights[i] + weights[j]) / 2.0;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_eval_basics() {
        assert_eq!(legendre_eval(0, 0.37), (1.0, 0.0));
        assert_eq!(legendre_eval(1, 0.5), (0.5, 1.0));
        let (p, d) = legendre_eval(2, 1.0);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_matches_legendre_at_zero_params() {
        let (p, d) = jacobi_eval(0.0, 0.0, 2, 1.0).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-14);
        let (p0, d0) = jacobi_eval(1.3, -0.2, 0, 0.77).unwrap();
        assert_eq!((p0, d0), (1.0, 0.0));
        for &x in &[-0.9, -0.3, 0.2, 0.8] {
            let (p, d) = jacobi_eval(0.0, 0.0, 7, x).unwrap();
            let (pl, dl) = legendre_eval(7, x);
            assert_abs_diff_eq!(p, pl, epsilon = 1e-13);
            assert_abs_diff_eq!(d, dl, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_rejects_bad_params() {
        assert!(jacobi_eval(-1.0, 0.0, 3, 0.5).is_err());
        assert!(jacobi_eval(0.0, -1.5, 3, 0.5).is_err());
        assert!(QuadratureRule::new(Family::Jacobi { alpha: -2.0, beta: 0.0 }, 4).is_err());
    }

    #[test]
    fn laguerre_eval_basics() {
        let (p, d) = laguerre_eval(0.0, 1, 0.3).unwrap();
        assert_abs_diff_eq!(p, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(d, -1.0, epsilon = 1e-15);
        assert_eq!(laguerre_eval(0.0, 0, 5.0).unwrap(), (1.0, 0.0));
        let (p, d) = laguerre_eval(1.0, 2, 0.0).unwrap();
        assert_abs_diff_eq!(p, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d, -3.0, epsilon = 1e-15);
        assert!(laguerre_eval(-1.0, 2, 1.0).is_err());
    }

    #[test]
    fn hermite_eval_basics() {
        let (p, d) = hermite_eval(1, 0.7);
        assert_abs_diff_eq!(p, 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-15);
        assert_eq!(hermite_eval(0, 1.23), (1.0, 0.0));
        // H_2 = 4x^2 - 2, H_2' = 8x = 2n H_1
        let (p, d) = hermite_eval(2, 1.0);
        assert_abs_diff_eq!(p, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d, 8.0, epsilon = 1e-14);
    }

    #[test]
    fn small_rules_match_hand_values() {
        let r = QuadratureRule::new(Family::Legendre, 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_abs_diff_eq!(r.weights[0], 2.0, epsilon = 1e-15);

        let r = QuadratureRule::new(Family::Legendre, 2).unwrap();
        let s = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -s, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nodes[1], s, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[1], 1.0, epsilon = 1e-14);

        let r = QuadratureRule::new(Family::Chebyshev1, 2).unwrap();
        let c = 0.5_f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -c, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], c, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], std::f64::consts::PI / 2.0, epsilon = 1e-15);

        let r = QuadratureRule::new(Family::Hermite, 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_abs_diff_eq!(r.weights[0], std::f64::consts::PI.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn weight_sums_match_total_mass() {
        let leg = QuadratureRule::new(Family::Legendre, 9).unwrap();
        assert_abs_diff_eq!(leg.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
        let c1 = QuadratureRule::new(Family::Chebyshev1, 9).unwrap();
        assert_abs_diff_eq!(c1.weights.iter().sum::<f64>(), std::f64::consts::PI, epsilon = 1e-12);
        let h = QuadratureRule::new(Family::Hermite, 9).unwrap();
        assert_abs_diff_eq!(
            h.weights.iter().sum::<f64>(),
            std::f64::consts::PI.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn map_rejects_unbounded_families() {
        let h = QuadratureRule::new(Family::Hermite, 3).unwrap();
        assert!(map_rule(&h, 0.0, 1.0).is_err());
        let l = QuadratureRule::new(Family::Laguerre { alpha: 0.0 }, 3).unwrap();
        assert!(map_rule(&l, 0.0, 1.0).is_err());
    }

    #[test]
    fn mapping_places_nodes_inside_interval() {
        let r = QuadratureRule::new(Family::Legendre, 1).unwrap();
        let m = map_rule(&r, 0.0, 1.0).unwrap();
        assert_eq!(m.mapped_nodes, vec![0.5]);
        assert_eq!(m.scale, 0.5);

        let r2 = QuadratureRule::new(Family::Legendre, 2).unwrap();
        let m2 = map_rule(&r2, 0.0, 2.0).unwrap();
        let s = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(m2.mapped_nodes[0], 1.0 - s, epsilon = 1e-14);
        assert_abs_diff_eq!(m2.mapped_nodes[1], 1.0 + s, epsilon = 1e-14);
        assert_eq!(m2.scale, 1.0);
    }

    #[test]
    fn integrate_examples() {
        // n-point Gauss-Legendre is exact through degree 2n-1.
        let r = QuadratureRule::new(Family::Legendre, 2).unwrap();
        let vals: Vec<f64> = r.nodes.iter().map(|&x| x.powi(3) + x * x).collect();
        assert_abs_diff_eq!(r.integrate(&vals).unwrap(), 2.0 / 3.0, epsilon = 1e-14);

        let r5 = QuadratureRule::new(Family::Legendre, 5).unwrap();
        let m = map_rule(&r5, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.integrate(&vec![1.0; 5]).unwrap(), 1.0, epsilon = 1e-14);

        let lag = QuadratureRule::new(Family::Laguerre { alpha: 0.0 }, 3).unwrap();
        assert_abs_diff_eq!(lag.integrate(&vec![1.0; 3]).unwrap(), 1.0, epsilon = 1e-12);

        assert!(r5.integrate(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn trapezoid_examples() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let linear: Vec<f64> = xs.iter().map(|&x| x).collect();
        assert_abs_diff_eq!(trapezoid(&linear, 0.0, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(trapezoid(&[0.0, 1.0], 0.0, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(trapezoid(&[3.0; 7], 2.0, 5.0).unwrap(), 9.0, epsilon = 1e-14);
        assert!(trapezoid(&[1.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn monte_carlo_examples() {
        assert_abs_diff_eq!(monte_carlo(|_| 1.0, 0.0, 1.0, 1000, 7).unwrap(), 1.0, epsilon = 1e-15);
        let est = monte_carlo(|x| x, 0.0, 1.0, 100_000, 42).unwrap();
        assert!((est - 0.5).abs() < 0.01, "estimate {est} too far from 0.5");
        let a = monte_carlo(|x| x.sin(), 0.0, 2.0, 5000, 11).unwrap();
        let b = monte_carlo(|x| x.sin(), 0.0, 2.0, 5000, 11).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn symmetric_families_mirror_exactly() {
        for fam in [
            Family::Legendre,
            Family::Chebyshev1,
            Family::Chebyshev2,
            Family::Hermite,
            Family::Jacobi { alpha: 1.5, beta: 1.5 },
        ] {
            let r = QuadratureRule::new(fam, 7).unwrap();
            for i in 0..r.n {
                let j = r.n - 1 - i;
                assert_abs_diff_eq!(r.nodes[i], -r.nodes[j], epsilon = 1e-12);
                assert_abs_diff_eq!(r.weights[i], r.weights[j], epsilon = 1e-12);
            }
        }
    }
}
