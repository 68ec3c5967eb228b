//! Declarative problem definitions and residual/loss assembly for the
//! benchmark families: one-dimensional integral equations (IEs),
//! integro-differential equations with ordinal/partial/fractional
//! derivatives, multi-dimensional IEs, systems, optimal-control problems,
//! and inverse problems with trainable parameters.
//!
//! A problem is a declarative [`IeProblem`] (or [`oc::OcProblem`]) looked
//! up by id in the [`registry`]. Compiling it against a training
//! configuration precomputes the collocation grid, operator matrices and
//! source samples once; training then rebuilds only the differentiation
//! tape per loss evaluation.
//!
//! The residual convention: an equation `κ·D(u) = S + Σ c_t · I_t(ζ_t(u))`
//! is stored so that the residual reads `κ·D(u) − Σ c_t · I_t − S`.

pub mod compile;
pub mod oc;
pub mod registry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::Schedule;
use crate::quadrature::Family;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("mae needs at least one point")]
    EmptyInput,
    #[error("mae needs equal lengths, got {0} and {1}")]
    MaeLengthMismatch(usize, usize),
    #[error("unknown suite id {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
    #[error(transparent)]
    Operator(#[from] crate::integral_ops::OperatorError),
    #[error(transparent)]
    Fractional(#[from] crate::fractional::FractionalError),
    #[error(transparent)]
    Network(#[from] crate::network::NetworkError),
    #[error(transparent)]
    Optimize(#[from] crate::optimize::OptimizeError),
}

pub type Fn1 = fn(f64) -> f64;
pub type Fn2 = fn(f64, f64) -> f64;
pub type Fn3 = fn(f64, f64, f64) -> f64;
pub type Fn4 = fn(f64, f64, f64, f64) -> f64;
pub type Fn6 = fn(f64, f64, f64, f64, f64, f64) -> f64;

/// Exact solution, by input dimension.
#[derive(Clone, Copy)]
pub enum ExactFn {
    D1(Fn1),
    D2(Fn2),
    D3(Fn3),
}

impl ExactFn {
    pub fn eval(&self, row: &[f64]) -> f64 {
        match self {
            ExactFn::D1(f) => f(row[0]),
            ExactFn::D2(f) => f(row[0], row[1]),
            ExactFn::D3(f) => f(row[0], row[1], row[2]),
        }
    }

    /// Central finite difference along one axis (h = 1e-5 for order 1,
    /// 1e-4 for order 2).
    pub fn fd_axis(&self, row: &[f64], order: usize, axis: usize) -> f64 {
        let h = if order == 1 { 1e-5 } else { 1e-4 };
        let mut plus = row.to_vec();
        let mut minus = row.to_vec();
        plus[axis] += h;
        minus[axis] -= h;
        match order {
            1 => (self.eval(&plus) - self.eval(&minus)) / (2.0 * h),
            2 => (self.eval(&plus) - 2.0 * self.eval(row) + self.eval(&minus)) / (h * h),
            _ => panic!("finite differences support orders 1 and 2"),
        }
    }
}

/// Nonlinearity applied to the unknown (or its first derivative) inside an
/// integral term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zeta {
    /// ζ(u) = u
    Id,
    /// ζ(u) = u²
    Square,
    /// ζ(u) = u³
    Cube,
    /// ζ(u) = e^u
    Exp,
    /// ζ = u'
    Deriv,
    /// ζ = (u')²
    DerivSquare,
    /// ζ = u² + u'
    SquarePlusDeriv,
}

impl Zeta {
    pub fn needs_deriv(&self) -> bool {
        matches!(self, Zeta::Deriv | Zeta::DerivSquare | Zeta::SquarePlusDeriv)
    }
}

/// Coefficient multiplying an integral term.
#[derive(Debug, Clone, Copy)]
pub enum CoeffSpec {
    Const(f64),
    /// Index into the problem's trainable extra parameters (scalar).
    ExtraScalar(usize),
    /// Index into the extras; a per-collocation-row vector.
    ExtraVector(usize),
}

/// One integral operator inside an equation.
#[derive(Clone, Copy)]
pub enum OpSpec {
    /// No integral at all: the term is `ζ(u)` at the collocation points
    /// (algebraic right-hand-side pieces such as the population model's
    /// `u - u²`).
    Pointwise,
    /// `∫_a^b K(x,t) ζ(u(t)) dt` over the whole (finite) domain.
    Fredholm1d { kernel: Fn2 },
    /// `∫_a^x K(x,t) ζ(u(t)) dt`. `weight_free_kernel` is the kernel with
    /// a `(1-r)^γ`-type singular factor removed; it is used instead of
    /// `kernel` when the run is configured with a Gauss-Jacobi inner rule.
    Volterra1d { kernel: Fn2, weight_free_kernel: Option<Fn2>, jacobi_inner: Option<(f64, f64)> },
    /// `∫_0^∞ K(x,t) ζ(u(t)) dt` on Gauss-Laguerre nodes.
    SemiFredholm { kernel: Fn2 },
    /// PIDE term `∫_{Δ_t} K(x,t,s) ζ(u(x,s)) ds` (s shares the t-axis rule).
    PideFredholm { kernel: Fn3 },
    /// PIDE term `∫_{a_x}^{x} K(x,t,s) ζ(u(x,s)) ds`.
    PideVolterraX { kernel: Fn3 },
    /// `∫∫ K(x,y,s,t) u(s,t) dt ds` over the whole 2-D domain.
    Fredholm2d { kernel: Fn4 },
    /// `∫_{a_x}^{x} ∫_{a_y}^{y} K(x,y,s,t) u(s,t) dt ds`.
    Volterra2d { kernel: Fn4 },
    /// Triple integral over the whole 3-D domain.
    Fredholm3d { kernel: Fn6 },
}

#[derive(Clone, Copy)]
pub struct TermSpec {
    /// Which unknown the term integrates (index into the problem's nets).
    pub net: usize,
    pub coeff: CoeffSpec,
    pub zeta: Zeta,
    pub op: OpSpec,
    /// Multiply the term by `u(x)` pointwise after integration (the
    /// population model's `u ∫ u` shape).
    pub outer_mul_u: bool,
}

impl TermSpec {
    pub fn new(net: usize, op: OpSpec) -> Self {
        TermSpec { net, coeff: CoeffSpec::Const(1.0), zeta: Zeta::Id, op, outer_mul_u: false }
    }

    pub fn zeta(mut self, z: Zeta) -> Self {
        self.zeta = z;
        self
    }

    pub fn coeff(mut self, c: f64) -> Self {
        self.coeff = CoeffSpec::Const(c);
        self
    }

    pub fn trainable_scalar(mut self, idx: usize) -> Self {
        self.coeff = CoeffSpec::ExtraScalar(idx);
        self
    }

    pub fn trainable_vector(mut self, idx: usize) -> Self {
        self.coeff = CoeffSpec::ExtraVector(idx);
        self
    }

    pub fn outer_mul_u(mut self) -> Self {
        self.outer_mul_u = true;
        self
    }
}

/// Left-hand side `κ·D(u)` of an equation.
#[derive(Debug, Clone, Copy)]
pub enum LhsSpec {
    /// First-kind equation: no explicit unknown outside the integrals.
    Zero,
    /// `κ u`.
    U { kappa: f64 },
    /// `κ d^order u / d x_axis^order` via the differentiation tape.
    Deriv { kappa: f64, order: usize, axis: usize },
    /// `κ` times the L1 Caputo derivative of order `alpha` (1-D only; the
    /// collocation grid is prefixed with the left terminal).
    Caputo { kappa: f64, alpha: f64 },
}

/// Source term, by dimension. `Discrete` asks the compiler to manufacture
/// the source by substituting the exact solution into the discretized
/// equation (used by the fractional inverse problem, whose continuous
/// source has no closed form).
#[derive(Clone, Copy)]
pub enum SourceSpec {
    Zero,
    S1(Fn1),
    S2(Fn2),
    S3(Fn3),
    Discrete,
}

#[derive(Clone)]
pub struct EquationSpec {
    /// The net whose unknown carries the LHS.
    pub net: usize,
    pub lhs: LhsSpec,
    pub terms: Vec<TermSpec>,
    pub source: SourceSpec,
}

/// Condition class, matching the loss weights λ^IC, λ^BC, λ^Data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondClass {
    Initial,
    Boundary,
    Data,
}

/// A set of pointwise conditions on one unknown.
#[derive(Clone)]
pub enum ConditionSpec {
    /// `u(p) = exact(p)` at explicit 1-D points.
    FromExact1d { net: usize, class: CondClass, points: Vec<f64> },
    /// Explicit `(point, value)` pairs (any dimension).
    Explicit { net: usize, class: CondClass, points: Vec<(Vec<f64>, f64)> },
    /// PIDE initial curve `u(x, t0) = exact(x, t0)` sampled on the x-nodes.
    PideInitial { net: usize },
    /// Noisy samples of the exact solution at seeded uniform points
    /// (inverse problems). `noise` is the relative white-noise fraction.
    NoisyData { net: usize, count: usize, noise: f64, seed: u64 },
}

/// Trainable non-network parameter (inverse problems).
#[derive(Clone)]
pub struct ExtraSpec {
    pub name: &'static str,
    /// `Scalar` or one value per collocation row.
    pub per_row: bool,
    pub init: f64,
    /// Ground truth used by the zero-residual gate and recovery reports;
    /// for per-row extras the truth is a function of the collocation point.
    pub truth: Option<TruthSpec>,
}

#[derive(Clone, Copy)]
pub enum TruthSpec {
    Scalar(f64),
    PerRow(Fn1),
}

/// How the collocation grid is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Mapped Gaussian nodes on each (finite) axis.
    Mapped,
    /// 1-D mapped nodes prefixed with the left terminal (needed by the L1
    /// Caputo matrix, which anchors at the lower terminal).
    MappedWithLeftTerminal,
    /// Gauss-Laguerre nodes on `[0, ∞)`.
    SemiInfinite,
}

/// Extra reporting data for the population-growth model.
#[derive(Debug, Clone, Copy)]
pub struct PopulationMeta {
    pub kappa: f64,
    pub alpha: f64,
    pub u0: f64,
    /// Reference peak location (per-κ tabulated value).
    pub x_max_ref: f64,
    /// Closed-form peak height `1 + κ ln(κ/(1+κ-u0))` (α = 1 only).
    pub u_max_ref: Option<f64>,
}

/// A forward or inverse integral-equation problem.
#[derive(Clone)]
pub struct IeProblem {
    pub dims: usize,
    pub domains: Vec<(f64, f64)>,
    pub grid: GridKind,
    pub n_nets: usize,
    pub equations: Vec<EquationSpec>,
    pub conditions: Vec<ConditionSpec>,
    pub extras: Vec<ExtraSpec>,
    /// Exact solution per net, when known.
    pub exact: Vec<Option<ExactFn>>,
    /// Analytic derivative of the exact solution (used by the residual gate
    /// instead of finite differences when available).
    pub exact_deriv: Vec<Option<ExactFn>>,
    /// MAE evaluation domain override (semi-infinite problems).
    pub mae_domains: Option<Vec<(f64, f64)>>,
    pub population: Option<PopulationMeta>,
    /// Mask out the first collocation row of every residual (grids with a
    /// prefixed left terminal, where the Caputo row is identically zero).
    pub mask_first_row: bool,
}

impl IeProblem {
    pub fn has_full_exact(&self) -> bool {
        self.exact.iter().all(|e| e.is_some())
    }
}

/// Loss weights for the condition classes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Lambdas {
    pub ic: f64,
    pub bc: f64,
    pub data: f64,
}

impl Default for Lambdas {
    fn default() -> Self {
        Lambdas { ic: 1.0, bc: 1.0, data: 1.0 }
    }
}

/// Run configuration, either the suite defaults or CLI overrides.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Node count (per axis for multi-dimensional problems).
    pub n_train: usize,
    /// Hidden-layer widths; the full architecture is `[d, hidden..., 1]`.
    pub hidden: Vec<usize>,
    pub schedule: Schedule,
    pub seed: u64,
    pub lambdas: Lambdas,
    /// Quadrature family for finite 1-D axes.
    pub quad_family: Family,
    /// Use a singularity-matched Gauss-Jacobi inner rule for Abel-type
    /// Volterra terms that declare one.
    pub abel_jacobi: bool,
}

impl TrainConfig {
    pub fn widths_for(&self, dims: usize) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden.len() + 2);
        w.push(dims);
        w.extend(&self.hidden);
        w.push(1);
        w
    }
}

/// The record a run emits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub id: String,
    pub seed: u64,
    pub n_train: usize,
    pub widths: Vec<usize>,
    pub schedule: Schedule,
    pub final_loss: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub loss_trajectory: Vec<f64>,
    /// Maximum over the problem's unknowns; present iff an exact solution is.
    pub mae: Option<f64>,
    /// Per-unknown MAEs when more than one function is learned.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub mae_per_function: Vec<f64>,
    /// Simulated cost functional (optimal control only).
    pub j_value: Option<f64>,
    /// Recovered named parameters (inverse problems).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub recovered: Vec<(String, f64)>,
    /// Auxiliary scalars (population peak location/height, residual MSE, ...).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub extra: Vec<(String, f64)>,
    pub wall_time_ms: u128,
}

/// Mean absolute error between two equal-length samples.
pub fn mae(exact: &[f64], predicted: &[f64]) -> Result<f64, ProblemError> {
    if exact.is_empty() {
        return Err(ProblemError::EmptyInput);
    }
    if exact.len() != predicted.len() {
        return Err(ProblemError::MaeLengthMismatch(exact.len(), predicted.len()));
    }
    Ok(exact
        .iter()
        .zip(predicted)
        .map(|(e, p)| (e - p).abs())
        .sum::<f64>()
        / exact.len() as f64)
}

/// A registered suite: an IE-style problem or an optimal-control problem,
/// with its default training configuration.
pub struct Suite {
    pub id: &'static str,
    pub description: &'static str,
    pub spec: SuiteSpec,
    pub defaults: TrainConfig,
}

pub enum SuiteSpec {
    Ie(IeProblem),
    Oc(oc::OcProblem),
}

impl Suite {
    /// Trains with the given config and reports. For multi-seed protocols
    /// see [`train_best_of`].
    pub fn train(&self, config: &TrainConfig) -> Result<RunReport, ProblemError> {
        match &self.spec {
            SuiteSpec::Ie(p) => compile::train_ie(self.id, p, config),
            SuiteSpec::Oc(p) => oc::train_oc(self.id, p, config),
        }
    }
}

/// Runs `seeds`, returns every report plus the index of the best run
/// (lowest final loss — selection never looks at the exact solution).
pub fn train_best_of(
    suite: &Suite,
    config: &TrainConfig,
    seeds: &[u64],
) -> Result<(Vec<RunReport>, usize), ProblemError> {
    let mut reports = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut c = config.clone();
        c.seed = seed;
        reports.push(suite.train(&c)?);
    }
    let best = reports
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.final_loss.partial_cmp(&b.1.final_loss).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Ok((reports, best))
}
