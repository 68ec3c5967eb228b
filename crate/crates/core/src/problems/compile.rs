//! Compilation of declarative problems into trainable form.
//!
//! Compiling fixes the collocation grid, precomputes every operator as a
//! constant matrix (plus the inner evaluation points it needs), samples the
//! source term, and materializes conditions. After that, a loss evaluation
//! only rebuilds the differentiation tape.
//!
//! Two consumers share the compiled data: the taped loss used for training,
//! and a plain-array evaluator that substitutes the exact solution into the
//! residual (the transcription gate run before any training).

use std::collections::HashMap;

use ndarray::Array2;

use crate::integral_ops::{
    grid_2d, Fredholm2dAssembly, Fredholm3dAssembly, FredholmAssembly, LaguerreKernelForm,
    VolterraAssembly, Volterra2dAssembly,
};
use crate::fractional::CaputoMatrix;
use crate::network::{flatten_grads, input_derivative_on, Activation, Mlp, MlpParams};
use crate::optimize;
use crate::quadrature::{map_rule, Family, QuadratureRule};
use crate::rng::SeededRng;
use crate::tape::{DiffTensor, Tape};

use super::{
    CoeffSpec, CondClass, ConditionSpec, ExactFn, GridKind, IeProblem, LhsSpec, OpSpec,
    ProblemError, RunReport, SourceSpec, TermSpec, TrainConfig, TruthSpec, Zeta,
};

pub(crate) enum CompiledForm {
    /// ζ evaluated at the collocation points, no operator.
    Direct,
    /// `m · ζ(u at collocation)`.
    Dense { m: Array2<f64> },
    /// ζ at dedicated inner points, reshaped to `(rows, cols)`, optionally
    /// left-multiplied by a duplication matrix, then `row_sum(□ ⊙ weight)`.
    RowSum {
        inner: Array2<f64>,
        rows: usize,
        cols: usize,
        dup: Option<Array2<f64>>,
        weight: Array2<f64>,
    },
}

pub(crate) struct CompiledTerm {
    net: usize,
    coeff: CoeffSpec,
    zeta: Zeta,
    outer_mul_u: bool,
    form: CompiledForm,
}

pub(crate) enum CompiledLhs {
    Zero,
    U { kappa: f64 },
    Deriv { kappa: f64, order: usize, axis: usize },
    Caputo { kappa: f64, m: Array2<f64> },
}

pub(crate) struct CompiledEq {
    net: usize,
    lhs: CompiledLhs,
    terms: Vec<CompiledTerm>,
    source: Array2<f64>,
}

pub(crate) struct CompiledCond {
    net: usize,
    class: CondClass,
    points: Array2<f64>,
    values: Array2<f64>,
}

pub struct CompiledExtra {
    pub name: String,
    pub values: Vec<f64>,
    pub truth: Option<Vec<f64>>,
}

/// Loss decomposition for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct LossParts {
    pub loss: f64,
    pub residual_mse: f64,
    pub ic_mse: f64,
    pub bc_mse: f64,
    pub data_mse: f64,
}

pub struct CompiledProblem {
    pub id: String,
    pub problem: IeProblem,
    pub nets: Vec<Mlp>,
    pub extras: Vec<CompiledExtra>,
    pub colloc: Array2<f64>,
    n_colloc: usize,
    equations: Vec<CompiledEq>,
    conditions: Vec<CompiledCond>,
    mask: Option<Array2<f64>>,
    lambdas: super::Lambdas,
    need_colloc_grad: bool,
    test_points: Array2<f64>,
}

fn column(values: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((values.len(), 1), values.to_vec()).expect("column")
}

fn eval_rows(f: &ExactFn, pts: &Array2<f64>) -> Vec<f64> {
    (0..pts.nrows())
        .map(|r| f.eval(pts.row(r).as_slice().unwrap()))
        .collect()
}

/// Reference-domain rule whose weighted sum approximates the *plain*
/// integral `∫ f dx`: for families with a non-unit weight function, the
/// family weight is divided out at the nodes.
fn plain_rule(family: Family, n: usize) -> Result<QuadratureRule, ProblemError> {
    let mut rule = QuadratureRule::new(family, n)?;
    let omega = |x: f64| -> f64 {
        match family {
            Family::Legendre => 1.0,
            Family::Chebyshev1 => 1.0 / (1.0 - x * x).sqrt(),
            Family::Chebyshev2 => (1.0 - x * x).sqrt(),
            Family::Chebyshev3 => ((1.0 + x) / (1.0 - x)).sqrt(),
            Family::Chebyshev4 => ((1.0 - x) / (1.0 + x)).sqrt(),
            Family::Jacobi { alpha, beta } => (1.0 - x).powf(alpha) * (1.0 + x).powf(beta),
            _ => 1.0,
        }
    };
    if !matches!(family, Family::Legendre) {
        for (w, &x) in rule.weights.iter_mut().zip(rule.nodes.clone().iter()) {
            *w /= omega(x);
        }
    }
    Ok(rule)
}

impl CompiledProblem {
    pub fn new(id: &str, problem: &IeProblem, config: &TrainConfig) -> Result<Self, ProblemError> {
        let n = config.n_train;
        let dims = problem.dims;
        let family = config.quad_family;

        // Collocation grid and the per-axis node sets.
        let (colloc, axis_nodes, semi_rule) = match problem.grid {
            GridKind::Mapped => {
                let mut axes = Vec::new();
                for d in 0..dims {
                    let rule = plain_rule(family, n)?;
                    let mapped = map_rule(&rule, problem.domains[d].0, problem.domains[d].1)?;
                    axes.push(mapped.mapped_nodes.clone());
                }
                let colloc = match dims {
                    1 => column(&axes[0]),
                    2 => grid_2d(&axes[0], &axes[1]),
                    3 => grid_3d(&axes[0], &axes[1], &axes[2]),
                    _ => unreachable!("dims up to 3"),
                };
                (colloc, axes, None)
            }
            GridKind::MappedWithLeftTerminal => {
                assert_eq!(dims, 1, "prefixed grids are one-dimensional");
                let rule = plain_rule(family, n)?;
                let mapped = map_rule(&rule, problem.domains[0].0, problem.domains[0].1)?;
                let mut pts = vec![problem.domains[0].0];
                pts.extend(&mapped.mapped_nodes);
                (column(&pts), vec![pts.clone()], None)
            }
            GridKind::SemiInfinite => {
                assert_eq!(dims, 1, "semi-infinite grids are one-dimensional");
                let rule = QuadratureRule::new(Family::Laguerre { alpha: 0.0 }, n)?;
                (column(&rule.nodes), vec![rule.nodes.clone()], Some(rule))
            }
        };
        let n_colloc = colloc.nrows();

        let mask = problem.mask_first_row.then(|| {
            let mut m = Array2::ones((n_colloc, 1));
            m[(0, 0)] = 0.0;
            m
        });

        // Trainable extras.
        let extras: Vec<CompiledExtra> = problem
            .extras
            .iter()
            .map(|e| {
                let len = if e.per_row { n_colloc } else { 1 };
                let truth = e.truth.as_ref().map(|t| match t {
                    TruthSpec::Scalar(v) => vec![*v; len],
                    TruthSpec::PerRow(f) => (0..n_colloc).map(|r| f(colloc[(r, 0)])).collect(),
                });
                CompiledExtra { name: e.name.to_string(), values: vec![e.init; len], truth }
            })
            .collect();

        // Equations: LHS, terms, then sources (discrete sources need the
        // compiled terms, so they come last).
        let mut equations = Vec::new();
        for eq in &problem.equations {
            let lhs = match eq.lhs {
                LhsSpec::Zero => CompiledLhs::Zero,
                LhsSpec::U { kappa } => CompiledLhs::U { kappa },
                LhsSpec::Deriv { kappa, order, axis } => CompiledLhs::Deriv { kappa, order, axis },
                LhsSpec::Caputo { kappa, alpha } => {
                    let grid: Vec<f64> = colloc.column(0).to_vec();
                    let m = CaputoMatrix::new(&grid, alpha)?;
                    CompiledLhs::Caputo { kappa, m: m.matrix }
                }
            };
            let mut terms = Vec::new();
            for t in &eq.terms {
                terms.push(compile_term(t, problem, config, &colloc, &axis_nodes, &semi_rule)?);
            }
            equations.push(CompiledEq {
                net: eq.net,
                lhs,
                terms,
                source: Array2::zeros((n_colloc, 1)),
            });
        }
        for (ci, eq) in problem.equations.iter().enumerate() {
            equations[ci].source = match eq.source {
                SourceSpec::Zero => Array2::zeros((n_colloc, 1)),
                SourceSpec::S1(f) => column(&colloc.column(0).iter().map(|&x| f(x)).collect::<Vec<_>>()),
                SourceSpec::S2(f) => column(
                    &(0..n_colloc)
                        .map(|r| f(colloc[(r, 0)], colloc[(r, 1)]))
                        .collect::<Vec<_>>(),
                ),
                SourceSpec::S3(f) => column(
                    &(0..n_colloc)
                        .map(|r| f(colloc[(r, 0)], colloc[(r, 1)], colloc[(r, 2)]))
                        .collect::<Vec<_>>(),
                ),
                SourceSpec::Discrete => {
                    let eqc = &equations[ci];
                    let vals = exact_equation_value(eqc, problem, &extras, &colloc)?;
                    column(&vals)
                }
            };
        }

        // Conditions.
        let mut conditions = Vec::new();
        for c in &problem.conditions {
            conditions.push(compile_condition(c, problem, &axis_nodes)?);
        }

        let test_points = build_test_grid(problem);

        let need_colloc_grad = equations.iter().any(|eq| {
            matches!(eq.lhs, CompiledLhs::Deriv { .. })
                || eq.terms.iter().any(|t| {
                    t.zeta.needs_deriv() && matches!(t.form, CompiledForm::Dense { .. } | CompiledForm::Direct)
                })
        });

        let widths = config.widths_for(dims);
        let nets: Vec<Mlp> = (0..problem.n_nets)
            .map(|i| Mlp::new(&widths, Activation::Tanh, config.seed + i as u64))
            .collect::<Result<_, _>>()?;

        Ok(CompiledProblem {
            id: id.to_string(),
            problem: problem.clone(),
            nets,
            extras,
            colloc,
            n_colloc,
            equations,
            conditions,
            mask,
            lambdas: config.lambdas,
            need_colloc_grad,
            test_points,
        })
    }

    pub fn param_len(&self) -> usize {
        self.nets.iter().map(|n| n.param_count()).sum::<usize>()
            + self.extras.iter().map(|e| e.values.len()).sum::<usize>()
    }

    /// Current parameters in canonical order (nets first, extras after).
    pub fn theta(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_len());
        for n in &self.nets {
            out.extend(n.params_flat());
        }
        for e in &self.extras {
            out.extend(&e.values);
        }
        out
    }

    fn scatter(&mut self, theta: &[f64]) {
        let mut off = 0;
        for n in &mut self.nets {
            let c = n.param_count();
            n.set_params_flat(&theta[off..off + c]).expect("param scatter");
            off += c;
        }
        for e in &mut self.extras {
            let len = e.values.len();
            e.values.copy_from_slice(&theta[off..off + len]);
            off += len;
        }
        debug_assert_eq!(off, theta.len());
    }

    pub fn loss_and_grad(&mut self, theta: &[f64]) -> (f64, Vec<f64>) {
        let (parts, grad) = self.emit(theta, true);
        (parts.loss, grad.unwrap())
    }

    pub fn loss_parts(&mut self, theta: &[f64]) -> LossParts {
        self.emit(theta, false).0
    }

    /// Residual of every equation at the collocation points for the given
    /// parameters (masked rows set to zero).
    pub fn residual_values(&mut self, theta: &[f64]) -> Vec<Vec<f64>> {
        self.scatter(theta);
        let mut tape = Tape::new();
        let params: Vec<MlpParams> = self.nets.iter().map(|n| n.emit_params(&mut tape)).collect();
        let extra_nodes: Vec<DiffTensor> = self
            .extras
            .iter()
            .map(|e| tape.leaf(column(&e.values)))
            .collect();
        let x = if self.need_colloc_grad {
            tape.leaf(self.colloc.clone())
        } else {
            tape.constant(self.colloc.clone())
        };
        let u: Vec<DiffTensor> = self
            .nets
            .iter()
            .zip(&params)
            .map(|(net, p)| net.forward_on(&mut tape, p, x))
            .collect();
        let mut dcache = HashMap::new();
        let mut out = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            let r = emit_equation(
                &mut tape, eq, &self.nets, &params, x, &u, &mut dcache, &extra_nodes, &self.mask,
                self.n_colloc,
            );
            out.push(tape.value(r).column(0).to_vec());
        }
        out
    }

    fn emit(&mut self, theta: &[f64], want_grad: bool) -> (LossParts, Option<Vec<f64>>) {
        self.scatter(theta);
        let mut tape = Tape::new();
        let params: Vec<MlpParams> = self.nets.iter().map(|n| n.emit_params(&mut tape)).collect();
        let extra_nodes: Vec<DiffTensor> = self
            .extras
            .iter()
            .map(|e| tape.leaf(column(&e.values)))
            .collect();
        let x = if self.need_colloc_grad {
            tape.leaf(self.colloc.clone())
        } else {
            tape.constant(self.colloc.clone())
        };
        let u: Vec<DiffTensor> = self
            .nets
            .iter()
            .zip(&params)
            .map(|(net, p)| net.forward_on(&mut tape, p, x))
            .collect();
        let mut dcache: HashMap<(usize, usize, usize), DiffTensor> = HashMap::new();

        let mut res_sum: Option<DiffTensor> = None;
        let mut active = 0usize;
        let masked_rows = if self.mask.is_some() { 1 } else { 0 };
        for eq in &self.equations {
            let r = emit_equation(
                &mut tape, eq, &self.nets, &params, x, &u, &mut dcache, &extra_nodes, &self.mask,
                self.n_colloc,
            );
            let sq = tape.mul(r, r);
            let su = tape.sum_all(sq);
            res_sum = Some(match res_sum {
                None => su,
                Some(p) => tape.add(p, su),
            });
            active += self.n_colloc - masked_rows;
        }
        let res_mse = {
            let s = res_sum.expect("at least one equation");
            tape.scale(s, 1.0 / active as f64)
        };

        // Condition classes pool every point of the class into one MSE.
        let mut class_sum: [Option<DiffTensor>; 3] = [None, None, None];
        let mut class_count = [0usize; 3];
        for cond in &self.conditions {
            let idx = match cond.class {
                CondClass::Initial => 0,
                CondClass::Boundary => 1,
                CondClass::Data => 2,
            };
            let pts = tape.constant(cond.points.clone());
            let pred = self.nets[cond.net].forward_on(&mut tape, &params[cond.net], pts);
            let vals = tape.constant(cond.values.clone());
            let d = tape.sub(pred, vals);
            let sq = tape.mul(d, d);
            let su = tape.sum_all(sq);
            class_sum[idx] = Some(match class_sum[idx] {
                None => su,
                Some(p) => tape.add(p, su),
            });
            class_count[idx] += cond.points.nrows();
        }
        let lambdas = [self.lambdas.ic, self.lambdas.bc, self.lambdas.data];
        let mut loss = res_mse;
        let mut class_mse = [0.0f64; 3];
        for i in 0..3 {
            if let Some(s) = class_sum[i] {
                let mse = tape.scale(s, 1.0 / class_count[i] as f64);
                class_mse[i] = tape.scalar_value(mse);
                let weighted = tape.scale(mse, lambdas[i]);
                loss = tape.add(loss, weighted);
            }
        }

        let parts = LossParts {
            loss: tape.scalar_value(loss),
            residual_mse: tape.scalar_value(res_mse),
            ic_mse: class_mse[0],
            bc_mse: class_mse[1],
            data_mse: class_mse[2],
        };
        if !want_grad {
            return (parts, None);
        }
        let mut wrt = Vec::new();
        for p in &params {
            wrt.extend(p.all());
        }
        wrt.extend(extra_nodes.iter().copied());
        let grads = tape.grad(loss, &wrt);
        (parts, Some(flatten_grads(&tape, &grads)))
    }

    /// Substitutes the exact solution into every residual and returns the
    /// largest absolute value (the transcription gate). Inverse problems
    /// use the declared ground-truth parameter values.
    pub fn exact_residual_max(&self) -> Result<f64, ProblemError> {
        let mut worst: f64 = 0.0;
        for eq in &self.equations {
            let vals = exact_equation_residual(eq, &self.problem, &self.extras, &self.colloc)?;
            let start = if self.mask.is_some() { 1 } else { 0 };
            for v in &vals[start..] {
                worst = worst.max(v.abs());
            }
        }
        Ok(worst)
    }

    /// Dense evaluation of one trained unknown on arbitrary points.
    pub fn predict(&self, net: usize, pts: &Array2<f64>) -> Vec<f64> {
        self.nets[net]
            .forward_values(pts)
            .expect("prediction")
            .column(0)
            .to_vec()
    }

    pub fn test_points(&self) -> &Array2<f64> {
        &self.test_points
    }
}

fn grid_3d(x: &[f64], y: &[f64], z: &[f64]) -> Array2<f64> {
    let mut pts = Array2::zeros((x.len() * y.len() * z.len(), 3));
    let mut row = 0;
    for &xi in x {
        for &yj in y {
            for &zk in z {
                pts[(row, 0)] = xi;
                pts[(row, 1)] = yj;
                pts[(row, 2)] = zk;
                row += 1;
            }
        }
    }
    pts
}

/// Emits one equation's residual at every collocation point.
#[allow(clippy::too_many_arguments)]
fn emit_equation(
    tape: &mut Tape,
    eq: &CompiledEq,
    nets: &[Mlp],
    params: &[MlpParams],
    x: DiffTensor,
    u: &[DiffTensor],
    dcache: &mut HashMap<(usize, usize, usize), DiffTensor>,
    extras: &[DiffTensor],
    mask: &Option<Array2<f64>>,
    n_colloc: usize,
) -> DiffTensor {
    let mut r = match &eq.lhs {
        CompiledLhs::Zero => tape.constant(Array2::zeros((n_colloc, 1))),
        CompiledLhs::U { kappa } => tape.scale(u[eq.net], *kappa),
        CompiledLhs::Deriv { kappa, order, axis } => {
            let d = cached_deriv(tape, dcache, x, u, eq.net, *order, *axis);
            tape.scale(d, *kappa)
        }
        CompiledLhs::Caputo { kappa, m } => {
            let mc = tape.constant(m.clone());
            let mm = tape.matmul(mc, u[eq.net]);
            tape.scale(mm, *kappa)
        }
    };
    for term in &eq.terms {
        let v = emit_term(tape, term, nets, params, x, u, dcache, extras, n_colloc);
        r = tape.sub(r, v);
    }
    let src = tape.constant(eq.source.clone());
    r = tape.sub(r, src);
    if let Some(m) = mask {
        let mc = tape.constant(m.clone());
        r = tape.mul(r, mc);
    }
    r
}

fn cached_deriv(
    tape: &mut Tape,
    cache: &mut HashMap<(usize, usize, usize), DiffTensor>,
    x: DiffTensor,
    u: &[DiffTensor],
    net: usize,
    order: usize,
    axis: usize,
) -> DiffTensor {
    if let Some(&d) = cache.get(&(net, order, axis)) {
        return d;
    }
    let d = input_derivative_on(tape, u[net], x, order, axis);
    cache.insert((net, order, axis), d);
    d
}

fn apply_zeta(tape: &mut Tape, zeta: Zeta, u: DiffTensor, du: Option<DiffTensor>) -> DiffTensor {
    match zeta {
        Zeta::Id => u,
        Zeta::Square => tape.powi(u, 2),
        Zeta::Cube => tape.powi(u, 3),
        Zeta::Exp => tape.exp(u),
        Zeta::Deriv => du.expect("zeta needs a derivative"),
        Zeta::DerivSquare => {
            let d = du.expect("zeta needs a derivative");
            tape.powi(d, 2)
        }
        Zeta::SquarePlusDeriv => {
            let d = du.expect("zeta needs a derivative");
            let u2 = tape.powi(u, 2);
            tape.add(u2, d)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_term(
    tape: &mut Tape,
    term: &CompiledTerm,
    nets: &[Mlp],
    params: &[MlpParams],
    x: DiffTensor,
    u: &[DiffTensor],
    dcache: &mut HashMap<(usize, usize, usize), DiffTensor>,
    extras: &[DiffTensor],
    n_colloc: usize,
) -> DiffTensor {
    let base = match &term.form {
        CompiledForm::Direct | CompiledForm::Dense { .. } => {
            let du = term
                .zeta
                .needs_deriv()
                .then(|| cached_deriv(tape, dcache, x, u, term.net, 1, 0));
            let z = apply_zeta(tape, term.zeta, u[term.net], du);
            match &term.form {
                CompiledForm::Direct => z,
                CompiledForm::Dense { m } => {
                    let mc = tape.constant(m.clone());
                    tape.matmul(mc, z)
                }
                _ => unreachable!(),
            }
        }
        CompiledForm::RowSum { inner, rows, cols, dup, weight } => {
            let xi = if term.zeta.needs_deriv() {
                tape.leaf(inner.clone())
            } else {
                tape.constant(inner.clone())
            };
            let ui = nets[term.net].forward_on(tape, &params[term.net], xi);
            let du = term
                .zeta
                .needs_deriv()
                .then(|| input_derivative_on(tape, ui, xi, 1, 0));
            let z = apply_zeta(tape, term.zeta, ui, du);
            let zr = tape.reshape(z, *rows, *cols);
            let zd = match dup {
                Some(d) => {
                    let dc = tape.constant(d.clone());
                    tape.matmul(dc, zr)
                }
                None => zr,
            };
            let wc = tape.constant(weight.clone());
            let p = tape.mul(zd, wc);
            let ones = tape.constant(Array2::ones((p.cols(), 1)));
            tape.matmul(p, ones)
        }
    };
    let scaled = match term.coeff {
        CoeffSpec::Const(c) if c == 1.0 => base,
        CoeffSpec::Const(c) => tape.scale(base, c),
        CoeffSpec::ExtraScalar(i) => {
            let b = tape.broadcast_full(extras[i], n_colloc, 1);
            tape.mul(b, base)
        }
        CoeffSpec::ExtraVector(i) => tape.mul(extras[i], base),
    };
    if term.outer_mul_u {
        tape.mul(scaled, u[term.net])
    } else {
        scaled
    }
}

fn compile_term(
    spec: &TermSpec,
    problem: &IeProblem,
    config: &TrainConfig,
    colloc: &Array2<f64>,
    axis_nodes: &[Vec<f64>],
    semi_rule: &Option<QuadratureRule>,
) -> Result<CompiledTerm, ProblemError> {
    let n = config.n_train;
    let family = config.quad_family;
    let form = match spec.op {
        OpSpec::Pointwise => CompiledForm::Direct,
        OpSpec::Fredholm1d { kernel } => {
            assert_eq!(problem.grid, GridKind::Mapped, "Fredholm terms need an unprefixed grid");
            let rule = plain_rule(family, n)?;
            let mapped = map_rule(&rule, problem.domains[0].0, problem.domains[0].1)?;
            let x: Vec<f64> = colloc.column(0).to_vec();
            let asm = FredholmAssembly::new(kernel, &x, &mapped)?;
            CompiledForm::Dense { m: asm.operator_matrix() }
        }
        OpSpec::Volterra1d { kernel, weight_free_kernel, jacobi_inner } => {
            let a = problem.domains[0].0;
            let use_jacobi = config.abel_jacobi && jacobi_inner.is_some();
            let reference = if use_jacobi {
                let (ja, jb) = jacobi_inner.unwrap();
                QuadratureRule::new(Family::Jacobi { alpha: ja, beta: jb }, n)?
            } else {
                plain_rule(family, n)?
            };
            let k = if use_jacobi { weight_free_kernel.unwrap() } else { kernel };
            let x: Vec<f64> = colloc.column(0).to_vec();
            let asm = VolterraAssembly::new(k, move |_| a, |x| x, &x, &reference)?;
            CompiledForm::RowSum {
                rows: x.len(),
                cols: reference.n,
                inner: asm.inner_points_flat(),
                dup: None,
                weight: asm.operator_matrix(),
            }
        }
        OpSpec::SemiFredholm { kernel } => {
            let rule = semi_rule.as_ref().expect("semi-infinite grid");
            let asm = FredholmAssembly::semi_infinite(kernel, rule, LaguerreKernelForm::Physical)?;
            CompiledForm::Dense { m: asm.operator_matrix() }
        }
        OpSpec::PideFredholm { kernel } => {
            // s shares the t-axis rule, so ζ(u) is sampled at collocation.
            let rule = plain_rule(family, n)?;
            let (c, d) = problem.domains[1];
            let mapped = map_rule(&rule, c, d)?;
            let (xs, ts) = (&axis_nodes[0], &axis_nodes[1]);
            let nc = xs.len() * ts.len();
            let mut m = Array2::zeros((nc, nc));
            for (i, &xi) in xs.iter().enumerate() {
                for (j, &tj) in ts.iter().enumerate() {
                    let row = i * ts.len() + j;
                    for (l, &sl) in mapped.mapped_nodes.iter().enumerate() {
                        m[(row, i * ts.len() + l)] =
                            mapped.scale * kernel(xi, tj, sl) * rule.weights[l];
                    }
                }
            }
            CompiledForm::Dense { m }
        }
        OpSpec::PideVolterraX { kernel } => {
            let rule = plain_rule(family, n)?;
            let a = problem.domains[0].0;
            let (xs, ts) = (&axis_nodes[0], &axis_nodes[1]);
            let (nx, nt) = (xs.len(), ts.len());
            let nc = nx * nt;
            // Inner s-nodes per x_i on [a, x_i].
            let mut inner = Array2::zeros((nx * rule.n, 2));
            let mut weight = Array2::zeros((nc, rule.n));
            let mut dup = Array2::zeros((nc, nx));
            for (i, &xi) in xs.iter().enumerate() {
                let half = (xi - a) / 2.0;
                let mid = (xi + a) / 2.0;
                for (l, &rl) in rule.nodes.iter().enumerate() {
                    inner[(i * rule.n + l, 0)] = xi;
                    inner[(i * rule.n + l, 1)] = half * rl + mid;
                }
                for (j, &tj) in ts.iter().enumerate() {
                    let row = i * nt + j;
                    dup[(row, i)] = 1.0;
                    for (l, &rl) in rule.nodes.iter().enumerate() {
                        let s = half * rl + mid;
                        weight[(row, l)] = half * kernel(xi, tj, s) * rule.weights[l];
                    }
                }
            }
            CompiledForm::RowSum { inner, rows: nx, cols: rule.n, dup: Some(dup), weight }
        }
        OpSpec::Fredholm2d { kernel } => {
            let rule = plain_rule(family, n)?;
            let mx = map_rule(&rule, problem.domains[0].0, problem.domains[0].1)?;
            let my = map_rule(&rule, problem.domains[1].0, problem.domains[1].1)?;
            let asm = Fredholm2dAssembly::new(kernel, &mx, &my)?;
            CompiledForm::Dense { m: asm.operator_matrix() }
        }
        OpSpec::Volterra2d { kernel } => {
            let rule = plain_rule(family, n)?;
            let ax = problem.domains[0].0;
            let ay = problem.domains[1].0;
            let asm = Volterra2dAssembly::new(
                kernel,
                move |_| ax,
                |x| x,
                move |_| ay,
                |y| y,
                &axis_nodes[0],
                &axis_nodes[1],
                &rule,
                &rule,
            )?;
            let nc = axis_nodes[0].len() * axis_nodes[1].len();
            CompiledForm::RowSum {
                inner: asm.inner_points_flat(),
                rows: nc,
                cols: nc,
                dup: None,
                weight: asm.operator_matrix(),
            }
        }
        OpSpec::Fredholm3d { kernel } => {
            let rule = plain_rule(family, n)?;
            let mx = map_rule(&rule, problem.domains[0].0, problem.domains[0].1)?;
            let my = map_rule(&rule, problem.domains[1].0, problem.domains[1].1)?;
            let mz = map_rule(&rule, problem.domains[2].0, problem.domains[2].1)?;
            let asm = Fredholm3dAssembly::new(kernel, &mx, &my, &mz)?;
            CompiledForm::Dense { m: asm.operator_matrix() }
        }
    };
    Ok(CompiledTerm {
        net: spec.net,
        coeff: spec.coeff,
        zeta: spec.zeta,
        outer_mul_u: spec.outer_mul_u,
        form,
    })
}

fn compile_condition(
    spec: &ConditionSpec,
    problem: &IeProblem,
    axis_nodes: &[Vec<f64>],
) -> Result<CompiledCond, ProblemError> {
    Ok(match spec {
        ConditionSpec::FromExact1d { net, class, points } => {
            let exact = problem.exact[*net].as_ref().expect("conditions need an exact solution");
            let pts = column(points.as_slice());
            let values = column(&points.iter().map(|&p| exact.eval(&[p])).collect::<Vec<_>>());
            CompiledCond { net: *net, class: *class, points: pts, values }
        }
        ConditionSpec::Explicit { net, class, points } => {
            let d = points[0].0.len();
            let mut pts = Array2::zeros((points.len(), d));
            let mut values = Array2::zeros((points.len(), 1));
            for (r, (p, v)) in points.iter().enumerate() {
                for (c, &x) in p.iter().enumerate() {
                    pts[(r, c)] = x;
                }
                values[(r, 0)] = *v;
            }
            CompiledCond { net: *net, class: *class, points: pts, values }
        }
        ConditionSpec::PideInitial { net } => {
            let exact = problem.exact[*net].as_ref().expect("PIDE initial needs exact");
            let t0 = problem.domains[1].0;
            let xs = &axis_nodes[0];
            let mut pts = Array2::zeros((xs.len(), 2));
            let mut values = Array2::zeros((xs.len(), 1));
            for (r, &xv) in xs.iter().enumerate() {
                pts[(r, 0)] = xv;
                pts[(r, 1)] = t0;
                values[(r, 0)] = exact.eval(&[xv, t0]);
            }
            CompiledCond { net: *net, class: CondClass::Initial, points: pts, values }
        }
        ConditionSpec::NoisyData { net, count, noise, seed } => {
            let exact = problem.exact[*net].as_ref().expect("data conditions need exact");
            let (a, b) = problem.domains[0];
            let mut rng = SeededRng::new(*seed);
            let mut pts = Array2::zeros((*count, 1));
            let mut values = Array2::zeros((*count, 1));
            for r in 0..*count {
                let x = rng.uniform_in(a, b);
                pts[(r, 0)] = x;
                values[(r, 0)] = exact.eval(&[x]) * (1.0 + noise * rng.normal());
            }
            CompiledCond { net: *net, class: CondClass::Data, points: pts, values }
        }
    })
}

fn build_test_grid(problem: &IeProblem) -> Array2<f64> {
    let domains = problem.mae_domains.as_ref().unwrap_or(&problem.domains);
    let linspace = |(a, b): (f64, f64), n: usize| -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    };
    match problem.dims {
        1 => column(&linspace(domains[0], 200)),
        2 => grid_2d(&linspace(domains[0], 15), &linspace(domains[1], 15)),
        3 => grid_3d(
            &linspace(domains[0], 6),
            &linspace(domains[1], 6),
            &linspace(domains[2], 6),
        ),
        _ => unreachable!(),
    }
}

/// ζ values of the exact solution at arbitrary points.
fn exact_zeta_values(
    zeta: Zeta,
    exact: &ExactFn,
    exact_deriv: Option<&ExactFn>,
    pts: &Array2<f64>,
) -> Vec<f64> {
    let deriv_at = |row: &[f64]| match exact_deriv {
        Some(d) => d.eval(row),
        None => exact.fd_axis(row, 1, 0),
    };
    (0..pts.nrows())
        .map(|r| {
            let row = pts.row(r);
            let row = row.as_slice().unwrap();
            match zeta {
                Zeta::Id => exact.eval(row),
                Zeta::Square => exact.eval(row).powi(2),
                Zeta::Cube => exact.eval(row).powi(3),
                Zeta::Exp => exact.eval(row).exp(),
                Zeta::Deriv => deriv_at(row),
                Zeta::DerivSquare => deriv_at(row).powi(2),
                Zeta::SquarePlusDeriv => exact.eval(row).powi(2) + deriv_at(row),
            }
        })
        .collect()
}

/// `κ·D(u) − Σ c_t I_t` of the exact solution (no source subtracted).
fn exact_equation_value(
    eq: &CompiledEq,
    problem: &IeProblem,
    extras: &[CompiledExtra],
    colloc: &Array2<f64>,
) -> Result<Vec<f64>, ProblemError> {
    let n = colloc.nrows();
    let exact = problem.exact[eq.net].as_ref().expect("gate needs an exact solution");
    let u_colloc = eval_rows(exact, colloc);

    let mut out = match &eq.lhs {
        CompiledLhs::Zero => vec![0.0; n],
        CompiledLhs::U { kappa } => u_colloc.iter().map(|v| kappa * v).collect(),
        CompiledLhs::Deriv { kappa, order, axis } => (0..n)
            .map(|r| {
                let row = colloc.row(r);
                let row = row.as_slice().unwrap();
                let d = match (problem.exact_deriv[eq.net].as_ref(), order) {
                    (Some(df), 1) => df.eval(row),
                    _ => exact.fd_axis(row, *order, *axis),
                };
                kappa * d
            })
            .collect(),
        CompiledLhs::Caputo { kappa, m } => {
            let mut v = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for k in 0..=i {
                    acc += m[(i, k)] * u_colloc[k];
                }
                v[i] = kappa * acc;
            }
            v
        }
    };

    for term in &eq.terms {
        let term_exact = problem.exact[term.net].as_ref().expect("gate needs exact");
        let term_deriv = problem.exact_deriv[term.net].as_ref();
        let vals: Vec<f64> = match &term.form {
            CompiledForm::Direct => exact_zeta_values(term.zeta, term_exact, term_deriv, colloc),
            CompiledForm::Dense { m } => {
                let z = exact_zeta_values(term.zeta, term_exact, term_deriv, colloc);
                (0..n)
                    .map(|i| (0..z.len()).map(|j| m[(i, j)] * z[j]).sum())
                    .collect()
            }
            CompiledForm::RowSum { inner, rows, cols, dup, weight } => {
                let z = exact_zeta_values(term.zeta, term_exact, term_deriv, inner);
                // reshape + optional dup + ⊙ weight + row-sum
                let mut combined = vec![0.0; weight.nrows()];
                for (row, slot) in combined.iter_mut().enumerate() {
                    let zrow = match dup {
                        Some(d) => (0..*rows).find(|&rr| d[(row, rr)] != 0.0).unwrap_or(0),
                        None => row,
                    };
                    let mut acc = 0.0;
                    for c in 0..*cols {
                        acc += weight[(row, c)] * z[zrow * cols + c];
                    }
                    *slot = acc;
                }
                combined
            }
        };
        let coeff: Vec<f64> = match term.coeff {
            CoeffSpec::Const(c) => vec![c; n],
            CoeffSpec::ExtraScalar(i) => {
                let t = extras[i].truth.as_ref().expect("gate needs parameter truth");
                vec![t[0]; n]
            }
            CoeffSpec::ExtraVector(i) => {
                extras[i].truth.as_ref().expect("gate needs parameter truth").clone()
            }
        };
        for i in 0..n {
            let mut v = coeff[i] * vals[i];
            if term.outer_mul_u {
                v *= u_colloc[i];
            }
            out[i] -= v;
        }
    }
    Ok(out)
}

fn exact_equation_residual(
    eq: &CompiledEq,
    problem: &IeProblem,
    extras: &[CompiledExtra],
    colloc: &Array2<f64>,
) -> Result<Vec<f64>, ProblemError> {
    let mut vals = exact_equation_value(eq, problem, extras, colloc)?;
    for (i, v) in vals.iter_mut().enumerate() {
        *v -= eq.source[(i, 0)];
    }
    Ok(vals)
}

/// Trains an IE-style suite and assembles its report.
pub fn train_ie(id: &str, problem: &IeProblem, config: &TrainConfig) -> Result<RunReport, ProblemError> {
    let start = std::time::Instant::now();
    let mut compiled = CompiledProblem::new(id, problem, config)?;
    let theta0 = compiled.theta();
    let mut closure = |theta: &[f64]| compiled.loss_and_grad(theta);
    let outcome = optimize::train(&mut closure, theta0, &config.schedule)?;
    compiled.scatter(&outcome.params);

    let mut mae_per_function = Vec::new();
    for (i, exact) in problem.exact.iter().enumerate() {
        if let Some(ex) = exact {
            let truth = eval_rows(ex, compiled.test_points());
            let pred = compiled.predict(i, compiled.test_points());
            mae_per_function.push(super::mae(&truth, &pred)?);
        }
    }
    let mae = if mae_per_function.len() == problem.n_nets && !mae_per_function.is_empty() {
        Some(mae_per_function.iter().cloned().fold(f64::MIN, f64::max))
    } else {
        None
    };

    let mut recovered = Vec::new();
    for e in &compiled.extras {
        if e.values.len() == 1 {
            recovered.push((e.name.clone(), e.values[0]));
        } else if let Some(truth) = &e.truth {
            let err = super::mae(truth, &e.values)?;
            recovered.push((format!("{}_mae", e.name), err));
        }
    }

    let mut extra = Vec::new();
    if let Some(pop) = &problem.population {
        let (a, b) = problem.domains[0];
        let pts = column(&(0..2000).map(|i| a + (b - a) * i as f64 / 1999.0).collect::<Vec<_>>());
        let vals = compiled.predict(0, &pts);
        let (arg, peak) = vals
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        extra.push(("u_max".to_string(), peak));
        extra.push(("x_max".to_string(), pts[(arg, 0)]));
        extra.push(("x_max_ref".to_string(), pop.x_max_ref));
        if let Some(umr) = pop.u_max_ref {
            extra.push(("u_max_ref".to_string(), umr));
        }
    }

    Ok(RunReport {
        id: id.to_string(),
        seed: config.seed,
        n_train: config.n_train,
        widths: config.widths_for(problem.dims),
        schedule: config.schedule.clone(),
        final_loss: outcome.final_loss,
        loss_trajectory: outcome.trajectory,
        mae,
        mae_per_function,
        j_value: None,
        recovered,
        extra,
        wall_time_ms: start.elapsed().as_millis(),
    })
}
