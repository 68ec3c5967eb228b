//! Optimal-control problems: minimize a cost functional subject to
//! differential, integro-differential, fractional, delay, or partial
//! constraints on the state(s).
//!
//! One network approximates each state and one the control. The cost
//! functional is discretized by the same Gaussian rule as the collocation
//! grid (nested over both axes for two-dimensional problems), and the loss
//! reads `J + γ·(mean squared constraint residual + Σ squared condition
//! violations)`.

use std::collections::HashMap;

use ndarray::Array2;

use crate::integral_ops::{grid_2d, VolterraAssembly};
use crate::fractional::CaputoMatrix;
use crate::network::{flatten_grads, input_derivative_on, Activation, Mlp, MlpParams};
use crate::optimize;
use crate::quadrature::{map_rule, Family, QuadratureRule};
use crate::tape::{DiffTensor, Tape};

use super::{mae, ExactFn, Fn1, Fn2, ProblemError, RunReport, TrainConfig};

/// Handles into the partially built tape, passed to the cost/constraint
/// builders of a spec.
pub struct OcHandles {
    /// Collocation points as a constant (or leaf) node, `N x d`.
    pub t: DiffTensor,
    /// Plain copy of the collocation points for building constants.
    pub points: Array2<f64>,
    pub states: Vec<DiffTensor>,
    pub control: DiffTensor,
    /// Requested state derivatives keyed by `(state, order, axis)`.
    pub state_deriv: HashMap<(usize, usize, usize), DiffTensor>,
    /// L1 Caputo derivative per state (when the spec declares an order).
    pub state_caputo: Vec<Option<DiffTensor>>,
    /// Delayed state lookup per state (history value before the domain).
    pub state_delayed: Vec<Option<DiffTensor>>,
    /// `∫_a^t K(t,s) χ_0(s) ds` when the spec declares a Volterra kernel.
    pub volterra_state0: Option<DiffTensor>,
}

impl OcHandles {
    /// Lifts a pointwise function of the collocation row into a constant.
    pub fn const_of(&self, tape: &mut Tape, f: impl Fn(&[f64]) -> f64) -> DiffTensor {
        let vals: Vec<f64> = (0..self.points.nrows())
            .map(|r| f(self.points.row(r).as_slice().unwrap()))
            .collect();
        tape.constant(Array2::from_shape_vec((vals.len(), 1), vals).unwrap())
    }

    pub fn deriv(&self, state: usize, order: usize, axis: usize) -> DiffTensor {
        self.state_deriv[&(state, order, axis)]
    }
}

pub type OcBuilder = fn(&mut Tape, &OcHandles) -> DiffTensor;

/// Pointwise or curve conditions on states.
#[derive(Clone)]
pub enum OcCond {
    Point { state: usize, point: Vec<f64>, value: f64 },
    /// `χ(.., fixed, ..) = value(free coordinate)` sampled on the free
    /// axis' collocation nodes (two-dimensional problems).
    Curve2d { state: usize, fixed_axis: usize, fixed_value: f64, value: Fn1 },
}

#[derive(Clone, Default)]
pub struct OcFeatures {
    /// Fractional constraint order; prefixes the grid with the left
    /// terminal and masks the first residual row.
    pub caputo_alpha: Option<f64>,
    /// `(delay, history)`: state values before the domain start come from
    /// the history function.
    pub delay: Option<(f64, Fn1)>,
    /// Kernel of `∫_a^t K(t,s) χ_0(s) ds` appearing in a constraint.
    pub volterra_kernel: Option<Fn2>,
    /// Requested `(state, order, axis)` input derivatives.
    pub state_derivs: Vec<(usize, usize, usize)>,
}

#[derive(Clone)]
pub struct OcProblem {
    pub dims: usize,
    pub domains: Vec<(f64, f64)>,
    pub n_states: usize,
    pub gamma: f64,
    pub cost: OcBuilder,
    pub constraints: Vec<OcBuilder>,
    pub conditions: Vec<OcCond>,
    pub exact_states: Vec<Option<ExactFn>>,
    pub exact_control: Option<ExactFn>,
    /// Reference optimal cost, when known.
    pub j_reference: Option<f64>,
    pub features: OcFeatures,
}

pub struct OcCompiled {
    pub problem: OcProblem,
    /// State nets followed by the control net.
    pub nets: Vec<Mlp>,
    colloc: Array2<f64>,
    axis_nodes: Vec<Vec<f64>>,
    /// Cost quadrature weights per collocation row (zero on masked rows).
    jweights: Array2<f64>,
    mask_first_row: bool,
    caputo: Option<Array2<f64>>,
    volterra: Option<(Array2<f64>, usize, usize, Array2<f64>)>, // inner, rows, cols, weight
    gamma: f64,
}

/// Values of one evaluation of the optimal-control loss.
#[derive(Debug, Clone, Copy)]
pub struct OcEval {
    pub loss: f64,
    pub j: f64,
    pub residual_mse: f64,
    pub condition_sq: f64,
}

impl OcCompiled {
    pub fn new(problem: &OcProblem, config: &TrainConfig) -> Result<Self, ProblemError> {
        let n = config.n_train;
        let rule = QuadratureRule::new(Family::Legendre, n)?;
        let (colloc, axis_nodes, jweights) = match problem.dims {
            1 => {
                let mapped = map_rule(&rule, problem.domains[0].0, problem.domains[0].1)?;
                if problem.features.caputo_alpha.is_some() {
                    let mut pts = vec![problem.domains[0].0];
                    pts.extend(&mapped.mapped_nodes);
                    let mut w = vec![0.0];
                    w.extend(mapped.base.weights.iter().map(|v| v * mapped.scale));
                    (col(&pts), vec![pts.clone()], col(&w))
                } else {
                    let pts = mapped.mapped_nodes.clone();
                    let w: Vec<f64> =
                        mapped.base.weights.iter().map(|v| v * mapped.scale).collect();
                    (col(&pts), vec![pts], col(&w))
                }
            }
            2 => {
                let mx = map_rule(&rule, problem.domains[0].0, problem.domains[0].1)?;
                let my = map_rule(&rule, problem.domains[1].0, problem.domains[1].1)?;
                let pts = grid_2d(&mx.mapped_nodes, &my.mapped_nodes);
                let mut w = Vec::with_capacity(n * n);
                for wi in &mx.base.weights {
                    for wj in &my.base.weights {
                        w.push(mx.scale * my.scale * wi * wj);
                    }
                }
                (pts, vec![mx.mapped_nodes.clone(), my.mapped_nodes.clone()], col(&w))
            }
            d => unreachable!("unsupported OC dimension {d}"),
        };

        let caputo = match problem.features.caputo_alpha {
            Some(alpha) => {
                let grid: Vec<f64> = colloc.column(0).to_vec();
                Some(CaputoMatrix::new(&grid, alpha)?.matrix)
            }
            None => None,
        };

        let volterra = match problem.features.volterra_kernel {
            Some(kernel) => {
                let a = problem.domains[0].0;
                let x: Vec<f64> = colloc.column(0).to_vec();
                let asm = VolterraAssembly::new(kernel, move |_| a, |x| x, &x, &rule)?;
                Some((asm.inner_points_flat(), x.len(), rule.n, asm.operator_matrix()))
            }
            None => None,
        };

        let widths = config.widths_for(problem.dims);
        let nets: Vec<Mlp> = (0..=problem.n_states)
            .map(|i| Mlp::new(&widths, Activation::Tanh, config.seed + i as u64))
            .collect::<Result<_, _>>()?;

        Ok(OcCompiled {
            problem: problem.clone(),
            nets,
            colloc,
            axis_nodes,
            jweights,
            mask_first_row: problem.features.caputo_alpha.is_some(),
            caputo,
            volterra,
            gamma: problem.gamma,
        })
    }

    pub fn param_len(&self) -> usize {
        self.nets.iter().map(|n| n.param_count()).sum()
    }

    pub fn theta(&self) -> Vec<f64> {
        self.nets.iter().flat_map(|n| n.params_flat()).collect()
    }

    pub fn scatter(&mut self, theta: &[f64]) {
        let mut off = 0;
        for n in &mut self.nets {
            let c = n.param_count();
            n.set_params_flat(&theta[off..off + c]).expect("param scatter");
            off += c;
        }
    }

    pub fn loss_and_grad(&mut self, theta: &[f64]) -> (f64, Vec<f64>) {
        let (eval, grad) = self.emit(theta, true);
        (eval.loss, grad.unwrap())
    }

    pub fn evaluate(&mut self, theta: &[f64]) -> OcEval {
        self.emit(theta, false).0
    }

    fn emit(&mut self, theta: &[f64], want_grad: bool) -> (OcEval, Option<Vec<f64>>) {
        self.scatter(theta);
        let n_states = self.problem.n_states;
        let n_rows = self.colloc.nrows();
        let mut tape = Tape::new();
        let params: Vec<MlpParams> =
            self.nets.iter().map(|n| n.emit_params(&mut tape)).collect();
        let need_grad_x = !self.problem.features.state_derivs.is_empty();
        let x = if need_grad_x {
            tape.leaf(self.colloc.clone())
        } else {
            tape.constant(self.colloc.clone())
        };
        let outputs: Vec<DiffTensor> = self
            .nets
            .iter()
            .zip(&params)
            .map(|(net, p)| net.forward_on(&mut tape, p, x))
            .collect();
        let states = outputs[..n_states].to_vec();
        let control = outputs[n_states];

        let mut state_deriv = HashMap::new();
        for &(s, order, axis) in &self.problem.features.state_derivs {
            let d = input_derivative_on(&mut tape, states[s], x, order, axis);
            state_deriv.insert((s, order, axis), d);
        }

        let state_caputo: Vec<Option<DiffTensor>> = (0..n_states)
            .map(|s| {
                self.caputo.as_ref().map(|m| {
                    let mc = tape.constant(m.clone());
                    tape.matmul(mc, states[s])
                })
            })
            .collect();

        let state_delayed: Vec<Option<DiffTensor>> = (0..n_states)
            .map(|s| {
                self.problem.features.delay.map(|(delay, history)| {
                    let a = self.problem.domains[0].0;
                    let mut shifted = Array2::zeros((n_rows, 1));
                    let mut mask = Array2::zeros((n_rows, 1));
                    let mut hist = Array2::zeros((n_rows, 1));
                    for r in 0..n_rows {
                        let td = self.colloc[(r, 0)] - delay;
                        if td >= a {
                            shifted[(r, 0)] = td;
                            mask[(r, 0)] = 1.0;
                        } else {
                            // clamp inside the domain; masked out below
                            shifted[(r, 0)] = a;
                            hist[(r, 0)] = history(td);
                        }
                    }
                    let sc = tape.constant(shifted);
                    let sv = self.nets[s].forward_on(&mut tape, &params[s], sc);
                    let mc = tape.constant(mask);
                    let hc = tape.constant(hist);
                    let masked = tape.mul(sv, mc);
                    tape.add(masked, hc)
                })
            })
            .collect();

        let volterra_state0 = self.volterra.as_ref().map(|(inner, rows, cols, weight)| {
            let xi = tape.constant(inner.clone());
            let ui = self.nets[0].forward_on(&mut tape, &params[0], xi);
            let zr = tape.reshape(ui, *rows, *cols);
            let wc = tape.constant(weight.clone());
            let p = tape.mul(zr, wc);
            let ones = tape.constant(Array2::ones((*cols, 1)));
            tape.matmul(p, ones)
        });

        let handles = OcHandles {
            t: x,
            points: self.colloc.clone(),
            states,
            control,
            state_deriv,
            state_caputo,
            state_delayed,
            volterra_state0,
        };

        // Cost functional J by quadrature of the running cost.
        let l = (self.problem.cost)(&mut tape, &handles);
        let wc = tape.constant(self.jweights.clone());
        let lw = tape.mul(l, wc);
        let j = tape.sum_all(lw);

        // Constraint residuals.
        let mask = self.mask_first_row.then(|| {
            let mut m = Array2::ones((n_rows, 1));
            m[(0, 0)] = 0.0;
            tape.constant(m)
        });
        let active_per_eq = n_rows - if self.mask_first_row { 1 } else { 0 };
        let mut res_sum: Option<DiffTensor> = None;
        for c in &self.problem.constraints {
            let mut r = c(&mut tape, &handles);
            if let Some(mc) = mask {
                r = tape.mul(r, mc);
            }
            let sq = tape.mul(r, r);
            let su = tape.sum_all(sq);
            res_sum = Some(match res_sum {
                None => su,
                Some(p) => tape.add(p, su),
            });
        }
        let res_mse = {
            let s = res_sum.expect("at least one constraint");
            tape.scale(s, 1.0 / (active_per_eq * self.problem.constraints.len()) as f64)
        };

        // Condition violations: squared, summed over condition sets (curve
        // conditions contribute the mean over their sampled points).
        let mut cond_total: Option<DiffTensor> = None;
        for c in &self.problem.conditions {
            let contrib = match c {
                OcCond::Point { state, point, value } => {
                    let pt = tape.constant(
                        Array2::from_shape_vec((1, point.len()), point.clone()).unwrap(),
                    );
                    let v = self.nets[*state].forward_on(&mut tape, &params[*state], pt);
                    let tv = tape.constant_scalar(*value);
                    let d = tape.sub(v, tv);
                    let sq = tape.mul(d, d);
                    tape.sum_all(sq)
                }
                OcCond::Curve2d { state, fixed_axis, fixed_value, value } => {
                    let free_axis = 1 - *fixed_axis;
                    let nodes = &self.axis_nodes[free_axis];
                    let mut pts = Array2::zeros((nodes.len(), 2));
                    let mut vals = Array2::zeros((nodes.len(), 1));
                    for (r, &c0) in nodes.iter().enumerate() {
                        pts[(r, free_axis)] = c0;
                        pts[(r, *fixed_axis)] = *fixed_value;
                        vals[(r, 0)] = value(c0);
                    }
                    let pc = tape.constant(pts);
                    let v = self.nets[*state].forward_on(&mut tape, &params[*state], pc);
                    let tv = tape.constant(vals);
                    let d = tape.sub(v, tv);
                    let sq = tape.mul(d, d);
                    let su = tape.sum_all(sq);
                    tape.scale(su, 1.0 / nodes.len() as f64)
                }
            };
            cond_total = Some(match cond_total {
                None => contrib,
                Some(p) => tape.add(p, contrib),
            });
        }

        let mut bracket = res_mse;
        if let Some(c) = cond_total {
            bracket = tape.add(bracket, c);
        }
        let penalty = tape.scale(bracket, self.gamma);
        let loss = tape.add(j, penalty);

        let eval = OcEval {
            loss: tape.scalar_value(loss),
            j: tape.scalar_value(j),
            residual_mse: tape.scalar_value(res_mse),
            condition_sq: cond_total.map(|c| tape.scalar_value(c)).unwrap_or(0.0),
        };
        if !want_grad {
            return (eval, None);
        }
        let mut wrt = Vec::new();
        for p in &params {
            wrt.extend(p.all());
        }
        let grads = tape.grad(loss, &wrt);
        (eval, Some(flatten_grads(&tape, &grads)))
    }

    /// Dense evaluation of a trained net (`n_states` = control).
    pub fn predict(&self, net: usize, pts: &Array2<f64>) -> Vec<f64> {
        self.nets[net].forward_values(pts).expect("prediction").column(0).to_vec()
    }

    fn test_points(&self) -> Array2<f64> {
        let lin = |(a, b): (f64, f64), n: usize| -> Vec<f64> {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        match self.problem.dims {
            1 => col(&lin(self.problem.domains[0], 200)),
            _ => grid_2d(&lin(self.problem.domains[0], 15), &lin(self.problem.domains[1], 15)),
        }
    }
}

fn col(values: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((values.len(), 1), values.to_vec()).expect("column")
}

/// Trains an optimal-control suite and assembles its report.
pub fn train_oc(id: &str, problem: &OcProblem, config: &TrainConfig) -> Result<RunReport, ProblemError> {
    let start = std::time::Instant::now();
    let mut compiled = OcCompiled::new(problem, config)?;
    let theta0 = compiled.theta();
    let mut closure = |theta: &[f64]| compiled.loss_and_grad(theta);
    let outcome = optimize::train(&mut closure, theta0, &config.schedule)?;
    let eval = compiled.evaluate(&outcome.params);

    let test = compiled.test_points();
    let mut mae_per_function = Vec::new();
    let mut all_exact = true;
    for (i, ex) in problem.exact_states.iter().enumerate() {
        match ex {
            Some(f) => {
                let truth: Vec<f64> =
                    (0..test.nrows()).map(|r| f.eval(test.row(r).as_slice().unwrap())).collect();
                let pred = compiled.predict(i, &test);
                mae_per_function.push(mae(&truth, &pred)?);
            }
            None => all_exact = false,
        }
    }
    if let Some(f) = &problem.exact_control {
        let truth: Vec<f64> =
            (0..test.nrows()).map(|r| f.eval(test.row(r).as_slice().unwrap())).collect();
        let pred = compiled.predict(problem.n_states, &test);
        mae_per_function.push(mae(&truth, &pred)?);
    } else {
        all_exact = false;
    }
    let mae_summary = (all_exact && !mae_per_function.is_empty())
        .then(|| mae_per_function.iter().cloned().fold(f64::MIN, f64::max));

    let mut extra = vec![
        ("residual_mse".to_string(), eval.residual_mse),
        ("condition_sq".to_string(), eval.condition_sq),
    ];
    if let Some(jr) = problem.j_reference {
        extra.push(("j_reference".to_string(), jr));
    }

    Ok(RunReport {
        id: id.to_string(),
        seed: config.seed,
        n_train: config.n_train,
        widths: config.widths_for(problem.dims),
        schedule: config.schedule.clone(),
        final_loss: outcome.final_loss,
        loss_trajectory: outcome.trajectory,
        mae: mae_summary,
        mae_per_function,
        j_value: Some(eval.j),
        recovered: Vec::new(),
        extra,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Evaluates J and the constraint bracket with the exact solution
/// substituted for every net (test support for transcription checks).
pub fn exact_substitution_eval(
    problem: &OcProblem,
    config: &TrainConfig,
    exact_deriv_states: &[Option<ExactFn>],
) -> Result<OcEval, ProblemError> {
    let compiled = OcCompiled::new(problem, config)?;
    // Evaluate the loss pieces on a tape where every network output node is
    // replaced by constants sampled from the exact solution.
    let n_rows = compiled.colloc.nrows();
    let n_states = problem.n_states;
    let mut tape = Tape::new();
    let x = tape.constant(compiled.colloc.clone());
    let states: Vec<DiffTensor> = (0..n_states)
        .map(|s| {
            let f = problem.exact_states[s].as_ref().expect("exact state required");
            let vals: Vec<f64> = (0..n_rows)
                .map(|r| f.eval(compiled.colloc.row(r).as_slice().unwrap()))
                .collect();
            tape.constant(col(&vals))
        })
        .collect();
    let control = {
        let f = problem.exact_control.as_ref().expect("exact control required");
        let vals: Vec<f64> = (0..n_rows)
            .map(|r| f.eval(compiled.colloc.row(r).as_slice().unwrap()))
            .collect();
        tape.constant(col(&vals))
    };
    let mut state_deriv = HashMap::new();
    for &(s, order, axis) in &problem.features.state_derivs {
        let f = problem.exact_states[s].as_ref().unwrap();
        let vals: Vec<f64> = (0..n_rows)
            .map(|r| {
                let row = compiled.colloc.row(r);
                let row = row.as_slice().unwrap();
                match (exact_deriv_states.get(s).and_then(|d| d.as_ref()), order) {
                    (Some(df), 1) => df.eval(row),
                    _ => f.fd_axis(row, order, axis),
                }
            })
            .collect();
        state_deriv.insert((s, order, axis), tape.constant(col(&vals)));
    }
    let state_caputo: Vec<Option<DiffTensor>> = (0..n_states)
        .map(|s| {
            compiled.caputo.as_ref().map(|m| {
                let mc = tape.constant(m.clone());
                tape.matmul(mc, states[s])
            })
        })
        .collect();
    let state_delayed: Vec<Option<DiffTensor>> = (0..n_states)
        .map(|s| {
            problem.features.delay.map(|(delay, history)| {
                let f = problem.exact_states[s].as_ref().unwrap();
                let a = problem.domains[0].0;
                let vals: Vec<f64> = (0..n_rows)
                    .map(|r| {
                        let td = compiled.colloc[(r, 0)] - delay;
                        if td >= a {
                            f.eval(&[td])
                        } else {
                            history(td)
                        }
                    })
                    .collect();
                tape.constant(col(&vals))
            })
        })
        .collect();
    let volterra_state0 = compiled.volterra.as_ref().map(|(inner, rows, cols, weight)| {
        let f = problem.exact_states[0].as_ref().unwrap();
        let vals: Vec<f64> = (0..inner.nrows()).map(|r| f.eval(&[inner[(r, 0)]])).collect();
        let ui = tape.constant(col(&vals));
        let zr = tape.reshape(ui, *rows, *cols);
        let wc = tape.constant(weight.clone());
        let p = tape.mul(zr, wc);
        let ones = tape.constant(Array2::ones((*cols, 1)));
        tape.matmul(p, ones)
    });

    let handles = OcHandles {
        t: x,
        points: compiled.colloc.clone(),
        states,
        control,
        state_deriv,
        state_caputo,
        state_delayed,
        volterra_state0,
    };
    let l = (problem.cost)(&mut tape, &handles);
    let wc = tape.constant(compiled.jweights.clone());
    let lw = tape.mul(l, wc);
    let j = tape.sum_all(lw);
    let mut res_sum: Option<DiffTensor> = None;
    let active = n_rows - if compiled.mask_first_row { 1 } else { 0 };
    for c in &problem.constraints {
        let mut r = c(&mut tape, &handles);
        if compiled.mask_first_row {
            let mut m = Array2::ones((n_rows, 1));
            m[(0, 0)] = 0.0;
            let mc = tape.constant(m);
            r = tape.mul(r, mc);
        }
        let sq = tape.mul(r, r);
        let su = tape.sum_all(sq);
        res_sum = Some(match res_sum {
            None => su,
            Some(p) => tape.add(p, su),
        });
    }
    let res_mse = {
        let s = res_sum.unwrap();
        tape.scale(s, 1.0 / (active * problem.constraints.len()) as f64)
    };
    Ok(OcEval {
        loss: f64::NAN,
        j: tape.scalar_value(j),
        residual_mse: tape.scalar_value(res_mse),
        condition_sq: 0.0,
    })
}
