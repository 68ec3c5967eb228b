//! Optimizers for the physics-informed losses: Adam with bias correction
//! and limited-memory BFGS with a two-loop recursion and a backtracking
//! Armijo line search, plus the Adam-then-L-BFGS schedule driver.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("gradient has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient entry at index {0}")]
    NonFiniteGradient(usize),
    #[error("non-finite loss during {phase} at epoch {epoch}: {loss}")]
    NonFiniteLoss { phase: &'static str, epoch: usize, loss: f64 },
}

/// Adam state with the usual defaults (β₁ = 0.9, β₂ = 0.999, ε = 1e-8).
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub lr: f64,
}

impl AdamState {
    pub fn new(dim: usize, lr: f64) -> Self {
        AdamState {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            step_count: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            lr,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut [f64],
    grad: &[f64],
) -> Result<(), OptimizeError> {
    if grad.len() != params.len() || state.m.len() != params.len() {
        return Err(OptimizeError::DimensionMismatch { expected: params.len(), got: grad.len() });
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(OptimizeError::NonFiniteGradient(i));
    }
    state.step_count += 1;
    let t = state.step_count as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for i in 0..params.len() {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

const CURVATURE_GUARD: f64 = 1e-10;
const ARMIJO_C1: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_MAX_TRIALS: usize = 25;
const WOLFE_C2: f64 = 0.9;

/// L-BFGS state: ring buffers of position and gradient differences plus the
/// cached loss/gradient at the current iterate.
pub struct LbfgsState {
    pub history: usize,
    s_hist: VecDeque<Vec<f64>>,
    y_hist: VecDeque<Vec<f64>>,
    rho_hist: VecDeque<f64>,
    pub iteration: usize,
    /// Scales the first line-search trial while no curvature history exists.
    pub initial_step: f64,
    cached: Option<(f64, Vec<f64>)>,
}

/// What a single L-BFGS step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LbfgsOutcome {
    /// Step accepted; loss at the new iterate.
    Accepted { loss: f64 },
    /// No Armijo step found; parameters unchanged, loss at the old iterate.
    LineSearchFailed { loss: f64 },
}

impl LbfgsState {
    pub fn new(history: usize, initial_step: f64) -> Self {
        LbfgsState {
            history,
            s_hist: VecDeque::new(),
            y_hist: VecDeque::new(),
            rho_hist: VecDeque::new(),
            iteration: 0,
            initial_step,
            cached: None,
        }
    }

    pub fn history_len(&self) -> usize {
        self.s_hist.len()
    }

    /// Two-loop recursion: approximates `-H g` using the stored pairs, with
    /// the initial Hessian guess `γ I`, `γ = sᵀy / yᵀy` (1 with no history).
    pub fn search_direction(&self, grad: &[f64]) -> Vec<f64> {
        let mut q = grad.to_vec();
        let k = self.s_hist.len();
        let mut alphas = vec![0.0; k];
        for j in (0..k).rev() {
            let a = self.rho_hist[j] * dot(&self.s_hist[j], &q);
            alphas[j] = a;
            axpy(&mut q, -a, &self.y_hist[j]);
        }
        let gamma = if k > 0 {
            let s = &self.s_hist[k - 1];
            let y = &self.y_hist[k - 1];
            dot(s, y) / dot(y, y)
        } else {
            1.0
        };
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for j in 0..k {
            let beta = self.rho_hist[j] * dot(&self.y_hist[j], &q);
            axpy(&mut q, alphas[j] - beta, &self.s_hist[j]);
        }
        for v in q.iter_mut() {
            *v = -*v;
        }
        q
    }

    fn store_pair(&mut self, s: Vec<f64>, y: Vec<f64>) {
        let sy = dot(&s, &y);
        if sy <= CURVATURE_GUARD {
            return;
        }
        if self.s_hist.len() == self.history {
            self.s_hist.pop_front();
            self.y_hist.pop_front();
            self.rho_hist.pop_front();
        }
        self.s_hist.push_back(s);
        self.y_hist.push_back(y);
        self.rho_hist.push_back(1.0 / sy);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// One L-BFGS step with backtracking Armijo line search.
///
/// `loss_and_grad` must return a finite loss and its gradient. On line
/// search failure the parameters are left unchanged and the caller decides
/// whether to stop or fall back.
pub fn lbfgs_step(
    state: &mut LbfgsState,
    params: &mut Vec<f64>,
    loss_and_grad: &mut dyn FnMut(&[f64]) -> (f64, Vec<f64>),
) -> Result<LbfgsOutcome, OptimizeError> {
    let (f0, g0) = match state.cached.take() {
        Some(c) => c,
        None => loss_and_grad(params),
    };
    if !f0.is_finite() {
        return Err(OptimizeError::NonFiniteLoss { phase: "l-bfgs", epoch: state.iteration, loss: f0 });
    }
    let mut dir = state.search_direction(&g0);
    let mut slope = dot(&g0, &dir);
    if slope >= 0.0 {
        // Curvature information went stale; restart from steepest descent.
        dir = g0.iter().map(|g| -g).collect();
        slope = dot(&g0, &dir);
    }
    let t0 = if state.history_len() == 0 { state.initial_step } else { 1.0 };
    let mut t = t0;
    let eval_at = |t: f64, f: &mut dyn FnMut(&[f64]) -> (f64, Vec<f64>), params: &[f64]| {
        let trial: Vec<f64> = params.iter().zip(&dir).map(|(p, d)| p + t * d).collect();
        let (ft, gt) = f(&trial);
        (trial, ft, gt)
    };
    let mut trials = 0;
    while trials < ARMIJO_MAX_TRIALS {
        trials += 1;
        let (mut trial, mut ft, mut gt) = eval_at(t, loss_and_grad, params);
        if ft.is_finite() && ft <= f0 + ARMIJO_C1 * t * slope {
            // Armijo holds. If the slope along the direction is still as
            // steep as at the start, the step is too short to carry
            // curvature information; double it while Armijo keeps holding.
            while trials < ARMIJO_MAX_TRIALS && dot(&gt, &dir) < WOLFE_C2 * slope {
                trials += 1;
                let t2 = 2.0 * t;
                let (trial2, ft2, gt2) = eval_at(t2, loss_and_grad, params);
                if ft2.is_finite() && ft2 <= f0 + ARMIJO_C1 * t2 * slope {
                    t = t2;
                    trial = trial2;
                    ft = ft2;
                    gt = gt2;
                } else {
                    break;
                }
            }
            let s: Vec<f64> = trial.iter().zip(params.iter()).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gt.iter().zip(&g0).map(|(a, b)| a - b).collect();
            state.store_pair(s, y);
            *params = trial;
            state.iteration += 1;
            state.cached = Some((ft, gt));
            return Ok(LbfgsOutcome::Accepted { loss: ft });
        }
        t *= ARMIJO_SHRINK;
    }
    state.iteration += 1;
    state.cached = Some((f0, g0));
    Ok(LbfgsOutcome::LineSearchFailed { loss: f0 })
}

/// Optimization schedule: an optional Adam warm-up followed by L-BFGS.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    pub adam_epochs: usize,
    pub adam_lr: f64,
    pub lbfgs_epochs: usize,
    /// Scale of the first L-BFGS line-search trial.
    pub lbfgs_lr: f64,
}

impl Schedule {
    pub fn lbfgs_only(epochs: usize, lr: f64) -> Self {
        Schedule { adam_epochs: 0, adam_lr: 0.0, lbfgs_epochs: epochs, lbfgs_lr: lr }
    }

    pub fn adam_then_lbfgs(adam_epochs: usize, adam_lr: f64, lbfgs_epochs: usize, lbfgs_lr: f64) -> Self {
        Schedule { adam_epochs, adam_lr, lbfgs_epochs, lbfgs_lr }
    }
}

/// Result of running a [`Schedule`] on a loss closure.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: Vec<f64>,
    pub final_loss: f64,
    /// Loss after every epoch, starting with the initial loss.
    pub trajectory: Vec<f64>,
    pub line_search_failures: usize,
}

const EARLY_STOP_LOSS: f64 = 1e-14;
const MAX_CONSECUTIVE_LS_FAILURES: usize = 3;

/// Runs the schedule to completion, stopping early when the loss falls
/// below 1e-14 or the line search fails three times in a row.
pub fn train(
    loss_and_grad: &mut dyn FnMut(&[f64]) -> (f64, Vec<f64>),
    theta0: Vec<f64>,
    schedule: &Schedule,
) -> Result<TrainOutcome, OptimizeError> {
    let mut params = theta0;
    let (f0, _) = loss_and_grad(&params);
    if !f0.is_finite() {
        return Err(OptimizeError::NonFiniteLoss { phase: "init", epoch: 0, loss: f0 });
    }
    let mut trajectory = vec![f0];
    let mut failures_total = 0;

    if schedule.adam_epochs > 0 {
        let mut adam = AdamState::new(params.len(), schedule.adam_lr);
        for epoch in 0..schedule.adam_epochs {
            let (loss, grad) = loss_and_grad(&params);
            if !loss.is_finite() {
                return Err(OptimizeError::NonFiniteLoss { phase: "adam", epoch, loss });
            }
            adam_step(&mut adam, &mut params, &grad)?;
            trajectory.push(loss);
            if loss < EARLY_STOP_LOSS {
                break;
            }
        }
    }

    let mut lbfgs = LbfgsState::new(10, schedule.lbfgs_lr);
    let mut consecutive_failures = 0;
    for _ in 0..schedule.lbfgs_epochs {
        match lbfgs_step(&mut lbfgs, &mut params, loss_and_grad)? {
            LbfgsOutcome::Accepted { loss } => {
                trajectory.push(loss);
                consecutive_failures = 0;
                if loss < EARLY_STOP_LOSS {
                    break;
                }
            }
            LbfgsOutcome::LineSearchFailed { loss } => {
                trajectory.push(loss);
                consecutive_failures += 1;
                failures_total += 1;
                if consecutive_failures >= MAX_CONSECUTIVE_LS_FAILURES {
                    break;
                }
            }
        }
    }

    let final_loss = *trajectory.last().unwrap();
    Ok(TrainOutcome { params, final_loss, trajectory, line_search_failures: failures_total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quadratic_1d(x: &[f64]) -> (f64, Vec<f64>) {
        let d = x[0] - 3.0;
        (d * d, vec![2.0 * d])
    }

    #[test]
    fn lbfgs_solves_scalar_quadratic_fast() {
        let mut state = LbfgsState::new(10, 1.0);
        let mut params = vec![0.0];
        let mut f = quadratic_1d;
        for _ in 0..5 {
            lbfgs_step(&mut state, &mut params, &mut f).unwrap();
        }
        assert!((params[0] - 3.0).abs() < 1e-8, "got {}", params[0]);
    }

    #[test]
    fn lbfgs_solves_sphere_in_ten_dims() {
        let mut state = LbfgsState::new(10, 1.0);
        let mut params: Vec<f64> = (0..10).map(|i| i as f64 - 4.5).collect();
        let mut f = |x: &[f64]| {
            let loss: f64 = x.iter().map(|v| v * v).sum();
            (loss, x.iter().map(|v| 2.0 * v).collect())
        };
        for _ in 0..10 {
            lbfgs_step(&mut state, &mut params, &mut f).unwrap();
        }
        let loss: f64 = params.iter().map(|v| v * v).sum();
        assert!(loss < 1e-10, "loss {loss}");
    }

    #[test]
    fn lbfgs_solves_rosenbrock() {
        let mut state = LbfgsState::new(10, 1.0);
        let mut params = vec![-1.2, 1.0];
        let mut f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let loss = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (loss, g)
        };
        for _ in 0..200 {
            lbfgs_step(&mut state, &mut params, &mut f).unwrap();
        }
        assert!((params[0] - 1.0).abs() < 1e-6 && (params[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn accepted_steps_never_increase_loss() {
        let mut state = LbfgsState::new(10, 1.0);
        let mut params = vec![-1.2, 1.0];
        let mut f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let loss = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (loss, g)
        };
        let mut last = f(&params).0;
        for _ in 0..60 {
            if let LbfgsOutcome::Accepted { loss } = lbfgs_step(&mut state, &mut params, &mut f).unwrap() {
                assert!(loss <= last + 1e-15, "loss rose from {last} to {loss}");
                last = loss;
            }
        }
    }

    #[test]
    fn history_never_exceeds_bound() {
        let mut state = LbfgsState::new(3, 1.0);
        let mut params = vec![5.0, -2.0, 0.5];
        let mut f = |x: &[f64]| {
            let loss: f64 = x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v * v).sum();
            (loss, x.iter().enumerate().map(|(i, v)| 2.0 * (i as f64 + 1.0) * v).collect())
        };
        for _ in 0..20 {
            lbfgs_step(&mut state, &mut params, &mut f).unwrap();
            assert!(state.history_len() <= 3);
        }
    }

    #[test]
    fn empty_history_direction_is_scaled_steepest_descent() {
        let state = LbfgsState::new(10, 0.1);
        let dir = state.search_direction(&[2.0, -4.0]);
        assert_eq!(dir, vec![-2.0, 4.0]);
    }

    #[test]
    fn adam_hand_checked_first_step() {
        let mut s = AdamState::new(1, 0.1);
        let mut p = vec![0.0];
        adam_step(&mut s, &mut p, &[1.0]).unwrap();
        assert_abs_diff_eq!(p[0], -0.1 * 1.0 / (1.0 + 1e-8), epsilon = 1e-12);
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut s = AdamState::new(2, 0.05);
        let mut p = vec![1.5, -0.5];
        adam_step(&mut s, &mut p, &[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![1.5, -0.5]);
    }

    #[test]
    fn adam_converges_on_quadratic() {
        let mut s = AdamState::new(1, 0.05);
        let mut p = vec![1.0];
        for _ in 0..500 {
            let g = vec![2.0 * p[0]];
            adam_step(&mut s, &mut p, &g).unwrap();
        }
        assert!(p[0].abs() < 1e-2, "got {}", p[0]);
    }

    #[test]
    fn adam_rejects_nonfinite_gradient() {
        let mut s = AdamState::new(1, 0.1);
        let mut p = vec![0.0];
        assert!(adam_step(&mut s, &mut p, &[f64::NAN]).is_err());
    }

    #[test]
    fn zero_epoch_schedule_echoes_initial_loss() {
        let mut f = quadratic_1d;
        let out = train(&mut f, vec![1.0], &Schedule::lbfgs_only(0, 1.0)).unwrap();
        assert_eq!(out.trajectory, vec![4.0]);
        assert_eq!(out.final_loss, 4.0);
    }

    #[test]
    fn train_is_deterministic() {
        let mut f1 = quadratic_1d;
        let mut f2 = quadratic_1d;
        let a = train(&mut f1, vec![0.0], &Schedule::lbfgs_only(20, 1.0)).unwrap();
        let b = train(&mut f2, vec![0.0], &Schedule::lbfgs_only(20, 1.0)).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.trajectory, b.trajectory);
    }
}
