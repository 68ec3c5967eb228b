//! Minimal multilayer perceptron evaluated on a differentiation tape.
//!
//! The network maps an `N x d` batch of inputs through `L` affine layers
//! with an activation after every layer except the last. Parameters are
//! initialized from the scaled-uniform distribution
//! `U(-sqrt(6/(h_in + h_out)), +sqrt(6/(h_in + h_out)))` with zero biases,
//! deterministically for a fixed seed.
//!
//! Parameter vectors are flattened in a canonical order: layer by layer,
//! weight matrix (row-major) before bias. The same order is used by the
//! on-disk format, see [`Mlp::save`].

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use thiserror::Error;

use crate::rng::SeededRng;
use crate::tape::{DiffTensor, Tape};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("a network needs at least two widths, all positive (got {0:?})")]
    InvalidWidths(Vec<usize>),
    #[error("input has {got} columns but the network expects {expected}")]
    InputWidthMismatch { expected: usize, got: usize },
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("input derivatives of order {0} are unsupported (max 2)")]
    UnsupportedOrder(usize),
    #[error("derivative axis {axis} out of range for input dimension {dim}")]
    BadAxis { axis: usize, dim: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad parameter file: {0}")]
    BadFile(String),
}

/// Activation applied after every hidden layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    /// No-op activation; handy for representing plain affine maps in tests.
    Identity,
}

impl Activation {
    fn id(&self) -> u64 {
        match self {
            Activation::Tanh => 0,
            Activation::Identity => 1,
        }
    }

    fn from_id(id: u64) -> Option<Self> {
        match id {
            0 => Some(Activation::Tanh),
            1 => Some(Activation::Identity),
            _ => None,
        }
    }
}

/// Tape handles for one network's parameters.
pub struct MlpParams {
    pub weights: Vec<DiffTensor>,
    pub biases: Vec<DiffTensor>,
}

impl MlpParams {
    /// All parameter tensors in canonical order.
    pub fn all(&self) -> Vec<DiffTensor> {
        let mut out = Vec::with_capacity(2 * self.weights.len());
        for i in 0..self.weights.len() {
            out.push(self.weights[i]);
            out.push(self.biases[i]);
        }
        out
    }
}

/// Fully connected feed-forward network with a final affine layer.
#[derive(Debug, Clone)]
pub struct Mlp {
    widths: Vec<usize>,
    activation: Activation,
    seed: u64,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array2<f64>>,
}

impl Mlp {
    pub fn new(widths: &[usize], activation: Activation, seed: u64) -> Result<Self, NetworkError> {
        if widths.len() < 2 || widths.iter().any(|&w| w == 0) {
            return Err(NetworkError::InvalidWidths(widths.to_vec()));
        }
        let mut rng = SeededRng::new(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for i in 1..widths.len() {
            let (fan_in, fan_out) = (widths[i - 1], widths[i]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut w = Array2::zeros((fan_in, fan_out));
            for r in 0..fan_in {
                for c in 0..fan_out {
                    w[(r, c)] = rng.uniform_in(-bound, bound);
                }
            }
            weights.push(w);
            biases.push(Array2::zeros((1, fan_out)));
        }
        Ok(Mlp { widths: widths.to_vec(), activation, seed, weights, biases })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Parameters flattened in canonical order.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for i in 0..self.weights.len() {
            out.extend(self.weights[i].iter());
            out.extend(self.biases[i].iter());
        }
        out
    }

    /// Replaces all parameters from a flat vector in canonical order.
    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<(), NetworkError> {
        if flat.len() != self.param_count() {
            return Err(NetworkError::ParamCountMismatch {
                expected: self.param_count(),
                got: flat.len(),
            });
        }
        let mut pos = 0;
        for i in 0..self.weights.len() {
            for v in self.weights[i].iter_mut() {
                *v = flat[pos];
                pos += 1;
            }
            for v in self.biases[i].iter_mut() {
                *v = flat[pos];
                pos += 1;
            }
        }
        Ok(())
    }

    /// Registers the current parameters as differentiable tape leaves.
    pub fn emit_params(&self, tape: &mut Tape) -> MlpParams {
        let weights = self.weights.iter().map(|w| tape.leaf(w.clone())).collect();
        let biases = self.biases.iter().map(|b| tape.leaf(b.clone())).collect();
        MlpParams { weights, biases }
    }

    /// Forward pass on the tape: `x` is an `N x d` node, the result `N x m`.
    pub fn forward_on(&self, tape: &mut Tape, params: &MlpParams, x: DiffTensor) -> DiffTensor {
        assert_eq!(x.cols(), self.input_dim(), "forward: input width mismatch");
        let n = x.rows();
        let layers = self.weights.len();
        let mut a = x;
        for i in 0..layers {
            let z = tape.matmul(a, params.weights[i]);
            let b = tape.broadcast_rows(params.biases[i], n);
            let zb = tape.add(z, b);
            a = if i + 1 == layers {
                zb
            } else {
                match self.activation {
                    Activation::Tanh => tape.tanh(zb),
                    Activation::Identity => zb,
                }
            };
        }
        a
    }

    /// Plain (tape-free) forward evaluation.
    pub fn forward_values(&self, x: &Array2<f64>) -> Result<Array2<f64>, NetworkError> {
        if x.ncols() != self.input_dim() {
            return Err(NetworkError::InputWidthMismatch {
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        let layers = self.weights.len();
        let mut a = x.clone();
        for i in 0..layers {
            let mut z = a.dot(&self.weights[i]);
            for mut row in z.rows_mut() {
                for (v, b) in row.iter_mut().zip(self.biases[i].row(0)) {
                    *v += b;
                }
            }
            if i + 1 < layers && self.activation == Activation::Tanh {
                z.mapv_inplace(f64::tanh);
            }
            a = z;
        }
        Ok(a)
    }

    /// Convenience scalar evaluation for 1-D networks.
    pub fn eval_1d(&self, x: f64) -> f64 {
        let input = Array2::from_shape_vec((1, 1), vec![x]).unwrap();
        self.forward_values(&input).unwrap()[(0, 0)]
    }

    /// `d^order u / d x_axis^order` at every row of `x`, by differentiating
    /// the tape (order 2 differentiates the order-1 result again).
    pub fn input_derivative(
        &self,
        x: &Array2<f64>,
        order: usize,
        axis: usize,
    ) -> Result<Vec<f64>, NetworkError> {
        if !(1..=2).contains(&order) {
            return Err(NetworkError::UnsupportedOrder(order));
        }
        if axis >= self.input_dim() {
            return Err(NetworkError::BadAxis { axis, dim: self.input_dim() });
        }
        let mut tape = Tape::new();
        let xs = tape.leaf(x.clone());
        let params = self.emit_params(&mut tape);
        let u = self.forward_on(&mut tape, &params, xs);
        let d = input_derivative_on(&mut tape, u, xs, order, axis);
        Ok(tape.value(d).column(0).to_vec())
    }

    /// Writes the parameters as a little-endian binary file.
    ///
    /// Layout: `u64` width count, the widths as `u64`s, `u64` activation id
    /// (0 = tanh, 1 = identity), `u64` init seed, then every parameter as an
    /// `f64` in canonical order.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NetworkError> {
        let mut f = std::fs::File::create(path)?;
        let mut buf = Vec::new();
        buf.extend((self.widths.len() as u64).to_le_bytes());
        for &w in &self.widths {
            buf.extend((w as u64).to_le_bytes());
        }
        buf.extend(self.activation.id().to_le_bytes());
        buf.extend(self.seed.to_le_bytes());
        for v in self.params_flat() {
            buf.extend(v.to_le_bytes());
        }
        f.write_all(&buf)?;
        Ok(())
    }

    /// Reads a parameter file written by [`Mlp::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self, NetworkError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut pos = 0;
        let mut take_u64 = |bytes: &[u8]| -> Result<u64, NetworkError> {
            let end = pos + 8;
            let chunk = bytes
                .get(pos..end)
                .ok_or_else(|| NetworkError::BadFile("truncated header".into()))?;
            pos = end;
            Ok(u64::from_le_bytes(chunk.try_into().unwrap()))
        };
        let n_widths = take_u64(&bytes)? as usize;
        if n_widths < 2 || n_widths > 64 {
            return Err(NetworkError::BadFile(format!("implausible width count {n_widths}")));
        }
        let mut widths = Vec::with_capacity(n_widths);
        for _ in 0..n_widths {
            widths.push(take_u64(&bytes)? as usize);
        }
        let activation = Activation::from_id(take_u64(&bytes)?)
            .ok_or_else(|| NetworkError::BadFile("unknown activation id".into()))?;
        let seed = take_u64(&bytes)?;
        let mut net = Mlp::new(&widths, activation, seed)?;
        let expected = net.param_count();
        let body = &bytes[pos..];
        if body.len() != expected * 8 {
            return Err(NetworkError::BadFile(format!(
                "expected {} parameter bytes, found {}",
                expected * 8,
                body.len()
            )));
        }
        let params: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        net.set_params_flat(&params)?;
        Ok(net)
    }
}

/// Input derivative of an already-emitted forward pass.
///
/// `u` must be the `N x 1` output of a network whose input node is the leaf
/// `x` (`N x d`). Row-wise independence makes the gradient of `sum(u)` with
/// respect to `x` exactly the per-row derivative.
pub fn input_derivative_on(
    tape: &mut Tape,
    u: DiffTensor,
    x: DiffTensor,
    order: usize,
    axis: usize,
) -> DiffTensor {
    assert!((1..=2).contains(&order), "input derivative order must be 1 or 2");
    assert!(axis < x.cols(), "derivative axis out of range");
    let mut selector = Array2::zeros((x.cols(), 1));
    selector[(axis, 0)] = 1.0;
    let sel = tape.constant(selector);

    let s = tape.sum_all(u);
    let g = tape.grad(s, &[x]);
    let mut col = tape.matmul(g[0], sel);
    if order == 2 {
        let s2 = tape.sum_all(col);
        let g2 = tape.grad(s2, &[x]);
        col = tape.matmul(g2[0], sel);
    }
    col
}

/// Flattens per-tensor gradients (as produced by [`Tape::grad`] over
/// `params.all()`) into the canonical parameter order.
pub fn flatten_grads(tape: &Tape, grads: &[DiffTensor]) -> Vec<f64> {
    let mut out = Vec::new();
    for g in grads {
        out.extend(tape.value(*g).iter());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn deterministic_init_and_param_count() {
        let a = Mlp::new(&[1, 10, 10, 1], Activation::Tanh, 42).unwrap();
        let b = Mlp::new(&[1, 10, 10, 1], Activation::Tanh, 42).unwrap();
        assert_eq!(a.params_flat(), b.params_flat());
        assert_eq!(a.param_count(), 141);
        assert!(Mlp::new(&[1], Activation::Tanh, 0).is_err());
        assert!(Mlp::new(&[2, 0, 1], Activation::Tanh, 0).is_err());
    }

    #[test]
    fn zero_weight_network_outputs_final_bias() {
        let mut net = Mlp::new(&[2, 3, 1], Activation::Tanh, 7).unwrap();
        let mut flat = vec![0.0; net.param_count()];
        // Final bias is the last canonical entry.
        let n = flat.len();
        flat[n - 1] = 0.25;
        net.set_params_flat(&flat).unwrap();
        let y = net.forward_values(&array![[1.0, -2.0], [0.3, 0.4]]).unwrap();
        assert_eq!(y, array![[0.25], [0.25]]);
    }

    #[test]
    fn single_affine_layer() {
        let mut net = Mlp::new(&[1, 1], Activation::Tanh, 0).unwrap();
        net.set_params_flat(&[2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(net.eval_1d(3.0), 7.0);
        let d = net.input_derivative(&array![[0.1], [5.0]], 1, 0).unwrap();
        assert_eq!(d, vec![2.0, 2.0]);
        let d2 = net.input_derivative(&array![[0.1]], 2, 0).unwrap();
        assert_eq!(d2, vec![0.0]);
    }

    #[test]
    fn tanh_identity_network_derivative() {
        // widths [1,1,1] with unit weights and zero biases computes u = tanh(x)
        let mut net = Mlp::new(&[1, 1, 1], Activation::Tanh, 0).unwrap();
        net.set_params_flat(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        let x = 0.3;
        let d = net.input_derivative(&array![[x]], 1, 0).unwrap();
        assert_abs_diff_eq!(d[0], 1.0 - x.tanh().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn input_derivative_matches_finite_differences() {
        let net = Mlp::new(&[1, 8, 8, 1], Activation::Tanh, 3).unwrap();
        let mut rng = crate::rng::SeededRng::new(11);
        for _ in 0..10 {
            let x = rng.uniform_in(-1.0, 1.0);
            let d = net.input_derivative(&array![[x]], 1, 0).unwrap()[0];
            let h = 1e-4;
            let fd = (net.eval_1d(x + h) - net.eval_1d(x - h)) / (2.0 * h);
            assert!((d - fd).abs() / fd.abs().max(1e-6) < 1e-6, "d={d} fd={fd}");
        }
    }

    #[test]
    fn param_gradient_hand_example() {
        // loss = (2*1 - 0)^2 on a single affine layer: dL/dw = 2*(2)*1 = 4
        let mut net = Mlp::new(&[1, 1], Activation::Tanh, 0).unwrap();
        net.set_params_flat(&[2.0, 0.0]).unwrap();
        let mut tape = Tape::new();
        let params = net.emit_params(&mut tape);
        let x = tape.constant(array![[1.0]]);
        let u = net.forward_on(&mut tape, &params, x);
        let loss = tape.mul(u, u);
        let grads = tape.grad(loss, &params.all());
        let flat = flatten_grads(&tape, &grads);
        assert_abs_diff_eq!(flat[0], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(flat[1], 4.0, epsilon = 1e-14); // dL/db = 2*(2)*1
    }

    #[test]
    fn param_gradient_matches_finite_differences() {
        let mut net = Mlp::new(&[1, 10, 10, 1], Activation::Tanh, 42).unwrap();
        let xs = array![[0.1], [0.4], [0.9], [-0.3]];
        let target = [1.0, -0.5, 0.2, 0.7];

        let loss_at = |net: &Mlp| -> f64 {
            let y = net.forward_values(&xs).unwrap();
            y.column(0)
                .iter()
                .zip(target)
                .map(|(u, t)| (u - t) * (u - t))
                .sum::<f64>()
        };

        let mut tape = Tape::new();
        let params = net.emit_params(&mut tape);
        let x = tape.constant(xs.clone());
        let u = net.forward_on(&mut tape, &params, x);
        let tgt = tape.constant(Array2::from_shape_vec((4, 1), target.to_vec()).unwrap());
        let r = tape.sub(u, tgt);
        let sq = tape.mul(r, r);
        let loss = tape.sum_all(sq);
        let grads = tape.grad(loss, &params.all());
        let analytic = flatten_grads(&tape, &grads);

        let theta = net.params_flat();
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        for i in 0..theta.len() {
            let mut tp = theta.clone();
            tp[i] += h;
            net.set_params_flat(&tp).unwrap();
            let fp = loss_at(&net);
            tp[i] -= 2.0 * h;
            net.set_params_flat(&tp).unwrap();
            let fm = loss_at(&net);
            let fd = (fp - fm) / (2.0 * h);
            let rel = (analytic[i] - fd).abs() / fd.abs().max(1e-6);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-5, "worst relative gradient error {worst}");
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = std::env::temp_dir().join(format!("quadnn-net-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("net.bin");
        let net = Mlp::new(&[2, 5, 1], Activation::Tanh, 9).unwrap();
        net.save(&path).unwrap();
        let loaded = Mlp::load(&path).unwrap();
        assert_eq!(net.widths(), loaded.widths());
        assert_eq!(net.params_flat(), loaded.params_flat());
        std::fs::remove_dir_all(&dir).ok();
    }
}
