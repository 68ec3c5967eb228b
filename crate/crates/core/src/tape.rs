//! Reverse-mode automatic differentiation on dense matrices.
//!
//! A [`Tape`] is an append-only arena of matrix-valued nodes. Every
//! operation evaluates eagerly and records enough structure for
//! [`Tape::grad`] to emit the adjoint computation *as new tape nodes*.
//! Because the backward pass is itself made of differentiable ops, taking
//! a gradient of a gradient works out of the box; that is how second-order
//! input derivatives and parameter gradients through derivative terms are
//! computed.
//!
//! All tensors are 2-D `f64` matrices in row-major layout. Higher-rank
//! structures (Volterra inner-node grids, multi-dimensional kernel tensors)
//! are handled by flattening to a documented matrix layout before they
//! enter the tape.
//!
//! A tape is single-threaded by design: one training session owns one tape.

use ndarray::Array2;

/// Handle to a node on a [`Tape`]; cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffTensor {
    id: usize,
    rows: usize,
    cols: usize,
}

impl DiffTensor {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Input,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    MatMul(usize, usize),
    Transpose(usize),
    Tanh(usize),
    Exp(usize),
    Sin(usize),
    Cos(usize),
    PowI(usize, i32),
    Scale(usize, f64),
    AddScalar(usize),
    SumRows(usize),
    BroadcastRows(usize),
    SumAll(usize),
    BroadcastFull(usize),
    Reshape(usize),
}

struct Node {
    op: Op,
    value: Array2<f64>,
    requires_grad: bool,
}

/// Append-only computation record. See the module docs.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Value of a node.
    pub fn value(&self, t: DiffTensor) -> &Array2<f64> {
        &self.nodes[t.id].value
    }

    /// Value of a 1x1 node as a plain float.
    pub fn scalar_value(&self, t: DiffTensor) -> f64 {
        assert_eq!(t.shape(), (1, 1), "scalar_value needs a 1x1 tensor");
        self.nodes[t.id].value[(0, 0)]
    }

    fn push(&mut self, op: Op, value: Array2<f64>, requires_grad: bool) -> DiffTensor {
        let (rows, cols) = value.dim();
        let id = self.nodes.len();
        self.nodes.push(Node { op, value, requires_grad });
        DiffTensor { id, rows, cols }
    }

    /// Non-differentiable input (kernel matrices, collocation points, ...).
    pub fn constant(&mut self, value: Array2<f64>) -> DiffTensor {
        self.push(Op::Input, value, false)
    }

    pub fn constant_scalar(&mut self, value: f64) -> DiffTensor {
        self.constant(Array2::from_elem((1, 1), value))
    }

    /// Differentiable input (parameters, or collocation points when input
    /// derivatives are needed).
    pub fn leaf(&mut self, value: Array2<f64>) -> DiffTensor {
        self.push(Op::Input, value, true)
    }

    fn req(&self, a: DiffTensor) -> bool {
        self.nodes[a.id].requires_grad
    }

    pub fn add(&mut self, a: DiffTensor, b: DiffTensor) -> DiffTensor {
        assert_eq!(a.shape(), b.shape(), "add: shape mismatch");
        let value = &self.nodes[a.id].value + &self.nodes[b.id].value;
        let rg = self.req(a) || self.req(b);
        self.push(Op::Add(a.id, b.id), value, rg)
    }

    pub fn sub(&mut self, a: DiffTensor, b: DiffTensor) -> DiffTensor {
        assert_eq!(a.shape(), b.shape(), "sub: shape mismatch");
        let value = &self.nodes[a.id].value - &self.nodes[b.id].value;
        let rg = self.req(a) || self.req(b);
        self.push(Op::Sub(a.id, b.id), value, rg)
    }

    /// Elementwise product; shapes must match exactly.
    pub fn mul(&mut self, a: DiffTensor, b: DiffTensor) -> DiffTensor {
        assert_eq!(a.shape(), b.shape(), "mul: shape mismatch");
        let value = &self.nodes[a.id].value * &self.nodes[b.id].value;
        let rg = self.req(a) || self.req(b);
        self.push(Op::Mul(a.id, b.id), value, rg)
    }

    pub fn matmul(&mut self, a: DiffTensor, b: DiffTensor) -> DiffTensor {
        assert_eq!(a.cols(), b.rows(), "matmul: inner dimensions differ");
        let value = self.nodes[a.id].value.dot(&self.nodes[b.id].value);
        let rg = self.req(a) || self.req(b);
        self.push(Op::MatMul(a.id, b.id), value, rg)
    }

    pub fn transpose(&mut self, a: DiffTensor) -> DiffTensor {
        let value = self.nodes[a.id].value.t().to_owned();
        let rg = self.req(a);
        self.push(Op::Transpose(a.id), value, rg)
    }

    pub fn tanh(&mut self, a: DiffTensor) -> DiffTensor {
        let value = self.nodes[a.id].value.mapv(f64::tanh);
        let rg = self.req(a);
        self.push(Op::Tanh(a.id), value, rg)
    }

    pub fn exp(&mut self, a: DiffTensor) -> DiffTensor {
        let value = self.nodes[a.id].value.mapv(f64::exp);
        let rg = self.req(a);
        self.push(Op::Exp(a.id), value, rg)
    }

    pub fn sin(&mut self, a: DiffTensor) -> DiffTensor {
        let value = self.nodes[a.id].value.mapv(f64::sin);
        let rg = self.req(a);
        self.push(Op::Sin(a.id), value, rg)
    }

    pub fn cos(&mut self, a: DiffTensor) -> DiffTensor {
        let value = self.nodes[a.id].value.mapv(f64::cos);
        let rg = self.req(a);
        self.push(Op::Cos(a.id), value, rg)
    }

    /// Elementwise integer power, `k >= 0`.
    pub fn powi(&mut self, a: DiffTensor, k: i32) -> DiffTensor {
        assert!(k >= 0, "powi: negative exponents unsupported");
        let value = self.nodes[a.id].value.mapv(|v| v.powi(k));
        let rg = self.req(a);
        self.push(Op::PowI(a.id, k), value, rg)
    }

    pub fn scale(&mut self, a: DiffTensor, c: f64) -> DiffTensor {
        let value = self.nodes[a.id].value.mapv(|v| c * v);
        let rg = self.req(a);
        self.push(Op::Scale(a.id, c), value, rg)
    }

    pub fn add_scalar(&mut self, a: DiffTensor, c: f64) -> DiffTensor {
        let value = self.nodes[a.id].value.mapv(|v| v + c);
        let rg = self.req(a);
        self.push(Op::AddScalar(a.id), value, rg)
    }

    pub fn neg(&mut self, a: DiffTensor) -> DiffTensor {
        self.scale(a, -1.0)
    }

    /// Column-wise sum: (n, m) -> (1, m).
    pub fn sum_rows(&mut self, a: DiffTensor) -> DiffTensor {
        let src = &self.nodes[a.id].value;
        let mut out = Array2::zeros((1, a.cols()));
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                out[(0, c)] += src[(r, c)];
            }
        }
        let rg = self.req(a);
        self.push(Op::SumRows(a.id), out, rg)
    }

    /// Repeats a (1, m) row n times: (1, m) -> (n, m).
    pub fn broadcast_rows(&mut self, a: DiffTensor, n: usize) -> DiffTensor {
        assert_eq!(a.rows(), 1, "broadcast_rows: source must be a single row");
        let src = &self.nodes[a.id].value;
        let mut out = Array2::zeros((n, a.cols()));
        for r in 0..n {
            for c in 0..a.cols() {
                out[(r, c)] = src[(0, c)];
            }
        }
        let rg = self.req(a);
        self.push(Op::BroadcastRows(a.id), out, rg)
    }

    /// Sum of all entries: (n, m) -> (1, 1).
    pub fn sum_all(&mut self, a: DiffTensor) -> DiffTensor {
        let value = Array2::from_elem((1, 1), self.nodes[a.id].value.sum());
        let rg = self.req(a);
        self.push(Op::SumAll(a.id), value, rg)
    }

    /// Fills an (n, m) tensor with the value of a 1x1 node.
    pub fn broadcast_full(&mut self, a: DiffTensor, rows: usize, cols: usize) -> DiffTensor {
        assert_eq!(a.shape(), (1, 1), "broadcast_full: source must be 1x1");
        let v = self.nodes[a.id].value[(0, 0)];
        let rg = self.req(a);
        self.push(Op::BroadcastFull(a.id), Array2::from_elem((rows, cols), v), rg)
    }

    /// Row-major reshape; the element count must be preserved.
    pub fn reshape(&mut self, a: DiffTensor, rows: usize, cols: usize) -> DiffTensor {
        assert_eq!(a.rows() * a.cols(), rows * cols, "reshape: element count changed");
        let flat: Vec<f64> = self.nodes[a.id].value.iter().copied().collect();
        let value = Array2::from_shape_vec((rows, cols), flat).expect("reshape");
        let rg = self.req(a);
        self.push(Op::Reshape(a.id), value, rg)
    }

    /// Mean of all entries as a 1x1 node.
    pub fn mean_all(&mut self, a: DiffTensor) -> DiffTensor {
        let count = (a.rows() * a.cols()) as f64;
        let s = self.sum_all(a);
        self.scale(s, 1.0 / count)
    }

    /// Emits the adjoint graph of the scalar `output` with respect to each
    /// tensor in `wrt`, and returns the gradient nodes in matching order.
    ///
    /// Gradient nodes are ordinary tape nodes, so they can feed further
    /// computation (including further `grad` calls). Tensors in `wrt` that
    /// the output does not depend on get a zero gradient of their own shape.
    pub fn grad(&mut self, output: DiffTensor, wrt: &[DiffTensor]) -> Vec<DiffTensor> {
        assert_eq!(output.shape(), (1, 1), "grad: output must be scalar (1x1)");
        let y = output.id;
        let mut adj: Vec<Option<DiffTensor>> = vec![None; y + 1];
        let seed = self.constant(Array2::ones((1, 1)));
        adj[y] = Some(seed);

        for i in (0..=y).rev() {
            let Some(g) = adj[i] else { continue };
            let op = self.nodes[i].op;
            match op {
                Op::Input => {}
                Op::Add(a, b) => {
                    self.accumulate(&mut adj, a, g);
                    self.accumulate(&mut adj, b, g);
                }
                Op::Sub(a, b) => {
                    self.accumulate(&mut adj, a, g);
                    if self.nodes[b].requires_grad {
                        let ng = self.neg(g);
                        self.accumulate(&mut adj, b, ng);
                    }
                }
                Op::Mul(a, b) => {
                    if self.nodes[a].requires_grad {
                        let bt = self.handle(b);
                        let c = self.mul(g, bt);
                        self.accumulate(&mut adj, a, c);
                    }
                    if self.nodes[b].requires_grad {
                        let at = self.handle(a);
                        let c = self.mul(g, at);
                        self.accumulate(&mut adj, b, c);
                    }
                }
                Op::MatMul(a, b) => {
                    if self.nodes[a].requires_grad {
                        let bt = self.handle(b);
                        let btr = self.transpose(bt);
                        let c = self.matmul(g, btr);
                        self.accumulate(&mut adj, a, c);
                    }
                    if self.nodes[b].requires_grad {
                        let at = self.handle(a);
                        let atr = self.transpose(at);
                        let c = self.matmul(atr, g);
                        self.accumulate(&mut adj, b, c);
                    }
                }
                Op::Transpose(a) => {
                    if self.nodes[a].requires_grad {
                        let c = self.transpose(g);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::Tanh(a) => {
                    if self.nodes[a].requires_grad {
                        // d tanh = 1 - tanh^2, reusing the forward value.
                        let y = self.handle_at(i);
                        let y2 = self.mul(y, y);
                        let m = self.scale(y2, -1.0);
                        let om = self.add_scalar(m, 1.0);
                        let c = self.mul(g, om);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::Exp(a) => {
                    if self.nodes[a].requires_grad {
                        let y = self.handle_at(i);
                        let c = self.mul(g, y);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::Sin(a) => {
                    if self.nodes[a].requires_grad {
                        let at = self.handle(a);
                        let ca = self.cos(at);
                        let c = self.mul(g, ca);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::Cos(a) => {
                    if self.nodes[a].requires_grad {
                        let at = self.handle(a);
                        let sa = self.sin(at);
                        let msa = self.neg(sa);
                        let c = self.mul(g, msa);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::PowI(a, k) => {
                    if self.nodes[a].requires_grad && k != 0 {
                        let at = self.handle(a);
                        let p = self.powi(at, k - 1);
                        let gp = self.mul(g, p);
                        let c = self.scale(gp, k as f64);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::Scale(a, c0) => {
                    if self.nodes[a].requires_grad {
                        let c = self.scale(g, c0);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::AddScalar(a) => {
                    self.accumulate(&mut adj, a, g);
                }
                Op::SumRows(a) => {
                    if self.nodes[a].requires_grad {
                        let n = self.nodes[a].value.nrows();
                        let c = self.broadcast_rows(g, n);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::BroadcastRows(a) => {
                    if self.nodes[a].requires_grad {
                        let c = self.sum_rows(g);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::SumAll(a) => {
                    if self.nodes[a].requires_grad {
                        let (r, c0) = self.nodes[a].value.dim();
                        let c = self.broadcast_full(g, r, c0);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::BroadcastFull(a) => {
                    if self.nodes[a].requires_grad {
                        let c = self.sum_all(g);
                        self.accumulate(&mut adj, a, c);
                    }
                }
                Op::Reshape(a) => {
                    if self.nodes[a].requires_grad {
                        let (r, c0) = self.nodes[a].value.dim();
                        let c = self.reshape(g, r, c0);
                        self.accumulate(&mut adj, a, c);
                    }
                }
            }
        }

        wrt.iter()
            .map(|w| {
                adj.get(w.id).copied().flatten().unwrap_or_else(|| {
                    let zeros = Array2::zeros((w.rows, w.cols));
                    self.constant(zeros)
                })
            })
            .collect()
    }

    fn accumulate(&mut self, adj: &mut [Option<DiffTensor>], target: usize, contrib: DiffTensor) {
        if !self.nodes[target].requires_grad {
            return;
        }
        adj[target] = Some(match adj[target] {
            None => contrib,
            Some(prev) => self.add(prev, contrib),
        });
    }

    fn handle(&self, id: usize) -> DiffTensor {
        self.handle_at(id)
    }

    fn handle_at(&self, id: usize) -> DiffTensor {
        let (rows, cols) = self.nodes[id].value.dim();
        DiffTensor { id, rows, cols }
    }
}
