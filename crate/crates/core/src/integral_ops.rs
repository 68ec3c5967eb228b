//! Discretized integral operators: Fredholm, Volterra, and their two- and
//! three-dimensional versions, assembled once as dense kernel matrices or
//! tensors and applied as matrix/tensor-vector products.
//!
//! Every assembly precomputes the kernel at the quadrature evaluation
//! layout, so applying an operator during training touches no kernel code.
//! Layouts are row-major with axis order (x, y, z); an index pair `(i, j)`
//! on an `Nx x Ny` grid flattens to `i * Ny + j`.
//!
//! Assemblies are immutable after construction and safe to share across
//! threads.

use ndarray::Array2;
use thiserror::Error;

use crate::quadrature::{Family, MappedRule, QuadratureRule};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("kernel returned a non-finite value at ({x}, {t})")]
    NonFiniteKernel { x: f64, t: f64 },
    #[error("integration bounds are inverted at x = {x}: g = {g}, h = {h}")]
    InvertedBounds { x: f64, g: f64, h: f64 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("expected shape ({er}, {ec}), got ({gr}, {gc})")]
    ShapeMismatch { er: usize, ec: usize, gr: usize, gc: usize },
    #[error("evaluation points ({x}) and quadrature nodes ({r}) must agree in length")]
    PointCountMismatch { x: usize, r: usize },
    #[error("semi-infinite assembly needs a Laguerre rule, got {family:?}")]
    NotLaguerre { family: Family },
}

/// How the kernel of a semi-infinite (Gauss-Laguerre) Fredholm operator is
/// supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaguerreKernelForm {
    /// The physical kernel `K(x, t)`; the assembly multiplies by
    /// `t^{-α} e^{t}` so that the Laguerre weight re-creates `K` exactly.
    Physical,
    /// The caller already divided out the family weight `t^α e^{-t}`.
    WeightFree,
}

/// Fixed-bounds integral operator `∫_a^b K(x,t) u(t) dt` on a mapped rule.
#[derive(Debug, Clone)]
pub struct FredholmAssembly {
    /// `K[i, j] = kernel(x_i, r_j)`.
    pub kernel_matrix: Array2<f64>,
    pub weights: Vec<f64>,
    /// `(b - a) / 2`, or 1 for the semi-infinite case.
    pub scale: f64,
    /// Evaluation points (the training points).
    pub x: Vec<f64>,
    /// Integration nodes.
    pub r: Vec<f64>,
}

impl FredholmAssembly {
    /// Assembles on a finite interval; `x` must pair one evaluation point
    /// with each quadrature node (the usual choice is `x = r`).
    pub fn new(
        kernel: impl Fn(f64, f64) -> f64,
        x: &[f64],
        rule: &MappedRule,
    ) -> Result<Self, OperatorError> {
        let n = rule.mapped_nodes.len();
        if x.len() != n {
            return Err(OperatorError::PointCountMismatch { x: x.len(), r: n });
        }
        let mut k = Array2::zeros((n, n));
        for (i, &xi) in x.iter().enumerate() {
            for (j, &rj) in rule.mapped_nodes.iter().enumerate() {
                let v = kernel(xi, rj);
                if !v.is_finite() {
                    return Err(OperatorError::NonFiniteKernel { x: xi, t: rj });
                }
                k[(i, j)] = v;
            }
        }
        Ok(FredholmAssembly {
            kernel_matrix: k,
            weights: rule.base.weights.clone(),
            scale: rule.scale,
            x: x.to_vec(),
            r: rule.mapped_nodes.clone(),
        })
    }

    /// Assembles `∫_0^∞ K(x,t) u(t) dt` on a Gauss-Laguerre rule with
    /// `x = r` (the Laguerre nodes).
    pub fn semi_infinite(
        kernel: impl Fn(f64, f64) -> f64,
        rule: &QuadratureRule,
        form: LaguerreKernelForm,
    ) -> Result<Self, OperatorError> {
        let alpha = match rule.family {
            Family::Laguerre { alpha } => alpha,
            family => return Err(OperatorError::NotLaguerre { family }),
        };
        let n = rule.n;
        let mut k = Array2::zeros((n, n));
        for (i, &xi) in rule.nodes.iter().enumerate() {
            for (j, &rj) in rule.nodes.iter().enumerate() {
                let mut v = kernel(xi, rj);
                if form == LaguerreKernelForm::Physical {
                    v *= rj.powf(-alpha) * rj.exp();
                }
                if !v.is_finite() {
                    return Err(OperatorError::NonFiniteKernel { x: xi, t: rj });
                }
                k[(i, j)] = v;
            }
        }
        Ok(FredholmAssembly {
            kernel_matrix: k,
            weights: rule.weights.clone(),
            scale: 1.0,
            x: rule.nodes.clone(),
            r: rule.nodes.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `I[i] = scale · Σ_j K[i,j] u[j] w[j]`.
    pub fn apply(&self, u_at_r: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let n = self.len();
        if u_at_r.len() != n {
            return Err(OperatorError::LengthMismatch { expected: n, got: u_at_r.len() });
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.kernel_matrix[(i, j)] * u_at_r[j] * self.weights[j];
            }
            out[i] = self.scale * acc;
        }
        Ok(out)
    }

    /// The constant matrix `C` with `C[i,j] = scale · K[i,j] · w[j]`, so that
    /// applying the operator is the single product `C · u`.
    pub fn operator_matrix(&self) -> Array2<f64> {
        let n = self.len();
        let mut c = self.kernel_matrix.clone();
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] *= self.scale * self.weights[j];
            }
        }
        c
    }
}

/// Variable-bounds operator `∫_{g(x)}^{h(x)} K(x,t) u(t) dt`.
///
/// For weakly singular kernels the evaluation nodes `R[i, j]` stay strictly
/// inside `(g(x_i), h(x_i))`, so a kernel like `(x - t)^{-1/2}` is never
/// evaluated at its singularity. A Gauss-Jacobi reference rule whose weight
/// exponent matches the singularity can be passed instead of Legendre, with
/// the singular factor removed from the kernel (the quadrature weight then
/// carries it).
#[derive(Debug, Clone)]
pub struct VolterraAssembly {
    /// Evaluation (training) points.
    pub x: Vec<f64>,
    /// Inner nodes, `R[i, j] ∈ [g(x_i), h(x_i)]`.
    pub inner_nodes: Array2<f64>,
    /// `K[i, j] = kernel(x_i, R[i, j])`.
    pub kernel_matrix: Array2<f64>,
    pub weights: Vec<f64>,
    /// `scale[i] = (h(x_i) - g(x_i)) / 2`.
    pub scale: Vec<f64>,
}

impl VolterraAssembly {
    pub fn new(
        kernel: impl Fn(f64, f64) -> f64,
        g: impl Fn(f64) -> f64,
        h: impl Fn(f64) -> f64,
        x: &[f64],
        reference: &QuadratureRule,
    ) -> Result<Self, OperatorError> {
        let n = x.len();
        let m = reference.n;
        let mut r = Array2::zeros((n, m));
        let mut k = Array2::zeros((n, m));
        let mut scale = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            let (gi, hi) = (g(xi), h(xi));
            if hi < gi {
                return Err(OperatorError::InvertedBounds { x: xi, g: gi, h: hi });
            }
            scale[i] = (hi - gi) / 2.0;
            for (j, &rj) in reference.nodes.iter().enumerate() {
                let node = scale[i] * rj + (hi + gi) / 2.0;
                let v = kernel(xi, node);
                if !v.is_finite() {
                    return Err(OperatorError::NonFiniteKernel { x: xi, t: node });
                }
                r[(i, j)] = node;
                k[(i, j)] = v;
            }
        }
        Ok(VolterraAssembly {
            x: x.to_vec(),
            inner_nodes: r,
            kernel_matrix: k,
            weights: reference.weights.clone(),
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `I[i] = scale[i] · Σ_j K[i,j] u[i,j] w[j]` for `u` sampled on the
    /// inner-node matrix.
    pub fn apply(&self, u_on_inner: &Array2<f64>) -> Result<Vec<f64>, OperatorError> {
        let (n, m) = self.kernel_matrix.dim();
        if u_on_inner.dim() != (n, m) {
            let (gr, gc) = u_on_inner.dim();
            return Err(OperatorError::ShapeMismatch { er: n, ec: m, gr, gc });
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..m {
                acc += self.kernel_matrix[(i, j)] * u_on_inner[(i, j)] * self.weights[j];
            }
            out[i] = self.scale[i] * acc;
        }
        Ok(out)
    }

    /// `C[i,j] = scale[i] · K[i,j] · w[j]`; the operator is the row-sum of
    /// `C ⊙ u_on_inner`.
    pub fn operator_matrix(&self) -> Array2<f64> {
        let (n, m) = self.kernel_matrix.dim();
        let mut c = self.kernel_matrix.clone();
        for i in 0..n {
            for j in 0..m {
                c[(i, j)] *= self.scale[i] * self.weights[j];
            }
        }
        c
    }

    /// Inner nodes flattened row-major to an `(n·m) x 1` column, matching
    /// the layout expected when a network is evaluated on them.
    pub fn inner_points_flat(&self) -> Array2<f64> {
        let (n, m) = self.inner_nodes.dim();
        let data: Vec<f64> = self.inner_nodes.iter().copied().collect();
        Array2::from_shape_vec((n * m, 1), data).expect("inner points reshape")
    }
}

/// Two-dimensional Fredholm operator on the tensor-product grid of two
/// mapped rules; evaluation points equal the quadrature grid.
#[derive(Debug, Clone)]
pub struct Fredholm2dAssembly {
    pub nx: usize,
    pub ny: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Flattened rank-4 kernel: row `(i,j)`, column `(k,l)`.
    pub kernel: Array2<f64>,
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
    pub sx: f64,
    pub sy: f64,
}

impl Fredholm2dAssembly {
    pub fn new(
        kernel: impl Fn(f64, f64, f64, f64) -> f64,
        rule_x: &MappedRule,
        rule_y: &MappedRule,
    ) -> Result<Self, OperatorError> {
        let (nx, ny) = (rule_x.mapped_nodes.len(), rule_y.mapped_nodes.len());
        let mut k = Array2::zeros((nx * ny, nx * ny));
        for (i, &xi) in rule_x.mapped_nodes.iter().enumerate() {
            for (j, &yj) in rule_y.mapped_nodes.iter().enumerate() {
                for (kk, &sk) in rule_x.mapped_nodes.iter().enumerate() {
                    for (l, &tl) in rule_y.mapped_nodes.iter().enumerate() {
                        let v = kernel(xi, yj, sk, tl);
                        if !v.is_finite() {
                            return Err(OperatorError::NonFiniteKernel { x: xi, t: tl });
                        }
                        k[(i * ny + j, kk * ny + l)] = v;
                    }
                }
            }
        }
        Ok(Fredholm2dAssembly {
            nx,
            ny,
            x: rule_x.mapped_nodes.clone(),
            y: rule_y.mapped_nodes.clone(),
            kernel: k,
            wx: rule_x.base.weights.clone(),
            wy: rule_y.base.weights.clone(),
            sx: rule_x.scale,
            sy: rule_y.scale,
        })
    }

    /// `I[i,j] = sx sy Σ_k Σ_l K[i,j,k,l] u[k,l] wx[k] wy[l]`.
    pub fn apply(&self, u_grid: &Array2<f64>) -> Result<Array2<f64>, OperatorError> {
        if u_grid.dim() != (self.nx, self.ny) {
            let (gr, gc) = u_grid.dim();
            return Err(OperatorError::ShapeMismatch { er: self.nx, ec: self.ny, gr, gc });
        }
        let mut out = Array2::zeros((self.nx, self.ny));
        for i in 0..self.nx {
            for j in 0..self.ny {
                let mut acc = 0.0;
                for k in 0..self.nx {
                    for l in 0..self.ny {
                        acc += self.kernel[(i * self.ny + j, k * self.ny + l)]
                            * u_grid[(k, l)]
                            * self.wx[k]
                            * self.wy[l];
                    }
                }
                out[(i, j)] = self.sx * self.sy * acc;
            }
        }
        Ok(out)
    }

    /// Flattened constant operator matrix: `I_flat = C · u_flat`.
    pub fn operator_matrix(&self) -> Array2<f64> {
        let mut c = self.kernel.clone();
        for row in 0..self.nx * self.ny {
            for k in 0..self.nx {
                for l in 0..self.ny {
                    c[(row, k * self.ny + l)] *= self.sx * self.sy * self.wx[k] * self.wy[l];
                }
            }
        }
        c
    }

    /// Tensor-product grid `(x_i, y_j)` flattened row-major to `(nx·ny) x 2`.
    pub fn grid_points(&self) -> Array2<f64> {
        grid_2d(&self.x, &self.y)
    }
}

/// Two-dimensional Volterra operator with per-axis variable bounds.
#[derive(Debug, Clone)]
pub struct Volterra2dAssembly {
    pub nx: usize,
    pub ny: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `Rx[i, k]`: inner x-nodes for evaluation point `x_i`.
    pub rx: Array2<f64>,
    /// `Ry[j, l]`: inner y-nodes for evaluation point `y_j`.
    pub ry: Array2<f64>,
    /// Flattened rank-4 kernel: row `(i,j)`, column `(k,l)`,
    /// `K = kernel(x_i, y_j, Rx[i,k], Ry[j,l])`.
    pub kernel: Array2<f64>,
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
}

impl Volterra2dAssembly {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kernel: impl Fn(f64, f64, f64, f64) -> f64,
        g1: impl Fn(f64) -> f64,
        h1: impl Fn(f64) -> f64,
        g2: impl Fn(f64) -> f64,
        h2: impl Fn(f64) -> f64,
        x: &[f64],
        y: &[f64],
        ref_x: &QuadratureRule,
        ref_y: &QuadratureRule,
    ) -> Result<Self, OperatorError> {
        let (nx, ny) = (x.len(), y.len());
        assert_eq!(nx, ref_x.n, "x points must pair with the x reference rule");
        assert_eq!(ny, ref_y.n, "y points must pair with the y reference rule");
        let mut rx = Array2::zeros((nx, nx));
        let mut sx = vec![0.0; nx];
        for (i, &xi) in x.iter().enumerate() {
            let (gi, hi) = (g1(xi), h1(xi));
            if hi < gi {
                return Err(OperatorError::InvertedBounds { x: xi, g: gi, h: hi });
            }
            sx[i] = (hi - gi) / 2.0;
            for (k, &rk) in ref_x.nodes.iter().enumerate() {
                rx[(i, k)] = sx[i] * rk + (hi + gi) / 2.0;
            }
        }
        let mut ry = Array2::zeros((ny, ny));
        let mut sy = vec![0.0; ny];
        for (j, &yj) in y.iter().enumerate() {
            let (gj, hj) = (g2(yj), h2(yj));
            if hj < gj {
                return Err(OperatorError::InvertedBounds { x: yj, g: gj, h: hj });
            }
            sy[j] = (hj - gj) / 2.0;
            for (l, &rl) in ref_y.nodes.iter().enumerate() {
                ry[(j, l)] = sy[j] * rl + (hj + gj) / 2.0;
            }
        }
        let mut kmat = Array2::zeros((nx * ny, nx * ny));
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nx {
                    for l in 0..ny {
                        let v = kernel(x[i], y[j], rx[(i, k)], ry[(j, l)]);
                        if !v.is_finite() {
                            return Err(OperatorError::NonFiniteKernel {
                                x: rx[(i, k)],
                                t: ry[(j, l)],
                            });
                        }
                        kmat[(i * ny + j, k * ny + l)] = v;
                    }
                }
            }
        }
        Ok(Volterra2dAssembly {
            nx,
            ny,
            x: x.to_vec(),
            y: y.to_vec(),
            rx,
            ry,
            kernel: kmat,
            wx: ref_x.weights.clone(),
            wy: ref_y.weights.clone(),
            sx,
            sy,
        })
    }

    /// `u_on_inner` has row `(i,j)` and column `(k,l)` holding
    /// `u(Rx[i,k], Ry[j,l])`.
    pub fn apply(&self, u_on_inner: &Array2<f64>) -> Result<Array2<f64>, OperatorError> {
        let rows = self.nx * self.ny;
        if u_on_inner.dim() != (rows, rows) {
            let (gr, gc) = u_on_inner.dim();
            return Err(OperatorError::ShapeMismatch { er: rows, ec: rows, gr, gc });
        }
        let mut out = Array2::zeros((self.nx, self.ny));
        for i in 0..self.nx {
            for j in 0..self.ny {
                let row = i * self.ny + j;
                let mut acc = 0.0;
                for k in 0..self.nx {
                    for l in 0..self.ny {
                        let col = k * self.ny + l;
                        acc += self.kernel[(row, col)]
                            * u_on_inner[(row, col)]
                            * self.wx[k]
                            * self.wy[l];
                    }
                }
                out[(i, j)] = self.sx[i] * self.sy[j] * acc;
            }
        }
        Ok(out)
    }

    /// `C` with the scales and weights folded in; the operator is the
    /// row-sum of `C ⊙ u_on_inner`, reshaped to the grid.
    pub fn operator_matrix(&self) -> Array2<f64> {
        let mut c = self.kernel.clone();
        for i in 0..self.nx {
            for j in 0..self.ny {
                let row = i * self.ny + j;
                for k in 0..self.nx {
                    for l in 0..self.ny {
                        c[(row, k * self.ny + l)] *=
                            self.sx[i] * self.sy[j] * self.wx[k] * self.wy[l];
                    }
                }
            }
        }
        c
    }

    /// Inner evaluation points ordered `(i, j, k, l)` row-major as an
    /// `(nx·ny·nx·ny) x 2` matrix of `(Rx[i,k], Ry[j,l])` pairs.
    pub fn inner_points_flat(&self) -> Array2<f64> {
        let rows = self.nx * self.ny * self.nx * self.ny;
        let mut pts = Array2::zeros((rows, 2));
        let mut row = 0;
        for i in 0..self.nx {
            for j in 0..self.ny {
                for k in 0..self.nx {
                    for l in 0..self.ny {
                        pts[(row, 0)] = self.rx[(i, k)];
                        pts[(row, 1)] = self.ry[(j, l)];
                        row += 1;
                    }
                }
            }
        }
        pts
    }
}

/// Three-dimensional Fredholm operator on a tensor-product grid.
#[derive(Debug, Clone)]
pub struct Fredholm3dAssembly {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// Flattened rank-6 kernel: row `(i,j,k)`, column `(l,m,p)`.
    pub kernel: Array2<f64>,
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
    pub wz: Vec<f64>,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl Fredholm3dAssembly {
    pub fn new(
        kernel: impl Fn(f64, f64, f64, f64, f64, f64) -> f64,
        rule_x: &MappedRule,
        rule_y: &MappedRule,
        rule_z: &MappedRule,
    ) -> Result<Self, OperatorError> {
        let nx = rule_x.mapped_nodes.len();
        let ny = rule_y.mapped_nodes.len();
        let nz = rule_z.mapped_nodes.len();
        let n = nx * ny * nz;
        let mut kmat = Array2::zeros((n, n));
        for (row, (xi, yj, zk)) in grid_iter_3d(
            &rule_x.mapped_nodes,
            &rule_y.mapped_nodes,
            &rule_z.mapped_nodes,
        )
        .enumerate()
        {
            for (col, (sl, tm, rp)) in grid_iter_3d(
                &rule_x.mapped_nodes,
                &rule_y.mapped_nodes,
                &rule_z.mapped_nodes,
            )
            .enumerate()
            {
                let v = kernel(xi, yj, zk, sl, tm, rp);
                if !v.is_finite() {
                    return Err(OperatorError::NonFiniteKernel { x: xi, t: sl });
                }
                kmat[(row, col)] = v;
            }
        }
        Ok(Fredholm3dAssembly {
            nx,
            ny,
            nz,
            x: rule_x.mapped_nodes.clone(),
            y: rule_y.mapped_nodes.clone(),
            z: rule_z.mapped_nodes.clone(),
            kernel: kmat,
            wx: rule_x.base.weights.clone(),
            wy: rule_y.base.weights.clone(),
            wz: rule_z.base.weights.clone(),
            sx: rule_x.scale,
            sy: rule_y.scale,
            sz: rule_z.scale,
        })
    }

    /// Applies to `u` flattened row-major over `(x, y, z)`.
    pub fn apply(&self, u_flat: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let n = self.nx * self.ny * self.nz;
        if u_flat.len() != n {
            return Err(OperatorError::LengthMismatch { expected: n, got: u_flat.len() });
        }
        let mut out = vec![0.0; n];
        let s = self.sx * self.sy * self.sz;
        for row in 0..n {
            let mut acc = 0.0;
            let mut col = 0;
            for l in 0..self.nx {
                for m in 0..self.ny {
                    for p in 0..self.nz {
                        acc += self.kernel[(row, col)]
                            * u_flat[col]
                            * self.wx[l]
                            * self.wy[m]
                            * self.wz[p];
                        col += 1;
                    }
                }
            }
            out[row] = s * acc;
        }
        Ok(out)
    }

    /// Flattened constant operator matrix: `I_flat = C · u_flat`.
    pub fn operator_matrix(&self) -> Array2<f64> {
        let n = self.nx * self.ny * self.nz;
        let mut c = self.kernel.clone();
        let s = self.sx * self.sy * self.sz;
        for row in 0..n {
            let mut col = 0;
            for l in 0..self.nx {
                for m in 0..self.ny {
                    for p in 0..self.nz {
                        c[(row, col)] *= s * self.wx[l] * self.wy[m] * self.wz[p];
                        col += 1;
                    }
                }
            }
        }
        c
    }

    /// Grid points `(x_i, y_j, z_k)` flattened row-major to `n x 3`.
    pub fn grid_points(&self) -> Array2<f64> {
        let n = self.nx * self.ny * self.nz;
        let mut pts = Array2::zeros((n, 3));
        for (row, (xi, yj, zk)) in grid_iter_3d(&self.x, &self.y, &self.z).enumerate() {
            pts[(row, 0)] = xi;
            pts[(row, 1)] = yj;
            pts[(row, 2)] = zk;
        }
        pts
    }
}

/// Tensor-product grid `(x_i, y_j)` flattened row-major to `(nx·ny) x 2`.
pub fn grid_2d(x: &[f64], y: &[f64]) -> Array2<f64> {
    let mut pts = Array2::zeros((x.len() * y.len(), 2));
    let mut row = 0;
    for &xi in x {
        for &yj in y {
            pts[(row, 0)] = xi;
            pts[(row, 1)] = yj;
            row += 1;
        }
    }
    pts
}

fn grid_iter_3d<'a>(
    x: &'a [f64],
    y: &'a [f64],
    z: &'a [f64],
) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    x.iter().flat_map(move |&xi| {
        y.iter()
            .flat_map(move |&yj| z.iter().map(move |&zk| (xi, yj, zk)))
    })
}
