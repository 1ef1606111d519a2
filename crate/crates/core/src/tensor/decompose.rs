use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::grid::DiskGrid;
use crate::krylov::{pcg, Csr};
use crate::scalar::Real;
use crate::tensor::{multiplicities, SymTensorField};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecompositionResiduals {
    /// `|delta_h v_s| / |v|` for the discrete divergence paired with the solver's `d_h`.
    pub div_norm: f64,
    /// Largest `|p|` on the unit circle relative to the largest `|p|` on the mask.
    pub boundary_norm: f64,
    /// `|v - v_s - d_h p| / |v|`.
    pub recomposition_norm: f64,
    pub iterations: usize,
}

/// `v = v_s + d p` with `p = 0` on the boundary.
#[derive(Clone, Debug)]
pub struct PotentialPair<T> {
    pub v_s: SymTensorField<T>,
    pub p: SymTensorField<T>,
    pub residuals: DecompositionResiduals,
}

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    pub tol: f64,
    /// Defaults to `10 * sqrt(unknowns)`.
    pub max_iter: Option<usize>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { tol: 1e-8, max_iter: None }
    }
}

/// Discrete symmetric derivative `d_h` acting on potentials of rank `m - 1`
/// that vanish on the circle, together with its weighted transpose
/// `delta_h = -W^-1 d_h^T W`.
///
/// The disk is triangulated by the grid cells: masked nodes plus one vertex on
/// the circle for every outside node touching a cell with a masked corner
/// (its radial projection). Derivatives are the lumped-mass gradient of the
/// piecewise-linear interpolant, so `delta_h` is the weak divergence and stays
/// consistent next to the boundary. Values for the circle vertices are read
/// from (and written to) the matching outside nodes.
pub struct Decomposer<T: Real> {
    grid: Arc<DiskGrid<T>>,
    rank: usize,
    /// Grid node of each vertex; the first `unknowns` are the masked nodes.
    vnode: Vec<usize>,
    unknowns: usize,
    d: Csr<T>,
    w_in: Vec<T>,
    w_out: Vec<T>,
}

struct Mesh {
    vnode: Vec<usize>,
    unknowns: usize,
    mass: Vec<f64>,
    /// Per vertex: `(unknown vertex, gradient weight)`.
    grad: Vec<Vec<(usize, [f64; 2])>>,
    pos: Vec<[f64; 2]>,
}

impl Mesh {
    fn build<T: Real>(grid: &DiskGrid<T>) -> Mesh {
        let n = grid.side();
        let mut vid = vec![usize::MAX; grid.len()];
        let mut vnode = Vec::new();
        let mut pos = Vec::new();
        let xy = |k: usize| -> [f64; 2] {
            let (x, y) = grid.xy(k);
            [x.as_f64(), y.as_f64()]
        };
        for k in grid.inside_nodes() {
            vid[k] = vnode.len();
            vnode.push(k);
            pos.push(xy(k));
        }
        let unknowns = vnode.len();
        let corners = |i: usize, j: usize| [grid.index(i, j), grid.index(i + 1, j), grid.index(i + 1, j + 1), grid.index(i, j + 1)];
        let mut tris: Vec<[usize; 3]> = Vec::new();
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let c = corners(i, j);
                let ins = c.iter().filter(|&&k| grid.is_inside(k)).count();
                if ins == 0 {
                    continue;
                }
                for &k in &c {
                    if vid[k] == usize::MAX {
                        let [x, y] = xy(k);
                        let r = x.hypot(y);
                        vid[k] = vnode.len();
                        vnode.push(k);
                        pos.push([x / r, y / r]);
                    }
                }
                let v = c.map(|k| vid[k]);
                if ins == 4 {
                    tris.push([v[0], v[1], v[2]]);
                    tris.push([v[0], v[2], v[3]]);
                } else {
                    let s = c.iter().position(|&k| grid.is_inside(k)).unwrap();
                    for t in 1..3 {
                        tris.push([v[s], v[(s + t) % 4], v[(s + t + 1) % 4]]);
                    }
                }
            }
        }
        let h = grid.h().as_f64();
        let mut mass = vec![0.0; vnode.len()];
        let mut grad: Vec<Vec<(usize, [f64; 2])>> = vec![Vec::new(); vnode.len()];
        for t in &tris {
            let [a, b, c] = t.map(|v| pos[v]);
            let twice = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if twice <= 1e-12 * h * h {
                // degenerate or folded corner triangle
                continue;
            }
            let area = 0.5 * twice;
            let basis = [
                [(b[1] - c[1]) / twice, (c[0] - b[0]) / twice],
                [(c[1] - a[1]) / twice, (a[0] - c[0]) / twice],
                [(a[1] - b[1]) / twice, (b[0] - a[0]) / twice],
            ];
            for &r in t {
                mass[r] += area / 3.0;
                for (q, &s) in t.iter().enumerate() {
                    if s < unknowns {
                        grad[r].push((s, [basis[q][0] * area / 3.0, basis[q][1] * area / 3.0]));
                    }
                }
            }
        }
        for (r, g) in grad.iter_mut().enumerate() {
            for e in g.iter_mut() {
                e.1 = [e.1[0] / mass[r], e.1[1] / mass[r]];
            }
        }
        Mesh { vnode, unknowns, mass, grad, pos }
    }
}

impl<T: Real> Decomposer<T> {
    /// Decomposition of rank-`rank` fields (1 or 2).
    pub fn new(metric: &ConformalMetric<T>, grid: Arc<DiskGrid<T>>, rank: usize) -> Result<Self> {
        if !(rank == 1 || rank == 2) {
            return Err(Error::UnsupportedRank(rank));
        }
        let mesh = Mesh::build(&grid);
        let ni = rank; // components of p
        let no = rank + 1;
        let nv = mesh.vnode.len();
        let mut rows = Vec::with_capacity(nv * no);
        let mut w_in = Vec::with_capacity(mesh.unknowns * ni);
        let mut w_out = Vec::with_capacity(nv * no);
        let (mult_in, mult_out) = (multiplicities(rank - 1), multiplicities(rank));
        let weight = |area: f64, l: T, r: usize, m: usize| {
            T::lit(area) * ((T::lit(2.0) - T::from_usize_lossy(2 * r)) * l).exp() * T::from_usize_lossy(m)
        };
        for r in 0..nv {
            let [x1, x2] = mesh.pos[r];
            let (l, g) = metric.lambda_grad(T::lit(x1), T::lit(x2));
            if r < mesh.unknowns {
                for &m in mult_in {
                    w_in.push(weight(mesh.mass[r], l, rank - 1, m));
                }
            }
            for &m in mult_out {
                w_out.push(weight(mesh.mass[r], l, rank, m));
            }
            let on = |axis: usize, c: usize, f: T| -> Vec<(usize, T)> {
                mesh.grad[r].iter().map(|&(s, w)| (s * ni + c, T::lit(w[axis]) * f)).collect()
            };
            if rank == 1 {
                rows.push(on(0, 0, T::one()));
                rows.push(on(1, 0, T::one()));
            } else {
                let [l1, l2] = g;
                let half = T::lit(0.5);
                let mut r11 = on(0, 0, T::one());
                let mut r12 = on(1, 0, half);
                r12.extend(on(0, 1, half));
                let mut r22 = on(1, 1, T::one());
                if r < mesh.unknowns {
                    r11.push((r * ni, -l1));
                    r11.push((r * ni + 1, l2));
                    r12.push((r * ni, -l2));
                    r12.push((r * ni + 1, -l1));
                    r22.push((r * ni, l1));
                    r22.push((r * ni + 1, -l2));
                }
                rows.push(r11);
                rows.push(r12);
                rows.push(r22);
            }
        }
        let d = Csr::from_rows(mesh.unknowns * ni, rows);
        Ok(Decomposer { grid, rank, vnode: mesh.vnode, unknowns: mesh.unknowns, d, w_in, w_out })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Values at the first `count` vertices, component-major within a vertex.
    fn gather(&self, u: &SymTensorField<T>, count: usize) -> Vec<T> {
        let nc = u.rank() + 1;
        let mut out = Vec::with_capacity(count * nc);
        for &n in &self.vnode[..count] {
            for c in 0..nc {
                out.push(u.component(c)[n]);
            }
        }
        out
    }

    /// Field from vertex values: masked nodes are written and extended, then
    /// any circle-vertex values overwrite their outside nodes.
    fn scatter(&self, x: &[T], rank: usize) -> SymTensorField<T> {
        let nc = rank + 1;
        let count = x.len() / nc;
        let mut comps = vec![vec![T::zero(); self.grid.len()]; nc];
        for (k, &n) in self.vnode[..self.unknowns].iter().enumerate() {
            for (c, comp) in comps.iter_mut().enumerate() {
                comp[n] = x[k * nc + c];
            }
        }
        let mut f = SymTensorField::new(self.grid.clone(), rank, comps).expect("consistent layout");
        f.extend_outside();
        if count > self.unknowns {
            let comps = f.components_mut();
            for (k, &n) in self.vnode.iter().enumerate().skip(self.unknowns) {
                for (c, comp) in comps.iter_mut().enumerate() {
                    comp[n] = x[k * nc + c];
                }
            }
        }
        f
    }

    fn check(&self, u: &SymTensorField<T>, rank: usize) -> Result<()> {
        if u.rank() != rank {
            return Err(Error::UnsupportedRank(u.rank()));
        }
        if u.grid().nx() != self.grid.nx() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `d_h p` (values of `p` on the circle are taken to be zero).
    pub fn d(&self, p: &SymTensorField<T>) -> Result<SymTensorField<T>> {
        self.check(p, self.rank - 1)?;
        Ok(self.scatter(&self.d.matvec(&self.gather(p, self.unknowns)), self.rank))
    }

    /// `delta_h u = -W^-1 d_h^T W u`, the negative weighted transpose of `d_h`.
    pub fn div(&self, u: &SymTensorField<T>) -> Result<SymTensorField<T>> {
        self.check(u, self.rank)?;
        Ok(self.scatter(&self.div_vec(&self.gather(u, self.vnode.len())), self.rank - 1))
    }

    fn div_vec(&self, u: &[T]) -> Vec<T> {
        let wu: Vec<T> = u.iter().zip(&self.w_out).map(|(&a, &w)| a * w).collect();
        self.d
            .matvec_transpose(&wu)
            .into_iter()
            .zip(&self.w_in)
            .map(|(a, &w)| -a / w)
            .collect()
    }

    fn norm_in(&self, x: &[T]) -> T {
        x.iter().zip(&self.w_in).fold(T::zero(), |a, (&v, &w)| a + w * v * v).sqrt()
    }

    fn norm_out(&self, x: &[T]) -> T {
        x.iter().zip(&self.w_out).fold(T::zero(), |a, (&v, &w)| a + w * v * v).sqrt()
    }

    /// Inner product of two rank-`m` fields in which the decomposition is an
    /// orthogonal projection.
    pub fn inner_product(&self, a: &SymTensorField<T>, b: &SymTensorField<T>) -> Result<T> {
        self.check(a, self.rank)?;
        self.check(b, self.rank)?;
        let (x, y) = (self.gather(a, self.vnode.len()), self.gather(b, self.vnode.len()));
        Ok(x.iter().zip(&y).zip(&self.w_out).fold(T::zero(), |acc, ((&p, &q), &w)| acc + w * p * q))
    }

    /// `|delta_h u|` in the weighted norm of rank `m - 1`.
    pub fn div_norm(&self, u: &SymTensorField<T>) -> Result<T> {
        self.check(u, self.rank)?;
        Ok(self.norm_in(&self.div_vec(&self.gather(u, self.vnode.len()))))
    }

    pub fn decompose(&self, v: &SymTensorField<T>, opts: &DecomposeOptions) -> Result<PotentialPair<T>> {
        self.check(v, self.rank)?;
        let vv = self.gather(v, self.vnode.len());
        let vnorm = self.norm_out(&vv);
        let wv: Vec<T> = vv.iter().zip(&self.w_out).map(|(&a, &w)| a * w).collect();
        let b = self.d.matvec_transpose(&wv);
        let apply = |x: &[T]| {
            let y: Vec<T> = self.d.matvec(x).into_iter().zip(&self.w_out).map(|(a, &w)| a * w).collect();
            self.d.matvec_transpose(&y)
        };
        let inv_diag: Vec<T> = self
            .d
            .normal_diagonal(&self.w_out)
            .into_iter()
            .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
            .collect();
        // the residual is -W delta_h v_s, so its W^-1 norm is |delta_h v_s|
        let measure = |r: &[T]| r.iter().zip(&self.w_in).fold(T::zero(), |a, (&v, &w)| a + v * v / w).sqrt();
        let max_iter = opts
            .max_iter
            .unwrap_or_else(|| (10.0 * (b.len() as f64).sqrt()).ceil() as usize);
        let target = T::lit(opts.tol) * vnorm;
        let out = pcg(apply, &inv_diag, &b, target, max_iter, measure);
        let final_div = *out.history.last().unwrap();
        if !out.converged {
            return Err(Error::SolverDivergence {
                iterations: out.iterations,
                residual: if vnorm > T::zero() { (final_div / vnorm).as_f64() } else { final_div.as_f64() },
            });
        }
        let dp = self.d.matvec(&out.x);
        let vs: Vec<T> = vv.iter().zip(&dp).map(|(&a, &b)| a - b).collect();
        let p = self.scatter(&out.x, self.rank - 1);
        let v_s = self.scatter(&vs, self.rank);

        let recomposed: Vec<T> = vv.iter().zip(&vs).zip(&dp).map(|((&a, &s), &d)| a - s - d).collect();
        let rel = |x: T| if vnorm > T::zero() { (x / vnorm).as_f64() } else { x.as_f64() };
        let div_norm = rel(self.norm_in(&self.div_vec(&vs)));
        let recomposition_norm = rel(self.norm_out(&recomposed));
        let boundary_norm = boundary_ratio(&p);
        Ok(PotentialPair {
            v_s,
            p,
            residuals: DecompositionResiduals { div_norm, boundary_norm, recomposition_norm, iterations: out.iterations },
        })
    }
}

fn boundary_ratio<T: Real>(p: &SymTensorField<T>) -> f64 {
    let inner = p.max_abs().as_f64();
    if inner == 0.0 {
        return 0.0;
    }
    let grid = p.grid();
    let mut edge = 0.0f64;
    for i in 0..256 {
        let b = T::two_pi() * T::from_usize_lossy(i) / T::lit(256.0);
        let st = grid.interp_stencil(b.cos(), b.sin());
        for comp in p.components() {
            edge = edge.max(grid.apply_interp(&st, comp, 1, 0).abs().as_f64());
        }
    }
    edge / inner
}

/// One-shot decomposition of a rank 1 or 2 field.
pub fn solenoidal_decompose<T: Real>(
    metric: &ConformalMetric<T>,
    v: &SymTensorField<T>,
    opts: &DecomposeOptions,
) -> Result<PotentialPair<T>> {
    Decomposer::new(metric, v.grid().clone(), v.rank())?.decompose(v, opts)
}
