use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sm::SmField;
use crate::tensor::{inner_product_tensor, DecomposeOptions, Decomposer, SymTensorField};
use crate::transform::{FanBeamData, RayTransform};

/// Output of a solve or of the first-integral pipeline.
#[derive(Clone, Debug)]
pub enum Solution<T> {
    Tensor(SymTensorField<T>),
    Sm(SmField<T>),
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionReport<T> {
    pub iterations: usize,
    /// Relative residual `|N h - target| / |target|` after each iteration.
    pub residual_history: Vec<f64>,
    #[serde(skip)]
    pub solution: Solution<T>,
    pub error_vs_truth: Option<f64>,
    /// `|X f| / |f|` over unflagged interior samples (first integrals only).
    pub invariance_norm: Option<f64>,
    pub converged: bool,
    /// The residual plateaued above ten times the tolerance.
    pub stagnated: bool,
    /// Named diagnostics specific to the producing operation.
    pub diagnostics: Vec<(String, f64)>,
}

impl<T: Real> ReconstructionReport<T> {
    pub fn tensor(&self) -> Option<&SymTensorField<T>> {
        match &self.solution {
            Solution::Tensor(u) => Some(u),
            Solution::Sm(_) => None,
        }
    }

    pub fn sm(&self) -> Option<&SmField<T>> {
        match &self.solution {
            Solution::Sm(f) => Some(f),
            Solution::Tensor(_) => None,
        }
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Gaussian smoothing width of the target in grid spacings (`None` disables).
    pub mollify: Option<f64>,
    /// Tolerance of the solenoidal projections applied to every iterate.
    pub projection_tol: f64,
    /// Smoothing of the boundary data along beta, in beta cells, before the
    /// invariant extension in the first-integral pipeline (`None` disables).
    pub data_smoothing: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-4, max_iter: 100, mollify: None, projection_tol: 1e-8, data_smoothing: Some(2.0) }
    }
}

impl SolveOptions {
    /// Settings for the first-integral pipeline, which picks its own
    /// iterate and only needs the Krylov space to be rich enough.
    pub fn first_integral() -> Self {
        SolveOptions { tol: 1e-3, ..Default::default() }
    }
}

/// `N u = I_m* I_m u`.
pub fn normal_operator<T: Real>(transform: &RayTransform<T>, u: &SymTensorField<T>) -> Result<SymTensorField<T>> {
    transform.normal(u)
}

/// Separable Gaussian smoothing of each component with standard deviation
/// `width * h`, truncated at three deviations. Values outside the disk are
/// re-extended afterwards.
pub fn mollify<T: Real>(u: &SymTensorField<T>, width: f64) -> SymTensorField<T> {
    let grid = u.grid();
    let n = grid.side();
    let reach = (3.0 * width).ceil() as isize;
    let kernel: Vec<f64> = (-reach..=reach).map(|k| (-0.5 * (k as f64 / width).powi(2)).exp()).collect();
    let norm: f64 = kernel.iter().sum();
    let kernel: Vec<T> = kernel.iter().map(|&k| T::lit(k / norm)).collect();
    let pass = |v: &[T], stride: usize, step: usize| -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        for line in 0..n {
            for i in 0..n {
                let mut acc = T::zero();
                for (o, &w) in kernel.iter().enumerate() {
                    let j = (i as isize + o as isize - reach).clamp(0, n as isize - 1) as usize;
                    acc += w * v[line * stride + j * step];
                }
                out[line * stride + i * step] = acc;
            }
        }
        out
    };
    let comps = u.components().iter().map(|c| pass(&pass(c, n, 1), 1, n)).collect();
    let mut out = SymTensorField::new(grid.clone(), u.rank(), comps).expect("same layout");
    out.extend_outside();
    out
}

/// Iterate projector onto solenoidal tensors (identity for functions).
struct Projector<T: Real> {
    dec: Option<Decomposer<T>>,
    opts: DecomposeOptions,
}

impl<T: Real> Projector<T> {
    fn new(transform: &RayTransform<T>, rank: usize, tol: f64) -> Result<Self> {
        let dec = if rank == 0 { None } else { Some(Decomposer::new(transform.metric(), transform.grid().clone(), rank)?) };
        Ok(Projector { dec, opts: DecomposeOptions { tol, max_iter: None } })
    }

    fn apply(&self, u: SymTensorField<T>) -> Result<SymTensorField<T>> {
        match &self.dec {
            None => Ok(u),
            Some(d) => Ok(d.decompose(&u, &self.opts)?.v_s),
        }
    }
}

/// State of a finished minimal-residual run, from which every intermediate
/// iterate can be rebuilt.
pub(crate) struct KrylovRun<T: Real> {
    proj: Projector<T>,
    zero: SymTensorField<T>,
    basis: Vec<SymTensorField<T>>,
    /// Columns of the Hessenberg matrix after the Givens rotations.
    hess: Vec<Vec<f64>>,
    g: Vec<f64>,
    pub(crate) bnorm: f64,
    pub(crate) history: Vec<f64>,
    pub(crate) iterations: usize,
    pub(crate) converged: bool,
    pub(crate) stagnated: bool,
}

impl<T: Real> KrylovRun<T> {
    /// Number of iterates that can be rebuilt.
    pub(crate) fn len(&self) -> usize {
        self.hess.len()
    }

    /// The minimal-residual iterate after `k` steps, projected solenoidal.
    pub(crate) fn iterate(&self, k: usize) -> Result<SymTensorField<T>> {
        let k = k.min(self.hess.len());
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = self.g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                acc -= self.hess[l][i] * yl;
            }
            y[i] = if self.hess[i][i] == 0.0 { 0.0 } else { acc / self.hess[i][i] };
        }
        let mut x = self.zero.clone();
        for (v, &yi) in self.basis.iter().zip(&y) {
            x = x.axpy(T::lit(yi), v)?;
        }
        self.proj.apply(x)
    }
}

pub(crate) fn krylov_run<T: Real>(
    transform: &RayTransform<T>,
    target: &SymTensorField<T>,
    opts: &SolveOptions,
) -> Result<KrylovRun<T>> {
    let metric = *transform.metric();
    let rank = target.rank();
    let proj = Projector::new(transform, rank, opts.projection_tol)?;
    let b = match opts.mollify {
        Some(w) if w > 0.0 => mollify(target, w),
        _ => target.clone(),
    };
    let b = proj.apply(b)?;
    let dot = |a: &SymTensorField<T>, c: &SymTensorField<T>| -> Result<f64> {
        Ok(inner_product_tensor(&metric, a, c)?.as_f64())
    };
    let bnorm = dot(&b, &b)?.sqrt();
    let zero = SymTensorField::zeros(target.grid().clone(), rank)?;
    let mut run = KrylovRun {
        proj,
        zero,
        basis: Vec::new(),
        hess: Vec::new(),
        g: vec![bnorm],
        bnorm,
        history: Vec::new(),
        iterations: 0,
        converged: false,
        stagnated: false,
    };
    if bnorm == 0.0 {
        run.iterations = 1;
        run.history.push(0.0);
        run.converged = true;
        return Ok(run);
    }
    run.basis.push(b.scale(T::lit(1.0 / bnorm)));
    let mut rot: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_at = 0usize;
    while run.iterations < opts.max_iter {
        run.iterations += 1;
        let j = run.iterations - 1;
        let mut w = run.proj.apply(transform.normal(&run.basis[j])?)?;
        let mut col = Vec::with_capacity(j + 2);
        for v in &run.basis {
            let c = dot(&w, v)?;
            w = w.axpy(T::lit(-c), v)?;
            col.push(c);
        }
        let wn = dot(&w, &w)?.sqrt();
        col.push(wn);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let (a, b) = (col[j], col[j + 1]);
        let rho = a.hypot(b);
        let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
        col[j] = rho;
        col[j + 1] = 0.0;
        rot.push((c, s));
        let gj = run.g[j];
        run.g.push(-s * gj);
        run.g[j] = c * gj;
        run.hess.push(col);
        let rel = run.g[j + 1].abs() / bnorm;
        run.history.push(rel);
        if !rel.is_finite() {
            return Err(Error::SolverDivergence { iterations: run.iterations, residual: rel });
        }
        if rel <= opts.tol || wn <= 1e-14 * bnorm {
            run.converged = rel <= opts.tol;
            break;
        }
        if rel < 0.99 * best {
            best = rel;
            best_at = run.iterations;
        } else if run.iterations - best_at >= 20 && rel > 10.0 * opts.tol {
            run.stagnated = true;
            break;
        }
        run.basis.push(w.scale(T::lit(1.0 / wn)));
    }
    Ok(run)
}

/// Minimal-residual Krylov solve of `N h = target` over solenoidal tensors.
/// The target and every Krylov vector are projected onto the solenoidal
/// subspace, which removes the potential null space of `N`. Orthogonalization
/// uses the tensor inner product, so the recorded relative residuals never
/// increase.
pub fn solve_normal<T: Real>(
    transform: &RayTransform<T>,
    target: &SymTensorField<T>,
    opts: &SolveOptions,
) -> Result<ReconstructionReport<T>> {
    let run = krylov_run(transform, target, opts)?;
    let x = run.iterate(run.len())?;
    let mut out = report(x, run.iterations, run.history, run.converged, run.stagnated);
    if run.bnorm > 0.0 {
        out.diagnostics.push(("target_norm".into(), run.bnorm));
    }
    Ok(out)
}

fn report<T: Real>(
    x: SymTensorField<T>,
    iterations: usize,
    residual_history: Vec<f64>,
    converged: bool,
    stagnated: bool,
) -> ReconstructionReport<T> {
    ReconstructionReport {
        iterations,
        residual_history,
        solution: Solution::Tensor(x),
        error_vs_truth: None,
        invariance_norm: None,
        converged,
        stagnated,
        diagnostics: Vec::new(),
    }
}

/// Recovers the solenoidal part of `v` from `data = I_m v` by solving
/// `N v = I_m* data`.
pub fn reconstruct_from_data<T: Real>(
    transform: &RayTransform<T>,
    data: &FanBeamData<T>,
    rank: usize,
    opts: &SolveOptions,
) -> Result<ReconstructionReport<T>> {
    let rhs = transform.adjoint_im(data, rank)?;
    solve_normal(transform, &rhs, opts)
}
