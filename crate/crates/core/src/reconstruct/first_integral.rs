use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::reconstruct::solve::krylov_run;
use crate::reconstruct::{ReconstructionReport, Solution, SolveOptions};
use crate::tolerances as tol;
use crate::scalar::Real;
use crate::sm::{apply_x, fiber_fourier, liouville_weights, signed_degree, truncate_degrees, SmField};
use crate::tensor::{divergence, l_m, norm_tensor, norm_tensor_on, SymTensorField};
use crate::transform::RayTransform;

/// Distance from the circle, in grid spacings, below which nodes are left out
/// of the invariance measure.
const INTERIOR_MARGIN: f64 = 3.0;

/// Residuals of a candidate first integral `f` for the tensor `u`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FirstIntegralCheck {
    /// `|X f| / |f|` over the selected samples.
    pub invariance: f64,
    /// `|L_m f - u| / |u|`.
    pub projection_gap: f64,
    /// `|delta(L_m f)| / |L_m f|` over interior nodes, zero for `m = 0`.
    pub divergence: f64,
    /// `|(X f)_(<= m-1)| / |f|` over the selected samples, zero for `m = 0`.
    pub low_degree_leakage: f64,
}

/// `(node, theta)` samples at least three grid spacings inside the circle.
pub fn interior_samples<T: Real>(f: &SmField<T>) -> Vec<bool> {
    let grid = f.grid();
    let nt = f.ntheta();
    let mut sel = vec![false; grid.len() * nt];
    for node in grid.interior_nodes(T::lit(INTERIOR_MARGIN) * grid.h()) {
        sel[node * nt..(node + 1) * nt].iter_mut().for_each(|s| *s = true);
    }
    sel
}

fn weighted_ratio<T: Real>(metric: &ConformalMetric<T>, num: &SmField<T>, den: &SmField<T>, sel: &[bool]) -> f64 {
    let grid = num.grid();
    let nt = num.ntheta();
    let w = liouville_weights(metric, grid, nt);
    let (mut a, mut b) = (0.0, 0.0);
    for node in grid.inside_nodes() {
        let wn = w[node].as_f64();
        for k in 0..nt {
            let i = node * nt + k;
            if sel[i] {
                a += wn * num.values()[i].as_f64().powi(2);
                b += wn * den.values()[i].as_f64().powi(2);
            }
        }
    }
    if b == 0.0 {
        0.0
    } else {
        (a / b).sqrt()
    }
}

/// Fraction of the fiber energy (over masked nodes) carried by degrees in `range`.
pub fn degree_energy_fraction<T: Real>(f: &SmField<T>, keep: impl Fn(usize) -> bool) -> f64 {
    let e = fiber_fourier(f).energy_by_bin();
    let nt = f.ntheta();
    let total: f64 = e.iter().map(|v| v.as_f64()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let part: f64 = e
        .iter()
        .enumerate()
        .filter(|(j, _)| keep(signed_degree(*j, nt).unsigned_abs()))
        .map(|(_, v)| v.as_f64())
        .sum();
    part / total
}

/// Checks the transport/solenoidal dictionary on `f`: invariance, the gap
/// `L_m f - u`, the divergence of `L_m f` and the low-degree part of `X f`.
/// `select` restricts the invariance measure (default: interior samples).
pub fn verify_first_integral<T: Real>(
    metric: &ConformalMetric<T>,
    f: &SmField<T>,
    u: &SymTensorField<T>,
    select: Option<&[bool]>,
) -> Result<FirstIntegralCheck> {
    if f.grid().nx() != u.grid().nx() {
        return Err(Error::GridMismatch);
    }
    let m = u.rank();
    let xf = apply_x(metric, f);
    let own;
    let sel = match select {
        Some(s) => s,
        None => {
            own = interior_samples(f);
            &own
        }
    };
    let invariance = weighted_ratio(metric, &xf, f, sel);
    let lf = l_m(metric, f, m)?;
    let un = norm_tensor(metric, u).as_f64();
    let gap = norm_tensor(metric, &lf.sub(u)?).as_f64();
    let projection_gap = if un > 0.0 { gap / un } else { gap };
    let divergence = if m == 0 {
        0.0
    } else {
        // Same interior region as the invariance measure.
        let grid = f.grid();
        let mut nodes = vec![false; grid.len()];
        for n in grid.interior_nodes(T::lit(INTERIOR_MARGIN) * grid.h()) {
            nodes[n] = true;
        }
        let ln = norm_tensor_on(metric, &lf, Some(&nodes)).as_f64();
        let dn = norm_tensor_on(metric, &divergence(metric, &lf)?, Some(&nodes)).as_f64();
        if ln > 0.0 {
            dn / ln
        } else {
            dn
        }
    };
    let low_degree_leakage = if m == 0 { 0.0 } else { weighted_ratio(metric, &truncate_degrees(&xf, m - 1), f, sel) };
    Ok(FirstIntegralCheck { invariance, projection_gap, divergence, low_degree_leakage })
}

/// Builds `f` with `X f = 0` and `L_m f ≈ u`: solve `N h = u`, take
/// `phi = I_m h`, optionally smoothed along beta, and return `f = phi#`.
///
/// The exact `h` generally grows at the boundary, and late Krylov iterates
/// resolve that growth at the cost of rough boundary data. Every iterate of
/// the solve is therefore turned into a candidate `f`, and the one with the
/// smallest `gap / FIRST_INTEGRAL_GAP + invariance / INVARIANCE` is returned.
pub fn construct_first_integral<T: Real>(
    transform: &RayTransform<T>,
    u: &SymTensorField<T>,
    opts: &SolveOptions,
) -> Result<ReconstructionReport<T>> {
    let metric = *transform.metric();
    let m = u.rank();
    let run = krylov_run(transform, u, opts)?;
    let grazing = transform.grazing_mask()?;
    let candidate = |k: usize| -> Result<(SmField<T>, FirstIntegralCheck)> {
        let h = run.iterate(k)?;
        let mut phi = transform.forward_im(&h)?;
        if let Some(w) = opts.data_smoothing {
            phi = phi.smooth_beta(w);
        }
        let f = transform.backproject(&phi)?;
        let mut sel = interior_samples(&f);
        for (s, &g) in sel.iter_mut().zip(grazing) {
            *s &= !g;
        }
        let check = verify_first_integral(&metric, &f, u, Some(&sel))?;
        Ok((f, check))
    };
    let score = |c: &FirstIntegralCheck| c.projection_gap / tol::FIRST_INTEGRAL_GAP + c.invariance / tol::INVARIANCE;
    let mut best_k = run.len().min(1);
    let mut best = candidate(best_k)?;
    for k in 2..=run.len() {
        // Stop once the candidates have clearly turned worse.
        if k >= best_k + 5 {
            break;
        }
        let next = candidate(k)?;
        if score(&next.1) < score(&best.1) {
            best = next;
            best_k = k;
        }
    }
    let (f, check) = best;
    let tail = degree_energy_fraction(&f, |k| k >= m + 2).sqrt();
    let mut report = ReconstructionReport {
        iterations: run.iterations,
        residual_history: run.history.clone(),
        solution: Solution::Sm(f),
        error_vs_truth: None,
        invariance_norm: Some(check.invariance),
        converged: run.converged,
        stagnated: run.stagnated,
        diagnostics: Vec::new(),
    };
    if run.bnorm > 0.0 {
        report.diagnostics.push(("target_norm".to_string(), run.bnorm));
    }
    report.diagnostics.extend([
        ("selected_iteration".to_string(), best_k as f64),
        ("projection_gap".to_string(), check.projection_gap),
        ("divergence".to_string(), check.divergence),
        ("low_degree_leakage".to_string(), check.low_degree_leakage),
        ("tail_fraction".to_string(), tail),
    ]);
    Ok(report)
}
