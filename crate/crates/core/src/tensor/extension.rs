//! Solenoidal extension of a 1-form across the unit circle.
//!
//! Outside the disk the metric is Euclidean, so extending a solenoidal `u` to
//! the annulus `1 <= r <= R` amounts to the Neumann problem
//! `Δw = 0`, `∂_r w = u·ν` at `r = 1`, `∂_r w = 0` at `r = R`, and gluing `dw`
//! to `u`. The normal component is then continuous across the circle and the
//! glued field is weakly divergence free. Constants are the only kernel, so
//! `w` is normalised to zero mean, and solvability needs zero net flux.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;
use crate::tensor::{boundary_flux, SymTensorField};

#[derive(Clone, Copy, Debug)]
pub struct ExtensionOptions {
    /// Outer radius `R` of the annulus, in `(1, 1.5]`.
    pub radius: f64,
    /// Boundary samples used for the flux.
    pub nbeta: usize,
    /// Chebyshev–Lobatto points across the annulus.
    pub nradial: usize,
    /// Allowed net flux relative to `max(∮ |u·ν|, 1)`.
    pub flux_tol: f64,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions { radius: 1.25, nbeta: 128, nradial: 32, flux_tol: 1e-6 }
    }
}

/// Harmonic potential on the annulus as a Fourier series in the angle whose
/// radial profiles are sampled at Chebyshev–Lobatto points.
#[derive(Clone, Debug)]
pub struct AnnulusPotential {
    radius: f64,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    /// `(degree, cos profile, sin profile, their r-derivatives)`.
    modes: Vec<Mode>,
}

#[derive(Clone, Debug)]
struct Mode {
    k: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    dcos: Vec<f64>,
    dsin: Vec<f64>,
}

impl AnnulusPotential {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Barycentric interpolation of the sampled profiles at `r`.
    fn weights_at(&self, r: f64) -> Vec<f64> {
        let mut w = vec![0.0; self.nodes.len()];
        if let Some(j) = self.nodes.iter().position(|&x| (x - r).abs() < 1e-14) {
            w[j] = 1.0;
            return w;
        }
        let mut total = 0.0;
        for (j, (&x, &b)) in self.nodes.iter().zip(&self.bary).enumerate() {
            w[j] = b / (r - x);
            total += w[j];
        }
        w.iter_mut().for_each(|v| *v /= total);
        w
    }

    /// `(w, ∂_r w, ∂_φ w)` at polar coordinates `(r, φ)`.
    fn jet(&self, r: f64, phi: f64) -> (f64, f64, f64) {
        let wts = self.weights_at(r);
        let dot = |v: &[f64]| v.iter().zip(&wts).map(|(a, b)| a * b).sum::<f64>();
        let (mut w, mut wr, mut wp) = (0.0, 0.0, 0.0);
        for m in &self.modes {
            let (s, c) = (m.k as f64 * phi).sin_cos();
            let (a, b) = (dot(&m.cos), dot(&m.sin));
            w += a * c + b * s;
            wr += dot(&m.dcos) * c + dot(&m.dsin) * s;
            wp += m.k as f64 * (b * c - a * s);
        }
        (w, wr, wp)
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        self.jet(x1.hypot(x2), x2.atan2(x1)).0
    }

    /// Cartesian components of `dw`.
    pub fn gradient(&self, x1: f64, x2: f64) -> [f64; 2] {
        let r = x1.hypot(x2);
        let phi = x2.atan2(x1);
        let (_, wr, wp) = self.jet(r, phi);
        let (s, c) = phi.sin_cos();
        let wt = wp / r;
        [wr * c - wt * s, wr * s + wt * c]
    }
}

/// `u` on the disk glued to `dw` on the annulus.
#[derive(Clone, Debug)]
pub struct SolenoidalExtension<T: Real> {
    pub inner: SymTensorField<T>,
    pub outer: AnnulusPotential,
    /// Net boundary flux `∮ u·ν` that was discarded.
    pub net_flux: f64,
}

impl<T: Real> SolenoidalExtension<T> {
    pub fn radius(&self) -> f64 {
        self.outer.radius
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Result<[f64; 2]> {
        let r = x1.hypot(x2);
        if r > self.outer.radius + 1e-12 {
            return Err(Error::OutOfDomain { x1, x2 });
        }
        if r <= 1.0 {
            let g = self.inner.grid();
            let st = g.interp_stencil(T::lit(x1), T::lit(x2));
            let c = self.inner.components();
            Ok([g.apply_interp(&st, &c[0], 1, 0).as_f64(), g.apply_interp(&st, &c[1], 1, 0).as_f64()])
        } else {
            Ok(self.outer.gradient(x1, x2))
        }
    }

    /// Largest `|∫ U·∇ψ| / (‖U‖ ‖∇ψ‖)` over smooth test functions supported
    /// in the open ball of radius `R` and nonzero across the circle.
    pub fn weak_divergence_residual(&self) -> f64 {
        let big_r = self.outer.radius;
        let top = 1.0 + 0.75 * (big_r - 1.0);
        let cut = |r: f64| -> (f64, f64) {
            // 1 on r <= 1/2, quintic roll-off to 0 at `top`
            let w = top - 0.5;
            let t = ((r - 0.5) / w).clamp(0.0, 1.0);
            let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
            let ds = if t > 0.0 && t < 1.0 { 30.0 * t * t * (1.0 - t) * (1.0 - t) / w } else { 0.0 };
            (1.0 - s, -ds)
        };
        // ψ = χ(r) r^k trig(kφ)
        let tests: Vec<(usize, bool)> = (0..4).flat_map(|k| [(k, false), (k, true)]).filter(|&(k, s)| !(k == 0 && s)).collect();
        let nphi = 256;
        let (gx, gw) = gauss_legendre(48);
        let panels = [(0.0, 1.0), (1.0, big_r)];
        let mut flux = vec![0.0; tests.len()];
        let mut grad_sq = vec![0.0; tests.len()];
        let mut u_sq = 0.0;
        for &(a, b) in &panels {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (&xq, &wq) in gx.iter().zip(&gw) {
                let r = mid + half * xq;
                for i in 0..nphi {
                    let phi = std::f64::consts::TAU * i as f64 / nphi as f64;
                    let (s, c) = phi.sin_cos();
                    let (x1, x2) = (r * c, r * s);
                    let u = if b <= 1.0 {
                        let g = self.inner.grid();
                        let st = g.interp_stencil(T::lit(x1), T::lit(x2));
                        let comp = self.inner.components();
                        [g.apply_interp(&st, &comp[0], 1, 0).as_f64(), g.apply_interp(&st, &comp[1], 1, 0).as_f64()]
                    } else {
                        self.outer.gradient(x1, x2)
                    };
                    let da = wq * half * r * std::f64::consts::TAU / nphi as f64;
                    u_sq += da * (u[0] * u[0] + u[1] * u[1]);
                    let (chi, dchi) = cut(r);
                    for (t, &(k, sine)) in tests.iter().enumerate() {
                        let kf = k as f64;
                        let (sk, ck) = (kf * phi).sin_cos();
                        let (trig, dtrig) = if sine { (sk, kf * ck) } else { (ck, -kf * sk) };
                        let rk = r.powi(k as i32);
                        let drk = if k == 0 { 0.0 } else { kf * r.powi(k as i32 - 1) };
                        // radial and angular parts of ∇ψ
                        let pr = (dchi * rk + chi * drk) * trig;
                        let pt = chi * rk * dtrig / r;
                        let gpsi = [pr * c - pt * s, pr * s + pt * c];
                        flux[t] += da * (u[0] * gpsi[0] + u[1] * gpsi[1]);
                        grad_sq[t] += da * (gpsi[0] * gpsi[0] + gpsi[1] * gpsi[1]);
                    }
                }
            }
        }
        let un = u_sq.sqrt();
        if un == 0.0 {
            return 0.0;
        }
        flux.iter().zip(&grad_sq).map(|(f, g)| f.abs() / (un * g.sqrt())).fold(0.0, f64::max)
    }
}

/// Chebyshev–Lobatto points on `[1, R]` with the differentiation matrix.
fn chebyshev(n: usize, big_r: f64) -> (Vec<f64>, DMatrix<f64>, Vec<f64>) {
    let t: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) * sign(i + j) / (t[i] - t[j]);
            }
        }
        let row: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -row;
    }
    let scale = 2.0 / (big_r - 1.0);
    let r: Vec<f64> = t.iter().map(|&x| 1.0 + 0.5 * (x + 1.0) * (big_r - 1.0)).collect();
    let bary: Vec<f64> = (0..=n).map(|j| sign(j) / c(j)).collect();
    (r, d * scale, bary)
}

/// Extends a solenoidal 1-form on the disk to the disk of radius `R`.
pub fn solenoidal_extension_m1<T: Real>(
    metric: &ConformalMetric<T>,
    u: &SymTensorField<T>,
    opts: &ExtensionOptions,
) -> Result<SolenoidalExtension<T>> {
    if u.rank() != 1 {
        return Err(Error::UnsupportedRank(u.rank()));
    }
    if !(opts.radius > 1.0 && opts.radius <= 1.5) {
        return Err(Error::InvalidParams(format!("annulus radius {} outside (1, 1.5]", opts.radius)));
    }
    if opts.nbeta < 8 || opts.nradial < 4 {
        return Err(Error::InvalidParams("extension needs nbeta >= 8 and nradial >= 4".into()));
    }
    if metric.support_radius().as_f64() >= 1.0 {
        return Err(Error::InvalidParams("metric is not Euclidean on the annulus".into()));
    }
    let flux = boundary_flux(u, opts.nbeta)?;
    let g: Vec<f64> = flux.values[0].iter().map(|v| v.as_f64()).collect();
    let nb = g.len() as f64;
    let net = g.iter().sum::<f64>() / nb * std::f64::consts::TAU;
    let total = g.iter().map(|v| v.abs()).sum::<f64>() / nb * std::f64::consts::TAU;
    if net.abs() > opts.flux_tol * total.max(1.0) {
        return Err(Error::IncompatibleFlux { flux: net });
    }
    let (r, d, bary) = chebyshev(opts.nradial, opts.radius);
    let n = opts.nradial;
    let d2 = &d * &d;
    let kmax = g.len() / 3;
    let mut modes = Vec::new();
    for k in 1..=kmax {
        let (mut a, mut b) = (0.0, 0.0);
        for (i, &v) in g.iter().enumerate() {
            let (s, c) = (k as f64 * std::f64::consts::TAU * i as f64 / nb).sin_cos();
            a += v * c;
            b += v * s;
        }
        a *= 2.0 / nb;
        b *= 2.0 / nb;
        if a.abs().max(b.abs()) < 1e-15 * total.max(1e-300) {
            continue;
        }
        // r² w'' + r w' - k² w = 0 inside, Neumann rows at both ends
        let mut op = DMatrix::zeros(n + 1, n + 1);
        for i in 1..n {
            for j in 0..=n {
                op[(i, j)] = r[i] * r[i] * d2[(i, j)] + r[i] * d[(i, j)];
            }
            op[(i, i)] -= (k * k) as f64;
        }
        for j in 0..=n {
            op[(0, j)] = d[(0, j)];
            op[(n, j)] = d[(n, j)];
        }
        let lu = op.lu();
        let solve = |inner: f64| -> Result<Vec<f64>> {
            let mut rhs = DVector::zeros(n + 1);
            rhs[n] = inner; // r = 1 sits at the last Lobatto point
            lu.solve(&rhs)
                .map(|x| x.iter().copied().collect())
                .ok_or(Error::SolverDivergence { iterations: 0, residual: f64::INFINITY })
        };
        let cos = solve(a)?;
        let sin = solve(b)?;
        let deriv = |v: &[f64]| -> Vec<f64> { (&d * DVector::from_column_slice(v)).iter().copied().collect() };
        modes.push(Mode { k, dcos: deriv(&cos), dsin: deriv(&sin), cos, sin });
    }
    Ok(SolenoidalExtension {
        inner: u.clone(),
        outer: AnnulusPotential { radius: opts.radius, nodes: r, bary, modes },
        net_flux: net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_metric, MetricParams};
    use crate::grid::DiskGrid;
    use std::sync::Arc;

    fn flat() -> (ConformalMetric<f64>, Arc<DiskGrid<f64>>) {
        (make_metric(MetricParams::euclidean()).unwrap(), Arc::new(DiskGrid::new(33).unwrap()))
    }

    #[test]
    fn constant_field_matches_separated_solution() {
        let (m, g) = flat();
        let u = SymTensorField::from_fn(g, 1, |_, _| [0.0, 1.0, 0.0]).unwrap();
        let ext = solenoidal_extension_m1(&m, &u, &ExtensionOptions::default()).unwrap();
        let big_r: f64 = 1.25;
        let a = -1.0 / (big_r * big_r - 1.0);
        let b = -big_r * big_r / (big_r * big_r - 1.0);
        for &(r, phi) in &[(1.0, 0.3), (1.1, 1.0), (1.2, -2.0), (1.25, 2.5)] {
            let (x, y) = (r * f64::cos(phi), r * f64::sin(phi));
            let want = (a * r + b / r) * f64::sin(phi);
            assert!((ext.outer.value(x, y) - want).abs() < 1e-9, "{r} {phi}");
        }
        assert!(ext.weak_divergence_residual() < 1e-6);
    }

    #[test]
    fn tangent_field_extends_by_zero() {
        let (m, g) = flat();
        let u = SymTensorField::from_fn(g, 1, |x, y| [-y, x, 0.0]).unwrap();
        let ext = solenoidal_extension_m1(&m, &u, &ExtensionOptions::default()).unwrap();
        let w = ext.eval(1.1, 0.2).unwrap();
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_net_flux() {
        let (m, g) = flat();
        let u = SymTensorField::from_fn(g, 1, |x, y| [x, y, 0.0]).unwrap();
        assert!(matches!(
            solenoidal_extension_m1(&m, &u, &ExtensionOptions::default()),
            Err(Error::IncompatibleFlux { .. })
        ));
    }

    #[test]
    fn zero_field_extends_to_zero() {
        let (m, g) = flat();
        let u = SymTensorField::zeros(g, 1).unwrap();
        let ext = solenoidal_extension_m1(&m, &u, &ExtensionOptions::default()).unwrap();
        assert_eq!(ext.eval(1.2, 0.0).unwrap(), [0.0, 0.0]);
        assert_eq!(ext.weak_divergence_residual(), 0.0);
    }
}
