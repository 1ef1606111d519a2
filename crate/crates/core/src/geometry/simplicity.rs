use serde::Serialize;

use crate::error::Error;
use crate::geometry::{ConformalMetric, PhasePoint, TraceOptions, Tracer};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplicityCheck {
    NonTrapping,
    NoConjugatePoints,
    ConvexBoundary,
}

/// A ray (or boundary point) that falsifies one of the checks.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Witness {
    pub check: SimplicityCheck,
    pub beta: f64,
    pub alpha: f64,
    /// Arclength of the first Jacobi zero, trap cap, or the offending curvature value.
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplicityReport {
    pub non_trapping: bool,
    pub no_conjugate_points: bool,
    pub convex_boundary: bool,
    pub rays: usize,
    pub max_exit_time: f64,
    /// Smallest `J(t)/t` seen over all rays; positive when no conjugate point was found.
    pub min_jacobi_ratio: f64,
    pub min_boundary_curvature: f64,
    pub witnesses: Vec<Witness>,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        self.non_trapping && self.no_conjugate_points && self.convex_boundary
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimplicityOptions<T> {
    pub nbeta: usize,
    pub nalpha: usize,
    pub boundary_samples: usize,
    pub trace: TraceOptions<T>,
}

impl<T: Real> Default for SimplicityOptions<T> {
    fn default() -> Self {
        SimplicityOptions {
            nbeta: 64,
            nalpha: 64,
            boundary_samples: 256,
            trace: TraceOptions::default(),
        }
    }
}

const MAX_WITNESSES: usize = 16;

pub fn check_simplicity<T: Real>(metric: &ConformalMetric<T>) -> SimplicityReport {
    check_simplicity_with(metric, &SimplicityOptions::default())
}

pub fn check_simplicity_with<T: Real>(metric: &ConformalMetric<T>, opts: &SimplicityOptions<T>) -> SimplicityReport {
    let tracer = Tracer::new(metric, opts.trace);
    let mut report = SimplicityReport {
        non_trapping: true,
        no_conjugate_points: true,
        convex_boundary: true,
        rays: 0,
        max_exit_time: 0.0,
        min_jacobi_ratio: f64::INFINITY,
        min_boundary_curvature: f64::INFINITY,
        witnesses: Vec::new(),
    };
    let push = |report: &mut SimplicityReport, w: Witness| {
        if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(w);
        }
    };

    let pi = std::f64::consts::PI;
    for i in 0..opts.nbeta {
        let beta = 2.0 * pi * i as f64 / opts.nbeta as f64;
        for j in 0..opts.nalpha {
            let alpha = -pi / 2.0 + (j as f64 + 0.5) * pi / opts.nalpha as f64;
            report.rays += 1;
            let start = PhasePoint::from_fan_beam(T::lit(beta), T::lit(alpha));
            match tracer.exit_only(start) {
                Ok(exit) => report.max_exit_time = report.max_exit_time.max(exit.tau.as_f64()),
                Err(Error::TrappedRay { tau_max, .. }) => {
                    report.non_trapping = false;
                    push(&mut report, Witness { check: SimplicityCheck::NonTrapping, beta, alpha, value: tau_max });
                    continue;
                }
                Err(_) => continue,
            }
            let jac = jacobi_scan(metric, start, opts.trace);
            report.min_jacobi_ratio = report.min_jacobi_ratio.min(jac.min_ratio);
            if let Some(t0) = jac.first_zero {
                report.no_conjugate_points = false;
                push(&mut report, Witness { check: SimplicityCheck::NoConjugatePoints, beta, alpha, value: t0 });
            }
        }
    }

    for i in 0..opts.boundary_samples {
        let beta = 2.0 * pi * i as f64 / opts.boundary_samples as f64;
        let kappa = boundary_curvature(metric, T::lit(beta)).as_f64();
        report.min_boundary_curvature = report.min_boundary_curvature.min(kappa);
        let leaves = tangent_rays_leave(metric, T::lit(beta));
        if !(kappa > 0.0) || !leaves {
            report.convex_boundary = false;
            push(&mut report, Witness { check: SimplicityCheck::ConvexBoundary, beta, alpha: pi / 2.0, value: kappa });
        }
    }
    report
}

/// Geodesic curvature of the unit circle, `exp(-lambda) (1 + d_r lambda)`.
pub fn boundary_curvature<T: Real>(metric: &ConformalMetric<T>, beta: T) -> T {
    let (c, s) = (beta.cos(), beta.sin());
    let (l, g) = metric.lambda_grad(c, s);
    (-l).exp() * (T::one() + g[0] * c + g[1] * s)
}

/// Both boundary-tangent geodesics at `beta` move to larger radius to second order.
fn tangent_rays_leave<T: Real>(metric: &ConformalMetric<T>, beta: T) -> bool {
    let (x1, x2) = (beta.cos(), beta.sin());
    let (l, g) = metric.lambda_grad(x1, x2);
    let e = (-l).exp();
    [T::FRAC_PI_2(), -T::FRAC_PI_2()].iter().all(|&turn| {
        let th = beta + turn;
        let (sn, cs) = th.sin_cos();
        let v = [e * cs, e * sn];
        let thdot = e * (-g[0] * sn + g[1] * cs);
        let gv = g[0] * v[0] + g[1] * v[1];
        let acc = [-gv * v[0] - thdot * v[1], -gv * v[1] + thdot * v[0]];
        // (1/2) d^2/dt^2 |x|^2
        v[0] * v[0] + v[1] * v[1] + x1 * acc[0] + x2 * acc[1] > T::zero()
    })
}

struct JacobiScan {
    first_zero: Option<f64>,
    min_ratio: f64,
}

/// Integrates `J'' + K J = 0` with `J(0) = 0, J'(0) = 1` alongside the ray.
fn jacobi_scan<T: Real>(metric: &ConformalMetric<T>, start: PhasePoint<T>, opts: TraceOptions<T>) -> JacobiScan {
    let rhs = |s: &[T; 5]| -> [T; 5] {
        let jet = metric.jet(s[0], s[1]);
        let k = -(T::lit(-2.0) * jet.value).exp() * jet.laplacian;
        let e = (-jet.value).exp();
        let (sn, cs) = s[2].sin_cos();
        [e * cs, e * sn, e * (-jet.grad[0] * sn + jet.grad[1] * cs), s[4], -k * s[3]]
    };
    let step = |s: &[T; 5], h: T| -> [T; 5] {
        let half = T::lit(0.5) * h;
        let add = |a: &[T; 5], b: &[T; 5], f: T| {
            let mut o = *a;
            for i in 0..5 {
                o[i] += f * b[i];
            }
            o
        };
        let k1 = rhs(s);
        let k2 = rhs(&add(s, &k1, half));
        let k3 = rhs(&add(s, &k2, half));
        let k4 = rhs(&add(s, &k3, h));
        let mut o = *s;
        let sixth = h / T::lit(6.0);
        for i in 0..5 {
            o[i] += sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
        o
    };
    let h = opts.step;
    let mut s = [start.x1, start.x2, start.theta, T::zero(), T::one()];
    let mut t = T::zero();
    let mut out = JacobiScan { first_zero: None, min_ratio: f64::INFINITY };
    loop {
        let mut next = step(&s, h);
        let mut dt = h;
        let r2 = next[0] * next[0] + next[1] * next[1];
        let exiting = r2 >= T::one() && t > T::zero();
        if exiting {
            // shorten the last step to land near the circle
            let r2a = s[0] * s[0] + s[1] * s[1];
            let frac = ((T::one() - r2a) / (r2 - r2a)).max(T::zero()).min(T::one());
            dt = frac * h;
            next = step(&s, dt);
        }
        t += dt;
        if t > T::zero() {
            let ratio = (next[3] / t).as_f64();
            out.min_ratio = out.min_ratio.min(ratio);
            if next[3] <= T::zero() && out.first_zero.is_none() {
                out.first_zero = Some(t.as_f64());
            }
        }
        s = next;
        if exiting || t > opts.tau_max {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_metric, MetricParams};

    fn quick() -> SimplicityOptions<f64> {
        SimplicityOptions { nbeta: 8, nalpha: 32, boundary_samples: 32, trace: TraceOptions::default() }
    }

    #[test]
    fn euclidean_is_simple() {
        let r = check_simplicity_with(&ConformalMetric::<f64>::euclidean(), &quick());
        assert!(r.is_simple(), "{r:?}");
        assert!((r.min_jacobi_ratio - 1.0).abs() < 1e-9);
        assert!((r.min_boundary_curvature - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_bump_is_simple() {
        let m = make_metric::<f64>(MetricParams::weak_bump()).unwrap();
        let r = check_simplicity_with(&m, &quick());
        assert!(r.is_simple(), "{r:?}");
    }

    #[test]
    fn strong_bump_has_conjugate_points() {
        let m = make_metric::<f64>(MetricParams::strong_bump()).unwrap();
        let r = check_simplicity_with(&m, &quick());
        assert!(r.non_trapping && r.convex_boundary);
        assert!(!r.no_conjugate_points);
        assert!(r.witnesses.iter().any(|w| w.check == SimplicityCheck::NoConjugatePoints));
    }
}
