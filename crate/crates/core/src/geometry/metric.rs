use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Bump,
}

/// Parameter record of a conformal metric `g = exp(2 lambda) |dx|^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricParams {
    pub kind: MetricKind,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
}

fn default_width() -> f64 {
    0.3
}

fn default_cutoff() -> f64 {
    0.7
}

impl MetricParams {
    pub fn euclidean() -> Self {
        MetricParams {
            kind: MetricKind::Euclidean,
            amplitude: 0.0,
            width: default_width(),
            cutoff: default_cutoff(),
        }
    }

    pub fn bump(amplitude: f64, width: f64, cutoff: f64) -> Self {
        MetricParams {
            kind: MetricKind::Bump,
            amplitude,
            width,
            cutoff,
        }
    }

    /// The weak bump used as the default curved fixture.
    pub fn weak_bump() -> Self {
        Self::bump(0.03, 0.3, 0.7)
    }

    /// A bump strong enough to produce conjugate points.
    pub fn strong_bump() -> Self {
        Self::bump(0.5, 0.15, 0.7)
    }
}

/// Conformal factor and its exact derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaJet<T> {
    pub value: T,
    pub grad: [T; 2],
    pub laplacian: T,
}

/// `g = exp(2 lambda) |dx|^2` on the closed unit disk, with `lambda` radial and
/// supported in `|x| <= r0 < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalMetric<T> {
    params: MetricParams,
    amplitude: T,
    width: T,
    cutoff: T,
}

pub fn make_metric<T: Real>(params: MetricParams) -> Result<ConformalMetric<T>> {
    if params.kind == MetricKind::Bump {
        if !(params.amplitude >= 0.0) || !params.amplitude.is_finite() {
            return Err(Error::InvalidParams(format!("amplitude {} must be >= 0", params.amplitude)));
        }
        if !(params.width > 0.0) || !params.width.is_finite() {
            return Err(Error::InvalidParams(format!("width {} must be > 0", params.width)));
        }
        if !(params.cutoff > 0.0 && params.cutoff < 1.0) {
            return Err(Error::InvalidParams(format!("cutoff radius {} must lie in (0, 1)", params.cutoff)));
        }
    }
    let amplitude = match params.kind {
        MetricKind::Euclidean => 0.0,
        MetricKind::Bump => params.amplitude,
    };
    Ok(ConformalMetric {
        params,
        amplitude: T::lit(amplitude),
        width: T::lit(params.width),
        cutoff: T::lit(params.cutoff),
    })
}

/// C^4 step: 1 on `[0, 1/2]`, 0 on `[1, inf)`, degree-9 smoothstep between.
/// Returns the value and first two derivatives.
fn cutoff_profile<T: Real>(t: T) -> (T, T, T) {
    let half = T::lit(0.5);
    if t <= half {
        return (T::one(), T::zero(), T::zero());
    }
    if t >= T::one() {
        return (T::zero(), T::zero(), T::zero());
    }
    let u = T::lit(2.0) * t - T::one();
    let v = T::one() - u;
    let u2 = u * u;
    let u4 = u2 * u2;
    let s = u4 * u * (T::lit(126.0) + u * (T::lit(-420.0) + u * (T::lit(540.0) + u * (T::lit(-315.0) + T::lit(70.0) * u))));
    let v3 = v * v * v;
    let ds = T::lit(630.0) * u4 * v3 * v;
    let dds = T::lit(2520.0) * u2 * u * v3 * (T::one() - T::lit(2.0) * u);
    (T::one() - s, -T::lit(2.0) * ds, -T::lit(4.0) * dds)
}

impl<T: Real> ConformalMetric<T> {
    pub fn euclidean() -> Self {
        make_metric(MetricParams::euclidean()).expect("valid")
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    /// True when `lambda` vanishes identically.
    pub fn is_flat(&self) -> bool {
        self.amplitude == T::zero()
    }

    /// `lambda` vanishes on `|x| >= support_radius()`.
    pub fn support_radius(&self) -> T {
        if self.is_flat() {
            T::zero()
        } else {
            self.cutoff
        }
    }

    /// Radial profile `lambda(r)` with `lambda'(r)`, `lambda'(r)/r` and `lambda''(r)`.
    fn radial(&self, r: T) -> (T, T, T, T) {
        if self.is_flat() || r >= self.cutoff {
            return (T::zero(), T::zero(), T::zero(), T::zero());
        }
        let s2 = self.width * self.width;
        let gauss = (-(r * r) / (T::lit(2.0) * s2)).exp();
        let dg_over_r = -gauss / s2;
        let dg = dg_over_r * r;
        let ddg = (r * r / (s2 * s2) - T::one() / s2) * gauss;
        let (chi, dchi, ddchi) = cutoff_profile(r / self.cutoff);
        let dchi = dchi / self.cutoff;
        let ddchi = ddchi / (self.cutoff * self.cutoff);
        let a = self.amplitude;
        let value = a * gauss * chi;
        let d1 = a * (dg * chi + gauss * dchi);
        // chi' vanishes on [0, r0/2], so the quotient is regular at the origin
        let d1_over_r = if dchi == T::zero() {
            a * dg_over_r * chi
        } else {
            d1 / r
        };
        let d2 = a * (ddg * chi + T::lit(2.0) * dg * dchi + gauss * ddchi);
        (value, d1, d1_over_r, d2)
    }

    #[inline]
    pub fn lambda(&self, x1: T, x2: T) -> T {
        if self.is_flat() {
            return T::zero();
        }
        self.radial((x1 * x1 + x2 * x2).sqrt()).0
    }

    /// `lambda` and its gradient; the hot path of the geodesic integrator.
    #[inline]
    pub fn lambda_grad(&self, x1: T, x2: T) -> (T, [T; 2]) {
        if self.is_flat() {
            return (T::zero(), [T::zero(); 2]);
        }
        let r = (x1 * x1 + x2 * x2).sqrt();
        if r >= self.cutoff {
            return (T::zero(), [T::zero(); 2]);
        }
        let (v, _, d1r, _) = self.radial(r);
        (v, [d1r * x1, d1r * x2])
    }

    pub fn jet(&self, x1: T, x2: T) -> LambdaJet<T> {
        let r = (x1 * x1 + x2 * x2).sqrt();
        let (value, _, d1r, d2) = self.radial(r);
        LambdaJet {
            value,
            grad: [d1r * x1, d1r * x2],
            laplacian: d2 + d1r,
        }
    }

    /// Gaussian curvature `K = -exp(-2 lambda) Laplacian(lambda)`.
    pub fn curvature(&self, x1: T, x2: T) -> T {
        let j = self.jet(x1, x2);
        -(-T::lit(2.0) * j.value).exp() * j.laplacian
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_flat() {
        let m = ConformalMetric::<f64>::euclidean();
        assert_eq!(m.lambda(0.3, -0.2), 0.0);
        assert_eq!(m.curvature(0.1, 0.1), 0.0);
    }

    #[test]
    fn weak_bump_curvature_at_origin() {
        // Laplacian(lambda)(0) = -2a/s^2 inside the region where chi = 1
        let m = make_metric::<f64>(MetricParams::weak_bump()).unwrap();
        let (a, s) = (0.03, 0.3);
        let expected = (-2.0 * a as f64).exp() * 2.0 * a / (s * s);
        assert!((m.curvature(0.0, 0.0) - expected).abs() < 1e-14);
        assert!((m.curvature(0.0, 0.0) - 0.628).abs() < 1e-3);
    }

    #[test]
    fn zero_amplitude_bump_is_euclidean() {
        let m = make_metric::<f64>(MetricParams::bump(0.0, 0.2, 0.5)).unwrap();
        assert!(m.is_flat());
        assert_eq!(m.lambda(0.0, 0.0), 0.0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(make_metric::<f64>(MetricParams::bump(0.1, 0.3, 1.0)).is_err());
        assert!(make_metric::<f64>(MetricParams::bump(0.1, 0.0, 0.5)).is_err());
        assert!(make_metric::<f64>(MetricParams::bump(-0.1, 0.3, 0.5)).is_err());
    }

    #[test]
    fn gradient_and_laplacian_match_finite_differences() {
        let m = make_metric::<f64>(MetricParams::bump(0.2, 0.3, 0.7)).unwrap();
        let h = 1e-5;
        for &(x, y) in &[(0.05, 0.02), (0.2, -0.15), (0.3, 0.25), (-0.45, 0.1), (0.62, 0.0)] {
            let j = m.jet(x, y);
            let g1 = (m.lambda(x + h, y) - m.lambda(x - h, y)) / (2.0 * h);
            let g2 = (m.lambda(x, y + h) - m.lambda(x, y - h)) / (2.0 * h);
            assert!((g1 - j.grad[0]).abs() < 1e-7, "{x},{y}");
            assert!((g2 - j.grad[1]).abs() < 1e-7);
            let k = 3e-5;
            let lap = (m.lambda(x + k, y) + m.lambda(x - k, y) + m.lambda(x, y + k) + m.lambda(x, y - k)
                - 4.0 * m.lambda(x, y))
                / (k * k);
            assert!((lap - j.laplacian).abs() < 1e-5, "{x},{y}: {lap} vs {}", j.laplacian);
            let (_, g) = m.lambda_grad(x, y);
            assert_eq!(g, j.grad);
        }
        assert_eq!(m.lambda(0.71, 0.0), 0.0);
        assert!(m.lambda(0.0, 0.0) > 0.0);
    }
}
