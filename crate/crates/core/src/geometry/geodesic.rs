use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::scalar::{wrap_angle, Real};

/// A point of the unit sphere bundle in isothermal coordinates.
///
/// The direction is `xi = exp(-lambda(x)) (cos theta, sin theta)`, a `g`-unit vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint<T> {
    pub x1: T,
    pub x2: T,
    pub theta: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(x1: T, x2: T, theta: T) -> Self {
        PhasePoint { x1, x2, theta }
    }

    /// Inflow point of fan-beam coordinates: boundary angle `beta` and
    /// direction angle `alpha` measured from the inward normal.
    pub fn from_fan_beam(beta: T, alpha: T) -> Self {
        PhasePoint {
            x1: beta.cos(),
            x2: beta.sin(),
            theta: beta + T::PI() + alpha,
        }
    }

    pub fn reversed(self) -> Self {
        PhasePoint {
            theta: self.theta + T::PI(),
            ..self
        }
    }

    fn state(self) -> [T; 3] {
        [self.x1, self.x2, self.theta]
    }

    fn from_state(s: [T; 3]) -> Self {
        PhasePoint::new(s[0], s[1], s[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Boundary point `(cos beta, sin beta)` and a direction angle `alpha` in
/// `[-pi/2, pi/2]`, measured from the inward normal for inflow points and
/// from the outward normal for outflow points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCoord<T> {
    pub beta: T,
    pub alpha: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions<T> {
    pub step: T,
    /// Arclength after which a ray is declared trapped.
    pub tau_max: T,
    pub exit_tol: T,
}

impl<T: Real> Default for TraceOptions<T> {
    fn default() -> Self {
        TraceOptions {
            step: T::lit(1e-2),
            tau_max: T::lit(100.0),
            exit_tol: T::lit(1e-10),
        }
    }
}

impl<T: Real> TraceOptions<T> {
    pub fn with_step(step: T) -> Self {
        TraceOptions {
            step,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeodesicPath<T> {
    /// `(t, point)` at every integrator step; `t <= 0` for backward traces.
    pub samples: Vec<(T, PhasePoint<T>)>,
    /// Arclength until the traced curve leaves the disk.
    pub tau: T,
    /// Where the traced curve leaves the disk (alpha from the outward normal
    /// of the traced velocity).
    pub exit_point: BoundaryCoord<T>,
    /// Where the traced curve would leave when traced the other way
    /// (alpha from the inward normal of the traced velocity).
    pub entry_point: BoundaryCoord<T>,
}

/// Result of integrating a ray up to the boundary.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Exit<T> {
    pub tau: T,
    pub point: PhasePoint<T>,
}

impl<T: Real> Exit<T> {
    /// Outflow coordinates of the exit point.
    pub fn outflow(&self) -> BoundaryCoord<T> {
        let beta = self.point.x2.atan2(self.point.x1);
        BoundaryCoord {
            beta,
            alpha: wrap_angle(self.point.theta - beta),
        }
    }
}

/// RK4 integrator of the geodesic flow written in `(x, theta)`.
pub(crate) struct Tracer<'a, T> {
    metric: &'a ConformalMetric<T>,
    opts: TraceOptions<T>,
}

impl<'a, T: Real> Tracer<'a, T> {
    pub fn new(metric: &'a ConformalMetric<T>, opts: TraceOptions<T>) -> Self {
        Tracer { metric, opts }
    }

    #[inline]
    fn rhs(&self, s: &[T; 3]) -> [T; 3] {
        let (l, g) = self.metric.lambda_grad(s[0], s[1]);
        let e = (-l).exp();
        let (sn, cs) = s[2].sin_cos();
        [e * cs, e * sn, e * (-g[0] * sn + g[1] * cs)]
    }

    #[inline]
    pub fn rk4(&self, s: &[T; 3], h: T) -> [T; 3] {
        let half = T::lit(0.5) * h;
        let k1 = self.rhs(s);
        let s2 = [s[0] + half * k1[0], s[1] + half * k1[1], s[2] + half * k1[2]];
        let k2 = self.rhs(&s2);
        let s3 = [s[0] + half * k2[0], s[1] + half * k2[1], s[2] + half * k2[2]];
        let k3 = self.rhs(&s3);
        let s4 = [s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]];
        let k4 = self.rhs(&s4);
        let sixth = h / T::lit(6.0);
        let two = T::lit(2.0);
        [
            s[0] + sixth * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
            s[1] + sixth * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
            s[2] + sixth * (k1[2] + two * k2[2] + two * k3[2] + k4[2]),
        ]
    }

    fn check_start(&self, p: &PhasePoint<T>) -> Result<bool> {
        let r2 = p.x1 * p.x1 + p.x2 * p.x2;
        if r2 > T::one() + T::lit(1e-10) {
            return Err(Error::OutOfDomain {
                x1: p.x1.as_f64(),
                x2: p.x2.as_f64(),
            });
        }
        Ok(r2 >= T::one() - T::lit(1e-12))
    }

    fn trapped(&self, p: &PhasePoint<T>) -> Error {
        Error::TrappedRay {
            x1: p.x1.as_f64(),
            x2: p.x2.as_f64(),
            theta: p.theta.as_f64(),
            tau_max: self.opts.tau_max.as_f64(),
        }
    }

    /// Locates the boundary crossing inside the step `(0, h]` from `s`.
    fn bisect_exit(&self, s: &[T; 3], h: T, from_boundary: bool) -> (T, [T; 3]) {
        let sign = |d: T, st: &[T; 3]| {
            let f = st[0] * st[0] + st[1] * st[1] - T::one();
            if from_boundary {
                f / d
            } else {
                f
            }
        };
        let (mut lo, mut hi) = (T::zero(), h);
        let mut best = (h, self.rk4(s, h));
        for _ in 0..200 {
            let mid = T::lit(0.5) * (lo + hi);
            let st = self.rk4(s, mid);
            let r = (st[0] * st[0] + st[1] * st[1]).sqrt();
            if (r - T::one()).abs() <= self.opts.exit_tol {
                return (mid, st);
            }
            if sign(mid, &st) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
                best = (mid, st);
            }
            if hi - lo <= T::epsilon() * h {
                break;
            }
        }
        best
    }

    /// Integrates from `start` to the boundary, reporting every step to `visit`
    /// (including `t = 0` and the exit).
    pub fn run(&self, start: PhasePoint<T>, mut visit: impl FnMut(T, &PhasePoint<T>)) -> Result<Exit<T>> {
        let on_boundary = self.check_start(&start)?;
        visit(T::zero(), &start);
        if on_boundary && start.x1 * start.theta.cos() + start.x2 * start.theta.sin() >= -T::lit(1e-12) {
            return Ok(Exit {
                tau: T::zero(),
                point: start,
            });
        }
        let h = self.opts.step;
        let mut s = start.state();
        let mut t = T::zero();
        loop {
            let next = self.rk4(&s, h);
            if next[0] * next[0] + next[1] * next[1] >= T::one() {
                let (d, st) = self.bisect_exit(&s, h, on_boundary && t == T::zero());
                let p = PhasePoint::from_state(st);
                visit(t + d, &p);
                return Ok(Exit { tau: t + d, point: p });
            }
            s = next;
            t += h;
            let p = PhasePoint::from_state(s);
            visit(t, &p);
            if t > self.opts.tau_max {
                return Err(self.trapped(&p));
            }
        }
    }

    /// Same exit as [`Tracer::run`], but crosses the region where the metric is
    /// flat along exact straight lines.
    pub fn exit_only(&self, start: PhasePoint<T>) -> Result<Exit<T>> {
        let on_boundary = self.check_start(&start)?;
        if on_boundary && start.x1 * start.theta.cos() + start.x2 * start.theta.sin() >= -T::lit(1e-12) {
            return Ok(Exit {
                tau: T::zero(),
                point: start,
            });
        }
        let rs = self.metric.support_radius();
        let h = self.opts.step;
        let mut s = start.state();
        let mut tau = T::zero();
        let mut from_boundary = on_boundary;
        loop {
            let r2 = s[0] * s[0] + s[1] * s[1];
            if r2 >= rs * rs {
                let (sn, cs) = s[2].sin_cos();
                let b = s[0] * cs + s[1] * sn;
                let disc_s = b * b - (r2 - rs * rs);
                if rs > T::zero() && b < T::zero() && disc_s > T::zero() {
                    let ts = (-b - disc_s.sqrt()).max(T::zero());
                    s[0] += ts * cs;
                    s[1] += ts * sn;
                    tau += ts;
                } else {
                    let t1 = (-b + (b * b - (r2 - T::one())).max(T::zero()).sqrt()).max(T::zero());
                    s[0] += t1 * cs;
                    s[1] += t1 * sn;
                    tau += t1;
                    return Ok(Exit {
                        tau,
                        point: PhasePoint::from_state(s),
                    });
                }
            }
            // inside the support of lambda
            loop {
                let next = self.rk4(&s, h);
                let r2n = next[0] * next[0] + next[1] * next[1];
                if r2n >= T::one() {
                    let (d, st) = self.bisect_exit(&s, h, from_boundary);
                    return Ok(Exit {
                        tau: tau + d,
                        point: PhasePoint::from_state(st),
                    });
                }
                from_boundary = false;
                s = next;
                tau += h;
                if tau > self.opts.tau_max {
                    return Err(self.trapped(&PhasePoint::from_state(s)));
                }
                if r2n >= rs * rs {
                    break;
                }
            }
        }
    }
}

/// Traces the geodesic through `p0` until it leaves the disk.
pub fn trace_geodesic<T: Real>(
    metric: &ConformalMetric<T>,
    p0: PhasePoint<T>,
    direction: Direction,
    opts: TraceOptions<T>,
) -> Result<GeodesicPath<T>> {
    if !(opts.step > T::zero()) {
        return Err(Error::InvalidParams("step must be positive".into()));
    }
    let tracer = Tracer::new(metric, opts);
    let start = match direction {
        Direction::Forward => p0,
        Direction::Backward => p0.reversed(),
    };
    let mut samples = Vec::new();
    let exit = tracer.run(start, |t, p| samples.push((t, *p)))?;
    if direction == Direction::Backward {
        for (t, p) in samples.iter_mut() {
            *t = -*t;
            p.theta = p.theta - T::PI();
        }
    }
    let other = tracer.exit_only(start.reversed())?;
    let o = other.outflow();
    Ok(GeodesicPath {
        samples,
        tau: exit.tau,
        exit_point: exit.outflow(),
        entry_point: BoundaryCoord {
            beta: o.beta,
            alpha: o.alpha,
        },
    })
}

/// Exit time `tau(x, xi)`: arclength until the forward geodesic leaves the disk.
/// Outward-pointing boundary points exit immediately.
pub fn exit_time<T: Real>(metric: &ConformalMetric<T>, p: PhasePoint<T>, opts: TraceOptions<T>) -> Result<T> {
    Ok(Tracer::new(metric, opts).run(p, |_, _| {})?.tau)
}

/// Inflow fan-beam coordinates of the orbit through `p` (the backward exit)
/// together with the backward exit time `tau(x, -xi)`.
pub fn inflow_coordinates<T: Real>(
    metric: &ConformalMetric<T>,
    p: PhasePoint<T>,
    opts: TraceOptions<T>,
) -> Result<(BoundaryCoord<T>, T)> {
    let exit = Tracer::new(metric, opts).exit_only(p.reversed())?;
    let o = exit.outflow();
    Ok((o, exit.tau))
}
