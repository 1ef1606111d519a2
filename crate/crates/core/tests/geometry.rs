use std::f64::consts::PI;

use sm_tomo::geometry::{
    exit_time, inflow_coordinates, make_metric, trace_geodesic, Direction, MetricParams, PhasePoint, TraceOptions,
};
use sm_tomo::Metric;

fn bump() -> Metric {
    make_metric(MetricParams::weak_bump()).unwrap()
}

fn opts(step: f64) -> TraceOptions<f64> {
    TraceOptions::with_step(step)
}

#[test]
fn flat_exit_times() {
    let flat = Metric::euclidean();
    for th in [0.0, 0.7, 2.0, 4.5] {
        let t = exit_time(&flat, PhasePoint::new(0.0, 0.0, th), opts(1e-2)).unwrap();
        assert!((t - 1.0).abs() < 1e-10);
    }
    let t = exit_time(&flat, PhasePoint::from_fan_beam(0.0, PI / 3.0), opts(1e-2)).unwrap();
    assert!((t - 1.0).abs() < 1e-9);
}

#[test]
fn exit_point_is_on_the_circle() {
    let m = bump();
    let path = trace_geodesic(&m, PhasePoint::new(0.1, -0.2, 0.4), Direction::Forward, opts(1e-2)).unwrap();
    let (_, last) = path.samples.last().unwrap();
    let r = last.x1.hypot(last.x2);
    assert!((r - 1.0).abs() <= 1e-10, "{r}");
    assert!(path.tau > 0.0);
}

#[test]
fn bump_exit_time_self_converges() {
    let m = bump();
    let p = PhasePoint::new(0.0, 0.0, 0.0);
    let coarse = exit_time(&m, p, opts(1e-2)).unwrap();
    let fine = exit_time(&m, p, opts(1e-3)).unwrap();
    assert!((coarse - fine).abs() / fine < 1e-6, "{coarse} {fine}");
    // The bump raises the conformal factor, so the radial ray is longer than 1.
    assert!(fine > 1.0);
}

#[test]
fn bump_exit_time_matches_arclength_quadrature() {
    // Radial rays of a radial metric are straight, so tau = int_0^1 e^lambda(r) dr.
    let m = bump();
    let fine = exit_time(&m, PhasePoint::new(0.0, 0.0, 0.3), opts(1e-3)).unwrap();
    let n = 20000;
    let h = 1.0 / n as f64;
    let quad: f64 = (0..n)
        .map(|i| {
            let r = (i as f64 + 0.5) * h;
            let (x, y) = (r * 0.3f64.cos(), r * 0.3f64.sin());
            m.lambda(x, y).exp() * h
        })
        .sum();
    assert!((fine - quad).abs() / quad < 1e-6, "{fine} {quad}");
}

#[test]
fn endpoint_error_shrinks_at_fourth_order() {
    let m = bump();
    let p = PhasePoint::new(0.15, -0.1, 1.1);
    let end = |h: f64| {
        let path = trace_geodesic(&m, p, Direction::Forward, opts(h)).unwrap();
        path.exit_point
    };
    let reference = end(1e-3 / 4.0);
    let err = |h: f64| {
        let e = end(h);
        (e.beta - reference.beta).abs() + (e.alpha - reference.alpha).abs()
    };
    // Single halvings are noisy because the final partial step moves with h,
    // so average the rate over three halvings.
    let (e1, e2) = (err(0.08), err(0.01));
    let ratio = (e1 / e2).cbrt();
    assert!(ratio > 12.0, "mean ratio {ratio} ({e1}, {e2})");
}

#[test]
fn forward_then_backward_returns_to_the_start() {
    // Reversing at the exit and tracing the whole chord lands where the
    // backward trace from the start lands.
    let m = bump();
    let p = PhasePoint::new(0.2, 0.1, 2.3);
    let o = opts(1e-2);
    let fwd = trace_geodesic(&m, p, Direction::Forward, o).unwrap();
    let (_, end) = *fwd.samples.last().unwrap();
    let whole = trace_geodesic(&m, end.reversed(), Direction::Forward, o).unwrap();
    let back = trace_geodesic(&m, p, Direction::Backward, o).unwrap();
    let (_, a) = *whole.samples.last().unwrap();
    let (_, b) = *back.samples.last().unwrap();
    assert!((a.x1 - b.x1).hypot(a.x2 - b.x2) < 1e-7);
    let (_, tau_back) = inflow_coordinates(&m, p, o).unwrap();
    assert!((whole.tau - fwd.tau - tau_back).abs() < 1e-7 * whole.tau);
}

#[test]
fn chord_time_is_constant_along_the_orbit() {
    let m = bump();
    let p = PhasePoint::new(-0.3, 0.2, 0.9);
    let o = opts(1e-2);
    let path = trace_geodesic(&m, p, Direction::Forward, o).unwrap();
    let chord = |q: PhasePoint<f64>| exit_time(&m, q, o).unwrap() + inflow_coordinates(&m, q, o).unwrap().1;
    let c0 = chord(p);
    for &(_, q) in path.samples.iter().step_by(17).take(6) {
        if q.x1.hypot(q.x2) < 0.95 {
            assert!((chord(q) - c0).abs() < 1e-8, "{} vs {c0}", chord(q));
        }
    }
}

#[test]
fn unit_speed_along_samples() {
    // |xi|_g = 1 means the Euclidean speed is e^-lambda at every sample.
    let m = bump();
    let path = trace_geodesic(&m, PhasePoint::new(0.0, 0.3, -0.4), Direction::Forward, opts(1e-3)).unwrap();
    for w in path.samples.windows(2).step_by(23) {
        let ((t0, a), (t1, b)) = (w[0], w[1]);
        let speed = (b.x1 - a.x1).hypot(b.x2 - a.x2) / (t1 - t0);
        let mid = m.lambda(0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2));
        assert!((speed - (-mid).exp()).abs() < 1e-6, "{speed}");
    }
}
