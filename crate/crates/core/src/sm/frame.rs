use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::scalar::{FieldElem, Real};
use crate::sm::{apply_v, degree_limit, harmonic_project, ComplexSmField, HarmonicComponent, NodeMetric, SmField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// First-order operator `exp(-lambda) (a1 d_1 + a2 d_2 + a3 d_theta)` whose
/// coefficients depend on `(cos theta, sin theta, grad lambda)`.
fn frame_apply<T: Real, E: FieldElem<T>>(
    metric: &ConformalMetric<T>,
    f: &SmField<T, E>,
    coef: impl Fn(T, T, [T; 2]) -> [T; 3],
) -> SmField<T, E> {
    let grid = f.grid().clone();
    let nt = f.ntheta();
    let d1 = grid.derivative(f.values(), nt, 0);
    let d2 = grid.derivative(f.values(), nt, 1);
    let dt = apply_v(f);
    let nm = NodeMetric::sample(metric, &grid);
    let trig: Vec<(T, T)> = (0..nt).map(|k| f.theta(k).sin_cos()).collect();
    let mut out = vec![E::zero(); f.values().len()];
    for node in grid.inside_nodes() {
        let e = (-nm.lambda[node]).exp();
        let g = nm.grad[node];
        for (k, &(s, c)) in trig.iter().enumerate() {
            let [a1, a2, a3] = coef(c, s, g);
            let i = node * nt + k;
            out[i] = (d1[i] * a1 + d2[i] * a2 + dt.values()[i] * a3) * e;
        }
    }
    let mut out = SmField::from_parts_unchecked(grid, nt, out);
    out.extend_outside();
    out
}

/// Geodesic vector field `X`.
pub fn apply_x<T: Real, E: FieldElem<T>>(metric: &ConformalMetric<T>, f: &SmField<T, E>) -> SmField<T, E> {
    frame_apply(metric, f, |c, s, g| [c, s, -g[0] * s + g[1] * c])
}

/// `X_perp = [X, V]`.
pub fn apply_xperp<T: Real, E: FieldElem<T>>(metric: &ConformalMetric<T>, f: &SmField<T, E>) -> SmField<T, E> {
    frame_apply(metric, f, |c, s, g| [s, -c, g[0] * c + g[1] * s])
}

/// `eta_(+/-) = (X +/- i X_perp) / 2`.
pub fn apply_eta<T: Real, E: FieldElem<T>>(
    metric: &ConformalMetric<T>,
    f: &SmField<T, E>,
    sign: Sign,
) -> ComplexSmField<T> {
    let fc = f.to_complex();
    let x = apply_x(metric, &fc);
    let xp = apply_xperp(metric, &fc);
    let half = T::lit(0.5);
    let i = match sign {
        Sign::Plus => Complex::new(T::zero(), half),
        Sign::Minus => Complex::new(T::zero(), -half),
    };
    let values = x.values().iter().zip(xp.values()).map(|(&a, &b)| a * half + b * i).collect();
    SmField::from_parts_unchecked(fc.grid().clone(), fc.ntheta(), values)
}

/// `X_+` / `X_-`: the `Omega_(m+1)` / `Omega_(m-1)` part of `X f` for `f` in `Omega_m`.
/// `X_-` vanishes identically on `Omega_0`; the zero result is reported at degree 0.
pub fn apply_xpm<T: Real, E: FieldElem<T>>(
    metric: &ConformalMetric<T>,
    f: &HarmonicComponent<T, E>,
    sign: Sign,
) -> Result<HarmonicComponent<T, E>> {
    let m = f.degree;
    let limit = degree_limit(f.field.ntheta());
    let target = match sign {
        Sign::Plus => m + 1,
        Sign::Minus if m == 0 => {
            let field = SmField::zeros(f.field.grid().clone(), f.field.ntheta())?;
            return Ok(HarmonicComponent { degree: 0, field });
        }
        Sign::Minus => m - 1,
    };
    if target > limit {
        return Err(Error::DegreeTooHigh { degree: target, limit });
    }
    let xf = apply_x(metric, &f.field);
    harmonic_project(&xf, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::grid::DiskGrid;

    fn grid() -> Arc<DiskGrid<f64>> {
        Arc::new(DiskGrid::new(33).unwrap())
    }

    #[test]
    fn flat_directional_derivatives() {
        let m = ConformalMetric::<f64>::euclidean();
        let g = grid();
        let f = SmField::from_fn(g.clone(), 64, |x, _, _| x).unwrap();
        let y = SmField::from_fn(g.clone(), 64, |_, y, _| y).unwrap();
        let xf = apply_x(&m, &f);
        let xpy = apply_xperp(&m, &y);
        for node in g.inside_nodes() {
            for k in 0..64 {
                let th = f.theta(k);
                assert!((xf.at(node, k) - th.cos()).abs() < 1e-12);
                assert!((xpy.at(node, k) + th.cos()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_eta_plus_raises_degree() {
        let m = ConformalMetric::<f64>::euclidean();
        let g = grid();
        let f = SmField::from_fn(g.clone(), 64, |x, _, th| Complex::from_polar(1.0, th) * x).unwrap();
        let e = apply_eta(&m, &f, Sign::Plus);
        for node in g.inside_nodes() {
            for k in 0..64 {
                let expect = Complex::from_polar(0.5, 2.0 * f.theta(k));
                assert!((e.at(node, k) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn x_minus_kills_degree_zero() {
        let m = ConformalMetric::<f64>::euclidean();
        let f = SmField::from_fn(grid(), 64, |x, y, _| x * y + 1.0).unwrap();
        let c = harmonic_project(&f, 0).unwrap();
        let out = apply_xpm(&m, &c, Sign::Minus).unwrap();
        assert!(out.field.values().iter().all(|&v| v == 0.0));
        let top = harmonic_project(&f, 21).unwrap();
        assert!(apply_xpm(&m, &top, Sign::Plus).is_err());
    }
}
