use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use crate::scalar::{FieldElem, Real};
use crate::sm::SmField;

/// Normalised FFT along one fiber: `c_k = (1/nt) sum_j f_j exp(-i k theta_j)`.
pub(crate) struct FiberFft<T: Real> {
    nt: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> FiberFft<T> {
    pub fn new(nt: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(nt);
        let inv = planner.plan_fft_inverse(nt);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        FiberFft {
            nt,
            fwd,
            inv,
            scratch: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn analyze(&mut self, buf: &mut [Complex<T>]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
        let s = T::one() / T::from_usize_lossy(self.nt);
        for c in buf.iter_mut() {
            *c = *c * s;
        }
    }

    pub fn synthesize(&mut self, buf: &mut [Complex<T>]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }
}

/// Signed degree of FFT bin `j` (the Nyquist bin reports `nt / 2`).
#[inline]
pub fn signed_degree(j: usize, nt: usize) -> isize {
    if j <= nt / 2 {
        j as isize
    } else {
        j as isize - nt as isize
    }
}

#[inline]
pub(crate) fn bin_of(k: isize, nt: usize) -> usize {
    k.rem_euclid(nt as isize) as usize
}

/// Highest fiber degree kept free of aliasing.
pub fn degree_limit(nt: usize) -> usize {
    nt / 3
}

/// Vertical Fourier coefficients `f_k(x)` of an SM field, node-major in FFT order.
#[derive(Clone, Debug)]
pub struct FiberSpectrum<T> {
    grid: Arc<DiskGrid<T>>,
    nt: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> FiberSpectrum<T> {
    pub fn ntheta(&self) -> usize {
        self.nt
    }

    pub fn grid(&self) -> &Arc<DiskGrid<T>> {
        &self.grid
    }

    #[inline]
    pub fn at(&self, node: usize, k: isize) -> Complex<T> {
        self.coeffs[node * self.nt + bin_of(k, self.nt)]
    }

    /// The coefficient field of degree `k` over all nodes.
    pub fn degree(&self, k: isize) -> Vec<Complex<T>> {
        (0..self.grid.len()).map(|node| self.at(node, k)).collect()
    }

    pub fn fiber(&self, node: usize) -> &[Complex<T>] {
        &self.coeffs[node * self.nt..(node + 1) * self.nt]
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Area-weighted energy of every FFT bin over masked nodes.
    pub fn energy_by_bin(&self) -> Vec<T> {
        let w = self.grid.weights();
        let mut e = vec![T::zero(); self.nt];
        for node in self.grid.inside_nodes() {
            for (j, c) in self.fiber(node).iter().enumerate() {
                e[j] += w[node] * c.norm_sqr();
            }
        }
        e
    }

    /// Inverse transform.
    pub fn synthesize(&self) -> SmField<T, Complex<T>> {
        let mut fft = FiberFft::new(self.nt);
        let mut values = self.coeffs.clone();
        for chunk in values.chunks_mut(self.nt) {
            fft.synthesize(chunk);
        }
        SmField::from_parts_unchecked(self.grid.clone(), self.nt, values)
    }
}

pub fn fiber_fourier<T: Real, E: FieldElem<T>>(f: &SmField<T, E>) -> FiberSpectrum<T> {
    let nt = f.ntheta();
    let mut fft = FiberFft::new(nt);
    let mut coeffs: Vec<Complex<T>> = f.values().iter().map(|v| v.to_complex()).collect();
    for chunk in coeffs.chunks_mut(nt) {
        fft.analyze(chunk);
    }
    FiberSpectrum {
        grid: f.grid().clone(),
        nt,
        coeffs,
    }
}

/// Applies a per-degree multiplier `m(k)` along every fiber.
pub(crate) fn fiber_multiply<T: Real, E: FieldElem<T>>(
    f: &SmField<T, E>,
    mult: impl Fn(isize) -> Complex<T>,
) -> SmField<T, E> {
    let nt = f.ntheta();
    let mut fft = FiberFft::new(nt);
    let table: Vec<Complex<T>> = (0..nt).map(|j| mult(signed_degree(j, nt))).collect();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); nt];
    let mut out = Vec::with_capacity(f.values().len());
    for fiber in f.values().chunks(nt) {
        for (b, v) in buf.iter_mut().zip(fiber) {
            *b = v.to_complex();
        }
        fft.analyze(&mut buf);
        for (b, m) in buf.iter_mut().zip(&table) {
            *b = *b * *m;
        }
        fft.synthesize(&mut buf);
        out.extend(buf.iter().map(|&c| E::from_complex(c)));
    }
    SmField::from_parts_unchecked(f.grid().clone(), nt, out)
}

/// `V f = d f / d theta`, computed spectrally (the Nyquist mode is dropped).
pub fn apply_v<T: Real, E: FieldElem<T>>(f: &SmField<T, E>) -> SmField<T, E> {
    let nt = f.ntheta() as isize;
    fiber_multiply(f, |k| {
        if 2 * k.abs() == nt {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::zero(), T::from_isize(k).unwrap())
        }
    })
}

/// The `Omega_m` part of a field: only fiber degrees `m` and `-m`.
#[derive(Clone, Debug)]
pub struct HarmonicComponent<T, E = T> {
    pub degree: usize,
    pub field: SmField<T, E>,
}

pub fn harmonic_project<T: Real, E: FieldElem<T>>(f: &SmField<T, E>, m: usize) -> Result<HarmonicComponent<T, E>> {
    let limit = degree_limit(f.ntheta());
    if m > limit {
        return Err(Error::DegreeTooHigh { degree: m, limit });
    }
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let field = fiber_multiply(f, |k| if k.unsigned_abs() == m { one } else { zero });
    Ok(HarmonicComponent { degree: m, field })
}

/// Keeps the degrees `|k| <= limit`.
pub fn truncate_degrees<T: Real, E: FieldElem<T>>(f: &SmField<T, E>, limit: usize) -> SmField<T, E> {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    fiber_multiply(f, |k| if k.unsigned_abs() <= limit { one } else { zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiskGrid;

    fn grid() -> Arc<DiskGrid<f64>> {
        Arc::new(DiskGrid::new(17).unwrap())
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let f = SmField::from_fn(grid(), 64, |_, _, th: f64| (2.0 * th).cos()).unwrap();
        let s = fiber_fourier(&f);
        for node in [0, 100, 200] {
            for k in -31..=32 {
                let expect = if k == 2 || k == -2 { 0.5 } else { 0.0 };
                assert!((s.at(node, k) - Complex::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn complex_mode_recovers_its_amplitude() {
        let g = grid();
        let f = SmField::from_fn(g.clone(), 64, |x: f64, _, th: f64| Complex::from_polar(1.0, th) * x).unwrap();
        let s = fiber_fourier(&f);
        for node in 0..g.len() {
            let (x, _) = g.xy(node);
            assert!((s.at(node, 1) - Complex::new(x, 0.0)).norm() < 1e-14);
            assert!(s.at(node, -1).norm() < 1e-14 && s.at(node, 0).norm() < 1e-14);
        }
        let back = s.synthesize();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_splits_degrees() {
        let f = SmField::from_fn(grid(), 64, |_, _, th: f64| (2.0 * th).cos() + 3.0).unwrap();
        let p2 = harmonic_project(&f, 2).unwrap();
        let p0 = harmonic_project(&f, 0).unwrap();
        let p1 = harmonic_project(&f, 1).unwrap();
        for k in 0..64 {
            let th = f.theta(k);
            assert!((p2.field.at(5, k) - (2.0 * th).cos()).abs() < 1e-13);
            assert!((p0.field.at(5, k) - 3.0).abs() < 1e-13);
            assert!(p1.field.at(5, k).abs() < 1e-13);
        }
        assert!(matches!(harmonic_project(&f, 22), Err(Error::DegreeTooHigh { .. })));
    }

    #[test]
    fn vertical_derivative_of_a_mode() {
        let f = SmField::from_fn(grid(), 64, |x: f64, y, th: f64| Complex::from_polar(1.0, 3.0 * th) * (x + y))
            .unwrap();
        let v = apply_v(&f);
        for (a, b) in v.values().iter().zip(f.values()) {
            assert!((a - b * Complex::new(0.0, 3.0)).norm() < 1e-12);
        }
    }
}
