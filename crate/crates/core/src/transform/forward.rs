use num_complex::Complex;

use crate::error::Result;
use crate::geometry::{ConformalMetric, TraceOptions};
use crate::scalar::Real;
use crate::sm::{fiber_fourier, SmField};
use crate::tensor::SymTensorField;
use crate::transform::{FanBeamData, FanBeamGrid, RayTransform};

/// Relative energy below which a fiber degree is treated as absent.
const BAND_EPS: f64 = 1e-28;

impl<T: Real> RayTransform<T> {
    /// `I f`: integral of `f` along every fan-beam ray. `f` is evaluated by
    /// cubic interpolation in space of its fiber Fourier coefficients, summed
    /// up to the highest degree actually present.
    pub fn forward_i(&self, f: &SmField<T>) -> Result<FanBeamData<T>> {
        if f.ntheta() != self.nt || f.grid().nx() != self.grid.nx() {
            return Err(crate::error::Error::GridMismatch);
        }
        let spec = fiber_fourier(f);
        let energy = spec.energy_by_bin();
        let nt = self.nt;
        let total: T = energy.iter().copied().sum();
        let mut band = 0;
        for k in 1..nt / 2 {
            if (energy[k] + energy[nt - k]).as_f64() > BAND_EPS * total.as_f64() {
                band = k;
            }
        }
        let nb = band + 1;
        let mut coef = vec![Complex::new(T::zero(), T::zero()); self.grid.len() * nb];
        for node in 0..self.grid.len() {
            for k in 0..nb {
                coef[node * nb + k] = spec.at(node, k as isize);
            }
        }
        let grid = &self.grid;
        let values = self.integrate_rays(|s| {
            let st = grid.interp_stencil(s.x1, s.x2);
            let mut acc = [Complex::new(T::zero(), T::zero()); 64];
            let use_stack = nb <= acc.len();
            let mut heap = if use_stack { Vec::new() } else { vec![Complex::new(T::zero(), T::zero()); nb] };
            let buf: &mut [Complex<T>] = if use_stack { &mut acc[..nb] } else { &mut heap };
            for (b, &wy) in st.wy.iter().enumerate() {
                let row = st.base + b * grid.side();
                for (a, &wx) in st.wx.iter().enumerate() {
                    let w = wx * wy;
                    let src = &coef[(row + a) * nb..(row + a + 1) * nb];
                    for (o, &c) in buf.iter_mut().zip(src) {
                        *o += c * w;
                    }
                }
            }
            let rot = Complex::from_polar(T::one(), s.theta);
            let mut e = rot;
            let mut v = buf[0].re;
            for c in &buf[1..] {
                v += T::lit(2.0) * (c * e).re;
                e = e * rot;
            }
            v
        })?;
        FanBeamData::new(self.fan, values)
    }

    /// `I_m u = I(ell_m u)`, contracting the interpolated components with the
    /// unit direction at each ray sample.
    pub fn forward_im(&self, u: &SymTensorField<T>) -> Result<FanBeamData<T>> {
        let grid = &self.grid;
        if grid.nx() != u.grid().nx() {
            return Err(crate::error::Error::GridMismatch);
        }
        let metric = &self.metric;
        let rank = u.rank();
        let comps = u.components();
        let two = T::lit(2.0);
        let values = self.integrate_rays(|s| {
            let st = grid.interp_stencil(s.x1, s.x2);
            let v: [T; 3] = std::array::from_fn(|c| {
                if c <= rank {
                    grid.apply_interp(&st, &comps[c], 1, 0)
                } else {
                    T::zero()
                }
            });
            let (sn, cs) = s.theta.sin_cos();
            match rank {
                0 => v[0],
                1 => (-metric.lambda(s.x1, s.x2)).exp() * (v[0] * cs + v[1] * sn),
                _ => {
                    (-two * metric.lambda(s.x1, s.x2)).exp()
                        * (v[0] * cs * cs + two * v[1] * cs * sn + v[2] * sn * sn)
                }
            }
        })?;
        FanBeamData::new(self.fan, values)
    }
}

/// One-shot `I f` (use [`RayTransform`] to amortise ray tracing).
pub fn forward_i<T: Real>(
    metric: &ConformalMetric<T>,
    f: &SmField<T>,
    fan: FanBeamGrid,
    opts: TraceOptions<T>,
) -> Result<FanBeamData<T>> {
    RayTransform::new(*metric, f.grid().clone(), f.ntheta(), fan, opts)?.forward_i(f)
}

/// One-shot `I_m u`.
pub fn forward_im<T: Real>(
    metric: &ConformalMetric<T>,
    u: &SymTensorField<T>,
    nt: usize,
    fan: FanBeamGrid,
    opts: TraceOptions<T>,
) -> Result<FanBeamData<T>> {
    RayTransform::new(*metric, u.grid().clone(), nt, fan, opts)?.forward_im(u)
}
