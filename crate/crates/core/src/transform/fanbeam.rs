use crate::error::{Error, Result};
use crate::scalar::{wrap_positive, Real};

/// Fan-beam sampling of the inflow boundary: `beta_i = 2 pi i / nbeta` and the
/// cell-centred `alpha_j = -pi/2 + (j + 1/2) pi / nalpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FanBeamGrid {
    pub nbeta: usize,
    pub nalpha: usize,
}

impl FanBeamGrid {
    pub fn new(nbeta: usize, nalpha: usize) -> Result<Self> {
        if nbeta < 4 || nalpha < 2 {
            return Err(Error::InvalidParams(format!(
                "fan-beam grid {nbeta} x {nalpha} is too coarse"
            )));
        }
        Ok(FanBeamGrid { nbeta, nalpha })
    }

    pub fn len(&self) -> usize {
        self.nbeta * self.nalpha
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nalpha + j
    }

    pub fn dbeta<T: Real>(&self) -> T {
        T::two_pi() / T::from_usize_lossy(self.nbeta)
    }

    pub fn dalpha<T: Real>(&self) -> T {
        T::PI() / T::from_usize_lossy(self.nalpha)
    }

    #[inline]
    pub fn beta<T: Real>(&self, i: usize) -> T {
        self.dbeta::<T>() * T::from_usize_lossy(i)
    }

    #[inline]
    pub fn alpha<T: Real>(&self, j: usize) -> T {
        -T::FRAC_PI_2() + (T::from_usize_lossy(j) + T::lit(0.5)) * self.dalpha::<T>()
    }

    /// Quadrature weight of node `(i, j)` for `d mu = cos(alpha) d alpha d beta`.
    #[inline]
    pub fn weight<T: Real>(&self, j: usize) -> T {
        self.alpha::<T>(j).cos() * self.dalpha::<T>() * self.dbeta::<T>()
    }

    /// Near-tangential directions: within two alpha cells of `+/- pi/2`.
    pub fn is_grazing<T: Real>(&self, alpha: T) -> bool {
        alpha.abs() > T::FRAC_PI_2() - T::lit(2.0) * self.dalpha::<T>()
    }

    /// Cell position of `(beta, alpha)`: periodic in beta, clamped to the
    /// outermost alpha nodes.
    #[inline]
    pub fn locate<T: Real>(&self, beta: T, alpha: T) -> FanIndex<T> {
        let ub = wrap_positive(beta) / self.dbeta::<T>();
        let fb = ub.floor();
        let i0 = fb.to_usize().unwrap_or(0) % self.nbeta;
        let ua = (alpha + T::FRAC_PI_2()) / self.dalpha::<T>() - T::lit(0.5);
        let top = T::from_usize_lossy(self.nalpha - 1);
        let ua = ua.max(T::zero()).min(top);
        let j0 = ua.floor().to_usize().unwrap_or(0).min(self.nalpha - 2);
        FanIndex { i0: i0 as u32, j0: j0 as u32, tb: ub - fb, ta: ua - T::from_usize_lossy(j0) }
    }
}

/// How fan-beam data is evaluated between nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FanInterp {
    Bilinear,
    /// Four-point Lagrange in each direction (alpha indices clamped).
    #[default]
    Cubic,
}

/// Base node and fractional offsets of a point on the fan-beam grid.
#[derive(Clone, Copy, Debug)]
pub struct FanIndex<T> {
    pub i0: u32,
    pub j0: u32,
    pub tb: T,
    pub ta: T,
}

fn lagrange4<T: Real>(t: T) -> [T; 4] {
    let one = T::one();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let (tm1, tm2, tp1) = (t - one, t - two, t + one);
    [-t * tm1 * tm2 / six, tp1 * tm1 * tm2 / two, -tp1 * t * tm2 / two, tp1 * t * tm1 / six]
}

/// A function on the inflow boundary sampled on a [`FanBeamGrid`]
/// (`values[i * nalpha + j]`).
#[derive(Clone, Debug, PartialEq)]
pub struct FanBeamData<T> {
    pub grid: FanBeamGrid,
    pub values: Vec<T>,
}

impl<T: Real> FanBeamData<T> {
    pub fn new(grid: FanBeamGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(FanBeamData { grid, values })
    }

    pub fn zeros(grid: FanBeamGrid) -> Self {
        FanBeamData { grid, values: vec![T::zero(); grid.len()] }
    }

    pub fn from_fn(grid: FanBeamGrid, f: impl Fn(T, T) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nbeta {
            for j in 0..grid.nalpha {
                values.push(f(grid.beta(i), grid.alpha(j)));
            }
        }
        FanBeamData { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn eval(&self, ix: &FanIndex<T>, scheme: FanInterp) -> T {
        let (nb, na) = (self.grid.nbeta as i64, self.grid.nalpha as i64);
        let v = &self.values;
        let at = |i: i64, j: i64| v[(i.rem_euclid(nb) * na + j.clamp(0, na - 1)) as usize];
        let (i0, j0) = (ix.i0 as i64, ix.j0 as i64);
        match scheme {
            FanInterp::Bilinear => {
                let one = T::one();
                let a = at(i0, j0) * (one - ix.ta) + at(i0, j0 + 1) * ix.ta;
                let b = at(i0 + 1, j0) * (one - ix.ta) + at(i0 + 1, j0 + 1) * ix.ta;
                a * (one - ix.tb) + b * ix.tb
            }
            FanInterp::Cubic => {
                let (wb, wa) = (lagrange4(ix.tb), lagrange4(ix.ta));
                let mut acc = T::zero();
                for (p, &wbp) in wb.iter().enumerate() {
                    let mut row = T::zero();
                    for (q, &waq) in wa.iter().enumerate() {
                        row += waq * at(i0 + p as i64 - 1, j0 + q as i64 - 1);
                    }
                    acc += wbp * row;
                }
                acc
            }
        }
    }

    pub fn interpolate(&self, beta: T, alpha: T, scheme: FanInterp) -> T {
        self.eval(&self.grid.locate(beta, alpha), scheme)
    }

    /// Periodic Gaussian smoothing along beta with standard deviation
    /// `width` beta cells, truncated at three deviations. Any `phi` has an
    /// exactly invariant extension, so this only trades resolution in beta.
    pub fn smooth_beta(&self, width: f64) -> Self {
        if !(width > 0.0) {
            return self.clone();
        }
        let (nb, na) = (self.grid.nbeta, self.grid.nalpha);
        let reach = ((3.0 * width).ceil() as i64).min(nb as i64 / 2);
        let kernel: Vec<f64> = (-reach..=reach).map(|o| (-0.5 * (o as f64 / width).powi(2)).exp()).collect();
        let total: f64 = kernel.iter().sum();
        let kernel: Vec<T> = kernel.iter().map(|&k| T::lit(k / total)).collect();
        let mut values = vec![T::zero(); self.values.len()];
        for i in 0..nb {
            for (o, &w) in kernel.iter().enumerate() {
                let src = (i as i64 + o as i64 - reach).rem_euclid(nb as i64) as usize;
                for j in 0..na {
                    values[i * na + j] += w * self.values[src * na + j];
                }
            }
        }
        FanBeamData { grid: self.grid, values }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| x + a * y).collect();
        Ok(FanBeamData { grid: self.grid, values })
    }

    pub fn scale(&self, a: T) -> Self {
        FanBeamData { grid: self.grid, values: self.values.iter().map(|&v| a * v).collect() }
    }
}

/// `<phi, psi>_mu = int phi psi cos(alpha) d alpha d beta`.
pub fn inner_product_mu<T: Real>(a: &FanBeamData<T>, b: &FanBeamData<T>) -> Result<T> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let g = a.grid;
    let w: Vec<T> = (0..g.nalpha).map(|j| g.weight(j)).collect();
    let mut total = T::zero();
    for i in 0..g.nbeta {
        let mut row = T::zero();
        for j in 0..g.nalpha {
            row += w[j] * a.at(i, j) * b.at(i, j);
        }
        total += row;
    }
    Ok(total)
}

pub fn norm_mu<T: Real>(a: &FanBeamData<T>) -> T {
    inner_product_mu(a, a).map(|v| v.sqrt()).unwrap_or(T::zero())
}
