//! Cartesian node grid on the square `[-1, 1]^2` carrying the unit disk.
//!
//! Nodes are stored row-major (`index = j * n + i`, `i` along `x1`). The
//! grid is padded by two rings of nodes beyond the square so that cubic
//! interpolation stencils never leave the array for points of the closed
//! disk. Nodes strictly inside the unit circle form the *mask*; finite
//! differences only read masked nodes, while interpolation may read the
//! extension values every field also stores outside the disk.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::{FieldElem, Real};

pub const PAD: usize = 2;

/// Finite-difference stencil of one node along one axis.
#[derive(Clone, Copy, Debug)]
pub struct Stencil<T> {
    len: u8,
    order: u8,
    offs: [isize; 5],
    coef: [T; 5],
}

impl<T: Real> Stencil<T> {
    fn empty() -> Self {
        Stencil {
            len: 0,
            order: 0,
            offs: [0; 5],
            coef: [T::zero(); 5],
        }
    }

    fn new(order: u8, terms: &[(isize, f64)], stride: isize, inv_h: T) -> Self {
        let mut s = Self::empty();
        s.order = order;
        for (k, &(o, c)) in terms.iter().enumerate() {
            s.offs[k] = o * stride;
            s.coef[k] = T::lit(c) * inv_h;
        }
        s.len = terms.len() as u8;
        s
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    fn apply<E: FieldElem<T>>(&self, values: &[E], node: usize, channels: usize, k: usize) -> E {
        let mut acc = E::zero();
        for t in 0..self.len as usize {
            let src = (node as isize + self.offs[t]) as usize;
            acc += values[src * channels + k] * self.coef[t];
        }
        acc
    }
}

/// Cubic interpolation stencil: base node `(i-1, j-1)` plus separable weights.
#[derive(Clone, Copy, Debug)]
pub struct InterpStencil<T> {
    pub base: usize,
    pub wx: [T; 4],
    pub wy: [T; 4],
}

#[derive(Debug)]
pub struct DiskGrid<T> {
    nx: usize,
    n: usize,
    h: T,
    inside: Vec<bool>,
    weights: Vec<T>,
    stencils: Vec<[Stencil<T>; 2]>,
    /// Outside nodes near the circle with their extrapolation weights on masked nodes.
    extension: Vec<(usize, Vec<(usize, T)>)>,
}

impl<T: Real> DiskGrid<T> {
    /// Grid with `nx` nodes across `[-1, 1]`.
    pub fn new(nx: usize) -> Result<Self> {
        if nx < 9 {
            return Err(Error::InvalidParams(format!("nx = {nx} is too small (need >= 9)")));
        }
        let n = nx + 2 * PAD;
        let h = T::lit(2.0 / (nx - 1) as f64);
        let hf = 2.0 / (nx - 1) as f64;
        let coord = |i: usize| -1.0 + (i as f64 - PAD as f64) * hf;
        let mut inside = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (coord(i), coord(j));
                inside[j * n + i] = (x * x + y * y).sqrt() < 1.0 - 1e-12;
            }
        }
        let weights = area_weights(n, hf, &inside, coord)
            .into_iter()
            .map(T::lit)
            .collect();
        let mut grid = DiskGrid {
            nx,
            n,
            h,
            inside,
            weights,
            stencils: Vec::new(),
            extension: Vec::new(),
        };
        grid.stencils = (0..n * n)
            .map(|idx| [grid.build_stencil(idx, 0), grid.build_stencil(idx, 1)])
            .collect();
        grid.extension = extension_weights(n, hf, &grid.inside, coord)
            .into_iter()
            .map(|(k, ws)| (k, ws.into_iter().map(|(s, w)| (s, T::lit(w))).collect()))
            .collect();
        Ok(grid)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Side length of the padded node array.
    pub fn side(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> T {
        self.h
    }

    #[inline]
    pub fn coord(&self, i: usize) -> T {
        -T::one() + (T::from_usize_lossy(i) - T::from_usize_lossy(PAD)) * self.h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    #[inline]
    pub fn xy(&self, idx: usize) -> (T, T) {
        let (i, j) = self.ij(idx);
        (self.coord(i), self.coord(j))
    }

    #[inline]
    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn mask(&self) -> &[bool] {
        &self.inside
    }

    /// Area quadrature weights; zero off the mask, summing to `pi`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn inside_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.inside[k])
    }

    /// Smallest finite-difference order used at `idx` over both axes.
    pub fn fd_order(&self, idx: usize) -> u8 {
        self.stencils[idx][0].order.min(self.stencils[idx][1].order)
    }

    /// Masked nodes at Euclidean distance at least `margin` from the circle.
    pub fn interior_nodes(&self, margin: T) -> Vec<usize> {
        self.inside_nodes()
            .filter(|&k| {
                let (x, y) = self.xy(k);
                (x * x + y * y).sqrt() <= T::one() - margin
            })
            .collect()
    }

    fn build_stencil(&self, idx: usize, axis: usize) -> Stencil<T> {
        if !self.inside[idx] {
            return Stencil::empty();
        }
        let (i, j) = self.ij(idx);
        let pos = if axis == 0 { i } else { j } as isize;
        let stride: isize = if axis == 0 { 1 } else { self.n as isize };
        let ok = |k: isize| {
            let p = pos + k;
            p >= 0 && (p as usize) < self.n && self.inside[(idx as isize + k * stride) as usize]
        };
        let reach = |dir: isize| (1..=4).take_while(|&k| ok(dir * k)).count() as isize;
        let (left, right) = (reach(-1), reach(1));
        // widest window of at most 5 masked nodes, as centred as the mask allows
        let width = (left + right + 1).min(5);
        if width < 2 {
            return Stencil::empty();
        }
        let mut lo = -(width / 2).min(left);
        if lo + width - 1 > right {
            lo = right - width + 1;
        }
        let offs: Vec<isize> = (lo..lo + width).collect();
        let terms: Vec<(isize, f64)> = offs.iter().copied().zip(derivative_weights(&offs)).collect();
        Stencil::new((width - 1) as u8, &terms, stride, T::one() / self.h)
    }

    /// Partial derivative along `axis` of a multi-channel nodal array
    /// (`values[node * channels + k]`). Masked nodes only; zero elsewhere.
    pub fn derivative<E: FieldElem<T>>(&self, values: &[E], channels: usize, axis: usize) -> Vec<E> {
        assert_eq!(values.len(), self.len() * channels);
        let mut out = vec![E::zero(); values.len()];
        for node in 0..self.len() {
            if !self.inside[node] {
                continue;
            }
            let st = &self.stencils[node][axis];
            for k in 0..channels {
                out[node * channels + k] = st.apply(values, node, channels, k);
            }
        }
        out
    }

    /// Overwrites the nodes just outside the disk with a local quadratic
    /// least-squares extrapolation of the masked values. Nodes farther out
    /// (never reached by interpolation at points of the closed disk) are zeroed.
    pub fn extend_outside<E: FieldElem<T>>(&self, values: &mut [E], channels: usize) {
        assert_eq!(values.len(), self.len() * channels);
        for node in 0..self.len() {
            if !self.inside[node] {
                for k in 0..channels {
                    values[node * channels + k] = E::zero();
                }
            }
        }
        for (node, ws) in &self.extension {
            for k in 0..channels {
                let mut acc = E::zero();
                for &(src, w) in ws {
                    acc += values[src * channels + k] * w;
                }
                values[node * channels + k] = acc;
            }
        }
    }

    /// Cubic Lagrange interpolation stencil for the point `(x1, x2)`.
    #[inline]
    pub fn interp_stencil(&self, x1: T, x2: T) -> InterpStencil<T> {
        let (i, tx) = self.locate(x1);
        let (j, ty) = self.locate(x2);
        InterpStencil {
            base: (j - 1) * self.n + (i - 1),
            wx: lagrange4(tx),
            wy: lagrange4(ty),
        }
    }

    #[inline]
    fn locate(&self, x: T) -> (usize, T) {
        let u = (x + T::one()) / self.h + T::from_usize_lossy(PAD);
        let max_i = self.n - 3;
        let fl = u.floor();
        let mut i = fl.to_isize().unwrap_or(1).clamp(1, max_i as isize) as usize;
        let mut t = u - T::from_usize_lossy(i);
        if i > max_i {
            i = max_i;
            t = u - T::from_usize_lossy(i);
        }
        (i, t)
    }

    /// Interpolates a single-channel nodal array.
    pub fn interpolate<E: FieldElem<T>>(&self, values: &[E], x1: T, x2: T) -> E {
        let st = self.interp_stencil(x1, x2);
        self.apply_interp(&st, values, 1, 0)
    }

    #[inline]
    pub fn apply_interp<E: FieldElem<T>>(
        &self,
        st: &InterpStencil<T>,
        values: &[E],
        channels: usize,
        k: usize,
    ) -> E {
        let mut acc = E::zero();
        for (b, &wy) in st.wy.iter().enumerate() {
            let row = st.base + b * self.n;
            let mut racc = E::zero();
            for (a, &wx) in st.wx.iter().enumerate() {
                racc += values[(row + a) * channels + k] * wx;
            }
            acc += racc * wy;
        }
        acc
    }
}

/// Weights of the first derivative at 0 of the interpolant through `offs`.
fn derivative_weights(offs: &[isize]) -> Vec<f64> {
    let x: Vec<f64> = offs.iter().map(|&o| o as f64).collect();
    (0..x.len())
        .map(|i| {
            // L_i'(0) = sum_{m != i} 1/(x_i - x_m) prod_{l != i, m} (0 - x_l)/(x_i - x_l)
            let mut total = 0.0;
            for m in 0..x.len() {
                if m == i {
                    continue;
                }
                let mut prod = 1.0 / (x[i] - x[m]);
                for l in 0..x.len() {
                    if l != i && l != m {
                        prod *= -x[l] / (x[i] - x[l]);
                    }
                }
                total += prod;
            }
            total
        })
        .collect()
}

/// Cubic Lagrange weights for nodes at offsets -1, 0, 1, 2.
#[inline]
fn lagrange4<T: Real>(t: T) -> [T; 4] {
    let one = T::one();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let tm1 = t - one;
    let tm2 = t - two;
    let tp1 = t + one;
    [
        -t * tm1 * tm2 / six,
        tp1 * tm1 * tm2 / two,
        -tp1 * t * tm2 / two,
        tp1 * t * tm1 / six,
    ]
}

/// Area and centroid of `[x0, x1] x [y0, y1]` intersected with the unit disk.
pub(crate) fn cell_piece(x0: f64, x1: f64, y0: f64, y1: f64) -> (f64, f64, f64) {
    let (gx, gw) = gauss_legendre(16);
    let mut brk = vec![x0, x1];
    for y in [y0, y1] {
        if y.abs() < 1.0 {
            let s = (1.0 - y * y).sqrt();
            brk.push(s);
            brk.push(-s);
        }
    }
    brk.push(1.0);
    brk.push(-1.0);
    brk.retain(|&b| b >= x0 && b <= x1);
    brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    brk.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let seg = |x: f64| -> (f64, f64) {
        let s = (1.0 - x * x).max(0.0).sqrt();
        let bot = y0.max(-s);
        let top = y1.min(s);
        if top > bot {
            (bot, top)
        } else {
            (0.0, 0.0)
        }
    };
    let (mut area, mut mx, mut my) = (0.0, 0.0, 0.0);
    let mut add = |x: f64, w: f64| {
        let (bot, top) = seg(x);
        let len = top - bot;
        area += w * len;
        mx += w * x * len;
        my += w * 0.5 * (top * top - bot * bot);
    };
    for win in brk.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b - a <= 0.0 {
            continue;
        }
        if (b - 1.0).abs() < 1e-15 {
            // x = 1 - (1 - a) v^2 removes the square-root endpoint singularity
            for (&v, &w) in gx.iter().zip(&gw) {
                let v = 0.5 * (v + 1.0);
                let x = 1.0 - (1.0 - a) * v * v;
                add(x, 0.5 * w * 2.0 * (1.0 - a) * v);
            }
        } else if (a + 1.0).abs() < 1e-15 {
            for (&v, &w) in gx.iter().zip(&gw) {
                let v = 0.5 * (v + 1.0);
                let x = -1.0 + (b + 1.0) * v * v;
                add(x, 0.5 * w * 2.0 * (b + 1.0) * v);
            }
        } else {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            for (&v, &w) in gx.iter().zip(&gw) {
                add(mid + half * v, half * w);
            }
        }
    }
    if area <= 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        (area, mx / area, my / area)
    }
}

/// Extrapolation weights for outside nodes within reach of interpolation
/// stencils: quadratic least squares over the nearest masked nodes.
fn extension_weights(
    n: usize,
    h: f64,
    inside: &[bool],
    coord: impl Fn(usize) -> f64,
) -> Vec<(usize, Vec<(usize, f64)>)> {
    const SOURCES: usize = 16;
    let reach = 1.0 + 3.0 * h;
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let idx = j * n + i;
            let (x, y) = (coord(i), coord(j));
            if inside[idx] || (x * x + y * y).sqrt() > reach {
                continue;
            }
            let mut cand = Vec::new();
            for dj in -6isize..=6 {
                for di in -6isize..=6 {
                    let (ii, jj) = (i as isize + di, j as isize + dj);
                    if ii < 0 || jj < 0 || ii as usize >= n || jj as usize >= n {
                        continue;
                    }
                    let k = jj as usize * n + ii as usize;
                    if inside[k] {
                        cand.push(((di * di + dj * dj) as f64, k, di as f64, dj as f64));
                    }
                }
            }
            cand.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            cand.truncate(SOURCES);
            let basis = |u: f64, v: f64| nalgebra::Vector6::new(1.0, u, v, u * u, u * v, v * v);
            let mut gram = nalgebra::Matrix6::<f64>::zeros();
            for c in &cand {
                let b = basis(c.2, c.3);
                gram += b * b.transpose();
            }
            let Some(inv) = gram.try_inverse() else { continue };
            // evaluation at the node itself: offset (0, 0)
            let coef = inv * basis(0.0, 0.0);
            let ws = cand.iter().map(|c| (c.1, coef.dot(&basis(c.2, c.3)))).collect();
            out.push((idx, ws));
        }
    }
    out
}

/// Quadrature weights: every node cell contributes its clipped area at the
/// clipped centroid, spread over masked nodes with weights exact for affine
/// integrands.
fn area_weights(n: usize, h: f64, inside: &[bool], coord: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    let half = 0.5 * h;
    let r_full = |x: f64, y: f64| ((x.abs() + half).powi(2) + (y.abs() + half).powi(2)).sqrt();
    let r_near = |x: f64, y: f64| {
        let dx = (x.abs() - half).max(0.0);
        let dy = (y.abs() - half).max(0.0);
        (dx * dx + dy * dy).sqrt()
    };
    let mut pieces = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (coord(i), coord(j));
            let idx = j * n + i;
            if r_near(x, y) >= 1.0 {
                continue;
            }
            if r_full(x, y) <= 1.0 && inside[idx] {
                w[idx] += h * h;
                continue;
            }
            let (a, cx, cy) = cell_piece(x - half, x + half, y - half, y + half);
            if a > 0.0 {
                pieces.push((i, j, a, cx, cy));
            }
        }
    }
    let is_in = |i: isize, j: isize| {
        i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n && inside[j as usize * n + i as usize]
    };
    for (i, j, a, cx, cy) in pieces {
        // nearest masked node to the centroid
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for dj in -3isize..=3 {
            for di in -3isize..=3 {
                let (ii, jj) = (i as isize + di, j as isize + dj);
                if !is_in(ii, jj) {
                    continue;
                }
                let d = (coord(ii as usize) - cx).powi(2) + (coord(jj as usize) - cy).powi(2);
                if d < best_d {
                    best_d = d;
                    best = Some((ii, jj));
                }
            }
        }
        let Some((i0, j0)) = best else { continue };
        let dx = (cx - coord(i0 as usize)) / h;
        let dy = (cy - coord(j0 as usize)) / h;
        let mut w0 = a;
        for (d, along_x) in [(dx, true), (dy, false)] {
            if d.abs() < 1e-14 {
                continue;
            }
            let s = d.signum() as isize;
            let pick = [s, -s].into_iter().find(|&o| {
                if along_x {
                    is_in(i0 + o, j0)
                } else {
                    is_in(i0, j0 + o)
                }
            });
            if let Some(o) = pick {
                let c = d / o as f64;
                let (ni, nj) = if along_x { (i0 + o, j0) } else { (i0, j0 + o) };
                w[nj as usize * n + ni as usize] += a * c;
                w0 -= a * c;
            }
        }
        w[j0 as usize * n + i0 as usize] += w0;
    }
    w
}
