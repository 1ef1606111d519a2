//! Named test fields and seeded random smooth fields.

use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use crate::scalar::Real;
use crate::sm::SmField;
use crate::tensor::SymTensorField;
use crate::transform::{FanBeamData, FanBeamGrid};

/// Width of the default Gaussian bump.
pub const BUMP_WIDTH: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// `p = 1 - r^2`.
    PPoly,
    /// The rotation field `(-x2, x1)`.
    Rot,
    /// Constant trace-free 2-tensor.
    Tf2,
    /// `exp(-r^2 / (2 s^2))`.
    Gauss,
    /// Seeded sum of Gaussian bumps, one per component.
    Random,
}

impl Fixture {
    pub const ALL: [Fixture; 5] = [Fixture::PPoly, Fixture::Rot, Fixture::Tf2, Fixture::Gauss, Fixture::Random];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::PPoly => "P_POLY",
            Fixture::Rot => "ROT",
            Fixture::Tf2 => "TF2",
            Fixture::Gauss => "GAUSS",
            Fixture::Random => "RANDOM",
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Fixture::PPoly | Fixture::Gauss => 0,
            Fixture::Rot => 1,
            Fixture::Tf2 => 2,
            Fixture::Random => 1,
        }
    }

    pub fn build<T: Real>(self, grid: Arc<DiskGrid<T>>, seed: u64) -> Result<SymTensorField<T>> {
        match self {
            Fixture::PPoly => p_poly(grid),
            Fixture::Rot => rot(grid),
            Fixture::Tf2 => tf2(grid),
            Fixture::Gauss => gauss(grid, BUMP_WIDTH),
            Fixture::Random => random_tensor(grid, self.rank(), seed),
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == key || (key == "SEEDED_RANDOM" && *f == Fixture::Random))
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

pub fn p_poly<T: Real>(grid: Arc<DiskGrid<T>>) -> Result<SymTensorField<T>> {
    SymTensorField::from_fn(grid, 0, |x, y| [T::one() - x * x - y * y, T::zero(), T::zero()])
}

pub fn rot<T: Real>(grid: Arc<DiskGrid<T>>) -> Result<SymTensorField<T>> {
    SymTensorField::from_fn(grid, 1, |x, y| [-y, x, T::zero()])
}

pub fn tf2<T: Real>(grid: Arc<DiskGrid<T>>) -> Result<SymTensorField<T>> {
    SymTensorField::from_fn(grid, 2, |_, _| [T::one(), T::lit(0.5), -T::one()])
}

pub fn bump<T: Real>(x: T, y: T, width: T) -> T {
    (-(x * x + y * y) / (T::lit(2.0) * width * width)).exp()
}

pub fn gauss<T: Real>(grid: Arc<DiskGrid<T>>, width: f64) -> Result<SymTensorField<T>> {
    let w = T::lit(width);
    SymTensorField::from_fn(grid, 0, |x, y| [bump(x, y, w), T::zero(), T::zero()])
}

/// `(-x2, x1)` damped by the default bump; divergence free on any conformal disk.
pub fn rot_bump<T: Real>(grid: Arc<DiskGrid<T>>) -> Result<SymTensorField<T>> {
    let w = T::lit(BUMP_WIDTH);
    SymTensorField::from_fn(grid, 1, |x, y| {
        let b = bump(x, y, w);
        [-y * b, x * b, T::zero()]
    })
}

/// Potentials vanishing on the circle, for the kernel and decomposition
/// suites: three scalars for `rank = 0` and three 1-forms for `rank = 1`.
pub fn boundary_potentials<T: Real>(grid: Arc<DiskGrid<T>>, rank: usize) -> Result<Vec<(&'static str, SymTensorField<T>)>> {
    let one = T::one();
    let w = T::lit(BUMP_WIDTH);
    let q = |x: T, y: T| one - x * x - y * y;
    let cut = |x: T, y: T| {
        let s = q(x, y).max(T::zero());
        s * s * s
    };
    match rank {
        0 => Ok(vec![
            ("poly", p_poly(grid.clone())?),
            ("poly_x1", SymTensorField::from_fn(grid.clone(), 0, |x, y| [q(x, y) * (x + T::lit(0.5) * y * y), T::zero(), T::zero()])?),
            ("bump", SymTensorField::from_fn(grid, 0, |x, y| [bump(x - T::lit(0.2), y, w) * cut(x, y), T::zero(), T::zero()])?),
        ]),
        1 => Ok(vec![
            ("radial", SymTensorField::from_fn(grid.clone(), 1, |x, y| [q(x, y) * x, q(x, y) * y, T::zero()])?),
            ("swirl", SymTensorField::from_fn(grid.clone(), 1, |x, y| [-q(x, y) * y, q(x, y) * x, T::zero()])?),
            ("bump", SymTensorField::from_fn(grid, 1, |x, y| {
                let b = bump(x, y + T::lit(0.1), w) * cut(x, y);
                [b, b * x, T::zero()]
            })?),
        ]),
        r => Err(Error::UnsupportedRank(r)),
    }
}

struct Bumps {
    terms: Vec<(f64, f64, f64, f64)>,
}

impl Bumps {
    fn draw(rng: &mut ChaCha8Rng, count: usize) -> Self {
        let terms = (0..count)
            .map(|_| {
                let r = 0.5 * rng.random::<f64>().sqrt();
                let t = std::f64::consts::TAU * rng.random::<f64>();
                let width = 0.2 + 0.15 * rng.random::<f64>();
                let amp = 2.0 * rng.random::<f64>() - 1.0;
                (r * t.cos(), r * t.sin(), width, amp)
            })
            .collect();
        Bumps { terms }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(cx, cy, w, a)| a * bump(x - cx, y - cy, w)).sum()
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth random tensor: every component is a sum of four Gaussian bumps.
pub fn random_tensor<T: Real>(grid: Arc<DiskGrid<T>>, rank: usize, seed: u64) -> Result<SymTensorField<T>> {
    let mut r = rng(seed);
    let comps: Vec<Bumps> = (0..rank + 1).map(|_| Bumps::draw(&mut r, 4)).collect();
    SymTensorField::from_fn(grid, rank, |x, y| {
        let (x, y) = (x.as_f64(), y.as_f64());
        let mut v = [T::zero(); 3];
        for (c, b) in comps.iter().enumerate() {
            v[c] = T::lit(b.eval(x, y));
        }
        v
    })
}

/// Smooth random function on the sphere bundle with fiber degrees 0 to 3.
pub fn random_sm<T: Real>(grid: Arc<DiskGrid<T>>, ntheta: usize, seed: u64) -> Result<SmField<T>> {
    let mut r = rng(seed);
    let modes: Vec<(Bumps, Bumps)> = (0..4).map(|_| (Bumps::draw(&mut r, 3), Bumps::draw(&mut r, 3))).collect();
    SmField::from_fn(grid, ntheta, |x, y, th| {
        let (x, y, th) = (x.as_f64(), y.as_f64(), th.as_f64());
        let v: f64 = modes
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let kt = k as f64 * th;
                a.eval(x, y) * kt.cos() + if k == 0 { 0.0 } else { b.eval(x, y) * kt.sin() }
            })
            .sum();
        T::lit(v)
    })
}

/// Smooth random boundary data: trigonometric in beta, polynomial in `sin alpha`.
pub fn random_fan<T: Real>(fan: FanBeamGrid, seed: u64) -> FanBeamData<T> {
    let mut r = rng(seed);
    let coef: Vec<(usize, usize, f64, f64)> = (0..4)
        .flat_map(|j| (0..3).map(move |k| (j, k)))
        .map(|(j, k)| (j, k, 2.0 * r.random::<f64>() - 1.0, std::f64::consts::TAU * r.random::<f64>()))
        .collect();
    FanBeamData::from_fn(fan, |b: T, a: T| {
        let (b, s) = (b.as_f64(), a.as_f64().sin());
        T::lit(coef.iter().map(|&(j, k, c, ph)| c * (j as f64 * b + ph).cos() * s.powi(k as i32)).sum())
    })
}
