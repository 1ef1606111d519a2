use std::f64::consts::PI;
use std::sync::Arc;

use sm_tomo::fixtures::{bump, random_sm, random_tensor};
use sm_tomo::geometry::{make_metric, MetricParams};
use sm_tomo::grid::DiskGrid;
use sm_tomo::sm::{inner_product_sm, SmField};
use sm_tomo::tensor::{
    boundary_flux, divergence, ell_m, inner_product_tensor, l_m, norm_tensor, solenoidal_decompose, solenoidal_extension_m1,
    sym_derivative, DecomposeOptions, Decomposer, ExtensionOptions, SymTensorField,
};
use sm_tomo::tolerances as tol;
use sm_tomo::{Grid, Metric, Tensor};

fn grid(nx: usize) -> Arc<Grid> {
    Arc::new(DiskGrid::new(nx).unwrap())
}

fn bump_metric() -> Metric {
    make_metric(MetricParams::weak_bump()).unwrap()
}

fn sup_on(u: &Tensor, nodes: &[usize]) -> f64 {
    nodes.iter().flat_map(|&n| u.components().iter().map(move |c| c[n].abs())).fold(0.0, f64::max)
}

#[test]
fn ell_examples() {
    let flat = Metric::euclidean();
    let g = grid(33);
    let n = g.index(14, 20);
    let (x, y) = g.xy(n);
    let e11 = SymTensorField::from_fn(g.clone(), 2, |_, _| [1.0, 0.0, 0.0]).unwrap();
    let f = ell_m(&flat, &e11, 64).unwrap();
    let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
    let r = ell_m(&flat, &rot, 64).unwrap();
    for k in 0..64 {
        let t = f.theta(k);
        assert!((f.at(n, k) - t.cos().powi(2)).abs() < 1e-14);
        assert!((r.at(n, k) - (-y * t.cos() + x * t.sin())).abs() < 1e-14);
    }
    // The metric itself contracts to one on unit vectors.
    let m = bump_metric();
    let gm = SymTensorField::from_fn(g.clone(), 2, |x, y| {
        let e = (2.0 * m.lambda(x, y)).exp();
        [e, 0.0, e]
    })
    .unwrap();
    let one = ell_m(&m, &gm, 64).unwrap();
    for node in g.inside_nodes() {
        assert!(one.fiber(node).iter().all(|v| (v - 1.0).abs() < 1e-13));
    }
}

#[test]
fn fiber_integral_examples() {
    let flat = Metric::euclidean();
    let g = grid(33);
    let n = g.index(16, 16);
    let one = SmField::from_fn(g.clone(), 64, |_, _, _| 1.0).unwrap();
    assert!((l_m(&flat, &one, 0).unwrap().at(n)[0] - 2.0 * PI).abs() < 1e-12);
    let c = SmField::from_fn(g.clone(), 64, |_, _, t: f64| t.cos()).unwrap();
    let v = l_m(&flat, &c, 1).unwrap().at(n);
    assert!((v[0] - PI).abs() < 1e-12 && v[1].abs() < 1e-12);
    let c2 = SmField::from_fn(g.clone(), 64, |_, _, t: f64| (2.0 * t).cos()).unwrap();
    let v = l_m(&flat, &c2, 2).unwrap().at(n);
    assert!((v[0] - PI / 2.0).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] + PI / 2.0).abs() < 1e-12);
}

#[test]
fn ell_and_fiber_integral_are_dual() {
    let m = bump_metric();
    let g = grid(33);
    for rank in 0..3 {
        let u = random_tensor(g.clone(), rank, 4 + rank as u64).unwrap();
        let f = random_sm(g.clone(), 64, 21).unwrap();
        let a = inner_product_sm(&m, &ell_m(&m, &u, 64).unwrap(), &f).unwrap();
        let b = inner_product_tensor(&m, &u, &l_m(&m, &f, rank).unwrap()).unwrap();
        assert!((a - b).abs() <= tol::ELL_DUALITY * (1.0 + a.abs()), "rank {rank}: {a} {b}");
    }
}

#[test]
fn derivative_and_divergence_examples() {
    let flat = Metric::euclidean();
    let g = grid(33);
    let inside: Vec<usize> = g.inside_nodes().collect();
    let p = SymTensorField::from_fn(g.clone(), 0, |x, y| [1.0 - x * x - y * y, 0.0, 0.0]).unwrap();
    let dp = sym_derivative(&flat, &p).unwrap();
    let want = SymTensorField::from_fn(g.clone(), 1, |x, y| [-2.0 * x, -2.0 * y, 0.0]).unwrap();
    assert!(sup_on(&dp.sub(&want).unwrap(), &inside) < 1e-12);
    let lap = divergence(&flat, &dp).unwrap();
    assert!(inside.iter().all(|&n| (lap.at(n)[0] + 4.0).abs() < 1e-10));

    let q = SymTensorField::from_fn(g.clone(), 1, |_, y| [y, 0.0, 0.0]).unwrap();
    let dq = sym_derivative(&flat, &q).unwrap();
    assert!(inside.iter().all(|&n| {
        let v = dq.at(n);
        v[0].abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12 && v[2].abs() < 1e-12
    }));

    let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
    assert!(sup_on(&divergence(&flat, &rot).unwrap(), &inside) < 1e-12);
    let e11 = SymTensorField::from_fn(g.clone(), 2, |_, _| [1.0, 0.0, 0.0]).unwrap();
    assert!(sup_on(&divergence(&flat, &e11).unwrap(), &inside) < 1e-12);
}

#[test]
fn derivative_and_divergence_are_adjoint_for_compact_potentials() {
    let m = bump_metric();
    let g = grid(65);
    let cut = |x: f64, y: f64| (1.0f64 - (x * x + y * y) / 0.64).max(0.0).powi(4);
    for rank in 1..3 {
        let u = random_tensor(g.clone(), rank, 30 + rank as u64).unwrap();
        let p = SymTensorField::from_fn(g.clone(), rank - 1, |x, y| {
            let c = cut(x, y) * bump(x, y - 0.1, 0.35);
            [c, c * x, 0.0]
        })
        .unwrap();
        let a = inner_product_tensor(&m, &u, &sym_derivative(&m, &p).unwrap()).unwrap();
        let b = inner_product_tensor(&m, &divergence(&m, &u).unwrap(), &p).unwrap();
        let scale = norm_tensor(&m, &u) * norm_tensor(&m, &p);
        assert!((a + b).abs() <= tol::GREEN_PAIR * scale, "rank {rank}: {}", (a + b).abs() / scale);
    }
}

#[test]
fn green_identity_with_boundary_flux() {
    // (u, dv) = (j_nu u, v)_boundary for solenoidal u.
    let flat = Metric::euclidean();
    let g = grid(65);
    let u = SymTensorField::from_fn(g.clone(), 1, |x, y| [1.0 + y * y, 1.0 + x * x, 0.0]).unwrap();
    let v = SymTensorField::from_fn(g.clone(), 0, |x, y| [x + 0.5 * x * y + 1.0, 0.0, 0.0]).unwrap();
    let lhs = inner_product_tensor(&flat, &u, &sym_derivative(&flat, &v).unwrap()).unwrap();
    let flux = boundary_flux(&u, 512).unwrap();
    let db = 2.0 * PI / 512.0;
    let rhs: f64 = flux
        .beta
        .iter()
        .zip(&flux.values[0])
        .map(|(&b, &j)| j * (b.cos() + 0.5 * b.cos() * b.sin() + 1.0) * db)
        .sum();
    assert!((lhs - rhs).abs() <= tol::GREEN_BOUNDARY * lhs.abs().max(rhs.abs()), "{lhs} {rhs}");
}

#[test]
fn boundary_flux_examples() {
    let g = grid(33);
    let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
    let f = boundary_flux(&rot, 64).unwrap();
    assert!(f.values[0].iter().all(|v| v.abs() < 1e-10));
    let e2 = SymTensorField::from_fn(g.clone(), 1, |_, _| [0.0, 1.0, 0.0]).unwrap();
    let f = boundary_flux(&e2, 64).unwrap();
    for (b, v) in f.beta.iter().zip(&f.values[0]) {
        assert!((v - b.sin()).abs() < 1e-10);
    }
}

#[test]
fn flat_decomposition_of_a_constructed_field() {
    let flat = Metric::euclidean();
    let g = grid(65);
    let p = SymTensorField::from_fn(g.clone(), 0, |x, y| [1.0 - x * x - y * y, 0.0, 0.0]).unwrap();
    let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
    let v = sym_derivative(&flat, &p).unwrap().add(&rot).unwrap();
    let pair = solenoidal_decompose(&flat, &v, &DecomposeOptions::default()).unwrap();
    assert!(norm_tensor(&flat, &pair.p.sub(&p).unwrap()) <= tol::DECOMPOSE_POTENTIAL * norm_tensor(&flat, &p));
    assert!(norm_tensor(&flat, &pair.v_s.sub(&rot).unwrap()) <= tol::DECOMPOSE_POTENTIAL * norm_tensor(&flat, &rot));
}

#[test]
fn random_rank_two_residuals_and_orthogonality() {
    let m = bump_metric();
    let g = grid(65);
    let v = random_tensor(g.clone(), 2, 12).unwrap();
    let dec = Decomposer::new(&m, g.clone(), 2).unwrap();
    let pair = dec.decompose(&v, &DecomposeOptions::default()).unwrap();
    let r = pair.residuals;
    assert!(r.div_norm <= tol::DECOMPOSE_DIVERGENCE, "{}", r.div_norm);
    assert!(r.recomposition_norm <= tol::DECOMPOSE_RECOMPOSITION, "{}", r.recomposition_norm);
    let dp = dec.d(&pair.p).unwrap();
    let ip = dec.inner_product(&pair.v_s, &dp).unwrap();
    let scale = dec.inner_product(&pair.v_s, &pair.v_s).unwrap().sqrt() * dec.inner_product(&dp, &dp).unwrap().sqrt();
    assert!(ip.abs() <= tol::DECOMPOSE_ORTHOGONALITY * scale, "{}", ip.abs() / scale);
}

#[test]
fn extension_examples() {
    let flat = Metric::euclidean();
    let g = grid(33);
    let opts = ExtensionOptions::default();
    let zero = SymTensorField::zeros(g.clone(), 1).unwrap();
    let ext = solenoidal_extension_m1(&flat, &zero, &opts).unwrap();
    assert!(ext.eval(1.2, 0.1).unwrap().iter().all(|v| v.abs() < 1e-14));
    let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
    let ext = solenoidal_extension_m1(&flat, &rot, &opts).unwrap();
    assert!(ext.eval(1.1, -0.3).unwrap().iter().all(|v| v.abs() < 1e-8));
    let radial = SymTensorField::from_fn(g.clone(), 1, |x, y| [x, y, 0.0]).unwrap();
    assert!(solenoidal_extension_m1(&flat, &radial, &opts).is_err());
}
