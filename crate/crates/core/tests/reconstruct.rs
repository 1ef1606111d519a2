mod common;

use std::f64::consts::PI;

use sm_tomo::fixtures::{gauss, random_tensor, rot_bump};
use sm_tomo::geometry::MetricParams;
use sm_tomo::reconstruct::{
    construct_first_integral, normal_operator, solve_normal, verify_first_integral, SolveOptions,
};
use sm_tomo::sm::SmField;
use sm_tomo::tensor::{ell_m, inner_product_tensor, l_m, norm_tensor, sym_derivative, SymTensorField};
use sm_tomo::tolerances as tol;

use common::{desk, Sizes};

#[test]
fn normal_operator_is_symmetric_and_nonnegative() {
    let d = desk(MetricParams::weak_bump(), Sizes::small());
    for rank in 0..3 {
        let u = random_tensor(d.grid.clone(), rank, 50).unwrap();
        let v = random_tensor(d.grid.clone(), rank, 51).unwrap();
        let nu = normal_operator(&d.rt, &u).unwrap();
        let nv = normal_operator(&d.rt, &v).unwrap();
        let a = inner_product_tensor(&d.metric, &nu, &v).unwrap();
        let b = inner_product_tensor(&d.metric, &u, &nv).unwrap();
        let scale = norm_tensor(&d.metric, &nu) * norm_tensor(&d.metric, &v);
        assert!((a - b).abs() <= tol::NORMAL_SYMMETRY * scale, "rank {rank}");
        let uu = inner_product_tensor(&d.metric, &nu, &u).unwrap();
        assert!(uu >= -1e-6 * norm_tensor(&d.metric, &u).powi(2));
    }
}

#[test]
fn normal_operator_at_the_origin_matches_line_integrals() {
    // For radial u, (N u)(0) = int over directions of the full line integral
    // through the origin: 2 pi int_{-1}^{1} u(|s|) ds.
    let d = desk(MetricParams::euclidean(), Sizes::desk(0));
    let u = gauss(d.grid.clone(), 0.3).unwrap();
    let nu = normal_operator(&d.rt, &u).unwrap();
    let centre = d.grid.index(d.grid.side() / 2, d.grid.side() / 2);
    let line = sm_tomo::quadrature::integrate(-1.0, 1.0, 64, |s: f64| (-s * s / 0.18).exp());
    let want = 2.0 * PI * line;
    assert!((nu.at(centre)[0] - want).abs() <= 1e-3 * want, "{} {want}", nu.at(centre)[0]);
}

#[test]
fn normal_operator_kills_potentials() {
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let p = SymTensorField::from_fn(d.grid.clone(), 0, |x, y| [1.0 - x * x - y * y, 0.0, 0.0]).unwrap();
    let dp = sym_derivative(&d.metric, &p).unwrap();
    let n = normal_operator(&d.rt, &dp).unwrap();
    assert!(norm_tensor(&d.metric, &n) <= 1e-3 * norm_tensor(&d.metric, &dp));
    let zero = SymTensorField::zeros(d.grid.clone(), 1).unwrap();
    assert_eq!(normal_operator(&d.rt, &zero).unwrap().max_abs(), 0.0);
}

#[test]
fn zero_target_needs_one_iteration() {
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let zero = SymTensorField::zeros(d.grid.clone(), 1).unwrap();
    let r = solve_normal(&d.rt, &zero, &SolveOptions::default()).unwrap();
    assert_eq!(r.iterations, 1);
    assert_eq!(r.tensor().unwrap().max_abs(), 0.0);
}

#[test]
fn scalar_solve_converges_with_monotone_residuals() {
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let u = gauss(d.grid.clone(), 0.4).unwrap();
    let opts = SolveOptions { tol: 1e-3, max_iter: 50, ..SolveOptions::default() };
    let r = solve_normal(&d.rt, &u, &opts).unwrap();
    assert!(r.converged && r.final_residual() <= 1e-3, "{:?}", r.residual_history);
    assert!(r.residual_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
}

#[test]
fn vector_solve_reaches_the_target() {
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let u = rot_bump(d.grid.clone()).unwrap();
    let r = solve_normal(&d.rt, &u, &SolveOptions::default()).unwrap();
    let h = r.tensor().unwrap();
    let res = normal_operator(&d.rt, h).unwrap().sub(&u).unwrap();
    assert!(norm_tensor(&d.metric, &res) <= 1e-2 * norm_tensor(&d.metric, &u));
}

#[test]
fn first_integral_of_zero_is_zero() {
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let zero = SymTensorField::zeros(d.grid.clone(), 1).unwrap();
    let r = construct_first_integral(&d.rt, &zero, &SolveOptions::first_integral()).unwrap();
    assert_eq!(r.sm().unwrap().max_abs(), 0.0);
}

#[test]
fn first_integral_of_a_constant() {
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let c = SymTensorField::from_fn(d.grid.clone(), 0, |_, _| [1.0, 0.0, 0.0]).unwrap();
    let r = construct_first_integral(&d.rt, &c, &SolveOptions::first_integral()).unwrap();
    let f = r.sm().unwrap();
    let lf = l_m(&d.metric, f, 0).unwrap();
    let gap = norm_tensor(&d.metric, &lf.sub(&c).unwrap()) / norm_tensor(&d.metric, &c);
    assert!(gap <= tol::FIRST_INTEGRAL_GAP, "{gap}");
    assert!(r.invariance_norm.unwrap() <= tol::INVARIANCE, "{:?}", r.invariance_norm);
}

#[test]
fn verification_of_the_trivial_first_integral() {
    let d = desk(MetricParams::weak_bump(), Sizes::small());
    let one = SmField::from_fn(d.grid.clone(), d.sizes.ntheta, |_, _, _| 1.0).unwrap();
    let u = SymTensorField::from_fn(d.grid.clone(), 0, |_, _| [2.0 * PI, 0.0, 0.0]).unwrap();
    let c = verify_first_integral(&d.metric, &one, &u, None).unwrap();
    assert!(c.invariance <= 1e-10 && c.projection_gap <= 1e-10 && c.divergence <= 1e-10 && c.low_degree_leakage <= 1e-10);
}

#[test]
fn verification_flags_a_transported_potential() {
    // f = ell_1(dp) is not invariant: (X f)_0 = -2 and L_1 f is not solenoidal.
    let d = desk(MetricParams::euclidean(), Sizes::small());
    let p = SymTensorField::from_fn(d.grid.clone(), 0, |x, y| [1.0 - x * x - y * y, 0.0, 0.0]).unwrap();
    let f = ell_m(&d.metric, &sym_derivative(&d.metric, &p).unwrap(), d.sizes.ntheta).unwrap();
    let u = l_m(&d.metric, &f, 1).unwrap();
    let c = verify_first_integral(&d.metric, &f, &u, None).unwrap();
    assert!(c.low_degree_leakage > 0.1 && c.divergence > 0.1, "{c:?}");
    let xf = sm_tomo::sm::apply_x(&d.metric, &f);
    let avg = l_m(&d.metric, &xf, 0).unwrap();
    for n in d.grid.interior_nodes(0.1) {
        assert!((avg.at(n)[0] / (2.0 * PI) + 2.0).abs() < 1e-10);
    }
}

#[test]
fn pullback_first_integrals_satisfy_the_dictionary() {
    let d = desk(MetricParams::weak_bump(), Sizes::desk(0));
    let phi = sm_tomo::fixtures::random_fan(d.rt.fan(), 13).smooth_beta(2.0);
    let f = d.rt.backproject(&phi).unwrap();
    for m in 1..3 {
        let u = l_m(&d.metric, &f, m).unwrap();
        let c = verify_first_integral(&d.metric, &f, &u, None).unwrap();
        assert!(c.divergence <= 1e-3 && c.low_degree_leakage <= 1e-3, "m={m}: {c:?}");
    }
}
