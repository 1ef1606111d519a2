mod common;

use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use proptest::prelude::*;
use sm_tomo::fixtures::{random_fan, random_sm, random_tensor};
use sm_tomo::geometry::{exit_time, inflow_coordinates, make_metric, MetricParams, PhasePoint, TraceOptions};
use sm_tomo::grid::DiskGrid;
use sm_tomo::io::{read_fan_csv, write_fan_csv};
use sm_tomo::sm::{fiber_fourier, harmonic_project, inner_product_sm, norm_sm};
use sm_tomo::tensor::{ell_m, inner_product_tensor, l_m, solenoidal_decompose, DecomposeOptions};
use sm_tomo::tolerances as tol;
use sm_tomo::transform::{inner_product_mu, norm_mu, FanBeamGrid};
use sm_tomo::{Grid, Metric};

use common::{desk, Desk, Sizes};

fn small_grid() -> Arc<Grid> {
    static G: OnceLock<Arc<Grid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(DiskGrid::new(33).unwrap())).clone()
}

fn bump_desk() -> &'static Desk {
    static D: OnceLock<Desk> = OnceLock::new();
    D.get_or_init(|| desk(MetricParams::weak_bump(), Sizes::small()))
}

fn metric() -> Metric {
    make_metric(MetricParams::weak_bump()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn fiber_transform_round_trips(seed in 0u64..1000) {
        let f = random_sm(small_grid(), 64, seed).unwrap();
        let back = fiber_fourier(&f).synthesize();
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!((a - Complex::new(*b, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn real_fields_have_conjugate_symmetric_spectra(seed in 0u64..1000) {
        let f = random_sm(small_grid(), 64, seed).unwrap();
        let s = fiber_fourier(&f);
        for node in (0..small_grid().len()).step_by(41) {
            for k in 1..20isize {
                prop_assert!((s.at(node, -k) - s.at(node, k).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn harmonic_components_sum_to_the_field(seed in 0u64..1000) {
        let f = random_sm(small_grid(), 64, seed).unwrap();
        let mut sum = harmonic_project(&f, 0).unwrap().field;
        for m in 1..=21 {
            sum = sum.add(&harmonic_project(&f, m).unwrap().field).unwrap();
        }
        prop_assert!(sum.sub(&f).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn ell_and_fiber_integral_stay_dual(seed in 0u64..1000, rank in 0usize..3) {
        let m = metric();
        let u = random_tensor(small_grid(), rank, seed).unwrap();
        let f = random_sm(small_grid(), 64, seed + 1).unwrap();
        let a = inner_product_sm(&m, &ell_m(&m, &u, 64).unwrap(), &f).unwrap();
        let b = inner_product_tensor(&m, &u, &l_m(&m, &f, rank).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= tol::ELL_DUALITY * (1.0 + a.abs()));
    }

    #[test]
    fn decomposition_recomposes(seed in 0u64..1000, rank in 1usize..3) {
        let m = metric();
        let v = random_tensor(small_grid(), rank, seed).unwrap();
        let pair = solenoidal_decompose(&m, &v, &DecomposeOptions::default()).unwrap();
        prop_assert!(pair.residuals.recomposition_norm <= tol::DECOMPOSE_RECOMPOSITION);
        prop_assert!(pair.residuals.div_norm <= tol::DECOMPOSE_DIVERGENCE);
    }

    #[test]
    fn fan_csv_is_lossless(seed in 0u64..1000, nbeta in 4usize..40, nalpha in 2usize..20) {
        let g = FanBeamGrid::new(nbeta, nalpha).unwrap();
        let phi = random_fan::<f64>(g, seed);
        let mut buf = Vec::new();
        write_fan_csv(&phi, &mut buf).unwrap();
        let back = read_fan_csv::<f64, _>(g, buf.as_slice()).unwrap();
        prop_assert_eq!(back.values, phi.values);
    }

    #[test]
    fn chord_time_is_symmetric(x in -0.6f64..0.6, y in -0.6f64..0.6, th in 0.0f64..6.28) {
        let m = metric();
        let o = TraceOptions::with_step(1e-2);
        let p = PhasePoint::new(x, y, th);
        let a = exit_time(&m, p, o).unwrap() + inflow_coordinates(&m, p, o).unwrap().1;
        let q = p.reversed();
        let b = exit_time(&m, q, o).unwrap() + inflow_coordinates(&m, q, o).unwrap().1;
        prop_assert!((a - b).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn transform_and_pullback_are_adjoint(seed in 0u64..1000) {
        let d = bump_desk();
        let f = random_sm(d.grid.clone(), d.sizes.ntheta, seed).unwrap();
        let phi = random_fan(d.rt.fan(), seed + 7);
        let a = inner_product_mu(&d.rt.forward_i(&f).unwrap(), &phi).unwrap();
        let b = inner_product_sm(&d.metric, &f, &d.rt.backproject(&phi).unwrap()).unwrap();
        let scale = norm_sm(&d.metric, &f) * norm_mu(&phi);
        prop_assert!((a - b).abs() <= tol::ADJOINT * scale);
    }
}
