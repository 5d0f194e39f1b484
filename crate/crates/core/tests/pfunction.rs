use pflab::grid::{build_grid, DomainSpec, Field};
use pflab::nonlinearity::{build_quadrature, exact_profile, Nonlinearity};
use pflab::pfunction::{
    bochner_residual, default_grad_floor, p_residual, p_quasilinear, p_semilinear,
    verify_estimate,
};
use pflab::solvers::{run_window, QuasilinearProfile, WindowConfig};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rotated_kink_has_p_of_order_h_squared(theta in 0.0f64..6.3, alpha in -1.0f64..1.0) {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        let prof = exact_profile(&q, &[theta.cos(), theta.sin()], alpha).unwrap();
        let g = build_grid(&DomainSpec::dirichlet(&[-4.0, -4.0], &[8.0, 8.0]), &[80, 80]).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| prof.value(x));
        let h = g.h_min();
        prop_assert!(p_semilinear(&f, &nl).max_abs() <= 0.2 * h * h);
        // ξ(s) <= s, so the quasilinear P of the kink is nonpositive up to
        // the same error.
        let pq = p_quasilinear(&f, &nl, &QuasilinearProfile::minimal_surface());
        prop_assert!(pq.sup().0 <= 0.2 * h * h);
    }

    #[test]
    fn bochner_form_is_bitwise_direct_form(c in prop::collection::vec(-0.4f64..0.4, 3)) {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[128]).unwrap();
        let init = |x: &[f64]| c[0] * x[0].sin() + c[1] * (2.0 * x[0]).cos() + c[2] * (3.0 * x[0]).sin();
        let traj = run_window(init, &g, &nl, None, &WindowConfig::new(0.0, 0.05, 10)).unwrap();
        for (a, b) in traj.pairs() {
            let floor = default_grad_floor(b);
            if floor <= 0.0 {
                continue;
            }
            let r = p_residual(a, b, &nl, floor).unwrap();
            let rb = bochner_residual(a, b, &nl, floor).unwrap();
            prop_assert_eq!(&r.mask, &rb.mask);
            prop_assert!(r.values.iter().zip(&rb.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn report_sup_equals_stored_max(c in prop::collection::vec(-0.5f64..0.5, 2)) {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[64]).unwrap();
        let init = |x: &[f64]| c[0] * x[0].sin() + c[1] * (2.0 * x[0]).cos();
        let traj = run_window(init, &g, &nl, None, &WindowConfig::new(0.0, 0.2, 20)).unwrap();
        let rep = verify_estimate(&traj, &nl, None, 1e-3).unwrap();
        for (k, f) in traj.snapshots.iter().enumerate() {
            let p = p_semilinear(f, &nl);
            let active_max = g.active_nodes().iter().map(|&i| p.values()[i]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(rep.sup_p[k], active_max);
        }
        prop_assert_eq!(rep.initial_violation, rep.sup_p[0] > 1e-3);
    }
}

#[test]
fn violating_data_flagged_at_start() {
    let nl = Nonlinearity::double_well(0.0).unwrap();
    let g = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[256]).unwrap();
    let traj = run_window(
        |x| 0.1 * (10.0 * x[0]).sin(),
        &g,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.05, 20),
    )
    .unwrap();
    let rep = verify_estimate(&traj, &nl, None, 1e-3).unwrap();
    assert!(rep.initial_violation);
    assert_eq!(rep.first_violation, Some(0.0));
    // cos^2 amplitude 1 against 2F(0) = 1/2.
    assert!((rep.sup_p[0] - 0.5).abs() < 0.05);
}
