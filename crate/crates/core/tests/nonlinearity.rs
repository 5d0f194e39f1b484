use pflab::nonlinearity::{build_quadrature, exact_profile, Nonlinearity};
use proptest::prelude::*;
use std::f64::consts::SQRT_2;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_is_nonnegative_with_zero_minimum(beta in -0.95f64..0.95, u in -2.0f64..2.0) {
        let nl = Nonlinearity::double_well(beta).unwrap();
        prop_assert!(nl.f(u) >= -1e-15);
        prop_assert!(nl.zero_set().iter().any(|&z| nl.f(z).abs() < 1e-14));
    }

    #[test]
    fn g_inverts_h(beta in -0.8f64..0.8, t in 0.02f64..0.98) {
        let nl = Nonlinearity::double_well(beta).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        // The valid interval is unbounded on a side without a zero of F.
        let (lo, hi) = q.quadrature_interval();
        let u = lo + t * (hi - lo);
        let back = q.g(q.h(u).unwrap()).unwrap();
        prop_assert!((back - u).abs() <= 1e-9 * (1.0 + u.abs()), "{u} -> {back}");
    }

    #[test]
    fn h_prime_is_inverse_square_root_of_2f(u in -0.99f64..0.99) {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        prop_assert!((q.h_prime(u) - 1.0 / (2.0 * nl.f(u)).sqrt()).abs() < 1e-12 * q.h_prime(u));
        // Closed form at beta = 0: H(u) = √2 artanh(u).
        prop_assert!((q.h(u).unwrap() - SQRT_2 * u.atanh()).abs() < 1e-8);
    }

    #[test]
    fn planar_profiles_are_equipartitioned(theta in 0.0f64..6.3, alpha in -1.0f64..1.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        let p = exact_profile(&q, &[theta.cos(), theta.sin()], alpha).unwrap();
        let g = p.gradient(&[x, y]);
        let s = g[0] * g[0] + g[1] * g[1];
        let u = p.value(&[x, y]);
        prop_assert!((s - 2.0 * nl.f(u)).abs() < 1e-10);
    }
}

#[test]
fn h_at_one_half() {
    let nl = Nonlinearity::double_well(0.0).unwrap();
    let q = build_quadrature(&nl, 0.0).unwrap();
    assert!((q.h(0.5).unwrap() - 0.776_836_199_212_093_2).abs() < 1e-10);
}
