use pflab::grid::{build_grid, DomainSpec, Field, NodeRole};
use pflab::nonlinearity::Nonlinearity;
use pflab::solvers::{
    cfl_max_dt, run_window, step_quasilinear, step_semilinear, BandLimitedNoise,
    QuasilinearProfile, Scheme, WindowConfig,
};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn torus(n: usize) -> Arc<pflab::grid::Grid> {
    build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[n]).unwrap()
}

/// Smooth periodic data from a few random Fourier coefficients.
fn modes(c: &[f64]) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| {
        c.iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * x[0] + k as f64).sin())
            .sum::<f64>()
    }
}

/// `Σ ((D+u)^2/2 + F(u)) h` with forward differences.
fn energy(f: &Field, nl: &Nonlinearity) -> f64 {
    let u = f.values();
    let n = u.len();
    let h = f.grid().spacing()[0];
    (0..n)
        .map(|i| {
            let d = (u[(i + 1) % n] - u[i]) / h;
            0.5 * d * d + nl.f(u[i])
        })
        .sum::<f64>()
        * h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn comparison_principle(c in prop::collection::vec(-0.15f64..0.15, 4), bump in prop::collection::vec(0.0f64..0.1, 3)) {
        let g = torus(128);
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let dt = cfl_max_dt(&g, &nl, None, 0.0);
        let mut u = Field::from_fn(&g, 0.0, modes(&c));
        let mut v = Field::from_fn(&g, 0.0, |x| {
            modes(&c)(x) + bump[0] + bump[1] * (1.0 + x[0].cos()) + bump[2] * (1.0 + (2.0 * x[0]).sin())
        });
        for _ in 0..300 {
            u = step_semilinear(&u, &nl, dt, Scheme::Explicit).unwrap();
            v = step_semilinear(&v, &nl, dt, Scheme::Explicit).unwrap();
            prop_assert!(u.values().iter().zip(v.values()).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn energy_descends_on_torus(c in prop::collection::vec(-0.3f64..0.3, 4)) {
        let g = torus(128);
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let dt = cfl_max_dt(&g, &nl, None, 0.0);
        let mut f = Field::from_fn(&g, 0.0, modes(&c));
        let mut e = energy(&f, &nl);
        for _ in 0..400 {
            f = step_semilinear(&f, &nl, dt, Scheme::Explicit).unwrap();
            let next = energy(&f, &nl);
            prop_assert!(next <= e + dt * dt, "{next} > {e}");
            e = next;
        }
    }

    #[test]
    fn wells_bound_the_state(c in prop::collection::vec(-0.25f64..0.25, 4)) {
        let g = torus(128);
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let init = modes(&c);
        let traj = run_window(&init, &g, &nl, None, &WindowConfig::new(0.0, 2.0, 50)).unwrap();
        for s in &traj.snapshots {
            prop_assert!(s.values().iter().all(|u| u.abs() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn quasilinear_matches_semilinear_for_small_gradients(a in -0.007f64..0.007, b in -0.0015f64..0.0015, shift in 0.0f64..1.0) {
        let g = torus(256);
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let ms = QuasilinearProfile::minimal_surface();
        // |Du| <= |a| + 2|b| <= 0.01.
        let f = Field::from_fn(&g, 0.0, |x| shift + a * x[0].sin() + b * (2.0 * x[0]).cos());
        let dt = cfl_max_dt(&g, &nl, Some(&ms), 1e-4);
        let q = step_quasilinear(&f, &nl, &ms, dt).unwrap();
        let s = step_semilinear(&f, &nl, dt, Scheme::Explicit).unwrap();
        prop_assert!(q.max_diff(&s) <= 1e-3 * dt, "{} > {}", q.max_diff(&s), 1e-3 * dt);
    }
}

#[test]
fn grim_reaper_translates_under_minimal_surface_flow() {
    let grid = build_grid(&DomainSpec::dirichlet(&[-1.2], &[2.4]), &[120]).unwrap();
    let nl = Nonlinearity::zero();
    let ms = QuasilinearProfile::minimal_surface();
    let exact = |x: f64, t: f64| t - x.cos().ln();
    let mut f = Field::from_fn(&grid, 0.0, |x| exact(x[0], 0.0));
    let dt = cfl_max_dt(&grid, &nl, Some(&ms), 1.2f64.tan().powi(2));
    let ends: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.role(i) == NodeRole::Frozen)
        .collect();
    let mut err: f64 = 0.0;
    while f.time() < 0.2 {
        f = step_quasilinear(&f, &nl, &ms, dt).unwrap();
        for &i in &ends {
            f.values_mut()[i] = exact(grid.coords(i)[0], f.time());
        }
        for &i in grid.active_nodes() {
            err = err.max((f.values()[i] - exact(grid.coords(i)[0], f.time())).abs());
        }
    }
    assert!(err < 5e-5, "{err}");
}

#[test]
fn kink_is_steady() {
    let grid = build_grid(&DomainSpec::dirichlet(&[-15.0], &[30.0]), &[600]).unwrap();
    let nl = Nonlinearity::double_well(0.0).unwrap();
    let init = |x: &[f64]| (x[0] / std::f64::consts::SQRT_2).tanh();
    let traj = run_window(
        init,
        &grid,
        &nl,
        None,
        &WindowConfig::new(0.0, 1.0, usize::MAX),
    )
    .unwrap();
    // Only the O(h^2) mismatch between the sampled and the discrete kink moves.
    assert!(traj.first().max_diff(traj.last()) < 1e-3);
}

#[test]
fn runs_are_deterministic() {
    let g = torus(128);
    let nl = Nonlinearity::double_well(0.0).unwrap();
    let noise = BandLimitedNoise::new(&g, 7, 0.9);
    let cfg = WindowConfig::new(-1.0, 0.0, 100);
    let a = run_window(|x| noise.value(x), &g, &nl, None, &cfg).unwrap();
    let b = run_window(|x| noise.value(x), &g, &nl, None, &cfg).unwrap();
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        assert!(x
            .values()
            .iter()
            .zip(y.values())
            .all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}

#[test]
fn imex_tracks_explicit_at_small_steps() {
    let g = torus(128);
    let nl = Nonlinearity::double_well(0.0).unwrap();
    let init = |x: &[f64]| 0.5 * x[0].sin();
    let dt = cfl_max_dt(&g, &nl, None, 0.0);
    let e = run_window(
        init,
        &g,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.5, usize::MAX),
    )
    .unwrap();
    let i = run_window(
        init,
        &g,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.5, usize::MAX)
            .with_scheme(Scheme::Imex)
            .with_dt(dt),
    )
    .unwrap();
    assert!(e.last().max_diff(i.last()) < 1e-3);
    // The implicit diffusion tolerates steps far beyond the explicit bound.
    let big = run_window(
        init,
        &g,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.5, usize::MAX)
            .with_scheme(Scheme::Imex)
            .with_dt(50.0 * dt),
    )
    .unwrap();
    assert!(big
        .last()
        .values()
        .iter()
        .all(|u| u.is_finite() && u.abs() <= 1.0));
    assert!(run_window(
        init,
        &g,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.5, 1).with_dt(2.0 * dt)
    )
    .is_err());
}
