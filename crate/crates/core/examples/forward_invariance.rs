//! Semilinear flow from `g(ψ)` with three 1-Lipschitz phases on a torus of
//! length 40: sup P stays below the discretization tolerance.

use pflab::grid::{build_grid, DomainSpec};
use pflab::harness::acceptance::estimate_tolerance;
use pflab::harness::data::{lipschitz_profile, Psi};
use pflab::nonlinearity::{build_quadrature, Nonlinearity};
use pflab::pfunction::verify_estimate;
use pflab::solvers::{run_window, WindowConfig};

fn main() -> pflab::Result<()> {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let grid = build_grid(&DomainSpec::periodic(&[-20.0], &[40.0]), &[2000])?;
    for psi in [Psi::Identity, Psi::Clamp { a: 1.0 }, Psi::Sine] {
        let traj = run_window(
            lipschitz_profile(&q, psi, &grid),
            &grid,
            &nl,
            None,
            &WindowConfig::new(0.0, 1.0, 200),
        )?;
        let tol = estimate_tolerance(grid.h_min(), traj.dt);
        let report = verify_estimate(&traj, &nl, None, tol)?;
        println!(
            "{:<9} sup P max {:>11.3e}  tol {:.3e}  violation {}",
            psi.name(),
            report.max_sup_p(),
            tol,
            report.violation
        );
    }
    Ok(())
}
