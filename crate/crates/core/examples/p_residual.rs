//! The subsolution residual of P on consecutive snapshots of a torus run,
//! and its coincidence with the Bochner form.

use pflab::grid::{build_grid, DomainSpec};
use pflab::nonlinearity::Nonlinearity;
use pflab::pfunction::{bochner_residual, default_grad_floor, p_residual};
use pflab::solvers::{run_window, WindowConfig};
use std::f64::consts::PI;

fn main() -> pflab::Result<()> {
    let nl = Nonlinearity::double_well(0.0)?;
    let grid = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[256])?;
    let traj = run_window(
        |x| 0.8 * x[0].sin() + 0.1 * (3.0 * x[0]).cos(),
        &grid,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.5, 20),
    )?;
    let h = grid.h_min();
    for (k, (a, b)) in traj.pairs().enumerate().step_by(20) {
        let floor = default_grad_floor(b);
        let r = p_residual(a, b, &nl, floor)?;
        let rb = bochner_residual(a, b, &nl, floor)?;
        let same = r
            .values
            .iter()
            .zip(&rb.values)
            .all(|(x, y)| x.to_bits() == y.to_bits());
        println!(
            "pair {k:>3}  t = {:.3}  admissible {:>3}  min R = {:>10.3e}  tol {:.3e}  bochner equal {same}",
            b.time(),
            r.admissible_count(),
            r.min().unwrap_or(f64::NAN),
            50.0 * h * h + 5.0 * r.dt
        );
    }
    Ok(())
}
