//! Dirichlet problem above a flat graph: the data vanish on the boundary and
//! sup P stays below tolerance. Also checks the boundary curvature sign of a
//! convex paraboloid graph.

use pflab::grid::{build_grid, epigraph_mean_curvature, DomainSpec, EpigraphSpec, Field};
use pflab::harness::data::epigraph_profile;
use pflab::nonlinearity::{build_quadrature, Nonlinearity};
use pflab::pfunction::verify_estimate;
use pflab::solvers::{cfl_max_dt, evolve, WindowConfig};

fn main() -> pflab::Result<()> {
    let bowl = EpigraphSpec::paraboloid(0.2, 5.0);
    let pts: Vec<Vec<f64>> = (-4..=4).map(|i| vec![i as f64]).collect();
    let h = epigraph_mean_curvature(&bowl, &pts);
    println!(
        "paraboloid mean curvature min {:.4}",
        h.iter().copied().fold(f64::INFINITY, f64::min)
    );

    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let grid = build_grid(
        &DomainSpec::epigraph(&[-10.0, 0.0], &[20.0, 10.0], EpigraphSpec::flat()),
        &[200, 100],
    )?;
    let f0 = Field::from_fn(&grid, 0.0, epigraph_profile(&q, &grid)?);
    let dt = cfl_max_dt(&grid, &nl, None, 0.0);
    let traj = evolve(
        f0,
        &nl,
        None,
        &WindowConfig::new(0.0, 0.5, ((0.05 / dt) as usize).max(1)),
    )?;
    let report = verify_estimate(
        &traj,
        &nl,
        None,
        10.0 * grid.h_min().powi(2) + 5.0 * traj.dt,
    )?;
    for (t, s) in report.times.iter().zip(&report.sup_p) {
        println!("t = {t:.3}  sup P = {s:.3e}");
    }
    Ok(())
}
