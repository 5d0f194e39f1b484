//! Detects whether a field is a planar profile `g(<a, x> + α)` and recovers
//! `a` and `α`.

use pflab::grid::{build_grid, DomainSpec, Field};
use pflab::nonlinearity::{build_quadrature, exact_profile, Nonlinearity};
use pflab::pfunction::rigidity_detect;

fn main() -> pflab::Result<()> {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let grid = build_grid(
        &DomainSpec::dirichlet(&[-2.0, -2.0], &[4.0, 4.0]),
        &[40, 40],
    )?;
    let theta: f64 = 2.2;
    let planar = exact_profile(&q, &[theta.cos(), theta.sin()], -0.4)?;
    let cases = [
        ("planar", Field::from_fn(&grid, 0.0, |x| planar.value(x))),
        ("constant", Field::constant(&grid, 0.5, 0.0)),
        (
            "bump",
            Field::from_fn(&grid, 0.0, |x| 0.5 * (-(x[0] * x[0] + x[1] * x[1])).exp()),
        ),
    ];
    for (name, f) in &cases {
        let r = rigidity_detect(f, &nl, &q, 1e-6)?;
        println!(
            "{name:<9} {}",
            serde_json::to_string(&r).unwrap_or_default()
        );
    }
    Ok(())
}
