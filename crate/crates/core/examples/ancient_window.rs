//! Finite backward windows `[-T, 0]` from seeded band-limited data; prints
//! `sup P` at `t = 0` per seed and window length (`T = 0` is the data).

use pflab::grid::{build_grid, DomainSpec};
use pflab::nonlinearity::Nonlinearity;
use pflab::pfunction::p_semilinear;
use pflab::solvers::{run_window, BandLimitedNoise, WindowConfig};
use std::f64::consts::PI;

fn main() -> pflab::Result<()> {
    let nl = Nonlinearity::double_well(0.0)?;
    let grid = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[128])?;
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}",
        "seed", "T=0", "T=1", "T=2", "T=4"
    );
    for seed in 0..5 {
        let noise = BandLimitedNoise::new(&grid, seed, 0.9);
        let mut row = vec![];
        for t in [0.0, 1.0, 2.0, 4.0] {
            let sup = if t == 0.0 {
                p_semilinear(
                    &pflab::grid::Field::from_fn(&grid, 0.0, |x| noise.value(x)),
                    &nl,
                )
                .sup()
                .0
            } else {
                let traj = run_window(
                    |x| noise.value(x),
                    &grid,
                    &nl,
                    None,
                    &WindowConfig::new(-t, 0.0, usize::MAX),
                )?;
                p_semilinear(traj.last(), &nl).sup().0
            };
            row.push(format!("{sup:>10.3e}"));
        }
        println!("{seed:>5} {}", row.join(" "));
    }
    Ok(())
}
