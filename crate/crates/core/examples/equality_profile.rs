//! The kink `tanh(x/√2)` saturates the gradient bound: P vanishes up to the
//! stencil error, which halves twice per halving of h.

use pflab::grid::{build_grid, DomainSpec, Field};
use pflab::nonlinearity::{build_quadrature, exact_profile, Nonlinearity};
use pflab::pfunction::p_semilinear;

fn main() -> pflab::Result<()> {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let kink = exact_profile(&q, &[1.0], 0.0)?;
    println!("{:>8} {:>12} {:>12}", "h", "max|P|", "H(0.5)");
    for h in [0.04, 0.02, 0.01, 0.005] {
        let n = (24.0 / h) as usize;
        let grid = build_grid(&DomainSpec::dirichlet(&[-12.0], &[24.0]), &[n])?;
        let f = Field::from_fn(&grid, 0.0, |x| kink.value(x));
        println!(
            "{h:>8} {:>12.3e} {:>12.10}",
            p_semilinear(&f, &nl).max_abs(),
            q.h(0.5)?
        );
    }
    Ok(())
}
