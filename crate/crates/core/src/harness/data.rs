//! Initial data shared by experiments and the acceptance suite.

use crate::error::{Error, Result};
use crate::grid::{BoundaryPolicy, Grid};
use crate::nonlinearity::ProfileQuadrature;
use std::f64::consts::PI;

/// 1-Lipschitz phase functions `ψ`, periodic on a periodic box axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psi {
    /// `x` on the middle half of the period, reflected on the outer
    /// quarters.
    Identity,
    /// `a·tanh(ψ_identity / a)`: a smoothly clamped ramp.
    Clamp { a: f64 },
    /// `(L/2π)·sin(2πx/L)`.
    Sine,
}

impl Psi {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Psi::Identity),
            "clamp" => Ok(Psi::Clamp { a: 1.0 }),
            "sine" => Ok(Psi::Sine),
            other => Err(Error::Config(format!(
                "unknown psi `{other}` (expected identity, clamp or sine)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Psi::Identity => "identity",
            Psi::Clamp { .. } => "clamp",
            Psi::Sine => "sine",
        }
    }

    /// `ψ(x)` along an axis with center `c` and period `l` (`None` for a
    /// non-periodic axis, where `Identity` is just `x - c`).
    pub fn eval(&self, x: f64, c: f64, l: Option<f64>) -> f64 {
        let zigzag = |x: f64| match l {
            None => x - c,
            Some(l) => {
                let y = (x - c + 0.5 * l).rem_euclid(l) - 0.5 * l;
                let q = 0.25 * l;
                if y > q {
                    0.5 * l - y
                } else if y < -q {
                    -0.5 * l - y
                } else {
                    y
                }
            }
        };
        match *self {
            Psi::Identity => zigzag(x),
            Psi::Clamp { a } => a * (zigzag(x) / a).tanh(),
            Psi::Sine => match l {
                None => (x - c).sin(),
                Some(l) => l / (2.0 * PI) * (2.0 * PI * (x - c) / l).sin(),
            },
        }
    }
}

/// `x ↦ g(ψ(x_0))` on the first axis of `grid`.
pub fn lipschitz_profile<'a>(
    q: &'a ProfileQuadrature,
    psi: Psi,
    grid: &Grid,
) -> impl Fn(&[f64]) -> f64 + 'a {
    let c = grid.origin()[0] + 0.5 * grid.extents()[0];
    let l = grid.is_periodic().then(|| grid.extents()[0]);
    move |x: &[f64]| {
        q.g(psi.eval(x[0], c, l))
            .expect("g is defined on the whole line")
    }
}

/// `g(ψ)` with `ψ` the distance-like 1-Lipschitz function
/// `min((x_n - h(x'))/(1+S^2)^{1/2}, distance to the lateral faces)` of an
/// epigraph box, so that the data vanish on the graph and the side walls.
pub fn epigraph_profile<'a>(
    q: &'a ProfileQuadrature,
    grid: &Grid,
) -> Result<impl Fn(&[f64]) -> f64 + 'a> {
    let spec = match grid.policy() {
        BoundaryPolicy::Epigraph(spec) => spec.clone(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "epigraph data needs an epigraph grid, got {}",
                other.name()
            )))
        }
    };
    let n = grid.dim() - 1;
    let lo: Vec<f64> = grid.origin()[..n].to_vec();
    let hi: Vec<f64> = (0..n)
        .map(|a| grid.origin()[a] + grid.extents()[a])
        .collect();
    let norm = (1.0 + spec.slope_bound().powi(2)).sqrt();
    Ok(move |x: &[f64]| {
        let mut psi = (x[n] - spec.height(&x[..n])) / norm;
        for a in 0..n {
            psi = psi.min(x[a] - lo[a]).min(hi[a] - x[a]);
        }
        q.g(psi.max(0.0)).expect("g is defined on the whole line")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_is_periodic_and_lipschitz() {
        let l = 40.0;
        for psi in [Psi::Identity, Psi::Clamp { a: 1.0 }, Psi::Sine] {
            let n = 4000;
            let h = l / n as f64;
            for i in 0..n {
                let x = -20.0 + i as f64 * h;
                let d = (psi.eval(x + h, 0.0, Some(l)) - psi.eval(x, 0.0, Some(l))).abs();
                assert!(d <= h * (1.0 + 1e-12), "{psi:?} at {x}");
            }
            assert!((psi.eval(-20.0, 0.0, Some(l)) - psi.eval(20.0, 0.0, Some(l))).abs() < 1e-12);
        }
        assert_eq!(Psi::Identity.eval(3.0, 0.0, Some(l)), 3.0);
        assert_eq!(Psi::Identity.eval(15.0, 0.0, Some(l)), 5.0);
        assert!(Psi::parse("ramp").is_err());
    }
}
