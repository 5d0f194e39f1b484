//! Time steppers for `u_t = Δu - F'(u)` and for the normalized quasilinear
//! flow `u_t = [a_ij(Du) u_ij - F'(u)] / φ'(|Du|^2)`.

use super::QuasilinearProfile;
use crate::error::{Error, Result};
use crate::grid::{grad_sq_at, laplacian_at, quasilinear_at, Field, Grid, NodeRole};
use crate::nonlinearity::Nonlinearity;
use serde::{Deserialize, Serialize};

pub const CFL_SAFETY: f64 = 0.9;

/// Iteration cap and tolerance for the implicit diffusion solve.
const CG_MAX_ITER: usize = 2_000;
const CG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Forward Euler; monotone at the CFL bound.
    Explicit,
    /// Implicit diffusion (conjugate gradients), explicit reaction.
    Imex,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Explicit => "explicit",
            Scheme::Imex => "imex",
        }
    }
}

/// Diffusion and reaction multipliers of the normalized quasilinear
/// operator for gradients with `|Du|^2 <= sup_grad_sq`.
fn quasilinear_factors(profile: &QuasilinearProfile, sup_grad_sq: f64) -> (f64, f64) {
    let n = 64;
    let mut diffusion: f64 = 1.0;
    let mut reaction: f64 = 0.0;
    for i in 0..=n {
        let s = sup_grad_sq.max(0.0) * i as f64 / n as f64;
        let p1 = profile.phi1(s);
        diffusion = diffusion.max(profile.lambda(s) / p1);
        reaction = reaction.max(1.0 / p1);
    }
    (diffusion, reaction)
}

/// `safety / (2 D Σ 1/h_a^2 + R f2_bound)` with `D = R = 1` for the
/// semilinear flow; for a quasilinear profile `D` bounds the eigenvalues of
/// `a_ij / φ'` and `R` bounds `1/φ'` over `s <= sup_grad_sq`.
pub fn cfl_max_dt_with_safety(
    grid: &Grid,
    nl: &Nonlinearity,
    profile: Option<&QuasilinearProfile>,
    sup_grad_sq: f64,
    safety: f64,
) -> f64 {
    let stencil: f64 = grid.spacing().iter().map(|h| 1.0 / (h * h)).sum();
    let (diffusion, reaction) = match profile {
        Some(p) => quasilinear_factors(p, sup_grad_sq),
        None => (1.0, 1.0),
    };
    safety / (2.0 * diffusion * stencil + reaction * nl.f2_bound())
}

/// Stability bound with the default safety factor 0.9.
pub fn cfl_max_dt(
    grid: &Grid,
    nl: &Nonlinearity,
    profile: Option<&QuasilinearProfile>,
    sup_grad_sq: f64,
) -> f64 {
    cfl_max_dt_with_safety(grid, nl, profile, sup_grad_sq, CFL_SAFETY)
}

pub(crate) fn sup_grad_sq(field: &Field) -> f64 {
    let grid = field.grid();
    grid.active_nodes()
        .iter()
        .map(|&i| grad_sq_at(grid, field.values(), i))
        .fold(0.0, f64::max)
}

fn check_cfl(dt: f64, max: f64) -> Result<()> {
    if !(dt > 0.0) || dt > max * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, max });
    }
    Ok(())
}

/// Non-active nodes: graph and exterior nodes hold zero, frozen nodes keep
/// their current value.
fn copy_boundary(grid: &Grid, from: &[f64], to: &mut [f64]) {
    for (i, role) in grid.roles().iter().enumerate() {
        match role {
            NodeRole::Active => {}
            NodeRole::Frozen => to[i] = from[i],
            NodeRole::Graph | NodeRole::Exterior => to[i] = 0.0,
        }
    }
}

pub(crate) fn explicit_semilinear_into(
    grid: &Grid,
    nl: &Nonlinearity,
    u: &[f64],
    dt: f64,
    time: f64,
    out: &mut [f64],
) -> Result<()> {
    copy_boundary(grid, u, out);
    for &i in grid.active_nodes() {
        let v = u[i] + dt * (laplacian_at(grid, u, i) - nl.f1(u[i]));
        if !v.is_finite() {
            return Err(Error::NonFinite {
                node: i,
                time: time + dt,
            });
        }
        out[i] = v;
    }
    Ok(())
}

pub(crate) fn imex_semilinear_into(
    grid: &Grid,
    nl: &Nonlinearity,
    u: &[f64],
    dt: f64,
    time: f64,
    out: &mut [f64],
) -> Result<()> {
    // (I - dt Δ) v = u - dt F'(u) on active nodes, boundary values fixed.
    let n = grid.len();
    let active = grid.active_nodes();
    let mut boundary = vec![0.0; n];
    copy_boundary(grid, u, &mut boundary);
    let apply = |x: &[f64], y: &mut [f64]| {
        for &i in active {
            y[i] = x[i] - dt * laplacian_at(grid, x, i);
        }
    };
    let mut rhs = vec![0.0; n];
    let mut lifted = vec![0.0; n];
    apply(&boundary, &mut lifted);
    for &i in active {
        rhs[i] = u[i] - dt * nl.f1(u[i]) - lifted[i];
    }
    let dot = |a: &[f64], b: &[f64]| active.iter().map(|&i| a[i] * b[i]).sum::<f64>();

    let mut x = vec![0.0; n];
    for &i in active {
        x[i] = u[i];
    }
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r = vec![0.0; n];
    for &i in active {
        r[i] = rhs[i] - ax[i];
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let rhs_norm = dot(&rhs, &rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    while rr.sqrt() / rhs_norm > CG_TOL {
        if iterations == CG_MAX_ITER {
            return Err(Error::SolverDiverged {
                residual: rr.sqrt() / rhs_norm,
                iterations,
            });
        }
        apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for &i in active {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for &i in active {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
        iterations += 1;
    }
    out.copy_from_slice(&boundary);
    for &i in active {
        if !x[i].is_finite() {
            return Err(Error::NonFinite {
                node: i,
                time: time + dt,
            });
        }
        out[i] = x[i];
    }
    Ok(())
}

pub(crate) fn explicit_quasilinear_into(
    grid: &Grid,
    nl: &Nonlinearity,
    profile: &QuasilinearProfile,
    u: &[f64],
    dt: f64,
    time: f64,
    out: &mut [f64],
) -> Result<()> {
    copy_boundary(grid, u, out);
    for &i in grid.active_nodes() {
        let s = grad_sq_at(grid, u, i);
        let p1 = profile.phi1(s);
        if !(p1 > 0.0) {
            return Err(Error::DegenerateProfile { s, value: p1 });
        }
        let v = u[i] + dt * (quasilinear_at(grid, u, i, profile) - nl.f1(u[i])) / p1;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                node: i,
                time: time + dt,
            });
        }
        out[i] = v;
    }
    Ok(())
}

/// One step of `u_t = Δu - F'(u)`. Graph nodes are pinned to zero and
/// frozen nodes keep their values.
pub fn step_semilinear(f: &Field, nl: &Nonlinearity, dt: f64, scheme: Scheme) -> Result<Field> {
    let grid = f.grid();
    let mut out = Field::zeros(grid, f.time() + dt);
    match scheme {
        Scheme::Explicit => {
            check_cfl(dt, cfl_max_dt(grid, nl, None, 0.0))?;
            explicit_semilinear_into(grid, nl, f.values(), dt, f.time(), out.values_mut())?;
        }
        Scheme::Imex => {
            if !(dt > 0.0) {
                return Err(Error::CflViolation {
                    dt,
                    max: f64::INFINITY,
                });
            }
            imex_semilinear_into(grid, nl, f.values(), dt, f.time(), out.values_mut())?;
        }
    }
    Ok(out)
}

/// One explicit step of `u_t = [a_ij(Du) u_ij - F'(u)] / φ'(|Du|^2)`; for
/// the minimal-surface profile this is
/// `u_t = (1+|Du|^2)^{1/2} div(Du/(1+|Du|^2)^{1/2}) - (1+|Du|^2)^{1/2} F'(u)`.
pub fn step_quasilinear(
    f: &Field,
    nl: &Nonlinearity,
    profile: &QuasilinearProfile,
    dt: f64,
) -> Result<Field> {
    let grid = f.grid();
    check_cfl(dt, cfl_max_dt(grid, nl, Some(profile), sup_grad_sq(f)))?;
    let mut out = Field::zeros(grid, f.time() + dt);
    explicit_quasilinear_into(
        grid,
        nl,
        profile,
        f.values(),
        dt,
        f.time(),
        out.values_mut(),
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use std::f64::consts::PI;

    #[test]
    fn cfl_examples() {
        let z = Nonlinearity::zero();
        let g1 = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[10]).unwrap();
        assert!((cfl_max_dt_with_safety(&g1, &z, None, 0.0, 1.0) - 0.005).abs() < 1e-15);
        let g2 = build_grid(&DomainSpec::periodic(&[0.0, 0.0], &[1.0, 1.0]), &[10, 10]).unwrap();
        assert!((cfl_max_dt_with_safety(&g2, &z, None, 0.0, 1.0) - 0.0025).abs() < 1e-15);
        // max |3u^2 - 1| on [-1, 1] is 2.
        let dw = Nonlinearity::double_well(0.0)
            .unwrap()
            .with_working_range(-1.0, 1.0)
            .unwrap();
        assert_eq!(dw.f2_bound(), 2.0);
        assert!((cfl_max_dt_with_safety(&g1, &dw, None, 0.0, 1.0) - 1.0 / 202.0).abs() < 1e-15);
        assert!((cfl_max_dt(&g1, &dw, None, 0.0) - 0.9 / 202.0).abs() < 1e-15);
    }

    #[test]
    fn empirical_blow_up_scan_brackets_the_bound() {
        // Highest mode on a 1D torus: unstable just above h^2/2, stable at it.
        let z = Nonlinearity::zero();
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[1.6]), &[16]).unwrap();
        let bound = cfl_max_dt_with_safety(&g, &z, None, 0.0, 1.0);
        let run = |dt: f64| {
            let mut u: Vec<f64> = (0..16)
                .map(|i| if i % 2 == 0 { 1e-3 } else { -1e-3 })
                .collect();
            let mut out = vec![0.0; 16];
            for _ in 0..400 {
                explicit_semilinear_into(&g, &z, &u, dt, 0.0, &mut out).unwrap();
                std::mem::swap(&mut u, &mut out);
            }
            u.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        };
        assert!(run(bound) <= 1e-3 + 1e-15);
        assert!(run(bound * 1.05) > 1.0);
    }

    #[test]
    fn explicit_rejects_cfl_violation() {
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[10]).unwrap();
        let f = Field::zeros(&g, 0.0);
        let nl = Nonlinearity::zero();
        assert!(matches!(
            step_semilinear(&f, &nl, 0.01, Scheme::Explicit),
            Err(Error::CflViolation { .. })
        ));
        assert!(step_semilinear(&f, &nl, 0.01, Scheme::Imex).is_ok());
    }

    #[test]
    fn wells_are_fixed_points() {
        let g = build_grid(&DomainSpec::periodic(&[0.0, 0.0], &[1.0, 1.0]), &[16, 16]).unwrap();
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let one = Field::constant(&g, 1.0, 0.0);
        let dt = cfl_max_dt(&g, &nl, None, 0.0);
        let next = step_semilinear(&one, &nl, dt, Scheme::Explicit).unwrap();
        assert_eq!(next.values(), one.values());
        assert!((next.time() - dt).abs() < 1e-18);
        let ms = QuasilinearProfile::minimal_surface();
        let next = step_quasilinear(&one, &nl, &ms, dt).unwrap();
        assert_eq!(next.values(), one.values());
        let next = step_semilinear(&one, &nl, 0.1, Scheme::Imex).unwrap();
        assert!(next.max_diff(&one) < 1e-12);
    }

    #[test]
    fn linear_graph_is_a_minimal_surface() {
        let g = build_grid(
            &DomainSpec::dirichlet(&[-1.0, -1.0], &[2.0, 2.0]),
            &[16, 16],
        )
        .unwrap();
        let f = Field::from_fn(&g, 0.0, |x| 0.7 * x[0] - 1.3 * x[1]);
        let ms = QuasilinearProfile::minimal_surface();
        let nl = Nonlinearity::zero();
        let dt = cfl_max_dt(&g, &nl, Some(&ms), 10.0);
        let next = step_quasilinear(&f, &nl, &ms, dt).unwrap();
        assert!(next.max_diff(&f) < 1e-13);
    }

    #[test]
    fn imex_matches_discrete_heat_mode_decay() {
        // Implicit Euler decays a Fourier mode by 1 / (1 + dt λ_h).
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[64]).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| x[0].sin());
        let h = g.spacing()[0];
        let lambda = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        let dt = 0.05;
        let next = step_semilinear(&f, &Nonlinearity::zero(), dt, Scheme::Imex).unwrap();
        let factor = 1.0 / (1.0 + dt * lambda);
        for i in 0..g.len() {
            assert!((next.values()[i] - factor * f.values()[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_profile_rejected() {
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[16]).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| (2.0 * PI * x[0]).sin());
        let bad = QuasilinearProfile::from_phi("flat", |_| 0.0, |_| 0.0, |_| 0.0);
        let err = explicit_quasilinear_into(
            &g,
            &Nonlinearity::zero(),
            &bad,
            f.values(),
            1e-5,
            0.0,
            &mut [0.0; 16],
        );
        assert!(matches!(err, Err(Error::DegenerateProfile { .. })));
    }
}
