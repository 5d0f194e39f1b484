//! P-functions `|Du|^2 - 2F(u)` and `ξ(|Du|^2) - 2F(u)`, the parabolic
//! subsolution residual, estimate verification and rigidity detection.

mod estimate;
mod rigidity;

pub use estimate::{verify_estimate, EstimateReport};
pub use rigidity::{rigidity_detect, RigidityReport, Verdict};

use crate::error::{Error, Result};
use crate::grid::{grad_sq_at, gradient_at, laplacian_at, Field, Grid};
use crate::nonlinearity::Nonlinearity;
use crate::solvers::QuasilinearProfile;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PVariant {
    Semilinear,
    Quasilinear,
}

/// Nodewise P values. Stored on every lattice node (non-active nodes carry
/// the boundary evaluation); statistics run over active nodes.
#[derive(Clone, Debug)]
pub struct PField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    variant: PVariant,
    time: f64,
}

impl PField {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn variant(&self) -> PVariant {
        self.variant
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `(max P, node)` over active nodes.
    pub fn sup(&self) -> (f64, usize) {
        self.grid
            .active_nodes()
            .iter()
            .map(|&i| (self.values[i], i))
            .fold((f64::NEG_INFINITY, usize::MAX), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            })
    }

    /// `max |P|` over active nodes.
    pub fn max_abs(&self) -> f64 {
        self.grid
            .active_nodes()
            .iter()
            .map(|&i| self.values[i].abs())
            .fold(0.0, f64::max)
    }

    /// `Σ (P)_+ h^dim` over active nodes.
    pub fn positive_mass(&self) -> f64 {
        let vol = self.grid.cell_volume();
        self.grid
            .active_nodes()
            .iter()
            .map(|&i| self.values[i].max(0.0))
            .sum::<f64>()
            * vol
    }
}

fn p_with<X: Fn(f64) -> f64>(f: &Field, nl: &Nonlinearity, xi: X, variant: PVariant) -> PField {
    let grid = f.grid();
    let u = f.values();
    let values = (0..grid.len())
        .map(|i| xi(grad_sq_at(grid, u, i)) - 2.0 * nl.f(u[i]))
        .collect();
    PField {
        grid: Arc::clone(grid),
        values,
        variant,
        time: f.time(),
    }
}

/// `P = |Du|^2 - 2F(u)`.
pub fn p_semilinear(f: &Field, nl: &Nonlinearity) -> PField {
    p_with(f, nl, |s| s, PVariant::Semilinear)
}

/// `P = ξ(|Du|^2) - 2F(u)`.
pub fn p_quasilinear(f: &Field, nl: &Nonlinearity, profile: &QuasilinearProfile) -> PField {
    p_with(f, nl, |s| profile.xi(s), PVariant::Quasilinear)
}

/// Residual of the subsolution inequality for the semilinear P-function,
/// `R = ΔP - P_t - <B, DP> - |DP|^2 / (2|Du|^2)` with
/// `B = 2F'(u) Du / |Du|^2`, on nodes where `|Du| >= grad_floor`.
///
/// `R >= 0` for exact solutions wherever `Du ≠ 0`; in one dimension the
/// inequality is an identity and `R = 0`.
#[derive(Clone, Debug)]
pub struct PResidual {
    /// One value per lattice node; zero off the mask.
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub dt: f64,
}

impl PResidual {
    pub fn admissible_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Minimum over the admissible mask, `None` when it is empty.
    pub fn min(&self) -> Option<f64> {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v)
            .reduce(f64::min)
    }

    pub fn max_abs(&self) -> Option<f64> {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v.abs())
            .reduce(f64::max)
    }
}

/// `0.1 · max |Du|` over active nodes.
pub fn default_grad_floor(f: &Field) -> f64 {
    0.1 * crate::solvers::sup_grad_sq(f).sqrt()
}

/// Evaluates the residual at `after`, with `P_t` the backward difference
/// between the two snapshots. Only nodes whose whole stencil is active are
/// admissible.
pub fn p_residual(
    before: &Field,
    after: &Field,
    nl: &Nonlinearity,
    grad_floor: f64,
) -> Result<PResidual> {
    if !before.same_grid(after) {
        return Err(Error::GridMismatch);
    }
    let dt = after.time() - before.time();
    if !(dt > 0.0) {
        return Err(Error::NonPositiveInterval(dt));
    }
    if !(grad_floor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grad_floor must be positive, got {grad_floor}"
        )));
    }
    let grid = after.grid();
    let u = after.values();
    let p_after = p_semilinear(after, nl);
    let p_before = p_semilinear(before, nl);
    let p = p_after.values();
    let floor_sq = grad_floor * grad_floor;
    let mut values = vec![0.0; grid.len()];
    let mut mask = vec![false; grid.len()];
    for &i in grid.active_nodes() {
        if !grid.deep_interior(i) {
            continue;
        }
        let du = gradient_at(grid, u, i);
        let s = du[0] * du[0] + du[1] * du[1] + du[2] * du[2];
        if s < floor_sq {
            continue;
        }
        let dp = gradient_at(grid, p, i);
        let dp_sq = dp[0] * dp[0] + dp[1] * dp[1] + dp[2] * dp[2];
        let du_dp = du[0] * dp[0] + du[1] * dp[1] + du[2] * dp[2];
        let b_dp = 2.0 * nl.f1(u[i]) * du_dp / s;
        let p_t = (p[i] - p_before.values()[i]) / dt;
        values[i] = laplacian_at(grid, p, i) - p_t - b_dp - dp_sq / (2.0 * s);
        mask[i] = true;
    }
    Ok(PResidual { values, mask, dt })
}

/// The Bochner form of the same inequality on a flat torus, where the Ricci
/// term vanishes and `Δ_g` is the periodic Laplacian.
pub fn bochner_residual(
    before: &Field,
    after: &Field,
    nl: &Nonlinearity,
    grad_floor: f64,
) -> Result<PResidual> {
    if !after.grid().is_periodic() {
        return Err(Error::InvalidGrid(
            "the Bochner residual is defined on flat tori only".into(),
        ));
    }
    p_residual(before, after, nl, grad_floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use crate::nonlinearity::{build_quadrature, exact_profile};

    #[test]
    fn constant_fields() {
        let g = build_grid(&DomainSpec::periodic(&[0.0, 0.0], &[1.0, 1.0]), &[10, 10]).unwrap();
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let well = p_semilinear(&Field::constant(&g, 1.0, 0.0), &nl);
        assert!(well.values().iter().all(|&p| p == 0.0));
        let zero = p_semilinear(&Field::constant(&g, 0.0, 0.0), &nl);
        assert!(zero.values().iter().all(|&p| p == -0.5));
        let ms = QuasilinearProfile::minimal_surface();
        let q = p_quasilinear(&Field::constant(&g, 0.3, 0.0), &nl, &ms);
        assert!(q
            .values()
            .iter()
            .all(|&p| (p + 2.0 * nl.f(0.3)).abs() < 1e-15));
    }

    #[test]
    fn identity_profile_reproduces_semilinear() {
        let g = build_grid(&DomainSpec::periodic(&[0.0, 0.0], &[6.0, 6.0]), &[24, 24]).unwrap();
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| 0.7 * (x[0]).sin() * (x[1] * 2.0).cos());
        let a = p_semilinear(&f, &nl);
        let b = p_quasilinear(&f, &nl, &QuasilinearProfile::identity());
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn quasilinear_p_at_unit_xi() {
        // |Du|^2 = 3 and F = 0: P = ξ(3) = 1.
        let g = build_grid(&DomainSpec::dirichlet(&[-1.0], &[2.0]), &[16]).unwrap();
        let nl = Nonlinearity::zero();
        let f = Field::from_fn(&g, 0.0, |x| 3f64.sqrt() * x[0]);
        let p = p_quasilinear(&f, &nl, &QuasilinearProfile::minimal_surface());
        for &i in g.active_nodes() {
            assert!((p.values()[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_gradient_p_variants_agree() {
        let g = build_grid(
            &DomainSpec::periodic(&[0.0], &[2.0 * std::f64::consts::PI]),
            &[128],
        )
        .unwrap();
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| 0.01 * x[0].sin());
        let a = p_semilinear(&f, &nl);
        let b = p_quasilinear(&f, &nl, &QuasilinearProfile::minimal_surface());
        for i in 0..g.len() {
            assert!((a.values()[i] - b.values()[i]).abs() <= 2e-8);
        }
    }

    #[test]
    fn sup_and_mass() {
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[10]).unwrap();
        let nl = Nonlinearity::zero();
        let f = Field::from_fn(&g, 0.0, |x| (2.0 * std::f64::consts::PI * x[0]).sin());
        let p = p_semilinear(&f, &nl);
        let (sup, node) = p.sup();
        assert_eq!(sup, p.values()[node]);
        assert!(p.values().iter().all(|&v| v <= sup));
        let mass: f64 = p.values().iter().map(|v| v.max(0.0)).sum::<f64>() * 0.1;
        assert!((p.positive_mass() - mass).abs() < 1e-14);
    }

    #[test]
    fn residual_vanishes_on_exact_profile() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        let prof = exact_profile(&q, &[1.0], 0.0).unwrap();
        let mut maxima = Vec::new();
        for n in [400usize, 800] {
            let g = build_grid(&DomainSpec::dirichlet(&[-8.0], &[16.0]), &[n]).unwrap();
            let before = Field::from_fn(&g, 0.0, |x| prof.value(x));
            let mut after = before.clone();
            after.set_time(0.01);
            let r = p_residual(&before, &after, &nl, default_grad_floor(&after)).unwrap();
            assert!(r.admissible_count() > 0);
            maxima.push(r.max_abs().unwrap());
        }
        assert!(maxima[1] < 1e-3);
        assert!(maxima[0] / maxima[1] > 2.0, "{maxima:?}");
    }

    #[test]
    fn well_has_empty_mask() {
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[16]).unwrap();
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let a = Field::constant(&g, 1.0, 0.0);
        let b = Field::constant(&g, 1.0, 0.1);
        let r = p_residual(&a, &b, &nl, 0.1).unwrap();
        assert_eq!(r.admissible_count(), 0);
        assert!(r.min().is_none());
        assert!(matches!(
            p_residual(&b, &a, &nl, 0.1),
            Err(Error::NonPositiveInterval(_))
        ));
        let other = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[16]).unwrap();
        let c = Field::constant(&other, 1.0, 0.2);
        assert!(matches!(
            p_residual(&a, &c, &nl, 0.1),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn bochner_needs_torus() {
        let g = build_grid(&DomainSpec::dirichlet(&[0.0], &[1.0]), &[16]).unwrap();
        let nl = Nonlinearity::zero();
        let a = Field::from_fn(&g, 0.0, |x| x[0]);
        let b = Field::from_fn(&g, 0.1, |x| x[0]);
        assert!(bochner_residual(&a, &b, &nl, 0.1).is_err());
        assert!(p_residual(&a, &b, &nl, 0.1).is_ok());
    }
}
