use super::{Field, Grid, NodeRole, NONE};
use crate::error::{Error, Result};
use crate::solvers::QuasilinearProfile;

/// A gradient sample; components past the grid dimension are zero.
pub type Vector = [f64; 3];

#[inline]
fn usable(grid: &Grid, j: usize) -> bool {
    j != NONE && grid.role(j) != NodeRole::Exterior
}

/// `Du` at one node. Centered differences at active nodes; second-order
/// one-sided differences at boundary nodes where a neighbor is missing.
pub fn gradient_at(grid: &Grid, u: &[f64], idx: usize) -> Vector {
    let mut g = [0.0; 3];
    let nb = &grid.neighbor_table()[idx];
    let h = grid.spacing();
    match grid.role(idx) {
        NodeRole::Exterior => {}
        NodeRole::Active => {
            for a in 0..grid.dim() {
                g[a] = (u[nb[2 * a + 1]] - u[nb[2 * a]]) / (2.0 * h[a]);
            }
        }
        NodeRole::Graph | NodeRole::Frozen => {
            for a in 0..grid.dim() {
                let (m1, p1) = (nb[2 * a], nb[2 * a + 1]);
                g[a] = if usable(grid, m1) && usable(grid, p1) {
                    (u[p1] - u[m1]) / (2.0 * h[a])
                } else if usable(grid, p1) {
                    let p2 = grid.neighbor_table()[p1][2 * a + 1];
                    if usable(grid, p2) {
                        (-3.0 * u[idx] + 4.0 * u[p1] - u[p2]) / (2.0 * h[a])
                    } else {
                        (u[p1] - u[idx]) / h[a]
                    }
                } else if usable(grid, m1) {
                    let m2 = grid.neighbor_table()[m1][2 * a];
                    if usable(grid, m2) {
                        (3.0 * u[idx] - 4.0 * u[m1] + u[m2]) / (2.0 * h[a])
                    } else {
                        (u[idx] - u[m1]) / h[a]
                    }
                } else {
                    0.0
                };
            }
        }
    }
    g
}

/// `|Du|^2` at one node.
#[inline]
pub fn grad_sq_at(grid: &Grid, u: &[f64], idx: usize) -> f64 {
    let g = gradient_at(grid, u, idx);
    g[0] * g[0] + g[1] * g[1] + g[2] * g[2]
}

/// `(2 dim + 1)`-point Laplacian at an active node (zero elsewhere).
#[inline]
pub fn laplacian_at(grid: &Grid, u: &[f64], idx: usize) -> f64 {
    if grid.role(idx) != NodeRole::Active {
        return 0.0;
    }
    let nb = &grid.neighbor_table()[idx];
    let h = grid.spacing();
    let c = u[idx];
    (0..grid.dim())
        .map(|a| (u[nb[2 * a + 1]] - 2.0 * c + u[nb[2 * a]]) / (h[a] * h[a]))
        .sum()
}

/// Second derivatives `u_ij` at an active node; mixed terms by the
/// symmetric four-point cross stencil.
pub(crate) fn hessian_at(grid: &Grid, u: &[f64], idx: usize) -> [[f64; 3]; 3] {
    let mut hess = [[0.0; 3]; 3];
    let table = grid.neighbor_table();
    let nb = &table[idx];
    let h = grid.spacing();
    let c = u[idx];
    for a in 0..grid.dim() {
        hess[a][a] = (u[nb[2 * a + 1]] - 2.0 * c + u[nb[2 * a]]) / (h[a] * h[a]);
        for b in (a + 1)..grid.dim() {
            let (am, ap) = (nb[2 * a], nb[2 * a + 1]);
            let pp = u[table[ap][2 * b + 1]];
            let pm = u[table[ap][2 * b]];
            let mp = u[table[am][2 * b + 1]];
            let mm = u[table[am][2 * b]];
            let v = (pp - pm - mp + mm) / (4.0 * h[a] * h[b]);
            hess[a][b] = v;
            hess[b][a] = v;
        }
    }
    hess
}

/// `a_ij(Du) u_ij` at an active node with `a_ij(σ) = 2φ''σ_iσ_j + φ'δ_ij`.
pub fn quasilinear_at(grid: &Grid, u: &[f64], idx: usize, profile: &QuasilinearProfile) -> f64 {
    if grid.role(idx) != NodeRole::Active {
        return 0.0;
    }
    let du = gradient_at(grid, u, idx);
    let s = du[0] * du[0] + du[1] * du[1] + du[2] * du[2];
    let hess = hessian_at(grid, u, idx);
    let dim = grid.dim();
    let mut trace = 0.0;
    let mut hgg = 0.0;
    for a in 0..dim {
        trace += hess[a][a];
        for b in 0..dim {
            hgg += du[a] * du[b] * hess[a][b];
        }
    }
    profile.phi1(s) * trace + 2.0 * profile.phi2(s) * hgg
}

pub fn gradient(f: &Field) -> Vec<Vector> {
    let grid = f.grid();
    (0..grid.len())
        .map(|i| gradient_at(grid, f.values(), i))
        .collect()
}

pub fn laplacian(f: &Field) -> Field {
    let grid = f.grid();
    let mut out = Field::zeros(grid, f.time());
    for &i in grid.active_nodes() {
        out.values_mut()[i] = laplacian_at(grid, f.values(), i);
    }
    out
}

/// Nodewise `a_ij(Du) u_ij` (zero off the active set).
pub fn quasilinear_apply(f: &Field, profile: &QuasilinearProfile) -> Field {
    let grid = f.grid();
    let mut out = Field::zeros(grid, f.time());
    for &i in grid.active_nodes() {
        out.values_mut()[i] = quasilinear_at(grid, f.values(), i, profile);
    }
    out
}

/// Forward differences `D⁺u` on a periodic grid, the staggered gradient for
/// which `Σ (Δu) v = -Σ D⁺u · D⁺v` holds exactly.
pub fn forward_gradient(f: &Field) -> Result<Vec<Vector>> {
    let grid = f.grid();
    if !grid.is_periodic() {
        return Err(Error::InvalidGrid(
            "forward differences are defined on periodic grids only".into(),
        ));
    }
    let u = f.values();
    let h = grid.spacing();
    Ok((0..grid.len())
        .map(|i| {
            let nb = &grid.neighbor_table()[i];
            let mut g = [0.0; 3];
            for a in 0..grid.dim() {
                g[a] = (u[nb[2 * a + 1]] - u[i]) / h[a];
            }
            g
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec, EpigraphSpec};
    use crate::solvers::QuasilinearProfile;
    use std::f64::consts::PI;

    #[test]
    fn constants_have_zero_derivatives() {
        let g = build_grid(&DomainSpec::periodic(&[0.0, 0.0], &[1.0, 2.0]), &[16, 12]).unwrap();
        let f = Field::constant(&g, 3.5, 0.0);
        assert!(gradient(&f).iter().all(|v| v.iter().all(|&c| c == 0.0)));
        assert!(laplacian(&f).values().iter().all(|&c| c == 0.0));
        let ms = QuasilinearProfile::minimal_surface();
        assert!(quasilinear_apply(&f, &ms)
            .values()
            .iter()
            .all(|&c| c == 0.0));
    }

    #[test]
    fn sine_gradient_on_circle() {
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[256]).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| x[0].sin());
        let err = gradient(&f)
            .iter()
            .enumerate()
            .map(|(i, d)| (d[0] - g.coords(i)[0].cos()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "err = {err}");
    }

    #[test]
    fn exact_on_linear_and_quadratic() {
        let g = build_grid(&DomainSpec::dirichlet(&[-1.0], &[2.0]), &[32]).unwrap();
        let lin = Field::from_fn(&g, 0.0, |x| x[0]);
        let grads = gradient(&lin);
        for gr in &grads {
            // One-sided second-order differences are exact on lines too.
            assert!((gr[0] - 1.0).abs() < 1e-12);
        }
        let quad = Field::from_fn(&g, 0.0, |x| x[0] * x[0]);
        let lap = laplacian(&quad);
        for &i in g.active_nodes() {
            assert!((lap.values()[i] - 2.0).abs() < 1e-10);
        }
        let ms = QuasilinearProfile::minimal_surface();
        let q = quasilinear_apply(&lin, &ms);
        assert!(q.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn quadratic_exact_in_two_dimensions() {
        let g = build_grid(
            &DomainSpec::dirichlet(&[-1.0, -1.0], &[2.0, 2.0]),
            &[16, 20],
        )
        .unwrap();
        let f = Field::from_fn(&g, 0.0, |x| {
            1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1]
        });
        let lap = laplacian(&f);
        let grads = gradient(&f);
        for &i in g.active_nodes() {
            let x = g.coords(i);
            assert!((lap.values()[i] - (1.0 - 2.0)).abs() < 1e-9);
            assert!((grads[i][0] - (2.0 + x[0] + 3.0 * x[1])).abs() < 1e-12);
            assert!((grads[i][1] - (-1.0 + 3.0 * x[0] - 2.0 * x[1])).abs() < 1e-12);
            let hess = hessian_at(&g, f.values(), i);
            assert!((hess[0][1] - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn torus_laplacian_of_product_mode() {
        let g = build_grid(
            &DomainSpec::periodic(&[0.0, 0.0], &[2.0 * PI, 2.0 * PI]),
            &[128, 128],
        )
        .unwrap();
        let f = Field::from_fn(&g, 0.0, |x| x[0].sin() * x[1].sin());
        let lap = laplacian(&f);
        let err = (0..g.len())
            .map(|i| (lap.values()[i] + 2.0 * f.values()[i]).abs())
            .fold(0.0, f64::max);
        assert!(err <= 2e-3, "err = {err}");
    }

    #[test]
    fn minimal_surface_operator_on_grim_reaper() {
        // u = -log cos x: u_xx / (1 + u_x^2) = 1, so a_11 u_xx = cos x.
        let ms = QuasilinearProfile::minimal_surface();
        let mut errs = Vec::new();
        for n in [100usize, 200] {
            let g = build_grid(&DomainSpec::dirichlet(&[-1.0], &[2.0]), &[n]).unwrap();
            let f = Field::from_fn(&g, 0.0, |x| -x[0].cos().ln());
            let q = quasilinear_apply(&f, &ms);
            let mut err: f64 = 0.0;
            for &i in g.active_nodes() {
                let x = g.coords(i)[0];
                let s = grad_sq_at(&g, f.values(), i);
                err = err.max((q.values()[i] - x.cos()).abs());
                err = err.max((q.values()[i] / ms.phi1(s) - 1.0).abs());
            }
            errs.push(err);
        }
        assert!(errs[1] < 1e-3);
        assert!(errs[0] / errs[1] > 3.5, "errors {errs:?}");
    }

    #[test]
    fn epigraph_boundary_gradient_is_one_sided() {
        let g = build_grid(
            &DomainSpec::epigraph(&[-1.0, 0.0], &[2.0, 1.0], EpigraphSpec::flat()),
            &[20, 20],
        )
        .unwrap();
        let f = Field::from_fn(&g, 0.0, |x| 2.0 * x[1]);
        for &i in g.graph_nodes() {
            let d = gradient_at(&g, f.values(), i);
            assert!((d[1] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_gradient_requires_torus() {
        let g = build_grid(&DomainSpec::dirichlet(&[0.0], &[1.0]), &[16]).unwrap();
        assert!(forward_gradient(&Field::zeros(&g, 0.0)).is_err());
    }
}
