use super::{default_grad_floor, p_residual, p_quasilinear, p_semilinear, PField};
use crate::error::Result;
use crate::nonlinearity::Nonlinearity;
use crate::solvers::{QuasilinearProfile, Trajectory};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Nodes with `F(u)` at or below this count as sitting in a well.
const WELL_LEVEL: f64 = 1e-10;

/// Sup-P history of one trajectory and the verdict on forward invariance of
/// `{P <= tol}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub variant: super::PVariant,
    pub times: Vec<f64>,
    #[serde(rename = "sup_p_series")]
    pub sup_p: Vec<f64>,
    /// Coordinates of the maximizing node per snapshot.
    pub argsup: Vec<Vec<f64>>,
    pub positive_mass: Vec<f64>,
    pub tolerance: f64,
    /// `sup P > tol` already at the first snapshot; later snapshots are
    /// then not asserted.
    pub initial_violation: bool,
    pub violation: bool,
    /// Time of the first snapshot exceeding the tolerance.
    pub first_violation: Option<f64>,
    /// Minimum of the subsolution residual over all snapshot pairs
    /// (semilinear trajectories only).
    pub residual_min: Option<f64>,
    pub warnings: Vec<String>,
}

impl EstimateReport {
    pub fn max_sup_p(&self) -> f64 {
        self.sup_p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Columns `t,sup_p,positive_mass`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,sup_p,positive_mass")?;
        for k in 0..self.times.len() {
            writeln!(
                out,
                "{},{},{}",
                self.times[k], self.sup_p[k], self.positive_mass[k]
            )?;
        }
        Ok(())
    }
}

/// Evaluates P on every snapshot. With a profile the quasilinear P is used.
pub fn verify_estimate(
    traj: &Trajectory,
    nl: &Nonlinearity,
    profile: Option<&QuasilinearProfile>,
    tol: f64,
) -> Result<EstimateReport> {
    let grid = traj.grid();
    let dim = grid.dim();
    let fields: Vec<PField> = traj
        .snapshots
        .iter()
        .map(|f| match profile {
            Some(p) => p_quasilinear(f, nl, p),
            None => p_semilinear(f, nl),
        })
        .collect();
    let mut sup_p = Vec::with_capacity(fields.len());
    let mut argsup = Vec::with_capacity(fields.len());
    let mut positive_mass = Vec::with_capacity(fields.len());
    for p in &fields {
        let (v, node) = p.sup();
        sup_p.push(v);
        argsup.push(grid.coords(node)[..dim].to_vec());
        positive_mass.push(p.positive_mass());
    }
    let times = traj.times();
    let initial_violation = sup_p[0] > tol;
    let first_violation = if initial_violation {
        Some(times[0])
    } else {
        sup_p.iter().position(|&s| s > tol).map(|k| times[k])
    };

    let mut warnings = traj.warnings.clone();
    for f in &traj.snapshots {
        let osc = f.oscillation();
        if osc > tol && f.active_values().any(|u| nl.f(u) <= WELL_LEVEL) {
            warnings.push(format!(
                "t = {:.6}: rigidity tension, F(u) <= {WELL_LEVEL:e} at a node while the oscillation is {osc:.3e}",
                f.time()
            ));
            break;
        }
    }

    let residual_min = if profile.is_none() {
        let mut best: Option<f64> = None;
        for (a, b) in traj.pairs() {
            let floor = default_grad_floor(b);
            if floor <= 0.0 {
                continue;
            }
            if let Some(m) = p_residual(a, b, nl, floor)?.min() {
                best = Some(best.map_or(m, |x| x.min(m)));
            }
        }
        best
    } else {
        None
    };

    Ok(EstimateReport {
        variant: fields[0].variant(),
        times,
        sup_p,
        argsup,
        positive_mass,
        tolerance: tol,
        initial_violation,
        violation: first_violation.is_some(),
        first_violation,
        residual_min,
        warnings,
    })
}
