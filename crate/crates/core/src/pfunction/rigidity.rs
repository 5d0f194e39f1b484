use crate::error::{Error, Result};
use crate::grid::{gradient_at, Field, NodeRole};
use crate::nonlinearity::{Nonlinearity, ProfileQuadrature};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OneDimensional,
    Constant,
    NotRigid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidityReport {
    pub verdict: Verdict,
    /// Unit vector `a` when the verdict is one-dimensional.
    pub direction: Option<Vec<f64>>,
    /// `α` in `u = g(<a, x> + α)`.
    pub offset: Option<f64>,
    /// `max |Dν - mean Dν|`.
    pub max_deviation: f64,
    /// `|mean Dν|`.
    pub slope: f64,
    /// `max |2F(u)(|Dν|^2 - 1)|`, the P-function seen through `ν`.
    pub max_p_deviation: f64,
}

impl RigidityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Tests whether `f` is of the form `g(<a, x> + α)` by transforming to
/// `ν = H(u)` and checking that `Dν` is a constant unit vector.
pub fn rigidity_detect(
    f: &Field,
    nl: &Nonlinearity,
    q: &ProfileQuadrature,
    tol: f64,
) -> Result<RigidityReport> {
    let grid = f.grid();
    let dim = grid.dim();
    if f.oscillation() <= tol {
        return Ok(RigidityReport {
            verdict: Verdict::Constant,
            direction: None,
            offset: None,
            max_deviation: 0.0,
            slope: 0.0,
            max_p_deviation: 0.0,
        });
    }
    let nodes: Vec<usize> = (0..grid.len())
        .filter(|&i| matches!(grid.role(i), NodeRole::Active | NodeRole::Frozen))
        .collect();
    let (lo, hi) = nodes
        .iter()
        .map(|&i| f.values()[i])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    let (qa, qb) = q.valid_interval();
    if !(lo > qa && hi < qb) {
        return Err(Error::OutsideQuadrature {
            u: if lo <= qa { lo } else { hi },
            lo: qa,
            hi: qb,
        });
    }
    let mut nu = vec![0.0; grid.len()];
    for &i in &nodes {
        nu[i] = q.h(f.values()[i])?;
    }

    let grads: Vec<[f64; 3]> = nodes.iter().map(|&i| gradient_at(grid, &nu, i)).collect();
    let mut mean = [0.0; 3];
    for g in &grads {
        for a in 0..dim {
            mean[a] += g[a];
        }
    }
    for m in mean.iter_mut() {
        *m /= grads.len() as f64;
    }
    let mut max_deviation: f64 = 0.0;
    let mut max_p_deviation: f64 = 0.0;
    for (k, g) in grads.iter().enumerate() {
        let dev: f64 = (0..dim)
            .map(|a| (g[a] - mean[a]).powi(2))
            .sum::<f64>()
            .sqrt();
        max_deviation = max_deviation.max(dev);
        let norm_sq: f64 = (0..dim).map(|a| g[a] * g[a]).sum();
        let u = f.values()[nodes[k]];
        max_p_deviation = max_p_deviation.max((2.0 * nl.f(u) * (norm_sq - 1.0)).abs());
    }
    let slope = (0..dim).map(|a| mean[a] * mean[a]).sum::<f64>().sqrt();

    let planar = max_deviation <= tol && (slope - 1.0).abs() <= tol && max_p_deviation <= tol;
    if !planar {
        return Ok(RigidityReport {
            verdict: Verdict::NotRigid,
            direction: None,
            offset: None,
            max_deviation,
            slope,
            max_p_deviation,
        });
    }
    let a: Vec<f64> = (0..dim).map(|d| mean[d] / slope).collect();
    let offset = nodes
        .iter()
        .map(|&i| {
            let x = grid.coords(i);
            nu[i] - (0..dim).map(|d| a[d] * x[d]).sum::<f64>()
        })
        .sum::<f64>()
        / nodes.len() as f64;
    Ok(RigidityReport {
        verdict: Verdict::OneDimensional,
        direction: Some(a),
        offset: Some(offset),
        max_deviation,
        slope,
        max_p_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use crate::nonlinearity::{build_quadrature, exact_profile};

    fn setup() -> (Nonlinearity, ProfileQuadrature) {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        (nl, q)
    }

    #[test]
    fn recovers_planar_profile() {
        let (nl, q) = setup();
        let g = build_grid(
            &DomainSpec::dirichlet(&[-2.0, -2.0], &[4.0, 4.0]),
            &[40, 40],
        )
        .unwrap();
        let theta: f64 = 0.7;
        let prof = exact_profile(&q, &[theta.cos(), theta.sin()], 0.3).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| prof.value(x));
        let r = rigidity_detect(&f, &nl, &q, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::OneDimensional);
        let a = r.direction.unwrap();
        assert!((a[1].atan2(a[0]) - theta).abs() < 1e-6);
        assert!((r.offset.unwrap() - 0.3).abs() < 1e-6);
    }

    #[test]
    fn constant_and_bump() {
        let (nl, q) = setup();
        let g = build_grid(
            &DomainSpec::dirichlet(&[-2.0, -2.0], &[4.0, 4.0]),
            &[40, 40],
        )
        .unwrap();
        let c = rigidity_detect(&Field::constant(&g, 0.2, 0.0), &nl, &q, 1e-6).unwrap();
        assert_eq!(c.verdict, Verdict::Constant);
        let bump = Field::from_fn(&g, 0.0, |x| 0.5 * (-(x[0] * x[0] + x[1] * x[1])).exp());
        let r = rigidity_detect(&bump, &nl, &q, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::NotRigid);
        assert!(r.max_deviation > 0.1);
        assert!(r.to_json().unwrap().contains("\"not_rigid\""));
    }

    #[test]
    fn values_at_wells_rejected() {
        let (nl, q) = setup();
        let g = build_grid(&DomainSpec::dirichlet(&[-1.0], &[2.0]), &[16]).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| x[0]);
        assert!(matches!(
            rigidity_detect(&f, &nl, &q, 1e-6),
            Err(Error::OutsideQuadrature { .. })
        ));
    }
}
