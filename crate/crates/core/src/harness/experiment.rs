//! Runs one configured experiment and writes its bundle: `report.json`,
//! `series.csv` and, on request, binary snapshots.

use super::acceptance::{estimate_tolerance, residual_tolerance};
use super::config::{ExperimentConfig, ExperimentKind, InitialData};
use super::data::{epigraph_profile, lipschitz_profile};
use crate::error::{Error, Result};
use crate::grid::{read_binary, write_binary, Field, Grid};
use crate::nonlinearity::{build_quadrature, exact_profile, ProfileQuadrature};
use crate::pfunction::{
    bochner_residual, default_grad_floor, p_residual, p_semilinear, rigidity_detect,
    verify_estimate, Verdict,
};
use crate::solvers::{evolve, solve_traveling_wave, BandLimitedNoise, Trajectory, WindowConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const REPORT_FILE: &str = "report.json";
pub const SERIES_FILE: &str = "series.csv";

/// Contents of `report.json`. Keys that do not apply to a kind are `null`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub passed: bool,
    pub summary: String,
    pub sup_p_series: Option<Vec<f64>>,
    pub violation: Option<bool>,
    pub tolerance: Option<f64>,
    pub residual_min: Option<f64>,
    pub verdict: Option<Verdict>,
    pub direction: Option<Vec<f64>>,
    pub offset: Option<f64>,
    /// Kind-specific extras.
    pub details: serde_json::Value,
}

impl Report {
    fn new(kind: ExperimentKind) -> Self {
        Self {
            kind: kind.name().into(),
            passed: false,
            summary: String::new(),
            sup_p_series: None,
            violation: None,
            tolerance: None,
            residual_min: None,
            verdict: None,
            direction: None,
            offset: None,
            details: serde_json::Value::Null,
        }
    }

    pub fn read(bundle: &Path) -> Result<Self> {
        let path = bundle.join(REPORT_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|_| Error::MissingFile(path.display().to_string()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub bundle: PathBuf,
}

/// 0 passed, 1 verification failure, 2 configuration error, 3 runtime fault.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) => 2,
        Err(_) => 3,
    }
}

/// Runs the experiment and writes the bundle to `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    fs::create_dir_all(&cfg.output)?;
    let mut series = String::new();
    let report = match cfg.kind {
        ExperimentKind::ForwardInvariance
        | ExperimentKind::MinimalSurface
        | ExperimentKind::Epigraph => forward(cfg, &mut series)?,
        ExperimentKind::AncientWindow => ancient(cfg, &mut series)?,
        ExperimentKind::Residuals => residuals(cfg, &mut series)?,
        ExperimentKind::TravelingWave => wave(cfg, &mut series)?,
        ExperimentKind::Rigidity => rigidity(cfg, &mut series)?,
    };
    fs::write(cfg.output.join(SERIES_FILE), series)?;
    fs::write(
        cfg.output.join(REPORT_FILE),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(Outcome {
        passed: report.passed,
        summary: report.summary,
        bundle: cfg.output.clone(),
    })
}

fn quadrature(cfg: &ExperimentConfig) -> Result<ProfileQuadrature> {
    let nl = &cfg.nonlinearity;
    // Base point: midway between the two wells that bracket zero, else zero.
    let zeros = nl.zero_set();
    let below = zeros
        .iter()
        .copied()
        .filter(|&z| z < 0.0)
        .fold(None, |a: Option<f64>, z| Some(a.map_or(z, |a| a.max(z))));
    let above = zeros
        .iter()
        .copied()
        .filter(|&z| z > 0.0)
        .fold(None, |a: Option<f64>, z| Some(a.map_or(z, |a| a.min(z))));
    let u0 = match (below, above) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        _ => 0.0,
    };
    build_quadrature(nl, u0)
}

fn initial_field(
    cfg: &ExperimentConfig,
    grid: &Arc<Grid>,
    seed_override: Option<u64>,
) -> Result<Field> {
    let t = cfg.t_start;
    let needs_q = matches!(
        cfg.initial,
        InitialData::Profile { .. } | InitialData::Planar { .. } | InitialData::Epigraph
    );
    let q = if needs_q {
        Some(quadrature(cfg)?)
    } else {
        None
    };
    Ok(match &cfg.initial {
        InitialData::Profile { psi } => {
            Field::from_fn(grid, t, lipschitz_profile(q.as_ref().unwrap(), *psi, grid))
        }
        InitialData::Sine {
            amplitude,
            frequency,
        } => Field::from_fn(grid, t, |x| amplitude * (frequency * x[0]).sin()),
        InitialData::Noise { seed, amplitude } => {
            let noise = BandLimitedNoise::new(grid, seed_override.unwrap_or(*seed), *amplitude);
            Field::from_fn(grid, t, |x| noise.value(x))
        }
        InitialData::Planar { angle, offset } => {
            let dir: Vec<f64> = match grid.dim() {
                1 => vec![1.0],
                2 => vec![angle.cos(), angle.sin()],
                _ => vec![angle.cos(), angle.sin(), 0.0],
            };
            let prof = exact_profile(q.as_ref().unwrap(), &dir, *offset)?;
            Field::from_fn(grid, t, |x| prof.value(x))
        }
        InitialData::Bump { amplitude } => Field::from_fn(grid, t, |x| {
            amplitude * (-x[..grid.dim()].iter().map(|v| v * v).sum::<f64>()).exp()
        }),
        InitialData::Constant { value } => Field::constant(grid, *value, t),
        InitialData::Epigraph => {
            Field::from_fn(grid, t, epigraph_profile(q.as_ref().unwrap(), grid)?)
        }
        InitialData::File { path } => {
            let file =
                fs::File::open(path).map_err(|_| Error::MissingFile(path.display().to_string()))?;
            read_binary(grid, std::io::BufReader::new(file))?
        }
    })
}

fn snapshot_every(dt: f64, interval: f64) -> usize {
    ((interval / dt).round() as usize).max(1)
}

/// Runs `[t_start, t_end]` with snapshots about `snapshot_interval` apart.
fn trajectory(cfg: &ExperimentConfig, init: Field, t_start: f64, t_end: f64) -> Result<Trajectory> {
    let grid = Arc::clone(init.grid());
    // Step size as evolve will choose it, to place snapshots.
    let s0 = crate::solvers::sup_grad_sq(&init);
    let budget = if cfg.profile.is_some() {
        4.0 * s0 + 1.0
    } else {
        0.0
    };
    let dt = cfg.dt.unwrap_or_else(|| {
        crate::solvers::cfl_max_dt(&grid, &cfg.nonlinearity, cfg.profile.as_ref(), budget)
    });
    let wc = WindowConfig::new(t_start, t_end, snapshot_every(dt, cfg.snapshot_interval))
        .with_scheme(cfg.scheme);
    let wc = match cfg.dt {
        Some(dt) => wc.with_dt(dt),
        None => wc,
    };
    evolve(init, &cfg.nonlinearity, cfg.profile.as_ref(), &wc)
}

fn write_snapshots(cfg: &ExperimentConfig, traj: &Trajectory, tag: &str) -> Result<()> {
    if !cfg.write_snapshots {
        return Ok(());
    }
    let dir = cfg.output.join("snapshots");
    fs::create_dir_all(&dir)?;
    for (k, f) in traj.snapshots.iter().enumerate() {
        let file = fs::File::create(dir.join(format!("{tag}{k:05}.bin")))?;
        write_binary(f, std::io::BufWriter::new(file))?;
    }
    Ok(())
}

fn forward(cfg: &ExperimentConfig, series: &mut String) -> Result<Report> {
    let grid = cfg.grid()?;
    let init = initial_field(cfg, &grid, None)?;
    let traj = trajectory(cfg, init, cfg.t_start, cfg.t_end)?;
    write_snapshots(cfg, &traj, "snap_")?;
    let tol = cfg
        .estimate_tol
        .unwrap_or_else(|| estimate_tolerance(grid.h_min(), traj.dt));
    let est = verify_estimate(&traj, &cfg.nonlinearity, cfg.profile.as_ref(), tol)?;
    let mut csv = Vec::new();
    est.write_csv(&mut csv)?;
    series.push_str(&String::from_utf8(csv).expect("csv is ASCII"));

    let mut r = Report::new(cfg.kind);
    r.passed = !est.violation;
    r.summary = match est.first_violation {
        None => format!(
            "sup P <= {tol:.3e} on all {} snapshots (max {:.3e})",
            est.times.len(),
            est.max_sup_p()
        ),
        Some(t) if est.initial_violation => format!(
            "initial data violate the estimate: sup P = {:.3e} > {tol:.3e} at t = {t}",
            est.sup_p[0]
        ),
        Some(t) => format!("sup P exceeds {tol:.3e} first at t = {t}"),
    };
    r.sup_p_series = Some(est.sup_p.clone());
    r.violation = Some(est.violation);
    r.tolerance = Some(tol);
    r.residual_min = est.residual_min;
    r.details = serde_json::json!({
        "nonlinearity": cfg.nonlinearity_spec,
        "profile": cfg.profile.as_ref().map(|p| p.name().to_string()),
        "times": est.times,
        "argsup": est.argsup,
        "initial_violation": est.initial_violation,
        "first_violation": est.first_violation,
        "dt": traj.dt,
        "scheme": traj.scheme.name(),
        "cfl_ratio": traj.cfl_ratio,
        "sup_grad_sq": traj.sup_grad_sq,
        "warnings": est.warnings,
    });
    Ok(r)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn ancient(cfg: &ExperimentConfig, series: &mut String) -> Result<Report> {
    let grid = cfg.grid()?;
    let nl = &cfg.nonlinearity;
    let per_seed: Vec<Vec<f64>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            cfg.windows
                .iter()
                .map(|&t| {
                    let init = initial_field(cfg, &grid, Some(seed))?;
                    let traj = trajectory(cfg, init, -t, 0.0)?;
                    Ok(p_semilinear(traj.last(), nl).sup().0.max(0.0))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let medians: Vec<f64> = (0..cfg.windows.len())
        .map(|k| median(&mut per_seed.iter().map(|s| s[k]).collect::<Vec<_>>()))
        .collect();

    let _ = write!(series, "T");
    for seed in &cfg.seeds {
        let _ = write!(series, ",seed_{seed}");
    }
    let _ = writeln!(series, ",median");
    for (k, t) in cfg.windows.iter().enumerate() {
        let _ = write!(series, "{t}");
        for s in &per_seed {
            let _ = write!(series, ",{}", s[k]);
        }
        let _ = writeln!(series, ",{}", medians[k]);
    }

    let initial_sup_p: Vec<f64> = cfg
        .seeds
        .iter()
        .map(|&seed| {
            Ok(p_semilinear(&initial_field(cfg, &grid, Some(seed))?, nl)
                .sup()
                .0)
        })
        .collect::<Result<_>>()?;
    let monotone = medians.windows(2).all(|w| w[1] <= w[0]);
    let last = *medians.last().expect("at least one window");
    let mut r = Report::new(cfg.kind);
    r.passed = monotone && last <= cfg.trend_threshold;
    r.summary = format!(
        "median (sup P at t=0)+ over {} seeds: {}; nonincreasing: {monotone}; final {last:.3e} vs {:.3e}",
        cfg.seeds.len(),
        medians.iter().map(|m| format!("{m:.3e}")).collect::<Vec<_>>().join(", "),
        cfg.trend_threshold
    );
    r.sup_p_series = Some(medians.clone());
    r.tolerance = Some(cfg.trend_threshold);
    r.details = serde_json::json!({
        "nonlinearity": cfg.nonlinearity_spec,
        "windows": cfg.windows,
        "seeds": cfg.seeds,
        "per_seed": per_seed,
        "initial_sup_p": initial_sup_p,
        "monotone": monotone,
    });
    Ok(r)
}

fn residuals(cfg: &ExperimentConfig, series: &mut String) -> Result<Report> {
    if cfg.profile.is_some() {
        return Err(Error::Config(
            "residual runs use the semilinear flow".into(),
        ));
    }
    let grid = cfg.grid()?;
    let nl = &cfg.nonlinearity;
    let init = initial_field(cfg, &grid, None)?;
    let traj = trajectory(cfg, init, cfg.t_start, cfg.t_end)?;
    write_snapshots(cfg, &traj, "snap_")?;
    let h = grid.h_min();
    let _ = writeln!(series, "t,residual_min,tolerance,admissible");
    let mut worst_margin = f64::INFINITY;
    let mut min_r: Option<f64> = None;
    let mut bochner_equal = grid.is_periodic();
    let mut pairs = 0usize;
    for (a, b) in traj.pairs() {
        let floor = default_grad_floor(b);
        if floor <= 0.0 {
            continue;
        }
        let res = p_residual(a, b, nl, floor)?;
        let tol = cfg
            .residual_tol
            .unwrap_or_else(|| residual_tolerance(h, res.dt));
        if grid.is_periodic() {
            let rb = bochner_residual(a, b, nl, floor)?;
            bochner_equal &= rb.mask == res.mask
                && rb
                    .values
                    .iter()
                    .zip(&res.values)
                    .all(|(x, y)| x.to_bits() == y.to_bits());
        }
        if let Some(m) = res.min() {
            pairs += 1;
            worst_margin = worst_margin.min(m + tol);
            min_r = Some(min_r.map_or(m, |x| x.min(m)));
            let _ = writeln!(series, "{},{m},{tol},{}", b.time(), res.admissible_count());
        }
    }
    let mut r = Report::new(cfg.kind);
    r.passed = pairs > 0 && worst_margin >= 0.0 && (bochner_equal || !grid.is_periodic());
    r.summary = match min_r {
        Some(m) => format!(
            "{pairs} snapshot pairs, min residual {m:.3e}, worst margin {worst_margin:.3e}{}",
            if grid.is_periodic() {
                format!(", torus form bitwise equal: {bochner_equal}")
            } else {
                String::new()
            }
        ),
        None => "no admissible nodes in any snapshot pair".into(),
    };
    r.residual_min = min_r;
    let times = traj.times();
    let spacing = if times.len() > 1 {
        times[1] - times[0]
    } else {
        traj.dt
    };
    r.tolerance = Some(
        cfg.residual_tol
            .unwrap_or_else(|| residual_tolerance(h, spacing)),
    );
    r.details = serde_json::json!({
        "nonlinearity": cfg.nonlinearity_spec,
        "pairs": pairs,
        "worst_margin": if worst_margin.is_finite() { Some(worst_margin) } else { None },
        "bochner_equal": grid.is_periodic().then_some(bochner_equal),
        "dt": traj.dt,
    });
    Ok(r)
}

fn wave(cfg: &ExperimentConfig, series: &mut String) -> Result<Report> {
    let w = solve_traveling_wave(&cfg.nonlinearity, cfg.wave_halfwidth, cfg.wave_tol)?;
    // ±tanh(ξ/√2) with the orientation of the computed wave; exact for the
    // double-well family.
    let sign = if w.wells.1 > w.wells.0 { 1.0 } else { -1.0 };
    let _ = writeln!(series, "xi,u,reference");
    for (x, u) in w.xi.iter().zip(&w.profile) {
        let _ = writeln!(series, "{x},{u},{}", sign * (x / SQRT_2).tanh());
    }
    let closed_form = match cfg.nonlinearity.kind() {
        crate::nonlinearity::PotentialKind::DoubleWell { beta } => Some(SQRT_2 * beta.abs()),
        _ => None,
    };
    let mut r = Report::new(cfg.kind);
    r.passed = w.residual <= cfg.wave_tol;
    r.summary = match closed_form {
        Some(c) => format!(
            "c = {:.10} (closed form {c:.10}), residual {:.3e}",
            w.speed, w.residual
        ),
        None => format!("c = {:.10}, residual {:.3e}", w.speed, w.residual),
    };
    r.tolerance = Some(cfg.wave_tol);
    r.details = serde_json::json!({
        "nonlinearity": cfg.nonlinearity_spec,
        "speed": w.speed,
        "closed_form_speed": closed_form,
        "wells": [w.wells.0, w.wells.1],
        "residual": w.residual,
        "spacing": w.spacing,
    });
    Ok(r)
}

fn rigidity(cfg: &ExperimentConfig, series: &mut String) -> Result<Report> {
    let grid = cfg.grid()?;
    let f = initial_field(cfg, &grid, None)?;
    let q = quadrature(cfg)?;
    let rep = rigidity_detect(&f, &cfg.nonlinearity, &q, cfg.rigidity_tol)?;

    let dim = grid.dim();
    for a in 0..dim {
        let _ = write!(series, "x{a},");
    }
    let _ = writeln!(series, "u,nu");
    for i in 0..grid.len() {
        if grid.role(i) != crate::grid::NodeRole::Active {
            continue;
        }
        let x = grid.coords(i);
        for v in &x[..dim] {
            let _ = write!(series, "{v},");
        }
        let u = f.values()[i];
        let _ = writeln!(series, "{u},{}", q.h(u).map_or(f64::NAN, |v| v));
    }

    let mut r = Report::new(cfg.kind);
    r.passed = cfg.expect.is_none_or(|e| e == rep.verdict);
    r.summary = format!(
        "verdict {:?}{}",
        rep.verdict,
        match cfg.expect {
            Some(e) if e != rep.verdict => format!(" (expected {e:?})"),
            _ => String::new(),
        }
    );
    r.verdict = Some(rep.verdict);
    r.direction = rep.direction.clone();
    r.offset = rep.offset;
    r.tolerance = Some(cfg.rigidity_tol);
    r.details = serde_json::json!({
        "nonlinearity": cfg.nonlinearity_spec,
        "max_deviation": rep.max_deviation,
        "slope": rep.slope,
        "max_p_deviation": rep.max_p_deviation,
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::from_ini_str(text).unwrap();
        c.output = dir.to_path_buf();
        c
    }

    #[test]
    fn exit_codes() {
        let ok = Ok(Outcome {
            passed: true,
            summary: String::new(),
            bundle: PathBuf::new(),
        });
        let fail = Ok(Outcome {
            passed: false,
            summary: String::new(),
            bundle: PathBuf::new(),
        });
        assert_eq!(exit_code(&ok), 0);
        assert_eq!(exit_code(&fail), 1);
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 2);
        assert_eq!(exit_code(&Err(Error::NonFinite { node: 0, time: 0.0 })), 3);
    }

    #[test]
    fn rigidity_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(
            "[experiment]\nkind = rigidity\nnonlinearity = double_well\n[tolerance]\nexpect = one_dimensional\n",
            dir.path(),
        );
        let out = run_experiment(&c).unwrap();
        assert!(out.passed, "{}", out.summary);
        let rep = Report::read(dir.path()).unwrap();
        assert_eq!(rep.verdict, Some(Verdict::OneDimensional));
        assert!((rep.offset.unwrap() - 0.3).abs() < 1e-6);
        assert!(rep.sup_p_series.is_none());
    }

    #[test]
    fn missing_input_field_is_runtime_fault() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(
            "[experiment]\nkind = rigidity\nnonlinearity = double_well\n[initial]\ndata = file\npath = /nonexistent/u.bin\n",
            dir.path(),
        );
        let r = run_experiment(&c);
        assert!(matches!(r, Err(Error::MissingFile(_))));
        assert_eq!(exit_code(&r), 3);
    }
}
