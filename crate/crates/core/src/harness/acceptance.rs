//! The acceptance suite: ten numbered criteria at fixed desk-scale
//! parameters. `Full` adds convergence studies.

use super::data::{epigraph_profile, lipschitz_profile, Psi};
use crate::error::Result;
use crate::grid::{build_grid, DomainSpec, EpigraphSpec, Field};
use crate::nonlinearity::{build_quadrature, exact_profile, Nonlinearity};
use crate::pfunction::{
    bochner_residual, default_grad_floor, p_residual, p_semilinear, rigidity_detect,
    verify_estimate, Verdict,
};
use crate::solvers::{
    evolve, run_window, solve_traveling_wave, step_semilinear, BandLimitedNoise,
    QuasilinearProfile, Scheme, Trajectory, WindowConfig,
};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quick" => Some(Level::Quick),
            "full" => Some(Level::Full),
            _ => None,
        }
    }
}

/// Inputs that tests may replace, e.g. with a corrupted profile.
#[derive(Clone, Debug)]
pub struct AcceptanceContext {
    pub profile: QuasilinearProfile,
}

impl Default for AcceptanceContext {
    fn default() -> Self {
        Self {
            profile: QuasilinearProfile::minimal_surface(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>3} {:<36} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub level: Level,
    pub results: Vec<CriterionResult>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, id: &str) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

type Outcome = Result<(bool, String)>;

fn record(results: &mut Vec<CriterionResult>, id: &str, name: &str, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    results.push(CriterionResult {
        id: id.into(),
        name: name.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    });
}

/// `10 h^2 + 5 dt`.
pub fn estimate_tolerance(h: f64, dt: f64) -> f64 {
    10.0 * h * h + 5.0 * dt
}

/// `50 h^2 + 5 dt`.
pub fn residual_tolerance(h: f64, dt: f64) -> f64 {
    50.0 * h * h + 5.0 * dt
}

/// Minimum subsolution residual over all snapshot pairs, its tolerance
/// margin and whether the torus (Bochner) form agreed bitwise.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ResidualScan {
    /// `min (R + tol)` over pairs; nonnegative means every pair passed.
    pub margin: f64,
    pub min: f64,
    pub pairs: usize,
    pub bochner_checked: usize,
    pub bochner_equal: bool,
}

pub(crate) fn scan_residuals(
    traj: &Trajectory,
    nl: &Nonlinearity,
    check_bochner: bool,
) -> Result<ResidualScan> {
    let h = traj.grid().h_min();
    let mut scan = ResidualScan {
        margin: f64::INFINITY,
        min: f64::INFINITY,
        bochner_equal: true,
        ..Default::default()
    };
    for (a, b) in traj.pairs() {
        let floor = default_grad_floor(b);
        if floor <= 0.0 {
            continue;
        }
        let r = p_residual(a, b, nl, floor)?;
        if let Some(m) = r.min() {
            scan.min = scan.min.min(m);
            scan.margin = scan.margin.min(m + residual_tolerance(h, r.dt));
            scan.pairs += 1;
        }
        if check_bochner && traj.grid().is_periodic() {
            let rb = bochner_residual(a, b, nl, floor)?;
            scan.bochner_checked += 1;
            let same = rb.mask == r.mask
                && rb
                    .values
                    .iter()
                    .zip(&r.values)
                    .all(|(x, y)| x.to_bits() == y.to_bits());
            scan.bochner_equal &= same;
        }
    }
    Ok(scan)
}

pub(crate) fn merge(a: ResidualScan, b: ResidualScan) -> ResidualScan {
    ResidualScan {
        margin: a.margin.min(b.margin),
        min: a.min.min(b.min),
        pairs: a.pairs + b.pairs,
        bochner_checked: a.bochner_checked + b.bochner_checked,
        bochner_equal: a.bochner_equal && b.bochner_equal,
    }
}

pub(crate) fn empty_scan() -> ResidualScan {
    ResidualScan {
        margin: f64::INFINITY,
        min: f64::INFINITY,
        bochner_equal: true,
        ..Default::default()
    }
}

/// Steps between snapshots so that snapshots are about `interval` apart.
fn every(dt: f64, interval: f64) -> usize {
    ((interval / dt).round() as usize).max(1)
}

// ---------------------------------------------------------------- 1

/// `max |P|` of the sampled kink on `[-12, 12]` at each spacing.
fn kink_p_errors(spacings: &[f64]) -> Result<Vec<f64>> {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let prof = exact_profile(&q, &[1.0], 0.0)?;
    spacings
        .iter()
        .map(|&h| {
            let n = (24.0 / h).round() as usize;
            let g = build_grid(&DomainSpec::dirichlet(&[-12.0], &[24.0]), &[n])?;
            let f = Field::from_fn(&g, 0.0, |x| prof.value(x));
            Ok(p_semilinear(&f, &nl).max_abs())
        })
        .collect()
}

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn fixed(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn orders(errors: &[f64], spacings: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .zip(spacings.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

fn criterion_equality() -> Outcome {
    let hs = [0.02, 0.01, 0.005];
    let errs = kink_p_errors(&hs)?;
    let ord = orders(&errs, &hs);
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let passed = decreasing && ord.iter().all(|&p| p >= 1.9) && errs[2] <= 1e-4;
    Ok((
        passed,
        format!(
            "max|P| = {:.3e}, {:.3e}, {:.3e}; orders {:.3}, {:.3}",
            errs[0], errs[1], errs[2], ord[0], ord[1]
        ),
    ))
}

// ---------------------------------------------------------------- 2, 3

const FORWARD_PSIS: [Psi; 3] = [Psi::Identity, Psi::Clamp { a: 1.0 }, Psi::Sine];

struct ForwardOutcome {
    passed: bool,
    detail: String,
    residuals: ResidualScan,
}

fn forward_invariance(profile: Option<&QuasilinearProfile>) -> Result<ForwardOutcome> {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let grid = build_grid(&DomainSpec::periodic(&[-20.0], &[40.0]), &[4000])?;
    let h = grid.spacing()[0];
    let mut passed = true;
    let mut parts = Vec::new();
    let mut residuals = empty_scan();
    if let Some(p) = profile {
        if let Err(e) = p.check(16.0) {
            return Ok(ForwardOutcome {
                passed: false,
                detail: format!("profile `{}` rejected: {e}", p.name()),
                residuals,
            });
        }
    }
    for psi in FORWARD_PSIS {
        let init = lipschitz_profile(&q, psi, &grid);
        let dt = crate::solvers::cfl_max_dt(&grid, &nl, profile, 3.0);
        let cfg = WindowConfig::new(0.0, 1.0, every(dt, 2e-3));
        let traj = run_window(&init, &grid, &nl, profile, &cfg)?;
        let tol = estimate_tolerance(h, traj.dt);
        let report = verify_estimate(&traj, &nl, profile, tol)?;
        if profile.is_none() {
            residuals = merge(residuals, scan_residuals(&traj, &nl, true)?);
        }
        let ok = !report.violation;
        passed &= ok;
        parts.push(format!("{}: sup P {:.2e}", psi.name(), report.max_sup_p()));
        if !ok {
            parts.push(format!(
                "exceeds {tol:.2e} at t = {:?}",
                report.first_violation
            ));
        }
    }
    let tol = estimate_tolerance(h, crate::solvers::cfl_max_dt(&grid, &nl, profile, 3.0));
    Ok(ForwardOutcome {
        passed,
        detail: format!("{} (tol ~{tol:.2e})", parts.join(", ")),
        residuals,
    })
}

// ---------------------------------------------------------------- 4

fn criterion_epigraph() -> Outcome {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let spec = DomainSpec::epigraph(&[-10.0, 0.0], &[20.0, 10.0], EpigraphSpec::flat());
    let grid = build_grid(&spec, &[400, 200])?;
    let h = grid.h_min();
    let init = epigraph_profile(&q, &grid)?;
    let f0 = Field::from_fn(&grid, 0.0, &init);
    let dt = crate::solvers::cfl_max_dt(&grid, &nl, None, 0.0);
    let tol = estimate_tolerance(h, dt);
    let p0 = p_semilinear(&f0, &nl).sup().0;
    if p0 > tol {
        return Ok((false, format!("initial sup P {p0:.3e} exceeds {tol:.3e}")));
    }
    let traj = evolve(f0, &nl, None, &WindowConfig::new(0.0, 0.5, every(dt, 0.01)))?;
    let report = verify_estimate(&traj, &nl, None, estimate_tolerance(h, traj.dt))?;
    Ok((
        !report.violation,
        format!(
            "sup P over t <= 0.5: {:.3e} (initial {:.3e}, tol {:.3e})",
            report.max_sup_p(),
            p0,
            report.tolerance
        ),
    ))
}

// ---------------------------------------------------------------- 5

const WINDOWS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
const SEEDS: u64 = 10;

struct AncientOutcome {
    passed: bool,
    detail: String,
    residuals: ResidualScan,
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

/// `(sup_x P at t = 0)_+` for each window, plus the residual scan of every
/// snapshot pair.
pub(crate) fn ancient_windows(
    nl: &Nonlinearity,
    n: usize,
    seed: u64,
    windows: &[f64],
    with_residuals: bool,
) -> Result<(Vec<f64>, Option<ResidualScan>)> {
    let grid = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[n])?;
    let noise = BandLimitedNoise::new(&grid, seed, 0.9);
    let mut sups = Vec::new();
    let mut scan = empty_scan();
    for &t in windows {
        let dt = crate::solvers::cfl_max_dt(&grid, nl, None, 0.0);
        let cfg = WindowConfig::new(-t, 0.0, every(dt, 2e-3));
        let traj = run_window(|x| noise.value(x), &grid, nl, None, &cfg)?;
        sups.push(p_semilinear(traj.last(), nl).sup().0.max(0.0));
        if with_residuals {
            scan = merge(scan, scan_residuals(&traj, nl, true)?);
        }
    }
    Ok((sups, with_residuals.then_some(scan)))
}

fn criterion_ancient() -> Result<AncientOutcome> {
    let nl = Nonlinearity::double_well(0.0)?;
    let runs: Vec<(Vec<f64>, Option<ResidualScan>)> = (0..SEEDS)
        .into_par_iter()
        .map(|seed| ancient_windows(&nl, 256, seed, &WINDOWS, true))
        .collect::<Result<_>>()?;
    let mut residuals = empty_scan();
    for scan in runs.iter().filter_map(|(_, s)| *s) {
        residuals = merge(residuals, scan);
    }
    let medians: Vec<f64> = (0..WINDOWS.len())
        .map(|k| {
            let mut col: Vec<f64> = runs.iter().map(|(s, _)| s[k]).collect();
            median(&mut col)
        })
        .collect();
    let monotone = medians.windows(2).all(|w| w[1] <= w[0]);
    let last = *medians.last().unwrap();
    // For context: sup P of the data themselves, before any evolution.
    let grid = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[256])?;
    let mut initial: Vec<f64> = (0..SEEDS)
        .map(|seed| {
            let noise = BandLimitedNoise::new(&grid, seed, 0.9);
            p_semilinear(&Field::from_fn(&grid, 0.0, |x| noise.value(x)), &nl)
                .sup()
                .0
        })
        .collect();
    let initial_median = median(&mut initial);
    Ok(AncientOutcome {
        passed: monotone && last <= 0.05,
        detail: format!(
            "median (sup P)+ at T = 1,2,4,8: {} (median sup P of the data: {initial_median:.3e})",
            sci(&medians)
        ),
        residuals,
    })
}

// ---------------------------------------------------------------- 8

/// Speed of the `u = 0` crossing in a direct simulation of the
/// `β`-imbalanced flow started from the kink, by least squares over
/// `t ∈ [5, 25]`.
pub fn front_tracking_speed(beta: f64) -> Result<f64> {
    let nl = Nonlinearity::double_well(beta)?;
    let grid = build_grid(&DomainSpec::dirichlet(&[-40.0], &[80.0]), &[1600])?;
    let sign = if beta >= 0.0 { 1.0 } else { -1.0 };
    let mut f = Field::from_fn(&grid, 0.0, |x| sign * (x[0] / SQRT_2).tanh());
    let dt = crate::solvers::cfl_max_dt(&grid, &nl, None, 0.0);
    let (mut ts, mut xs) = (Vec::new(), Vec::new());
    let record_every = ((0.1 / dt).round() as usize).max(1);
    let mut step = 0usize;
    while f.time() < 25.0 {
        f = step_semilinear(&f, &nl, dt, Scheme::Explicit)?;
        step += 1;
        if step.is_multiple_of(record_every) && f.time() >= 5.0 {
            if let Some(x) = zero_crossing(&f) {
                ts.push(f.time());
                xs.push(x);
            }
        }
    }
    let n = ts.len() as f64;
    let (mt, mx) = (ts.iter().sum::<f64>() / n, xs.iter().sum::<f64>() / n);
    let cov: f64 = ts.iter().zip(&xs).map(|(t, x)| (t - mt) * (x - mx)).sum();
    let var: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    Ok(cov / var)
}

/// Position of the first sign change, by linear interpolation.
fn zero_crossing(f: &Field) -> Option<f64> {
    let g = f.grid();
    let u = f.values();
    (0..u.len() - 1).find_map(|i| {
        let (a, b) = (u[i], u[i + 1]);
        ((a < 0.0) != (b < 0.0)).then(|| {
            let x0 = g.coords(i)[0];
            x0 + g.spacing()[0] * a / (a - b)
        })
    })
}

fn criterion_waves() -> Outcome {
    let balanced = solve_traveling_wave(&Nonlinearity::double_well(0.0)?, 20.0, 1e-5)?;
    let err = balanced
        .xi
        .iter()
        .zip(&balanced.profile)
        .map(|(x, u)| (u - (x / SQRT_2).tanh()).abs())
        .fold(0.0, f64::max);
    let wave = solve_traveling_wave(&Nonlinearity::double_well(0.3)?, 20.0, 1e-5)?;
    let tracked = front_tracking_speed(0.3)?;
    let rel = (wave.speed - tracked).abs() / tracked.abs();
    let passed = balanced.speed.abs() <= 1e-8 && err <= 1e-6 && rel <= 0.02;
    Ok((
        passed,
        format!(
            "beta=0: |c| = {:.1e}, profile err {:.1e}; beta=0.3: c = {:.6}, tracked {:.6} ({:.2}%)",
            balanced.speed.abs(),
            err,
            wave.speed,
            tracked,
            100.0 * rel
        ),
    ))
}

// ---------------------------------------------------------------- 9

fn criterion_rigidity() -> Outcome {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let grid = build_grid(
        &DomainSpec::dirichlet(&[-2.0, -2.0], &[4.0, 4.0]),
        &[40, 40],
    )?;
    let tol = 1e-6;
    let mut worst_angle: f64 = 0.0;
    let mut worst_offset: f64 = 0.0;
    let mut all = true;
    for k in 0..16 {
        let theta = 2.0 * PI * k as f64 / 16.0 + 0.1;
        let alpha = 0.3 - 0.05 * k as f64;
        let prof = exact_profile(&q, &[theta.cos(), theta.sin()], alpha)?;
        let f = Field::from_fn(&grid, 0.0, |x| prof.value(x));
        let r = rigidity_detect(&f, &nl, &q, tol)?;
        match (r.verdict, r.direction, r.offset) {
            (Verdict::OneDimensional, Some(a), Some(off)) => {
                let d = (a[1].atan2(a[0]) - theta).rem_euclid(2.0 * PI);
                worst_angle = worst_angle.max(d.min(2.0 * PI - d));
                worst_offset = worst_offset.max((off - alpha).abs());
            }
            _ => all = false,
        }
    }
    let constant = rigidity_detect(&Field::constant(&grid, 0.2, 0.0), &nl, &q, tol)?.verdict;
    let bump = Field::from_fn(&grid, 0.0, |x| 0.5 * (-(x[0] * x[0] + x[1] * x[1])).exp());
    let bump = rigidity_detect(&bump, &nl, &q, tol)?.verdict;
    let passed = all
        && worst_angle <= 1e-6
        && worst_offset <= 1e-6
        && constant == Verdict::Constant
        && bump == Verdict::NotRigid;
    Ok((
        passed,
        format!(
            "16 directions: angle err {worst_angle:.1e}, offset err {worst_offset:.1e}; constant -> {constant:?}; bump -> {bump:?}"
        ),
    ))
}

// ---------------------------------------------------------------- 10

fn criterion_heat() -> Outcome {
    let grid = build_grid(&DomainSpec::periodic(&[0.0], &[2.0 * PI]), &[256])?;
    let nl = Nonlinearity::zero();
    let traj = run_window(
        |x| x[0].sin(),
        &grid,
        &nl,
        None,
        &WindowConfig::new(0.0, 1.0, usize::MAX),
    )?;
    let f = traj.last();
    let decay = (-1.0f64).exp();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in 0..grid.len() {
        let exact = decay * grid.coords(i)[0].sin();
        num = num.max((f.values()[i] - exact).abs());
        den = den.max(exact.abs());
    }
    let rel = num / den;
    Ok((
        rel <= 1e-3,
        format!("relative error {rel:.3e} at t = {:.3}", f.time()),
    ))
}

// ---------------------------------------------------------------- studies

fn study_kink_order() -> Outcome {
    let hs = [0.04, 0.02, 0.01, 0.005, 0.0025];
    let errs = kink_p_errors(&hs)?;
    let ord = orders(&errs, &hs);
    Ok((
        ord.iter().all(|&p| p >= 1.9),
        format!("max|P| {}, orders {}", sci(&errs), fixed(&ord)),
    ))
}

fn study_rotated_profile_order() -> Outcome {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let theta: f64 = 0.6;
    let prof = exact_profile(&q, &[theta.cos(), theta.sin()], 0.2)?;
    let mut errs = Vec::new();
    let hs = [0.1f64, 0.05, 0.025];
    for &h in &hs {
        let n = (8.0 / h).round() as usize;
        let g = build_grid(&DomainSpec::dirichlet(&[-4.0, -4.0], &[8.0, 8.0]), &[n, n])?;
        let f = Field::from_fn(&g, 0.0, |x| prof.value(x));
        errs.push(p_semilinear(&f, &nl).max_abs());
    }
    let ord = orders(&errs, &hs);
    Ok((
        ord.iter().all(|&p| p >= 1.9),
        format!(
            "2D rotated kink: max|P| {}, orders {}",
            sci(&errs),
            fixed(&ord)
        ),
    ))
}

fn study_residual_order() -> Outcome {
    let nl = Nonlinearity::double_well(0.0)?;
    let q = build_quadrature(&nl, 0.0)?;
    let prof = exact_profile(&q, &[1.0], 0.0)?;
    let mut errs = Vec::new();
    let hs = [0.04f64, 0.02, 0.01];
    for &h in &hs {
        let n = (16.0 / h).round() as usize;
        let g = build_grid(&DomainSpec::dirichlet(&[-8.0], &[16.0]), &[n])?;
        let a = Field::from_fn(&g, 0.0, |x| prof.value(x));
        let mut b = a.clone();
        b.set_time(0.01);
        let r = p_residual(&a, &b, &nl, default_grad_floor(&b))?;
        errs.push(r.max_abs().unwrap_or(0.0));
    }
    let ord = orders(&errs, &hs);
    Ok((
        ord.iter().all(|&p| p >= 1.0),
        format!(
            "residual on the kink: {}, orders {}",
            sci(&errs),
            fixed(&ord)
        ),
    ))
}

/// Grim reaper `u = t - log cos x` on `(-1.2, 1.2)` under the
/// minimal-surface flow, ends driven by the exact solution.
fn grim_reaper_error(n: usize, profile: &QuasilinearProfile) -> Result<f64> {
    let grid = build_grid(&DomainSpec::dirichlet(&[-1.2], &[2.4]), &[n])?;
    let nl = Nonlinearity::zero();
    let exact = |x: f64, t: f64| t - x.cos().ln();
    let mut f = Field::from_fn(&grid, 0.0, |x| exact(x[0], 0.0));
    let s_max = 1.2f64.tan().powi(2);
    let dt = crate::solvers::cfl_max_dt(&grid, &nl, Some(profile), s_max);
    let steps = (0.2 / dt).ceil() as usize;
    let dt = 0.2 / steps as f64;
    let ends: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.role(i) == crate::grid::NodeRole::Frozen)
        .collect();
    let mut err: f64 = 0.0;
    for _ in 0..steps {
        f = crate::solvers::step_quasilinear(&f, &nl, profile, dt)?;
        let t = f.time();
        for &i in &ends {
            f.values_mut()[i] = exact(grid.coords(i)[0], t);
        }
        for &i in grid.active_nodes() {
            err = err.max((f.values()[i] - exact(grid.coords(i)[0], t)).abs());
        }
    }
    Ok(err)
}

fn study_grim_reaper_order(profile: &QuasilinearProfile) -> Outcome {
    let ns = [60usize, 120, 240];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| grim_reaper_error(n, profile))
        .collect::<Result<_>>()?;
    let hs: Vec<f64> = ns.iter().map(|&n| 2.4 / n as f64).collect();
    let ord = orders(&errs, &hs);
    Ok((
        ord.iter().all(|&p| p >= 1.8),
        format!("grim reaper errors {}, orders {}", sci(&errs), fixed(&ord)),
    ))
}

/// Runs every criterion at the level's parameters.
pub fn run(level: Level, ctx: &AcceptanceContext) -> Summary {
    let mut results = Vec::new();
    record(&mut results, "1", "equality case", criterion_equality);

    let mut residuals = empty_scan();
    let mut residual_error = None;
    record(&mut results, "2", "forward invariance (semilinear)", || {
        let out = forward_invariance(None)?;
        residuals = merge(residuals, out.residuals);
        Ok((out.passed, out.detail))
    });
    if results
        .last()
        .is_some_and(|r| r.detail.starts_with("error"))
    {
        residual_error = Some("criterion 2 did not produce trajectories".to_string());
    }
    record(
        &mut results,
        "3",
        "forward invariance (minimal surface)",
        || {
            let out = forward_invariance(Some(&ctx.profile))?;
            Ok((out.passed, out.detail))
        },
    );
    record(&mut results, "4", "epigraph", criterion_epigraph);
    record(&mut results, "5", "ancient trend", || {
        let out = criterion_ancient()?;
        residuals = merge(residuals, out.residuals);
        Ok((out.passed, out.detail))
    });
    if results
        .last()
        .is_some_and(|r| r.detail.starts_with("error"))
    {
        residual_error = Some("criterion 5 did not produce trajectories".to_string());
    }
    record(&mut results, "6", "subsolution residual", || {
        if let Some(e) = residual_error.clone() {
            return Ok((false, e));
        }
        Ok((
            residuals.pairs > 0 && residuals.margin >= 0.0,
            format!(
                "{} snapshot pairs, min R = {:.3e}, worst margin to -(50h^2+5dt) = {:.3e}",
                residuals.pairs, residuals.min, residuals.margin
            ),
        ))
    });
    record(&mut results, "7", "Bochner coincidence", || {
        Ok((
            residuals.bochner_checked > 0 && residuals.bochner_equal,
            format!(
                "{} torus snapshot pairs, bitwise equal: {}",
                residuals.bochner_checked, residuals.bochner_equal
            ),
        ))
    });
    record(&mut results, "8", "traveling waves", criterion_waves);
    record(&mut results, "9", "rigidity detection", criterion_rigidity);
    record(&mut results, "10", "heat-mode sanity", criterion_heat);

    if level == Level::Full {
        record(
            &mut results,
            "S1",
            "kink P order, 5 spacings",
            study_kink_order,
        );
        record(
            &mut results,
            "S2",
            "rotated 2D kink P order",
            study_rotated_profile_order,
        );
        record(
            &mut results,
            "S3",
            "residual order on the kink",
            study_residual_order,
        );
        record(&mut results, "S4", "grim reaper order", || {
            study_grim_reaper_order(&ctx.profile)
        });
    }
    Summary { level, results }
}
