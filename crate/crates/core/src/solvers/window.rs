//! Finite backward windows `[t_start, t_end]` standing in for ancient
//! solutions, plus seeded band-limited initial data.

use super::stepper::{
    cfl_max_dt, explicit_quasilinear_into, explicit_semilinear_into, imex_semilinear_into,
    sup_grad_sq,
};
use super::{QuasilinearProfile, Scheme};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::nonlinearity::Nonlinearity;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct WindowConfig {
    pub t_start: f64,
    pub t_end: f64,
    /// Steps between stored snapshots; the final state is always stored.
    pub snapshot_every: usize,
    pub scheme: Scheme,
    /// Overrides the CFL-derived step (explicit runs still check it).
    pub dt: Option<f64>,
}

impl WindowConfig {
    pub fn new(t_start: f64, t_end: f64, snapshot_every: usize) -> Self {
        Self {
            t_start,
            t_end,
            snapshot_every,
            scheme: Scheme::Explicit,
            dt: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }
}

/// Snapshots of one run, first and last state included.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
    pub dt: f64,
    pub scheme: Scheme,
    /// `dt` over the stability bound used to choose it.
    pub cfl_ratio: f64,
    /// `sup |Du|^2` at each snapshot.
    pub sup_grad_sq: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<Grid> {
        self.snapshots[0].grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(Field::time).collect()
    }

    pub fn first(&self) -> &Field {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// Consecutive snapshot pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&Field, &Field)> {
        self.snapshots.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// Samples `init` at `cfg.t_start` and evolves it to `cfg.t_end`.
pub fn run_window<S: Fn(&[f64]) -> f64>(
    init: S,
    grid: &Arc<Grid>,
    nl: &Nonlinearity,
    profile: Option<&QuasilinearProfile>,
    cfg: &WindowConfig,
) -> Result<Trajectory> {
    evolve(Field::from_fn(grid, cfg.t_start, init), nl, profile, cfg)
}

/// Evolves a given field over `[cfg.t_start, cfg.t_end]`; the field's own
/// timestamp is replaced by `cfg.t_start`.
pub fn evolve(
    mut field: Field,
    nl: &Nonlinearity,
    profile: Option<&QuasilinearProfile>,
    cfg: &WindowConfig,
) -> Result<Trajectory> {
    let span = cfg.t_end - cfg.t_start;
    if !(span > 0.0) {
        return Err(Error::NonPositiveInterval(span));
    }
    if cfg.snapshot_every == 0 {
        return Err(Error::InvalidArgument(
            "snapshot_every must be at least 1".into(),
        ));
    }
    field.set_time(cfg.t_start);
    let grid = Arc::clone(field.grid());
    let s0 = sup_grad_sq(&field);
    // Gradients may steepen; the quasilinear bound is taken with headroom.
    let s_budget = if profile.is_some() {
        4.0 * s0 + 1.0
    } else {
        0.0
    };
    let dt_max = cfl_max_dt(&grid, nl, profile, s_budget);
    let (steps, dt) = match cfg.dt {
        Some(dt) => {
            if cfg.scheme == Scheme::Explicit && dt > dt_max * (1.0 + 1e-12) {
                return Err(Error::CflViolation { dt, max: dt_max });
            }
            let steps = (span / dt).round().max(1.0) as usize;
            (steps, span / steps as f64)
        }
        None => {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            (steps, span / steps as f64)
        }
    };
    if profile.is_some() && cfg.scheme == Scheme::Imex {
        return Err(Error::InvalidArgument(
            "the quasilinear flow is advanced explicitly only".into(),
        ));
    }

    let mut warnings = Vec::new();
    let (lo, hi) = nl.working_range();
    let mut snapshots = vec![field.clone()];
    let mut grads = vec![s0];
    let mut next = Field::zeros(&grid, cfg.t_start);
    let mut flagged_range = false;
    for step in 1..=steps {
        let t = field.time();
        match (profile, cfg.scheme) {
            (Some(p), _) => {
                explicit_quasilinear_into(&grid, nl, p, field.values(), dt, t, next.values_mut())?
            }
            (None, Scheme::Explicit) => {
                explicit_semilinear_into(&grid, nl, field.values(), dt, t, next.values_mut())?
            }
            (None, Scheme::Imex) => {
                imex_semilinear_into(&grid, nl, field.values(), dt, t, next.values_mut())?
            }
        }
        next.set_time(cfg.t_start + step as f64 * dt);
        std::mem::swap(&mut field, &mut next);

        if step % cfg.snapshot_every == 0 || step == steps {
            let s = sup_grad_sq(&field);
            if profile.is_some() && s > s_budget {
                warnings.push(format!(
                    "t = {:.6}: sup |Du|^2 = {s:.4} exceeds the step-size budget {s_budget:.4}",
                    field.time()
                ));
            }
            if !flagged_range && field.active_values().any(|v| v < lo || v > hi) {
                flagged_range = true;
                warnings.push(format!(
                    "t = {:.6}: state left the working range [{lo}, {hi}]",
                    field.time()
                ));
            }
            grads.push(s);
            snapshots.push(field.clone());
        }
    }
    Ok(Trajectory {
        snapshots,
        dt,
        scheme: cfg.scheme,
        cfl_ratio: dt / dt_max,
        sup_grad_sq: grads,
        warnings,
    })
}

/// Smooth random data: Fourier modes with `|k|_∞ <= 7` per axis over the
/// box periods, coefficients `N(0,1)·(1+|k|)^{-6}`, rescaled so that the
/// maximum over the grid nodes is `amplitude`.
#[derive(Clone, Debug)]
pub struct BandLimitedNoise {
    origin: Vec<f64>,
    periods: Vec<f64>,
    modes: Vec<([i32; 3], f64, f64)>,
    scale: f64,
}

impl BandLimitedNoise {
    pub const MAX_MODE: i32 = 7;
    pub const DEFAULT_DECAY: f64 = 6.0;

    pub fn new(grid: &Grid, seed: u64, amplitude: f64) -> Self {
        Self::with_decay(grid, seed, amplitude, Self::DEFAULT_DECAY)
    }

    /// Same construction with weights `(1+|k|)^{-decay}`.
    pub fn with_decay(grid: &Grid, seed: u64, amplitude: f64, decay: f64) -> Self {
        let dim = grid.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        let k = Self::MAX_MODE;
        let range = |a: usize| if a < dim { -k..=k } else { 0..=0 };
        for k0 in 0..=k {
            for k1 in range(1) {
                for k2 in range(2) {
                    let kv = [k0, k1, k2];
                    // Half the lattice: (k, -k) carry the same mode.
                    let first = kv.iter().find(|&&c| c != 0);
                    if matches!(first, Some(&c) if c < 0) {
                        continue;
                    }
                    let norm = kv.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
                    let w = (1.0 + norm).powf(-decay);
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    modes.push((kv, w * a, w * b));
                }
            }
        }
        let mut noise = Self {
            origin: grid.origin().to_vec(),
            periods: grid.extents().to_vec(),
            modes,
            scale: 1.0,
        };
        let peak = (0..grid.len())
            .map(|i| noise.value(&grid.coords(i)[..dim]).abs())
            .fold(0.0, f64::max);
        noise.scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
        noise
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for (k, a, b) in &self.modes {
            let phase: f64 = (0..x.len())
                .map(|d| 2.0 * PI * k[d] as f64 * (x[d] - self.origin[d]) / self.periods[d])
                .sum();
            v += a * phase.cos() + b * phase.sin();
        }
        self.scale * v
    }
}
