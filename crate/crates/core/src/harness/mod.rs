//! Experiment orchestration: configuration, report bundles, plot scripts and
//! the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod data;
pub mod experiment;
pub mod plot;

pub use acceptance::{AcceptanceContext, CriterionResult, Level, Summary};
pub use config::{ExperimentConfig, ExperimentKind};
pub use experiment::{exit_code, run_experiment, Outcome};
pub use plot::emit_plots;

/// Sizes the global rayon pool from `PFLAB_THREADS` when set. Later calls,
/// or a pool that already exists, leave the pool unchanged.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var("PFLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
