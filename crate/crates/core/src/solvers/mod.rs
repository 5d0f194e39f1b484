//! Time steppers, backward-window drivers and the traveling-wave solver.

mod profile;
mod stepper;
mod wave;
mod window;

pub use profile::{make_minimal_surface_profile, QuasilinearProfile};
pub use stepper::{
    cfl_max_dt, cfl_max_dt_with_safety, step_quasilinear, step_semilinear, Scheme, CFL_SAFETY,
};
pub use wave::{solve_traveling_wave, TravelingWave, WAVE_STEP};
pub use window::{evolve, run_window, BandLimitedNoise, Trajectory, WindowConfig};

pub(crate) use stepper::sup_grad_sq;
