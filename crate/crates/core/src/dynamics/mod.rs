//! Node-level polynomial dynamics and iteration of the full N-dimensional map.

mod model;
mod simulate;

pub use model::{horner, make_glv, make_sis, ClampMode, CouplingTerm, DynamicsModel};
pub use simulate::{
    glv_analytic_fixed_point, mean_field_trajectory, simulate, step_full, InitialRegime,
    RunStatus, SimulationSettings, Stepper, SteadyStateRecord,
};

use rand::Rng;
use rand_distr::StandardNormal;

/// `n` draws from `Normal(mean, std)` (growth rates).
pub fn sample_normal<R: Rng>(n: usize, mean: f64, std: f64, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| mean + std * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// `n` recovery rates drawn uniformly from `[0, 2 mean]`.
pub fn sample_recovery<R: Rng>(n: usize, mean: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| 2.0 * mean * rng.random::<f64>()).collect()
}
