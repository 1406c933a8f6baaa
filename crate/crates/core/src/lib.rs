//! Collapse of discrete-time networked dynamics onto a one-dimensional
//! effective map.
//!
//! A network of `N` nodes evolving as
//! `x_i[t+1] = F_i(x_i) + sum_j A_ij G_i(x_i, x_j)` is summarised by the
//! out-degree weighted mean state `x_eff` and a handful of effective
//! parameters `d_1..d_S`, so that `x_eff[t+1] ~ sum_s d_s x_eff^(s-1)`.
//!
//! * [`network`] builds and characterises interaction matrices.
//! * [`dynamics`] iterates the full map and provides GLV and SIS models.
//! * [`reduction`] fits polynomial dynamics, assembles the effective map,
//!   finds its fixed points and measures the collapse error.
//! * [`theory`] holds closed-form random-matrix predictions.
//! * [`experiments`] runs seeded parameter sweeps and writes result tables.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod network;
pub mod reduction;
pub mod theory;

pub use error::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG used by every generator in the crate.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
