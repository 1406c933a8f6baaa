use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::InteractionMatrix;
use crate::error::{Error, Result};
use crate::seeded_rng;

/// Marginal distribution of the non-zero off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marginal {
    #[default]
    Normal,
    Uniform,
}

impl Marginal {
    /// Maps a standard normal draw onto the marginal with the given moments.
    fn transform(self, z: f64, mean: f64, std: f64) -> f64 {
        match self {
            Marginal::Normal => mean + std * z,
            Marginal::Uniform => {
                let u = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
                mean + std * 3f64.sqrt() * (2.0 * u - 1.0)
            }
        }
    }
}

/// Parameters of a random interaction matrix with correlated off-diagonal
/// pairs, partial connectivity and a random diagonal `A_ii = -D_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomMatrixSpec {
    pub size: usize,
    pub mu_x: f64,
    pub sigma_x: f64,
    pub rho: f64,
    pub connectivity: f64,
    pub mu_d: f64,
    pub sigma_d: f64,
    #[serde(default)]
    pub marginal: Marginal,
    pub seed: u64,
}

impl RandomMatrixSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.into()));
        if self.size < 2 {
            return bad("random matrix size must be at least 2");
        }
        if !(self.connectivity > 0.0 && self.connectivity <= 1.0) {
            return bad("connectivity must lie in (0, 1]");
        }
        if !(self.sigma_x >= 0.0 && self.sigma_d >= 0.0) {
            return bad("standard deviations must be non-negative");
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return bad("pair correlation must lie in [-1, 1]");
        }
        if ![self.mu_x, self.sigma_x, self.mu_d, self.sigma_d]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("moments must be finite");
        }
        Ok(())
    }
}

/// Samples a matrix from `spec`.
///
/// Each off-diagonal entry is independently non-zero with probability
/// `connectivity`. The two entries of a pair `(A_ij, A_ji)` come from a
/// Gaussian copula with correlation `rho`; the diagonal is `-D_i` with
/// `D_i ~ Normal(mu_d, sigma_d)`.
pub fn generate_random_matrix(spec: &RandomMatrixSpec) -> Result<InteractionMatrix> {
    spec.validate()?;
    let s = spec.size;
    let mut rng = seeded_rng(spec.seed);
    let mut m = InteractionMatrix::zeros(s)?;
    let tail = (1.0 - spec.rho * spec.rho).max(0.0).sqrt();
    for i in 0..s {
        for j in i + 1..s {
            let keep_ij = rng.random::<f64>() < spec.connectivity;
            let keep_ji = rng.random::<f64>() < spec.connectivity;
            let z1: f64 = rng.sample(StandardNormal);
            let z3: f64 = rng.sample(StandardNormal);
            let z2 = spec.rho * z1 + tail * z3;
            if keep_ij {
                m.set(i, j, spec.marginal.transform(z1, spec.mu_x, spec.sigma_x));
            }
            if keep_ji {
                m.set(j, i, spec.marginal.transform(z2, spec.mu_x, spec.sigma_x));
            }
        }
    }
    for i in 0..s {
        let z: f64 = rng.sample(StandardNormal);
        m.set(i, i, -(spec.mu_d + spec.sigma_d * z));
    }
    m.directed = !m.is_symmetric();
    Ok(m)
}
