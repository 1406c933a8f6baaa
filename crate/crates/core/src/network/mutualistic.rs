use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Incidence, InteractionMatrix};
use crate::error::{Error, Result};
use crate::seeded_rng;

/// Intraspecific competition coefficient on the diagonal.
pub const INTRASPECIFIC: f64 = -1.0;
/// Upper end of the interspecific competition distribution.
pub const COMPETITION_MAX: f64 = -0.001;

/// Parameters for a plant-pollinator interaction matrix built on an
/// empirical incidence grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteSpec {
    pub incidence: Incidence,
    pub mu_gamma: f64,
    pub sigma_gamma: f64,
    pub competition_max: f64,
    pub seed: u64,
}

impl BipartiteSpec {
    /// Uses `sigma_gamma = |mu_gamma / 3|` and the default competition cap.
    pub fn new(incidence: Incidence, mu_gamma: f64, seed: u64) -> Self {
        Self {
            incidence,
            mu_gamma,
            sigma_gamma: (mu_gamma / 3.0).abs(),
            competition_max: COMPETITION_MAX,
            seed,
        }
    }

    pub fn with_sigma_gamma(mut self, sigma: f64) -> Self {
        self.sigma_gamma = sigma;
        self
    }

    /// Mean interspecific competition within a guild of `size` species.
    pub fn competition_mean(size: usize) -> f64 {
        -1.0 / size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Species {
    Plant(usize),
    Animal(usize),
}

/// Result of [`build_mutualistic`]: the matrix plus species that have no
/// mutualistic partner (kept in the community with degree 0).
#[derive(Debug, Clone)]
pub struct MutualisticNetwork {
    pub matrix: InteractionMatrix,
    pub isolated: Vec<Species>,
}

/// Assembles `[[Omega_pp, Gamma_pa], [Gamma_ap, Omega_aa]]`.
///
/// Plants occupy indices `0..S_p`, animals `S_p..S_p + S_a`. Mutualistic
/// weights are `gamma * y_ij / k_i` with a fresh `gamma ~ Normal(mu_gamma,
/// sigma_gamma)` per interacting pair; within-guild competition is uniform on
/// `[2 mean - max, max]` with `mean = -1 / guild size`.
pub fn build_mutualistic(spec: &BipartiteSpec) -> Result<MutualisticNetwork> {
    let inc = &spec.incidence;
    let (sp, sa) = (inc.plants(), inc.animals());
    if !(spec.sigma_gamma >= 0.0) || !spec.mu_gamma.is_finite() {
        return Err(Error::InvalidSpec("mutualistic strength moments must be finite, sigma >= 0".into()));
    }
    let gamma = Normal::new(spec.mu_gamma, spec.sigma_gamma)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut rng = seeded_rng(spec.seed);
    let mut m = InteractionMatrix::zeros(sp + sa)?;

    for (offset, size) in [(0, sp), (sp, sa)] {
        let mean = BipartiteSpec::competition_mean(size);
        let max = spec.competition_max;
        if size > 1 && mean > max {
            return Err(Error::InvalidSpec(format!(
                "competition mean {mean} exceeds its maximum {max}"
            )));
        }
        let lo = 2.0 * mean - max;
        for i in 0..size {
            for j in 0..size {
                let v = if i == j {
                    INTRASPECIFIC
                } else {
                    lo + (max - lo) * rng.random::<f64>()
                };
                m.set(offset + i, offset + j, v);
            }
        }
    }

    let mut isolated = Vec::new();
    for p in 0..sp {
        let k = inc.plant_degree(p);
        if k == 0 {
            isolated.push(Species::Plant(p));
            continue;
        }
        for a in (0..sa).filter(|&a| inc.linked(p, a)) {
            m.set(p, sp + a, gamma.sample(&mut rng) / k as f64);
        }
    }
    for a in 0..sa {
        let k = inc.animal_degree(a);
        if k == 0 {
            isolated.push(Species::Animal(a));
            continue;
        }
        for p in (0..sp).filter(|&p| inc.linked(p, a)) {
            m.set(sp + a, p, gamma.sample(&mut rng) / k as f64);
        }
    }
    for s in &isolated {
        log::warn!("species {s:?} has no mutualistic partner; kept with degree 0");
    }
    m.directed = !m.is_symmetric();
    Ok(MutualisticNetwork {
        matrix: m,
        isolated,
    })
}
