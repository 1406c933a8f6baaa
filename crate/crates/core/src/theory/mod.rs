//! Closed-form random-matrix predictions for the reduced GLV and SIS maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{matrix_stats, InteractionMatrix, MatrixStats};

/// Moments of a random GLV community.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlvEnsemble {
    pub size: usize,
    pub mu_alpha: f64,
    pub sigma_alpha: f64,
    pub mu_a: f64,
    pub sigma_a: f64,
    pub rho_a: f64,
    pub mu_d: f64,
    pub sigma_d: f64,
}

impl GlvEnsemble {
    /// Ensemble built from the moments of the non-zero entries and the
    /// connectivity, with pair masks drawn independently.
    #[allow(clippy::too_many_arguments)]
    pub fn from_connectivity(
        size: usize,
        mu_alpha: f64,
        sigma_alpha: f64,
        mu_x: f64,
        sigma_x: f64,
        rho_x: f64,
        connectivity: f64,
        mu_d: f64,
        sigma_d: f64,
    ) -> Self {
        let (mu_a, sigma_a) = connectivity_rescale(mu_x, sigma_x, connectivity);
        let rho_a = connectivity_rho(rho_x, sigma_x, connectivity, sigma_a);
        Self {
            size,
            mu_alpha,
            sigma_alpha,
            mu_a,
            sigma_a,
            rho_a,
            mu_d,
            sigma_d,
        }
    }

    /// Ensemble moments measured on a realized matrix.
    pub fn from_stats(stats: &MatrixStats, mu_alpha: f64, sigma_alpha: f64) -> Self {
        Self {
            size: stats.size,
            mu_alpha,
            sigma_alpha,
            mu_a: stats.mu_a,
            sigma_a: stats.sigma_a,
            rho_a: stats.rho_a.unwrap_or(0.0),
            mu_d: stats.mu_d,
            sigma_d: stats.sigma_d,
        }
    }

    /// `M = (S - 1) mu_A - mu_D`.
    pub fn m(&self) -> f64 {
        (self.size as f64 - 1.0) * self.mu_a - self.mu_d
    }

    fn m_checked(&self) -> Result<f64> {
        let m = self.m();
        if m == 0.0 || !m.is_finite() {
            Err(Error::ZeroDenominator)
        } else {
            Ok(m)
        }
    }
}

/// How the diagonal `D_i = -A_ii` enters [`a_eff_rmt`].
#[derive(Debug, Clone, PartialEq)]
pub enum Diagonal {
    Moments { mu_d: f64, sigma_d: f64 },
    Realized(Vec<f64>),
}

impl Diagonal {
    /// `(sum(-D_i), sum(D_i^2))` for a community of `size` nodes.
    fn sums(&self, size: usize) -> (f64, f64) {
        match self {
            Diagonal::Moments { mu_d, sigma_d } => {
                let s = size as f64;
                (-s * mu_d, s * (mu_d * mu_d + sigma_d * sigma_d))
            }
            Diagonal::Realized(d) => (-d.iter().sum::<f64>(), d.iter().map(|v| v * v).sum()),
        }
    }
}

/// Expected `A_eff` of a random matrix with off-diagonal moments
/// `(mu_a, sigma_a, rho_a)` and the given diagonal.
pub fn a_eff_rmt(size: usize, mu_a: f64, sigma_a: f64, rho_a: f64, diag: &Diagonal) -> Result<f64> {
    if let Diagonal::Realized(d) = diag {
        if d.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: d.len(),
            });
        }
    }
    let s = size as f64;
    let (sum_neg_d, sum_d2) = diag.sums(size);
    let den = sum_neg_d + s * (s - 1.0) * mu_a;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    let num = sum_d2
        + (s - 1.0)
            * (2.0 * mu_a * sum_neg_d
                + s * (s - 1.0) * mu_a * mu_a
                + s * rho_a * sigma_a * sigma_a);
    Ok(num / den)
}

/// [`a_eff_rmt`] fed with the measured moments and realized diagonal of `a`.
pub fn a_eff_rmt_from_matrix(a: &InteractionMatrix) -> Result<f64> {
    let st = matrix_stats(a)?;
    let d = a.diagonal().iter().map(|v| -v).collect();
    a_eff_rmt(st.size, st.mu_a, st.sigma_a, st.rho_a.unwrap_or(0.0), &Diagonal::Realized(d))
}

/// `(d2, d3)` of the reduced GLV map, ignoring pair correlations.
pub fn glv_effective_params(ens: &GlvEnsemble) -> Result<(f64, f64)> {
    let m = ens.m_checked()?;
    Ok((1.0 + ens.mu_alpha, (m * m + ens.sigma_d * ens.sigma_d) / m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Nonzero,
    Zero,
}

/// Stationary `x_eff` of the full system on the requested branch.
pub fn glv_x_eff_prediction(ens: &GlvEnsemble, branch: Branch) -> Result<f64> {
    let m = ens.m_checked()?;
    Ok(match branch {
        Branch::Nonzero => -ens.mu_alpha / m,
        Branch::Zero => 0.0,
    })
}

/// Distance between the full-system `x_eff` and the reduced map's non-zero
/// root, when the system sits on `branch`.
pub fn glv_error_prediction(ens: &GlvEnsemble, branch: Branch) -> Result<f64> {
    let m = ens.m_checked()?;
    let sd2 = ens.sigma_d * ens.sigma_d;
    Ok(match branch {
        Branch::Nonzero => (ens.mu_alpha * sd2 / (m * (m * m + sd2))).abs(),
        Branch::Zero => (ens.mu_alpha * m / (m * m + sd2)).abs(),
    })
}

/// Global off-diagonal mean and standard deviation when each entry is kept
/// with probability `c`.
pub fn connectivity_rescale(mu_x: f64, sigma_x: f64, c: f64) -> (f64, f64) {
    (
        c * mu_x,
        (c * sigma_x * sigma_x + c * (1.0 - c) * mu_x * mu_x).sqrt(),
    )
}

/// Pair correlation of the diluted matrix: `c^2 rho_x sigma_x^2 / sigma_a^2`
/// (independent masks). Zero when `sigma_a` vanishes.
pub fn connectivity_rho(rho_x: f64, sigma_x: f64, c: f64, sigma_a: f64) -> f64 {
    if sigma_a == 0.0 {
        0.0
    } else {
        c * c * rho_x * sigma_x * sigma_x / (sigma_a * sigma_a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SisPhase {
    Active,
    Extinct,
}

impl SisPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            SisPhase::Active => "active",
            SisPhase::Extinct => "extinct",
        }
    }
}

/// Active iff `a_eff > e_eff`; a tie is extinct.
pub fn sis_threshold(e_eff: f64, a_eff: f64) -> SisPhase {
    if a_eff > e_eff {
        SisPhase::Active
    } else {
        SisPhase::Extinct
    }
}
