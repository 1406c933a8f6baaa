use serde::{Deserialize, Serialize};

use super::InteractionMatrix;
use crate::error::{Error, Result};

/// Moment summary of an interaction matrix.
///
/// Off-diagonal moments use the `1 / (S (S - 1))` estimators; diagonal
/// moments describe `D_i = -A_ii`. `mu_x` / `sigma_x` are the mean and
/// standard deviation of the non-zero off-diagonal entries only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixStats {
    pub size: usize,
    pub mu_a: f64,
    pub sigma_a: f64,
    /// `None` when `sigma_a == 0`.
    pub rho_a: Option<f64>,
    pub mu_d: f64,
    pub sigma_d: f64,
    pub connectivity: f64,
    pub mu_x: f64,
    pub sigma_x: f64,
}

impl MatrixStats {
    /// The pair correlation, or [`Error::DegenerateVariance`] when the
    /// off-diagonal entries are constant.
    pub fn rho(&self) -> Result<f64> {
        self.rho_a.ok_or(Error::DegenerateVariance)
    }
}

pub fn matrix_stats(a: &InteractionMatrix) -> Result<MatrixStats> {
    let s = a.n_nodes();
    if s < 2 {
        return Err(Error::InvalidSpec("matrix statistics need at least 2 nodes".into()));
    }
    let pairs = (s * (s - 1)) as f64;
    let (mut sum, mut sum_sq, mut sum_cross) = (0.0, 0.0, 0.0);
    let (mut nz, mut nz_sum, mut nz_sq) = (0usize, 0.0, 0.0);
    for i in 0..s {
        for j in 0..s {
            if i == j {
                continue;
            }
            let v = a.get(i, j);
            sum += v;
            sum_sq += v * v;
            sum_cross += v * a.get(j, i);
            if v != 0.0 {
                nz += 1;
                nz_sum += v;
                nz_sq += v * v;
            }
        }
    }
    let mu_a = sum / pairs;
    let var_a = (sum_sq / pairs - mu_a * mu_a).max(0.0);
    let sigma_a = var_a.sqrt();
    let scale = sum_sq / pairs;
    let rho_a = if var_a > 1e-14 * scale && var_a > 0.0 {
        Some(((sum_cross / pairs - mu_a * mu_a) / var_a).clamp(-1.0, 1.0))
    } else {
        None
    };

    let d: Vec<f64> = a.diagonal().iter().map(|v| -v).collect();
    let mu_d = d.iter().sum::<f64>() / s as f64;
    let sigma_d = (d.iter().map(|v| (v - mu_d).powi(2)).sum::<f64>() / s as f64).sqrt();

    let (mu_x, sigma_x) = if nz > 0 {
        let m = nz_sum / nz as f64;
        (m, (nz_sq / nz as f64 - m * m).max(0.0).sqrt())
    } else {
        (0.0, 0.0)
    };

    Ok(MatrixStats {
        size: s,
        mu_a,
        sigma_a,
        rho_a,
        mu_d,
        sigma_d,
        connectivity: nz as f64 / pairs,
        mu_x,
        sigma_x,
    })
}
