use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Post-step projection of the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampMode {
    #[default]
    None,
    /// Negative values become 0 (extinction).
    Nonnegative,
    /// Values are clipped to `[0, 1]` (probabilities).
    UnitInterval,
}

impl ClampMode {
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            ClampMode::None => v,
            ClampMode::Nonnegative => v.max(0.0),
            ClampMode::UnitInterval => v.clamp(0.0, 1.0),
        }
    }
}

/// Monomial `coeff * x_i^(p-1) * x_j^(q-1)` of a coupling function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingTerm {
    pub p: usize,
    pub q: usize,
    pub coeff: f64,
}

impl CouplingTerm {
    pub fn new(p: usize, q: usize, coeff: f64) -> Self {
        Self { p, q, coeff }
    }

    /// Index `l = p + q - 1` of the collapsed coefficient this term feeds.
    pub fn collapsed_index(&self) -> usize {
        self.p + self.q - 1
    }
}

/// Per-node polynomial self- and coupling-dynamics.
///
/// `F_i(x) = sum_k b[i][k] x^k` (power-indexed, `m` coefficients) and
/// `G_i(x_i, x_j) = sum coeff x_i^(p-1) x_j^(q-1)` over node `i`'s terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsModel {
    self_coeffs: Vec<Vec<f64>>,
    coupling: Vec<Vec<CouplingTerm>>,
    self_order: usize,
    coupling_order: usize,
    clamp: ClampMode,
}

impl DynamicsModel {
    pub fn new(
        self_coeffs: Vec<Vec<f64>>,
        coupling: Vec<Vec<CouplingTerm>>,
        clamp: ClampMode,
    ) -> Result<Self> {
        let n = self_coeffs.len();
        if n == 0 {
            return Err(Error::InvalidSpec("dynamics model needs at least one node".into()));
        }
        if coupling.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: coupling.len(),
            });
        }
        let finite_self = self_coeffs.iter().flatten().all(|v| v.is_finite());
        let finite_coupling = coupling.iter().flatten().all(|t| t.coeff.is_finite());
        if !finite_self || !finite_coupling {
            return Err(Error::InvalidSpec("dynamics coefficients must be finite".into()));
        }
        if coupling.iter().flatten().any(|t| t.p == 0 || t.q == 0) {
            return Err(Error::InvalidSpec("coupling exponents are 1-based (p, q >= 1)".into()));
        }
        let self_order = self_coeffs.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let self_coeffs = self_coeffs
            .into_iter()
            .map(|mut row| {
                row.resize(self_order, 0.0);
                row
            })
            .collect();
        let coupling_order = coupling
            .iter()
            .flatten()
            .map(CouplingTerm::collapsed_index)
            .max()
            .unwrap_or(1);
        Ok(Self {
            self_coeffs,
            coupling,
            self_order,
            coupling_order,
            clamp,
        })
    }

    /// Same polynomials at every node.
    pub fn uniform(
        n_nodes: usize,
        self_poly: &[f64],
        coupling: &[CouplingTerm],
        clamp: ClampMode,
    ) -> Result<Self> {
        Self::new(
            vec![self_poly.to_vec(); n_nodes],
            vec![coupling.to_vec(); n_nodes],
            clamp,
        )
    }

    pub fn n_nodes(&self) -> usize {
        self.self_coeffs.len()
    }

    /// `m`: number of self-dynamics coefficients.
    pub fn self_order(&self) -> usize {
        self.self_order
    }

    /// `n`: number of collapsed coupling coefficients.
    pub fn coupling_order(&self) -> usize {
        self.coupling_order
    }

    pub fn clamp(&self) -> ClampMode {
        self.clamp
    }

    pub fn with_clamp(mut self, clamp: ClampMode) -> Self {
        self.clamp = clamp;
        self
    }

    pub fn self_coeffs(&self) -> &[Vec<f64>] {
        &self.self_coeffs
    }

    pub fn coupling_terms(&self) -> &[Vec<CouplingTerm>] {
        &self.coupling
    }

    /// `C`: row `i` holds `c_{i,l} = sum_{p+q-1=l} d_{p,q}` for `l = 1..=n`
    /// (stored at index `l - 1`).
    pub fn collapsed_coupling(&self) -> Vec<Vec<f64>> {
        self.coupling
            .iter()
            .map(|terms| {
                let mut row = vec![0.0; self.coupling_order];
                for t in terms {
                    row[t.collapsed_index() - 1] += t.coeff;
                }
                row
            })
            .collect()
    }

    /// Column `k` (0-based power) of the self-coefficient table.
    pub fn self_column(&self, power: usize) -> Vec<f64> {
        self.self_coeffs.iter().map(|r| r[power]).collect()
    }

    pub fn eval_self(&self, node: usize, x: f64) -> f64 {
        horner(&self.self_coeffs[node], x)
    }

    pub fn eval_coupling(&self, node: usize, xi: f64, xj: f64) -> f64 {
        self.coupling[node]
            .iter()
            .map(|t| t.coeff * xi.powi(t.p as i32 - 1) * xj.powi(t.q as i32 - 1))
            .sum()
    }
}

/// Evaluates `sum_k c[k] x^k`.
#[inline]
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Discrete generalized Lotka-Volterra:
/// `x_i' = (1 + alpha_i) x_i + sum_j A_ij x_i x_j`.
pub fn make_glv(alpha: &[f64]) -> Result<DynamicsModel> {
    DynamicsModel::new(
        alpha.iter().map(|a| vec![0.0, 1.0 + a]).collect(),
        vec![vec![CouplingTerm::new(2, 2, 1.0)]; alpha.len()],
        ClampMode::Nonnegative,
    )
}

/// Discrete SIS: `x_i' = (1 - e_i) x_i + sum_j A_ij (1 - x_i) x_j`.
pub fn make_sis(recovery: &[f64]) -> Result<DynamicsModel> {
    DynamicsModel::new(
        recovery.iter().map(|e| vec![0.0, 1.0 - e]).collect(),
        vec![vec![CouplingTerm::new(1, 2, 1.0), CouplingTerm::new(2, 2, -1.0)]; recovery.len()],
        ClampMode::UnitInterval,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glv_coefficients() {
        let m = make_glv(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.self_column(1), vec![2.0; 3]);
        assert_eq!(m.self_column(0), vec![0.0; 3]);
        assert_eq!((m.self_order(), m.coupling_order()), (2, 3));
        assert_eq!(m.collapsed_coupling()[0], vec![0.0, 0.0, 1.0]);
        assert_eq!(m.clamp(), ClampMode::Nonnegative);
        let ident = make_glv(&[0.0]).unwrap();
        assert_eq!(ident.eval_self(0, 0.37), 0.37);
    }

    #[test]
    fn sis_coefficients() {
        let m = make_sis(&[1.0, 0.2]).unwrap();
        assert_eq!(m.eval_self(0, 0.8), 0.0);
        assert_eq!(m.collapsed_coupling()[1], vec![0.0, 1.0, -1.0]);
        assert!((m.eval_coupling(1, 0.25, 0.5) - 0.375).abs() < 1e-15);
        assert_eq!(m.clamp(), ClampMode::UnitInterval);
    }

    #[test]
    fn collapse_sums_terms_with_equal_index() {
        let terms = vec![
            CouplingTerm::new(1, 3, 0.5),
            CouplingTerm::new(2, 2, 0.25),
            CouplingTerm::new(3, 1, -2.0),
            CouplingTerm::new(1, 1, 4.0),
        ];
        let m = DynamicsModel::uniform(2, &[1.0], &terms, ClampMode::None).unwrap();
        assert_eq!(m.collapsed_coupling()[1], vec![4.0, 0.0, -1.25]);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(DynamicsModel::new(vec![], vec![], ClampMode::None).is_err());
        assert!(DynamicsModel::new(vec![vec![f64::NAN]], vec![vec![]], ClampMode::None).is_err());
        assert!(DynamicsModel::new(vec![vec![1.0]], vec![vec![], vec![]], ClampMode::None).is_err());
        let zero_exp = vec![vec![CouplingTerm::new(0, 1, 1.0)]];
        assert!(DynamicsModel::new(vec![vec![1.0]], zero_exp, ClampMode::None).is_err());
    }

    #[test]
    fn clamp_modes() {
        assert_eq!(ClampMode::None.apply(-0.5), -0.5);
        assert_eq!(ClampMode::Nonnegative.apply(-0.5), 0.0);
        assert_eq!(ClampMode::UnitInterval.apply(1.5), 1.0);
    }
}
