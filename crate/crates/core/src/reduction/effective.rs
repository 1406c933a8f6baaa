use serde::{Deserialize, Serialize};

use crate::dynamics::{horner, DynamicsModel};
use crate::error::{Error, Result};
use crate::network::{InteractionMatrix, MeanField};

/// One-dimensional effective map `x' = sum_s d_s x^(s-1)` and the
/// mean-field quantities it was assembled from.
///
/// All vectors are power-indexed: `d[k]` multiplies `x^k`, i.e. `d[k]` is
/// `d_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSystem {
    pub a_eff: f64,
    pub b_eff: Vec<f64>,
    pub c_eff: Vec<f64>,
    pub d: Vec<f64>,
}

/// `d_s = B_s + A_eff C_s` where both exist, otherwise whichever one does.
pub fn assemble_effective_parameters(a_eff: f64, b_eff: &[f64], c_eff: &[f64]) -> Vec<f64> {
    let order = b_eff.len().max(c_eff.len());
    (0..order)
        .map(|k| {
            let b = b_eff.get(k).copied().unwrap_or(0.0);
            let c = c_eff.get(k).map_or(0.0, |c| a_eff * c);
            b + c
        })
        .collect()
}

impl EffectiveSystem {
    pub fn from_parts(a_eff: f64, b_eff: Vec<f64>, c_eff: Vec<f64>) -> Self {
        let d = assemble_effective_parameters(a_eff, &b_eff, &c_eff);
        Self { a_eff, b_eff, c_eff, d }
    }

    /// A bare map with the given parameters (no stored components).
    pub fn from_parameters(d: Vec<f64>) -> Self {
        Self {
            a_eff: 0.0,
            b_eff: d.clone(),
            c_eff: Vec::new(),
            d,
        }
    }

    /// `S = max(m, n)`.
    pub fn order(&self) -> usize {
        self.d.len()
    }

    /// `d_s` with 1-based `s`; zero beyond the order.
    pub fn param(&self, s: usize) -> f64 {
        assert!(s >= 1, "effective parameters are 1-based");
        self.d.get(s - 1).copied().unwrap_or(0.0)
    }

    pub fn step(&self, x: f64) -> f64 {
        horner(&self.d, x)
    }

    /// `x_0, x_1, ..., x_steps` under the effective map.
    pub fn iterate(&self, x0: f64, steps: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut x = x0;
        out.push(x);
        for _ in 0..steps {
            x = self.step(x);
            out.push(x);
        }
        out
    }

    /// Derivative of the map at `x`.
    pub fn slope(&self, x: f64) -> f64 {
        let deriv: Vec<f64> = self
            .d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        horner(&deriv, x)
    }
}

pub fn effective_step(sys: &EffectiveSystem, x: f64) -> f64 {
    sys.step(x)
}

/// Mean-field reduction of `(A, model)`:
/// `A_eff = L(s_in)`, `B_eff^k = L(B^k)`, `C_eff^l = L(C^l)`.
pub fn build_effective(a: &InteractionMatrix, model: &DynamicsModel) -> Result<EffectiveSystem> {
    build_effective_with(&MeanField::new(a)?, a, model)
}

/// [`build_effective`] with a caller-supplied mean-field operator.
pub fn build_effective_with(
    mf: &MeanField,
    a: &InteractionMatrix,
    model: &DynamicsModel,
) -> Result<EffectiveSystem> {
    if model.n_nodes() != a.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: a.n_nodes(),
            actual: model.n_nodes(),
        });
    }
    let a_eff = mf.apply(&a.in_degrees());
    let b_eff = (0..model.self_order())
        .map(|k| mf.apply(&model.self_column(k)))
        .collect();
    let collapsed = model.collapsed_coupling();
    let c_eff = (0..model.coupling_order())
        .map(|l| {
            let column: Vec<f64> = collapsed.iter().map(|row| row[l]).collect();
            mf.apply(&column)
        })
        .collect();
    Ok(EffectiveSystem::from_parts(a_eff, b_eff, c_eff))
}
