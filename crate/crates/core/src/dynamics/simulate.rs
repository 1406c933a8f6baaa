use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{horner, ClampMode, DynamicsModel};
use crate::error::{Error, Result};
use crate::network::{InteractionMatrix, MeanField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationSettings {
    pub max_steps: usize,
    /// Sup-norm of the one-step change below which the run has converged.
    pub convergence_tol: f64,
    /// Sup-norm of the state above which the run has diverged.
    pub divergence_bound: f64,
    /// `None` uses the model's own clamp mode.
    pub clamp: Option<ClampMode>,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            max_steps: 100_000,
            convergence_tol: 1e-9,
            divergence_bound: 1e8,
            clamp: None,
        }
    }
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps < 1 || !(self.convergence_tol > 0.0) || !(self.divergence_bound > 1.0) {
            return Err(Error::InvalidSpec(
                "simulation needs max_steps >= 1, convergence_tol > 0, divergence_bound > 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    Diverged,
    MaxSteps,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::Diverged => "diverged",
            RunStatus::MaxSteps => "max_steps",
        }
    }
}

impl std::str::FromStr for RunStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(RunStatus::Converged),
            "diverged" => Ok(RunStatus::Diverged),
            "max_steps" => Ok(RunStatus::MaxSteps),
            other => Err(Error::InvalidSpec(format!("unknown run status {other:?}"))),
        }
    }
}

/// Final state of a simulation and its mean-field summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateRecord {
    pub x_star: Vec<f64>,
    pub x_eff: f64,
    /// Unweighted mean of `x_star`.
    pub mean_state: f64,
    pub steps: usize,
    pub status: RunStatus,
    /// Set when the trajectory settled on a 2-cycle.
    pub period_two: bool,
    /// Effective parameters `d_1..d_S`, filled in by the reduction.
    pub d: Vec<f64>,
}

/// Initial-condition regimes: low abundance/contagion `U(0, 0.1)` or high `U(0.9, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialRegime {
    Low,
    High,
}

impl InitialRegime {
    pub fn range(self) -> (f64, f64) {
        match self {
            InitialRegime::Low => (0.0, 0.1),
            InitialRegime::High => (0.9, 1.0),
        }
    }

    pub fn sample<R: Rng>(self, n: usize, rng: &mut R) -> Vec<f64> {
        let (lo, hi) = self.range();
        (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InitialRegime::Low => "low",
            InitialRegime::High => "high",
        }
    }
}

/// Reusable workspace for iterating one (matrix, model) pair.
pub struct Stepper<'a> {
    a: &'a InteractionMatrix,
    model: &'a DynamicsModel,
    clamp: ClampMode,
    /// Distinct neighbour exponents `q - 1` used by any coupling term.
    neighbour_powers: Vec<i32>,
    /// For every node, its terms as (own exponent, coefficient, slot in `neighbour_powers`).
    terms: Vec<Vec<(i32, f64, usize)>>,
    powered: Vec<f64>,
    fields: Vec<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    pub fn new(a: &'a InteractionMatrix, model: &'a DynamicsModel, clamp: ClampMode) -> Result<Self> {
        let n = a.n_nodes();
        if model.n_nodes() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: model.n_nodes(),
            });
        }
        let mut neighbour_powers: Vec<i32> = Vec::new();
        let terms = model
            .coupling_terms()
            .iter()
            .map(|node_terms| {
                node_terms
                    .iter()
                    .map(|t| {
                        let qp = t.q as i32 - 1;
                        let slot = match neighbour_powers.iter().position(|&v| v == qp) {
                            Some(s) => s,
                            None => {
                                neighbour_powers.push(qp);
                                neighbour_powers.len() - 1
                            }
                        };
                        (t.p as i32 - 1, t.coeff, slot)
                    })
                    .collect()
            })
            .collect();
        let fields = vec![vec![0.0; n]; neighbour_powers.len()];
        Ok(Self {
            a,
            model,
            clamp,
            neighbour_powers,
            terms,
            powered: vec![0.0; n],
            fields,
        })
    }

    /// Writes the next state into `out`.
    pub fn step(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for (slot, &pw) in self.neighbour_powers.iter().enumerate() {
            for (p, &v) in self.powered.iter_mut().zip(x) {
                *p = v.powi(pw);
            }
            self.a.mul_vec(&self.powered, &mut self.fields[slot]);
        }
        let coeffs = self.model.self_coeffs();
        for (i, o) in out.iter_mut().enumerate() {
            let xi = x[i];
            let mut v = horner(&coeffs[i], xi);
            for &(own, c, slot) in &self.terms[i] {
                v += c * xi.powi(own) * self.fields[slot][i];
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteState { node: i });
            }
            *o = self.clamp.apply(v);
        }
        Ok(())
    }
}

/// One application of the full map `x_i' = F_i(x_i) + sum_j A_ij G_i(x_i, x_j)`,
/// clamped per `clamp`.
pub fn step_full(
    a: &InteractionMatrix,
    model: &DynamicsModel,
    x: &[f64],
    clamp: ClampMode,
) -> Result<Vec<f64>> {
    if x.len() != a.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: a.n_nodes(),
            actual: x.len(),
        });
    }
    let mut out = vec![0.0; x.len()];
    Stepper::new(a, model, clamp)?.step(x, &mut out)?;
    Ok(out)
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

fn sup_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

/// Window over which the decay of a 2-cycle's amplitude is measured.
const CYCLE_WINDOW: usize = 64;

/// Iterates the full map from `x0` until convergence, divergence or
/// `max_steps`.
///
/// A trajectory whose two-step change is below tolerance while its one-step
/// change is not is flagged as a 2-cycle. Once its amplitude is decaying too
/// slowly to reach tolerance within the remaining budget, the run stops
/// early with [`RunStatus::MaxSteps`] (on a step of the same parity as
/// `max_steps`, so the reported state matches a full-length run).
pub fn simulate(
    a: &InteractionMatrix,
    model: &DynamicsModel,
    x0: &[f64],
    settings: &SimulationSettings,
) -> Result<SteadyStateRecord> {
    settings.validate()?;
    if x0.len() != a.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: a.n_nodes(),
            actual: x0.len(),
        });
    }
    let clamp = settings.clamp.unwrap_or(model.clamp());
    let mut stepper = Stepper::new(a, model, clamp)?;
    let tol = settings.convergence_tol;

    let mut prev2 = x0.to_vec();
    let mut prev = x0.to_vec();
    let mut next = vec![0.0; x0.len()];
    let mut status = RunStatus::MaxSteps;
    let mut steps = 0;
    let mut period_two = false;
    let mut amplitudes: Vec<f64> = Vec::new();

    while steps < settings.max_steps {
        if stepper.step(&prev, &mut next).is_err() {
            status = RunStatus::Diverged;
            break;
        }
        steps += 1;
        if sup_norm(&next) > settings.divergence_bound {
            std::mem::swap(&mut prev, &mut next);
            status = RunStatus::Diverged;
            break;
        }
        let change = sup_dist(&next, &prev);
        if change < tol {
            std::mem::swap(&mut prev, &mut next);
            status = RunStatus::Converged;
            break;
        }
        let cycling = steps >= 2 && sup_dist(&next, &prev2) < tol;
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut next);
        if cycling {
            period_two = true;
            amplitudes.push(change);
            let remaining = settings.max_steps - steps;
            if amplitudes.len() > CYCLE_WINDOW && remaining % 2 == 0 {
                let old = amplitudes[amplitudes.len() - 1 - CYCLE_WINDOW];
                let rate = (change / old).powf(1.0 / CYCLE_WINDOW as f64);
                let needed = if rate < 1.0 {
                    (tol / change).ln() / rate.ln()
                } else {
                    f64::INFINITY
                };
                if needed > remaining as f64 {
                    break;
                }
            }
        } else {
            amplitudes.clear();
        }
    }

    let x_eff = MeanField::new_or_uniform(a).apply(&prev);
    let mean_state = prev.iter().sum::<f64>() / prev.len() as f64;
    Ok(SteadyStateRecord {
        x_star: prev,
        x_eff,
        mean_state,
        steps,
        status,
        period_two,
        d: Vec::new(),
    })
}

/// Full trajectory of the mean-field state `L(x[t])` for `t = 0..=steps`.
pub fn mean_field_trajectory(
    a: &InteractionMatrix,
    model: &DynamicsModel,
    x0: &[f64],
    steps: usize,
    clamp: ClampMode,
) -> Result<Vec<f64>> {
    let mf = MeanField::new(a)?;
    let mut stepper = Stepper::new(a, model, clamp)?;
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(mf.apply(&x));
    for _ in 0..steps {
        stepper.step(&x, &mut next)?;
        std::mem::swap(&mut x, &mut next);
        out.push(mf.apply(&x));
    }
    Ok(out)
}

/// Interior GLV equilibrium `x* = -A^{-1} alpha`. Feasibility (`x* >= 0`)
/// is left to the caller.
pub fn glv_analytic_fixed_point(a: &InteractionMatrix, alpha: &[f64]) -> Result<Vec<f64>> {
    let n = a.n_nodes();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: alpha.len(),
        });
    }
    let lu = a.to_dmatrix().lu();
    let scale = a.entries().iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let u = lu.u();
    if scale == 0.0 || (0..n).any(|i| u[(i, i)].abs() <= 1e-13 * scale) {
        return Err(Error::SingularMatrix);
    }
    let rhs = DVector::from_iterator(n, alpha.iter().map(|v| -v));
    let x = lu.solve(&rhs).ok_or(Error::SingularMatrix)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(x.iter().copied().collect())
}
