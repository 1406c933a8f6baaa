//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string, so the page only needs `JSON.parse`.

use netcollapse::dynamics::{
    make_glv, make_sis, mean_field_trajectory, sample_normal, sample_recovery, simulate,
    InitialRegime, SimulationSettings,
};
use netcollapse::network::{generate_er, generate_random_matrix, Marginal, MeanField, RandomMatrixSpec};
use netcollapse::reduction::{build_effective_with, collapse_error, fixed_points, EffectiveSystem};
use netcollapse::theory::{
    glv_effective_params, glv_error_prediction, glv_x_eff_prediction, sis_threshold, Branch,
    GlvEnsemble, SisPhase,
};
use netcollapse::experiments::mix_seed;
use netcollapse::seeded_rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Iterates are cut off once they leave this range, so the plot stays finite.
const ESCAPE: f64 = 1e6;

#[derive(Serialize)]
struct Root {
    x: f64,
    multiplier: f64,
    stable: bool,
}

#[derive(Serialize)]
struct MapReport {
    d: Vec<f64>,
    roots: Vec<Root>,
    orbit: Vec<f64>,
}

/// Fixed points of `x -> sum_s d_s x^(s-1)` and the orbit of `x0`.
pub fn explore(d: &[f64], x0: f64, steps: usize) -> Result<String, String> {
    if d.is_empty() || d.iter().any(|v| !v.is_finite()) || !x0.is_finite() {
        return Err("coefficients and x0 must be finite".into());
    }
    let sys = EffectiveSystem::from_parameters(d.to_vec());
    let roots = fixed_points(&sys)
        .map_err(|e| e.to_string())?
        .roots
        .into_iter()
        .map(|r| Root { x: r.x, multiplier: r.multiplier, stable: r.stable })
        .collect();
    let mut orbit = sys.iterate(x0, steps.min(10_000));
    if let Some(cut) = orbit.iter().position(|v| !(v.abs() < ESCAPE)) {
        orbit.truncate(cut);
    }
    to_json(&MapReport { d: d.to_vec(), roots, orbit })
}

#[derive(Serialize)]
struct GlvReport {
    d2: f64,
    d3: f64,
    pred_xeff: f64,
    pred_err: f64,
    status: &'static str,
    x_eff: f64,
    err: f64,
    sim_d: Vec<f64>,
    /// `L(x[t])` of the full system and the reduced-map orbit from the same start.
    full: Vec<f64>,
    reduced: Vec<f64>,
}

/// Closed-form prediction for a random community next to one simulated
/// instance. Spreads are a third of the corresponding means.
pub fn glv(size: usize, mu_alpha: f64, mu_x: f64, connectivity: f64, mu_d: f64, seed: u64) -> Result<String, String> {
    if !(2..=400).contains(&size) {
        return Err("size must be between 2 and 400".into());
    }
    let third = |m: f64| (m / 3.0).abs();
    let ens = GlvEnsemble::from_connectivity(
        size, mu_alpha, third(mu_alpha), mu_x, third(mu_x), 0.0, connectivity, mu_d, third(mu_d),
    );
    let (d2, d3) = glv_effective_params(&ens).map_err(|e| e.to_string())?;
    let branch = if mu_alpha > 0.0 { Branch::Nonzero } else { Branch::Zero };
    let pred_xeff = glv_x_eff_prediction(&ens, branch).map_err(|e| e.to_string())?;
    let pred_err = match branch {
        Branch::Nonzero => glv_error_prediction(&ens, branch).map_err(|e| e.to_string())?,
        Branch::Zero => 0.0,
    };

    let a = generate_random_matrix(&RandomMatrixSpec {
        size,
        mu_x,
        sigma_x: third(mu_x),
        rho: 0.0,
        connectivity,
        mu_d,
        sigma_d: third(mu_d),
        marginal: Marginal::Normal,
        seed: mix_seed(seed, &[0]),
    })
    .map_err(|e| e.to_string())?;
    let alpha = sample_normal(size, mu_alpha, third(mu_alpha), &mut seeded_rng(mix_seed(seed, &[1])));
    let model = make_glv(&alpha).map_err(|e| e.to_string())?;
    let x0 = InitialRegime::Low.sample(size, &mut seeded_rng(mix_seed(seed, &[2])));
    let (status, x_eff, err, sim_d, full, reduced) = run(&a, &model, &x0)?;
    to_json(&GlvReport { d2, d3, pred_xeff, pred_err, status, x_eff, err, sim_d, full, reduced })
}

#[derive(Serialize)]
struct SisReport {
    a_eff: f64,
    e_eff: f64,
    phase: &'static str,
    pred_xeff: f64,
    status: &'static str,
    x_eff: f64,
    err: f64,
    full: Vec<f64>,
    reduced: Vec<f64>,
}

/// SIS on an Erdos-Renyi graph with edge weight `weight` and recovery rates
/// uniform on `[0, 2 mu_e]`.
pub fn sis(n: usize, p: f64, mu_e: f64, weight: f64, seed: u64) -> Result<String, String> {
    if !(2..=400).contains(&n) {
        return Err("n must be between 2 and 400".into());
    }
    let a = generate_er(n, p, mix_seed(seed, &[0]))
        .and_then(|g| g.scaled(weight))
        .map_err(|e| e.to_string())?;
    let e = sample_recovery(n, mu_e, &mut seeded_rng(mix_seed(seed, &[1])));
    let model = make_sis(&e).map_err(|e| e.to_string())?;
    let mf = MeanField::new_or_uniform(&a);
    let (a_eff, e_eff) = (mf.apply(&a.in_degrees()), mf.apply(&e));
    let phase = sis_threshold(e_eff, a_eff);
    let pred_xeff = match phase {
        SisPhase::Active => 1.0 - e_eff / a_eff,
        SisPhase::Extinct => 0.0,
    };
    let x0 = InitialRegime::High.sample(n, &mut seeded_rng(mix_seed(seed, &[2])));
    let (status, x_eff, err, _, full, reduced) = run(&a, &model, &x0)?;
    to_json(&SisReport {
        a_eff,
        e_eff,
        phase: phase.as_str(),
        pred_xeff,
        status,
        x_eff,
        err,
        full,
        reduced,
    })
}

type RunSummary = (&'static str, f64, f64, Vec<f64>, Vec<f64>, Vec<f64>);

/// Steady state, collapse error and the first 100 steps of both descriptions.
fn run(
    a: &netcollapse::network::InteractionMatrix,
    model: &netcollapse::dynamics::DynamicsModel,
    x0: &[f64],
) -> Result<RunSummary, String> {
    let settings = SimulationSettings { max_steps: 20_000, ..Default::default() };
    let rec = simulate(a, model, x0, &settings).map_err(|e| e.to_string())?;
    let mf = MeanField::new_or_uniform(a);
    let sys = build_effective_with(&mf, a, model).map_err(|e| e.to_string())?;
    let err = collapse_error(&rec, &sys).map(|c| c.err).unwrap_or(f64::NAN);
    let full = mean_field_trajectory(a, model, x0, 100, model.clamp()).unwrap_or_default();
    let reduced = sys.iterate(mf.apply(x0), 100);
    Ok((rec.status.as_str(), rec.x_eff, err, sys.d, full, reduced))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn explore_map(d: Vec<f64>, x0: f64, steps: usize) -> Result<String, JsValue> {
    explore(&d, x0, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn glv_collapse(size: usize, mu_alpha: f64, mu_x: f64, connectivity: f64, mu_d: f64, seed: u32) -> Result<String, JsValue> {
    glv(size, mu_alpha, mu_x, connectivity, mu_d, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sis_phase(n: usize, p: f64, mu_e: f64, weight: f64, seed: u32) -> Result<String, JsValue> {
    sis(n, p, mu_e, weight, seed as u64).map_err(|e| JsValue::from_str(&e))
}
