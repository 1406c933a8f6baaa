use std::path::{Path, PathBuf};

use log::{info, warn};

use super::plan::{derive_seed, ExperimentPlan, GraphFamily, Point, Scenario, Stream};
use serde::{Deserialize, Serialize};

use super::table::{PredictionRow, ResultRow};
use crate::dynamics::{
    make_glv, make_sis, sample_normal, sample_recovery, simulate, DynamicsModel, InitialRegime,
    RunStatus, SimulationSettings,
};
use crate::error::{Error, Result};
use crate::network::{
    build_mutualistic, generate_random_matrix, matrix_stats, read_incidence, BipartiteSpec,
    GraphSpec, Incidence, InteractionMatrix, Marginal, MeanField, ParseOptions, RandomMatrixSpec,
};
use crate::reduction::{build_effective_with, collapse_error};
use crate::seeded_rng;
use crate::theory::{
    glv_effective_params, glv_error_prediction, glv_x_eff_prediction, sis_threshold, Branch,
    GlvEnsemble, SisPhase,
};

/// Env var capping the sweep worker pool.
pub const THREADS_ENV: &str = "NETCOLLAPSE_THREADS";

/// Defaults of the random GLV community.
pub mod glv_defaults {
    pub const MU_ALPHA: f64 = 1.0;
    pub const MU_X: f64 = -0.04;
    pub const MU_D: f64 = 1.0;
    pub const C: f64 = 0.5;
    pub const S: usize = 50;
    pub const RHO: f64 = 0.0;
    pub const MU_GAMMA: f64 = 0.4;
}

/// Defaults of the SIS graph study.
pub mod sis_defaults {
    pub const N: usize = 100;
    pub const ER_P: f64 = 0.1;
    pub const BA_M: usize = 3;
    pub const SW_K: usize = 6;
    pub const SW_REWIRE: f64 = 0.1;
    pub const MU_E: f64 = 0.5;
    pub const SIS_WEIGHT: f64 = 1.0;
}

/// Predicted columns of a row.
#[derive(Debug, Clone, Copy)]
struct Prediction {
    d2: f64,
    d3: f64,
    x_eff: f64,
    err: f64,
}

impl Prediction {
    fn row(&self, scenario: &str, value: f64) -> PredictionRow {
        PredictionRow {
            scenario: scenario.to_string(),
            value,
            pred_d2: self.d2,
            pred_d3: self.d3,
            pred_xeff: self.x_eff,
            pred_err: self.err,
        }
    }

    const MISSING: Prediction = Prediction {
        d2: f64::NAN,
        d3: f64::NAN,
        x_eff: f64::NAN,
        err: f64::NAN,
    };
}

/// Theory columns for a GLV community: the non-zero branch when it is the
/// stable one, otherwise the (exact) zero branch.
fn glv_prediction(ens: &GlvEnsemble) -> Prediction {
    let branch = if ens.mu_alpha > 0.0 { Branch::Nonzero } else { Branch::Zero };
    let run = || -> Result<Prediction> {
        let (d2, d3) = glv_effective_params(ens)?;
        let x_eff = glv_x_eff_prediction(ens, branch)?;
        let err = match branch {
            Branch::Nonzero => glv_error_prediction(ens, Branch::Nonzero)?,
            Branch::Zero => 0.0,
        };
        Ok(Prediction { d2, d3, x_eff, err })
    };
    run().unwrap_or(Prediction::MISSING)
}

/// One system shared by every initial regime of a replica.
struct Instance {
    matrix: InteractionMatrix,
    model: DynamicsModel,
    prediction: Prediction,
}

/// Where a row came from, for labelling and seeding.
#[derive(Debug, Clone, Copy)]
struct Cell {
    network: usize,
    value_index: usize,
    replica: usize,
}

type SortKey = (usize, usize, usize, InitialRegime);

fn run_instance(
    plan: &ExperimentPlan,
    label: &str,
    cell: Cell,
    instance: Result<Instance>,
) -> Vec<(SortKey, ResultRow)> {
    let value = plan.sweep.values[cell.value_index];
    plan.initial_condition
        .regimes()
        .iter()
        .map(|&regime| {
            let seed = derive_seed(
                plan.base_seed,
                plan.scenario,
                cell.network,
                cell.value_index,
                cell.replica,
                Stream::Initial(regime),
            );
            let mut row = ResultRow::failed(label, value, cell.replica, regime, seed);
            match &instance {
                Ok(inst) => {
                    if let Err(e) = fill_row(&mut row, inst, regime, seed, &plan.simulation) {
                        warn!("{label} value={value} replica={}: {e}", cell.replica);
                    }
                }
                Err(e) => warn!("{label} value={value} replica={}: {e}", cell.replica),
            }
            ((cell.network, cell.value_index, cell.replica, regime), row)
        })
        .collect()
}

fn fill_row(
    row: &mut ResultRow,
    inst: &Instance,
    regime: InitialRegime,
    seed: u64,
    settings: &SimulationSettings,
) -> Result<()> {
    let n = inst.matrix.n_nodes();
    let x0 = regime.sample(n, &mut seeded_rng(seed));
    let mut rec = simulate(&inst.matrix, &inst.model, &x0, settings)?;
    row.status = rec.status;
    row.steps = rec.steps;
    row.x_eff = rec.x_eff;
    row.mean_state = rec.mean_state;
    row.pred_d2 = inst.prediction.d2;
    row.pred_d3 = inst.prediction.d3;
    row.pred_xeff = inst.prediction.x_eff;
    row.pred_err = inst.prediction.err;

    let mf = MeanField::new_or_uniform(&inst.matrix);
    let sys = build_effective_with(&mf, &inst.matrix, &inst.model)?;
    rec.d = sys.d.clone();
    row.d = sys.d.clone();
    row.err = collapse_error(&rec, &sys)?.err;
    Ok(())
}

fn glv_random_instance(plan: &ExperimentPlan, pt: Point<'_>, cell: Cell) -> Result<Instance> {
    use glv_defaults as g;
    let size = pt.count("S", g::S)?;
    let mu_alpha = pt.or("mu_alpha", g::MU_ALPHA);
    let sigma_alpha = pt.sigma("sigma_alpha", mu_alpha);
    let mu_x = pt.or("mu_X", g::MU_X);
    let sigma_x = pt.sigma("sigma_X", mu_x);
    let mu_d = pt.or("mu_D", g::MU_D);
    let sigma_d = pt.sigma("sigma_D", mu_d);
    let rho = pt.or("rho", g::RHO);
    let connectivity = pt.or("C", g::C);

    let seed = |s| derive_seed(plan.base_seed, plan.scenario, 0, cell.value_index, cell.replica, s);
    let matrix = generate_random_matrix(&RandomMatrixSpec {
        size,
        mu_x,
        sigma_x,
        rho,
        connectivity,
        mu_d,
        sigma_d,
        marginal: Marginal::Normal,
        seed: seed(Stream::Network),
    })?;
    let alpha = sample_normal(size, mu_alpha, sigma_alpha, &mut seeded_rng(seed(Stream::Parameters)));
    let ens = GlvEnsemble::from_connectivity(
        size, mu_alpha, sigma_alpha, mu_x, sigma_x, rho, connectivity, mu_d, sigma_d,
    );
    Ok(Instance {
        matrix,
        model: make_glv(&alpha)?,
        prediction: glv_prediction(&ens),
    })
}

fn glv_empirical_instance(
    plan: &ExperimentPlan,
    pt: Point<'_>,
    cell: Cell,
    incidence: &Incidence,
) -> Result<Instance> {
    use glv_defaults as g;
    let mu_alpha = pt.or("mu_alpha", g::MU_ALPHA);
    let sigma_alpha = pt.sigma("sigma_alpha", mu_alpha);
    let mu_gamma = pt.or("mu_gamma", g::MU_GAMMA);
    let sigma_gamma = pt.sigma("sigma_gamma", mu_gamma);

    let seed = |s| {
        derive_seed(plan.base_seed, plan.scenario, cell.network, cell.value_index, cell.replica, s)
    };
    let net = build_mutualistic(
        &BipartiteSpec::new(incidence.clone(), mu_gamma, seed(Stream::Network))
            .with_sigma_gamma(sigma_gamma),
    )?;
    let size = net.matrix.n_nodes();
    let alpha = sample_normal(size, mu_alpha, sigma_alpha, &mut seeded_rng(seed(Stream::Parameters)));
    let prediction = match matrix_stats(&net.matrix) {
        Ok(st) => glv_prediction(&GlvEnsemble::from_stats(&st, mu_alpha, sigma_alpha)),
        Err(_) => Prediction::MISSING,
    };
    Ok(Instance {
        matrix: net.matrix,
        model: make_glv(&alpha)?,
        prediction,
    })
}

/// Graph family and its spec at a sweep point, plus the same family at the
/// fixed (unswept) parameters, which sets the transmission scale.
fn sis_graphs(plan: &ExperimentPlan, pt: Point<'_>) -> Result<(GraphSpec, GraphSpec)> {
    use sis_defaults as s;
    let family = match plan.sweep.parameter.as_str() {
        "er_p" => GraphFamily::Er,
        "ba_m" => GraphFamily::Ba,
        "sw_rewire" => GraphFamily::Sw,
        _ => plan.graph,
    };
    let fixed_count = |key: &str, default: usize| -> Result<usize> {
        let v = pt.unswept(key, default as f64);
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::Config(format!("{key} must be a non-negative integer, got {v}")))
        }
    };
    Ok(match family {
        GraphFamily::Er => (
            GraphSpec::ErdosRenyi { p: pt.or("er_p", s::ER_P) },
            GraphSpec::ErdosRenyi { p: pt.unswept("er_p", s::ER_P) },
        ),
        GraphFamily::Ba => (
            GraphSpec::BarabasiAlbert { m: pt.count("ba_m", s::BA_M)? },
            GraphSpec::BarabasiAlbert { m: fixed_count("ba_m", s::BA_M)? },
        ),
        GraphFamily::Sw => {
            let k = pt.count("sw_k", s::SW_K)?;
            (
                GraphSpec::WattsStrogatz { k, p: pt.or("sw_rewire", s::SW_REWIRE) },
                GraphSpec::WattsStrogatz { k, p: pt.unswept("sw_rewire", s::SW_REWIRE) },
            )
        }
    })
}

/// Edge weight `sis_weight * mu_e / <k>` evaluated at the fixed parameters,
/// so sweeping connectivity or recovery moves the system across threshold.
pub fn sis_edge_weight(sis_weight: f64, fixed_mu_e: f64, reference: &GraphSpec, n: usize) -> Result<f64> {
    let k = reference.nominal_mean_degree(n);
    if !(k > 0.0) {
        return Err(Error::Config(
            "reference graph has no edges; set a positive fixed connectivity".into(),
        ));
    }
    Ok(sis_weight * fixed_mu_e / k)
}

fn sis_instance(plan: &ExperimentPlan, pt: Point<'_>, cell: Cell) -> Result<Instance> {
    use sis_defaults as s;
    let n = pt.count("n", s::N)?;
    let mu_e = pt.or("mu_e", s::MU_E);
    let (graph, reference) = sis_graphs(plan, pt)?;
    let weight = sis_edge_weight(
        pt.or("sis_weight", s::SIS_WEIGHT),
        pt.unswept("mu_e", s::MU_E),
        &reference,
        n,
    )?;

    let seed = |st| derive_seed(plan.base_seed, plan.scenario, 0, cell.value_index, cell.replica, st);
    let matrix = graph.generate(n, seed(Stream::Network))?.scaled(weight)?;
    let e = sample_recovery(n, mu_e, &mut seeded_rng(seed(Stream::Parameters)));
    let model = make_sis(&e)?;

    let mf = MeanField::new_or_uniform(&matrix);
    let a_eff = mf.apply(&matrix.in_degrees());
    let e_eff = mf.apply(&e);
    let (d2, d3) = (1.0 - e_eff + a_eff, -a_eff);
    let x_eff = match sis_threshold(e_eff, a_eff) {
        SisPhase::Active => 1.0 - e_eff / a_eff,
        SisPhase::Extinct => 0.0,
    };
    Ok(Instance {
        matrix,
        model,
        prediction: Prediction { d2, d3, x_eff, err: f64::NAN },
    })
}

/// Runs `job` over `items` on the sweep worker pool.
fn parallel_map<T, R, F>(items: Vec<T>, job: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&t| t > 0);
        let run = || items.into_par_iter().map(&job).collect::<Vec<R>>();
        match threads.map(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build()) {
            Some(Ok(pool)) => pool.install(run),
            _ => run(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(job).collect()
    }
}

fn cells(plan: &ExperimentPlan, network: usize) -> Vec<Cell> {
    (0..plan.sweep.values.len())
        .flat_map(|value_index| {
            (0..plan.replicas).map(move |replica| Cell {
                network,
                value_index,
                replica,
            })
        })
        .collect()
}

fn finish(mut keyed: Vec<(SortKey, ResultRow)>) -> Vec<ResultRow> {
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, r)| r).collect()
}

fn expect_scenario(plan: &ExperimentPlan, scenario: Scenario) -> Result<()> {
    plan.validate()?;
    if plan.scenario != scenario {
        return Err(Error::Config(format!(
            "plan is for {}, not {}",
            plan.scenario.as_str(),
            scenario.as_str()
        )));
    }
    Ok(())
}

/// Random GLV communities; one row per (value, replica, regime).
pub fn run_glv_random(plan: &ExperimentPlan) -> Result<Vec<ResultRow>> {
    expect_scenario(plan, Scenario::GlvRandom)?;
    let label = plan.scenario.as_str();
    let keyed = parallel_map(cells(plan, 0), |cell| {
        let inst = glv_random_instance(plan, plan.point(cell.value_index), cell);
        run_instance(plan, label, cell, inst)
    });
    Ok(finish(keyed.into_iter().flatten().collect()))
}

/// Incidence files under `dir`, sorted by name; unreadable ones are logged
/// and skipped.
pub fn load_networks(dir: &Path, size_cap: Option<usize>) -> Result<Vec<(String, Incidence)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match read_incidence(&path, ParseOptions { size_cap }) {
            Ok(inc) => out.push((name, inc)),
            Err(e @ Error::SizeCapExceeded { .. }) => info!("skipping {}: {e}", path.display()),
            Err(e) => warn!("skipping {}: {e}", path.display()),
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    Ok(out)
}

/// GLV on mutualistic networks built from every incidence file in
/// `incidence_dir`. The scenario column reads `glv_empirical/<file stem>`.
pub fn run_glv_empirical(plan: &ExperimentPlan, incidence_dir: &Path) -> Result<Vec<ResultRow>> {
    expect_scenario(plan, Scenario::GlvEmpirical)?;
    let networks = load_networks(incidence_dir, plan.size_cap)?;
    let labels: Vec<String> = networks
        .iter()
        .map(|(name, _)| format!("{}/{name}", plan.scenario.as_str()))
        .collect();
    let all: Vec<Cell> = (0..networks.len()).flat_map(|k| cells(plan, k)).collect();
    let keyed = parallel_map(all, |cell| {
        let inc = &networks[cell.network].1;
        let inst = glv_empirical_instance(plan, plan.point(cell.value_index), cell, inc);
        run_instance(plan, &labels[cell.network], cell, inst)
    });
    Ok(finish(keyed.into_iter().flatten().collect()))
}

/// SIS contagion on ER, BA or WS graphs.
pub fn run_sis(plan: &ExperimentPlan) -> Result<Vec<ResultRow>> {
    expect_scenario(plan, Scenario::SisGraph)?;
    let label = plan.scenario.as_str();
    let keyed = parallel_map(cells(plan, 0), |cell| {
        let inst = sis_instance(plan, plan.point(cell.value_index), cell);
        run_instance(plan, label, cell, inst)
    });
    Ok(finish(keyed.into_iter().flatten().collect()))
}

/// Dispatches on the plan's scenario.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<ResultRow>> {
    match plan.scenario {
        Scenario::GlvRandom => run_glv_random(plan),
        Scenario::SisGraph => run_sis(plan),
        Scenario::GlvEmpirical => {
            let dir = plan
                .network_source
                .as_deref()
                .ok_or_else(|| Error::Config("glv_empirical needs network_source".into()))?;
            run_glv_empirical(plan, dir)
        }
    }
}

/// Network and dynamics of one replica at one sweep value, built exactly as
/// a sweep would build them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratedSystem {
    pub label: String,
    pub value: f64,
    pub replica: usize,
    pub matrix: InteractionMatrix,
    pub model: DynamicsModel,
    pub prediction: PredictionRow,
}

impl GeneratedSystem {
    /// Seed of the initial state for `regime`, as used by the sweep.
    pub fn initial_seed(&self, plan: &ExperimentPlan, network: usize, value_index: usize, regime: InitialRegime) -> u64 {
        derive_seed(plan.base_seed, plan.scenario, network, value_index, self.replica, Stream::Initial(regime))
    }
}

/// One [`GeneratedSystem`] per network (several only for `glv_empirical`).
pub fn build_systems(plan: &ExperimentPlan, value_index: usize, replica: usize) -> Result<Vec<GeneratedSystem>> {
    plan.validate()?;
    if value_index >= plan.sweep.values.len() {
        return Err(Error::Config(format!(
            "value index {value_index} out of range for {} sweep values",
            plan.sweep.values.len()
        )));
    }
    let value = plan.sweep.values[value_index];
    let pt = plan.point(value_index);
    let wrap = |label: String, inst: Instance| GeneratedSystem {
        prediction: inst.prediction.row(&label, value),
        label,
        value,
        replica,
        matrix: inst.matrix,
        model: inst.model,
    };
    let cell = |network| Cell { network, value_index, replica };
    let label = plan.scenario.as_str().to_string();
    Ok(match plan.scenario {
        Scenario::GlvRandom => vec![wrap(label, glv_random_instance(plan, pt, cell(0))?)],
        Scenario::SisGraph => vec![wrap(label, sis_instance(plan, pt, cell(0))?)],
        Scenario::GlvEmpirical => {
            let dir = plan
                .network_source
                .as_deref()
                .ok_or_else(|| Error::Config("glv_empirical needs network_source".into()))?;
            let mut out = Vec::new();
            for (k, (name, inc)) in load_networks(dir, plan.size_cap)?.iter().enumerate() {
                let inst = glv_empirical_instance(plan, pt, cell(k), inc)?;
                out.push(wrap(format!("{label}/{name}"), inst));
            }
            out
        }
    })
}

/// Theory columns for every sweep value without simulating. Random GLV
/// predictions depend only on the ensemble moments; the others use the
/// realised network of replica 0.
pub fn predict_plan(plan: &ExperimentPlan) -> Result<Vec<PredictionRow>> {
    let mut out = Vec::new();
    for k in 0..plan.sweep.values.len() {
        out.extend(build_systems(plan, k, 0)?.into_iter().map(|s| s.prediction));
    }
    Ok(out)
}

/// True when any row diverged.
pub fn any_diverged(rows: &[ResultRow]) -> bool {
    rows.iter().any(|r| r.status == RunStatus::Diverged)
}
