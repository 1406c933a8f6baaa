//! Seeded parameter sweeps over the three studies (random GLV communities,
//! GLV on empirical mutualistic networks, SIS on synthetic graphs) and the
//! result tables they produce.
//!
//! Plans are TOML:
//!
//! ```toml
//! scenario = "glv_random"      # or glv_empirical, sis_graph
//! replicas = 50
//! initial_condition = "both"   # low, high, both
//! base_seed = 7
//!
//! [sweep]
//! parameter = "S"
//! values = [25, 50, 100, 200]
//!
//! [fixed]                      # overrides of scenario defaults
//! mu_alpha = 1.0
//!
//! [simulation]                 # optional
//! max_steps = 100000
//! ```

mod plan;
mod runner;
mod table;

pub use plan::{
    derive_seed, mix_seed, ExperimentPlan, GraphFamily, Point, RegimeChoice, Scenario, Stream,
    Sweep,
};
pub use runner::{
    any_diverged, build_systems, glv_defaults, predict_plan, GeneratedSystem, load_networks, run_glv_empirical, run_glv_random, run_plan,
    run_sis, sis_defaults, sis_edge_weight, THREADS_ENV,
};
pub use table::{
    emit, from_csv, from_json, read_csv, summarize, summary_to_csv, to_csv, to_json,
    predictions_to_csv, OutputFormat, PredictionRow, ResultRow, SummaryRow,
};
