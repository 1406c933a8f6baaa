//! `netcollapse`: build systems, run them, reduce them and sweep plans.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use netcollapse::dynamics::{simulate, InitialRegime, SteadyStateRecord};
use netcollapse::experiments::{
    any_diverged, build_systems, emit, predict_plan, predictions_to_csv, run_plan, summarize,
    summary_to_csv, ExperimentPlan, GeneratedSystem, OutputFormat,
};
use netcollapse::reduction::{build_effective_with, collapse_error, fixed_points};
use netcollapse::network::MeanField;
use netcollapse::seeded_rng;

#[derive(Parser)]
#[command(name = "netcollapse", version, about = "Collapse networked dynamics onto an effective map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the network and dynamics of one sweep cell to a system file.
    Generate {
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate a system file to its steady state.
    Simulate {
        /// System file written by `generate`.
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = Regime::Low)]
        regime: Regime,
        /// Seed of the initial state.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Effective map, fixed points and (given a steady state) collapse error.
    Reduce {
        system: PathBuf,
        /// Steady-state record written by `simulate`.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full plan and write the row table plus a per-value summary.
    Sweep {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Exit with status 1 when any row diverged.
        #[arg(long)]
        strict: bool,
    },
    /// Theory predictions for every sweep value, without simulating.
    Predict {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct PlanArgs {
    /// Plan file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Replaces the plan's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip empirical networks with at least this many species.
    #[arg(long)]
    size_cap: Option<usize>,
    /// Multiplier on the SIS edge weight.
    #[arg(long)]
    sis_weight: Option<f64>,
}

impl PlanArgs {
    fn load(&self) -> Result<ExperimentPlan, netcollapse::Error> {
        let mut plan = ExperimentPlan::from_toml_file(&self.config)?;
        if let Some(seed) = self.seed {
            plan.base_seed = seed;
        }
        if let Some(cap) = self.size_cap {
            plan.size_cap = Some(cap);
        }
        if let Some(w) = self.sis_weight {
            plan.fixed.insert("sis_weight".into(), w);
        }
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Args)]
struct CellArgs {
    /// Index into the sweep values.
    #[arg(long, default_value_t = 0)]
    value_index: usize,
    #[arg(long, default_value_t = 0)]
    replica: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Low,
    High,
}

impl From<Regime> for InitialRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Low => InitialRegime::Low,
            Regime::High => InitialRegime::High,
        }
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn write_out(out: Option<&Path>, text: &str) -> AnyResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> AnyResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

/// `a.csv` -> `a.summary.csv`.
fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn run(cli: Cli) -> AnyResult<ExitCode> {
    match cli.command {
        Command::Generate { plan, cell, out } => {
            let plan = plan.load()?;
            let systems = build_systems(&plan, cell.value_index, cell.replica)?;
            // one system per file; several networks become a JSON array
            let text = match systems.as_slice() {
                [one] => serde_json::to_string_pretty(one)?,
                many => serde_json::to_string_pretty(many)?,
            };
            write_out(out.as_deref(), &(text + "\n"))?;
        }
        Command::Simulate { system, regime, seed, out } => {
            let sys: GeneratedSystem = read_json(&system)?;
            let x0 = InitialRegime::from(regime).sample(sys.matrix.n_nodes(), &mut seeded_rng(seed));
            let rec = simulate(&sys.matrix, &sys.model, &x0, &Default::default())?;
            info!("{} after {} steps, x_eff = {}", rec.status.as_str(), rec.steps, rec.x_eff);
            write_out(out.as_deref(), &(serde_json::to_string_pretty(&rec)? + "\n"))?;
        }
        Command::Reduce { system, state, out } => {
            let sys: GeneratedSystem = read_json(&system)?;
            let eff = build_effective_with(&MeanField::new_or_uniform(&sys.matrix), &sys.matrix, &sys.model)?;
            let roots = fixed_points(&eff)?;
            let error = match state {
                Some(path) => {
                    let rec: SteadyStateRecord = read_json(&path)?;
                    Some(collapse_error(&rec, &eff)?)
                }
                None => None,
            };
            let report = serde_json::json!({
                "a_eff": eff.a_eff,
                "d": eff.d,
                "fixed_points": roots.roots,
                "collapse_error": error,
            });
            write_out(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
        }
        Command::Sweep { plan, out, format, strict } => {
            let plan = plan.load()?;
            let rows = run_plan(&plan)?;
            info!("{} rows", rows.len());
            let summary = summary_to_csv(&summarize(&rows))?;
            match &out {
                Some(path) => {
                    emit(&rows, path, format.into(), Some(&plan))?;
                    write_out(Some(&summary_path(path)), &summary)?;
                }
                None => {
                    let text = match format {
                        Format::Csv => netcollapse::experiments::to_csv(&rows)?,
                        Format::Json => netcollapse::experiments::to_json(&rows, Some(&plan))?,
                    };
                    write_out(None, &text)?;
                }
            }
            if strict && any_diverged(&rows) {
                eprintln!("some rows diverged");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Predict { plan, out, format } => {
            let plan = plan.load()?;
            let rows = predict_plan(&plan)?;
            let text = match format {
                Format::Csv => predictions_to_csv(&rows)?,
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            write_out(out.as_deref(), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
