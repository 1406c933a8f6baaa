use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialRegime, SimulationSettings};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    GlvRandom,
    GlvEmpirical,
    SisGraph,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::GlvRandom => "glv_random",
            Scenario::GlvEmpirical => "glv_empirical",
            Scenario::SisGraph => "sis_graph",
        }
    }

    /// Parameters that may be swept in this scenario.
    pub fn sweepable(self) -> &'static [&'static str] {
        match self {
            Scenario::GlvRandom => &["mu_alpha", "mu_X", "mu_D", "C", "S"],
            Scenario::GlvEmpirical => &["mu_alpha", "mu_gamma"],
            Scenario::SisGraph => &["er_p", "ba_m", "sw_rewire", "mu_e"],
        }
    }

    /// Every key accepted under `[fixed]`.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Scenario::GlvRandom => &[
                "mu_alpha", "sigma_alpha", "mu_X", "sigma_X", "rho", "mu_D", "sigma_D", "C", "S",
            ],
            Scenario::GlvEmpirical => &["mu_alpha", "sigma_alpha", "mu_gamma", "sigma_gamma"],
            Scenario::SisGraph => &[
                "n", "er_p", "ba_m", "sw_k", "sw_rewire", "mu_e", "sis_weight",
            ],
        }
    }

    fn id(self) -> u64 {
        match self {
            Scenario::GlvRandom => 1,
            Scenario::GlvEmpirical => 2,
            Scenario::SisGraph => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    Low,
    High,
    #[default]
    Both,
}

impl RegimeChoice {
    pub fn regimes(self) -> &'static [InitialRegime] {
        match self {
            RegimeChoice::Low => &[InitialRegime::Low],
            RegimeChoice::High => &[InitialRegime::High],
            RegimeChoice::Both => &[InitialRegime::Low, InitialRegime::High],
        }
    }
}

/// Graph family for SIS runs that do not sweep a family-specific parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFamily {
    #[default]
    Er,
    Ba,
    Sw,
}

fn default_replicas() -> usize {
    50
}

/// A declarative sweep, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    pub sweep: Sweep,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub initial_condition: RegimeChoice,
    #[serde(default)]
    pub base_seed: u64,
    /// Directory of incidence files (`glv_empirical` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network_source: Option<PathBuf>,
    /// Skip empirical networks with at least this many species.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cap: Option<usize>,
    /// Family for `sis_graph` when sweeping `mu_e`.
    #[serde(default)]
    pub graph: GraphFamily,
    #[serde(default)]
    pub simulation: SimulationSettings,
}

impl ExperimentPlan {
    pub fn new(scenario: Scenario, parameter: &str, values: Vec<f64>) -> Self {
        Self {
            scenario,
            sweep: Sweep {
                parameter: parameter.to_string(),
                values,
            },
            fixed: BTreeMap::new(),
            replicas: default_replicas(),
            initial_condition: RegimeChoice::Both,
            base_seed: 0,
            network_source: None,
            size_cap: None,
            graph: GraphFamily::Er,
            simulation: SimulationSettings::default(),
        }
    }

    pub fn with_fixed(mut self, key: &str, value: f64) -> Self {
        self.fixed.insert(key.to_string(), value);
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let plan: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    /// Reads a plan; a relative `network_source` is resolved against the
    /// file's directory.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut plan = Self::from_toml_str(&text)?;
        if let (Some(src), Some(dir)) = (&plan.network_source, path.parent()) {
            if src.is_relative() {
                plan.network_source = Some(dir.join(src));
            }
        }
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.replicas < 1 {
            return bad("replicas must be at least 1".into());
        }
        if self.sweep.values.is_empty() || self.sweep.values.iter().any(|v| !v.is_finite()) {
            return bad("sweep values must be finite and non-empty".into());
        }
        if !self.scenario.sweepable().contains(&self.sweep.parameter.as_str()) {
            return bad(format!(
                "{} cannot sweep {:?}; expected one of {:?}",
                self.scenario.as_str(),
                self.sweep.parameter,
                self.scenario.sweepable()
            ));
        }
        for key in self.fixed.keys() {
            if !self.scenario.parameters().contains(&key.as_str()) {
                return bad(format!("unknown parameter {key:?} for {}", self.scenario.as_str()));
            }
        }
        if let Some((k, v)) = self.fixed.iter().find(|(_, v)| !v.is_finite()) {
            return bad(format!("parameter {k} = {v} is not finite"));
        }
        if self.scenario == Scenario::GlvEmpirical && self.network_source.is_none() {
            return bad("glv_empirical needs network_source".into());
        }
        self.simulation
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Parameter values at sweep point `index`: fixed values, then the swept
    /// value on top.
    pub fn point(&self, index: usize) -> Point<'_> {
        Point {
            fixed: &self.fixed,
            swept: (&self.sweep.parameter, self.sweep.values[index]),
        }
    }
}

/// Parameter lookup for one sweep point.
#[derive(Debug, Clone, Copy)]
pub struct Point<'a> {
    fixed: &'a BTreeMap<String, f64>,
    swept: (&'a str, f64),
}

impl Point<'_> {
    pub fn get(&self, key: &str) -> Option<f64> {
        if self.swept.0 == key {
            Some(self.swept.1)
        } else {
            self.fixed.get(key).copied()
        }
    }

    pub fn or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    /// A standard deviation that defaults to a third of `|mean|`.
    pub fn sigma(&self, key: &str, mean: f64) -> f64 {
        self.get(key).unwrap_or((mean / 3.0).abs())
    }

    /// Value of `key` when it is not the one being swept.
    pub fn unswept(&self, key: &str, default: f64) -> f64 {
        self.fixed.get(key).copied().unwrap_or(default)
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            Some(v) => Err(Error::Config(format!("{key} must be a non-negative integer, got {v}"))),
        }
    }
}

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit mix of `base` and `words`.
pub fn mix_seed(base: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(base), |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Which random stream of a cell a seed feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Network,
    Parameters,
    Initial(InitialRegime),
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Network => 1,
            Stream::Parameters => 2,
            Stream::Initial(InitialRegime::Low) => 3,
            Stream::Initial(InitialRegime::High) => 4,
        }
    }
}

/// Seed for one stream of the cell `(scenario, network, value index, replica)`.
///
/// The network and parameter streams are shared by both initial regimes,
/// so the two regimes of a replica see the same system.
pub fn derive_seed(
    base: u64,
    scenario: Scenario,
    network: usize,
    value_index: usize,
    replica: usize,
    stream: Stream,
) -> u64 {
    mix_seed(
        base,
        &[
            scenario.id(),
            network as u64,
            value_index as u64,
            replica as u64,
            stream.tag(),
        ],
    )
}
