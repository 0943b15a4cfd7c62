//! Experiment configuration: one TOML file plus `--set key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::grid::{GridSpec, PGrid};
use crate::experiments::sweep::{NetworkDescriptor, StrategySpec, SweepSettings};
use crate::experiments::utility::{CostModel, UtilityParams};
use crate::generators::GeneratorSpec;
use crate::graph::{dominant_component, Graph};
use crate::io::edgelist::ingest_edge_list;
use crate::rng::{derive, tag};

pub const CONFIG_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "CASCADE_LAB_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum NetworkSource {
    Generator(GeneratorSpec),
    EdgeList {
        path: PathBuf,
        #[serde(default = "default_true")]
        dominant_component: bool,
    },
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthSection {
    #[serde(default = "default_threshold")]
    pub threshold_fraction: f64,
}

fn default_threshold() -> f64 {
    0.01
}

impl Default for WidthSection {
    fn default() -> Self {
        WidthSection { threshold_fraction: default_threshold() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessSection {
    pub masses: Vec<usize>,
    pub trials_per_eval: usize,
}

impl Default for RobustnessSection {
    fn default() -> Self {
        RobustnessSection { masses: vec![25, 50, 100], trials_per_eval: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub config_version: u32,
    pub rng_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub k: usize,
    pub trials: usize,
    /// Independent network instances (generator sources only).
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    pub network: NetworkSource,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub strategies: Vec<StrategySpec>,
    #[serde(default = "default_utility")]
    pub utility: UtilityParams,
    #[serde(default)]
    pub width: WidthSection,
    #[serde(default)]
    pub robustness: RobustnessSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_instances() -> usize {
    1
}

fn default_utility() -> UtilityParams {
    UtilityParams::with_cost_ratio(1e-3)
}

impl ExperimentConfig {
    /// Reads `path`, applies `overrides` (`dotted.key=value`), and validates.
    pub fn load(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        let mut cfg = ExperimentConfig::from_toml(&text, overrides)?;
        if let NetworkSource::EdgeList { path: edges, .. } = &mut cfg.network {
            if edges.is_relative() {
                if let Some(dir) = path.parent() {
                    *edges = dir.join(&*edges);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without validating.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<ExperimentConfig> {
        let mut value: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(vec![format!("malformed config: {e}")]))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        toml::Value::Table(value)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Every violated precondition, not only the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.config_version != CONFIG_VERSION {
            out.push(format!("config_version = {} is not supported (expected {CONFIG_VERSION})", self.config_version));
        }
        if self.k == 0 {
            out.push("k must be at least 1".into());
        }
        if self.trials == 0 {
            out.push("trials must be at least 1".into());
        }
        if self.instances == 0 {
            out.push("instances must be at least 1".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            out.push(format!("noise_sigma = {} must be finite and >= 0", self.noise_sigma));
        }
        match &self.network {
            NetworkSource::Generator(spec) => {
                out.extend(spec.violations().into_iter().map(|v| format!("network: {v}")));
                if self.k > spec.n {
                    out.push(format!("k = {} exceeds network size n = {}", self.k, spec.n));
                }
            }
            NetworkSource::EdgeList { path, .. } => {
                if !path.is_file() {
                    out.push(format!("network: edge list {} does not exist", path.display()));
                }
                if self.instances != 1 {
                    out.push("instances must be 1 for an edge-list network".into());
                }
            }
        }
        out.extend(grid_violations(&self.grid));
        for s in &self.strategies {
            match *s {
                StrategySpec::Random => {}
                StrategySpec::HillClimb { trials_per_eval } => {
                    if trials_per_eval == 0 {
                        out.push("hill_climb: trials_per_eval must be at least 1".into());
                    }
                }
                StrategySpec::Local { mass, trials_per_eval } => {
                    if mass == 0 {
                        out.push("local: mass must be at least 1".into());
                    }
                    if trials_per_eval == 0 {
                        out.push("local: trials_per_eval must be at least 1".into());
                    }
                }
            }
        }
        if let Err(Error::Parameter(msg)) = self.utility.validate() {
            out.extend(msg.split("; ").map(|m| format!("utility: {m}")));
        }
        if let CostModel::Constant { time } = self.utility.cost_model {
            if time <= 1.0 {
                out.push(format!("utility: constant hill-climbing time {time} must exceed 1"));
            }
        }
        let t = self.width.threshold_fraction;
        if !(0.0..=1.0).contains(&t) {
            out.push(format!("width.threshold_fraction = {t} must lie in [0, 1]"));
        }
        if self.robustness.masses.is_empty() || self.robustness.masses.contains(&0) {
            out.push("robustness.masses must be a non-empty list of values >= 1".into());
        }
        if self.robustness.trials_per_eval == 0 {
            out.push("robustness.trials_per_eval must be at least 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// Builds instance `index` of the configured network.
    pub fn build_network(&self, index: usize) -> Result<(Graph, NetworkDescriptor)> {
        match &self.network {
            NetworkSource::Generator(spec) => {
                let mut spec = spec.clone();
                if index > 0 {
                    spec.rng_seed = derive(spec.rng_seed, &[tag::INSTANCE, index as u64]);
                }
                let g = spec.generate()?;
                let d = NetworkDescriptor::for_graph(spec.family_name(), &g, Some(spec.rng_seed));
                Ok((g, d))
            }
            NetworkSource::EdgeList { path, dominant_component: dominant } => {
                let ingested = ingest_edge_list(path)?;
                let g = if *dominant { dominant_component(&ingested.graph)?.graph } else { ingested.graph };
                let d = NetworkDescriptor::for_graph("edge_list", &g, None);
                Ok((g, d))
            }
        }
    }

    pub fn sweep_settings(&self, instance: usize) -> SweepSettings {
        SweepSettings {
            k: self.k,
            trials: self.trials,
            strategies: self.strategies.clone(),
            noise_sigma: self.noise_sigma,
            rng_seed: derive(self.rng_seed, &[tag::INSTANCE, instance as u64]),
        }
    }

    pub fn resolve_grid(&self, g: &Graph) -> Result<PGrid> {
        self.grid.resolve(g)
    }
}

fn grid_violations(grid: &GridSpec) -> Vec<String> {
    let mut out = Vec::new();
    let step_ok = |s: f64| s > 0.0 && s <= 1.0;
    match grid {
        GridSpec::Uniform { step } => {
            if !step_ok(*step) {
                out.push(format!("grid.step = {step} must lie in (0, 1]"));
            }
        }
        GridSpec::Refined { coarse_step, fine_step, fine_lo, fine_hi } => {
            if !step_ok(*coarse_step) {
                out.push(format!("grid.coarse_step = {coarse_step} must lie in (0, 1]"));
            }
            if !(*fine_step > 0.0 && fine_step <= coarse_step) {
                out.push(format!("grid.fine_step = {fine_step} must be positive and <= coarse_step"));
            }
            if fine_lo > fine_hi {
                out.push(format!("grid fine band [{fine_lo}, {fine_hi}] is empty"));
            }
        }
        GridSpec::AroundCritical { coarse_step, fine_step, half_width } => {
            if !step_ok(*coarse_step) {
                out.push(format!("grid.coarse_step = {coarse_step} must lie in (0, 1]"));
            }
            if !(*fine_step > 0.0 && fine_step <= coarse_step) {
                out.push(format!("grid.fine_step = {fine_step} must be positive and <= coarse_step"));
            }
            if !(*half_width >= 0.0) {
                out.push(format!("grid.half_width = {half_width} must be >= 0"));
            }
        }
        GridSpec::Explicit { points } => {
            if let Err(e) = PGrid::explicit(points.clone()) {
                out.push(format!("grid: {e}"));
            }
        }
    }
    out
}

/// Applies `a.b.c=value`; the value is read as a TOML literal, or as a bare
/// string when it does not parse as one.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(vec![format!("override `{assignment}` is not key=value")]))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(vec![format!("override `{assignment}` has an empty key")]));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut cursor = table;
    for part in &path[..path.len() - 1] {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(vec![format!("override `{key}`: `{part}` is not a table")]))?;
    }
    cursor.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

/// Worker cap from `CASCADE_LAB_THREADS`; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(vec![format!("{THREADS_ENV} = `{s}` must be a positive integer")])),
        },
    }
}
