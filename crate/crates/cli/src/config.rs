//! Experiment files and built-in presets.

use std::collections::BTreeMap;
use std::path::Path;

use anc_core::presets::{paper_fxlms, paper_kalman};
use anc_core::SimConfig;
use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

/// JSON experiment file:
///
/// ```json
/// { "experiments": { "<name>": { ...SimConfig... } }, "compare": ["a", "b"] }
/// ```
///
/// Experiments run in name order. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default)]
    pub experiments: BTreeMap<String, SimConfig>,
    #[serde(default)]
    pub compare: Option<Vec<String>>,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ExperimentFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiments.is_empty() {
            bail!("no experiments");
        }
        for (name, cfg) in &self.experiments {
            cfg.validate()
                .with_context(|| format!("experiment `{name}`"))?;
        }
        if let Some(names) = &self.compare {
            for name in names {
                if !self.experiments.contains_key(name) {
                    bail!("compare list names unknown experiment `{name}`");
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Names to compare: the explicit list, or every experiment in order.
    pub fn comparison(&self) -> Vec<String> {
        self.compare
            .clone()
            .unwrap_or_else(|| self.experiments.keys().cloned().collect())
    }

    pub fn set_seed(&mut self, seed: u64) {
        for cfg in self.experiments.values_mut() {
            cfg.seed = seed;
        }
    }
}

pub const PRESET_NAMES: [&str; 3] = ["paper", "paper-fxlms", "paper-kalman"];

/// `paper` holds both controllers and compares them; the other two hold one
/// experiment each.
pub fn preset(name: &str) -> Result<ExperimentFile> {
    let mut experiments = BTreeMap::new();
    let compare = match name {
        "paper-fxlms" => {
            experiments.insert(name.to_string(), paper_fxlms());
            None
        }
        "paper-kalman" => {
            experiments.insert(name.to_string(), paper_kalman());
            None
        }
        "paper" => {
            experiments.insert("paper-fxlms".to_string(), paper_fxlms());
            experiments.insert("paper-kalman".to_string(), paper_kalman());
            Some(vec!["paper-fxlms".to_string(), "paper-kalman".to_string()])
        }
        other => {
            return Err(anyhow!(
                "unknown preset `{other}` (available: {})",
                PRESET_NAMES.join(", ")
            ))
        }
    };
    Ok(ExperimentFile {
        experiments,
        compare,
    })
}
