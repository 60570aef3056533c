//! TOML config files. The top level is a flat [`ScenarioConfig`]; optional
//! `[output]`, `[sweep]` and `[compare]` tables sit beside it.

use std::fs;
use std::path::{Path, PathBuf};

use chronon_core::chronon::{Formulation, TransmissionMode};
use chronon_core::scenario::{ScenarioConfig, ScenarioKind};
use chronon_core::{UnitMode, Vec3};
use serde::Deserialize;

use crate::{CliResult, Failure, ScenarioArgs};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    /// File stem for trajectory outputs.
    pub stem: Option<String>,
}

/// One sweep axis: an explicit list or `{ start, stop, count }` (inclusive,
/// evenly spaced).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    pub fn values(&self, name: &str) -> CliResult<Vec<f64>> {
        let values = match self {
            Axis::List(v) => v.clone(),
            Axis::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        };
        if values.is_empty() {
            return Err(Failure::Usage(format!("sweep axis '{name}' is empty")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Failure::Usage(format!("sweep axis '{name}' has a non-finite value")));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub tau0: Option<Axis>,
    pub steps: Option<Vec<usize>>,
    pub mass: Option<Axis>,
    pub charge: Option<Axis>,
    pub omega: Option<Axis>,
    pub stiffness: Option<Axis>,
    pub onset_step: Option<Vec<usize>>,
    pub formulation: Option<Vec<Formulation>>,
    pub transmission: Option<Vec<TransmissionMode>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Initial acceleration for the free-particle ALD run.
    #[serde(default)]
    pub seed_acceleration: Vec3,
}

#[derive(Debug, Clone)]
pub struct FileConfig {
    pub scenario: ScenarioConfig,
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
    pub compare: CompareSection,
}

impl FileConfig {
    pub fn out_dir(&self, args: &ScenarioArgs) -> PathBuf {
        args.out.clone().or_else(|| self.output.directory.clone()).unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| "trajectory".into())
    }
}

fn section<T: for<'de> Deserialize<'de> + Default>(table: &mut toml::Table, key: &str, path: &Path) -> CliResult<Option<T>> {
    table
        .remove(key)
        .map(|v| v.try_into::<T>().map_err(|e| Failure::Usage(format!("{}: [{key}]: {e}", path.display()))))
        .transpose()
}

fn valid_scenarios() -> String {
    ScenarioKind::ALL.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", ")
}

/// Reads and parses `path`, then applies the command-line overrides. The
/// scenario itself is not validated here; callers validate before writing.
pub fn load(args: &ScenarioArgs) -> CliResult<FileConfig> {
    let path = &args.config;
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut table: toml::Table = text.parse().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let output = section::<OutputSection>(&mut table, "output", path)?.unwrap_or_default();
    let sweep = section::<SweepSection>(&mut table, "sweep", path)?;
    let compare = section::<CompareSection>(&mut table, "compare", path)?.unwrap_or_default();
    match table.get("scenario") {
        Some(toml::Value::String(name)) => {
            if name.parse::<ScenarioKind>().is_err() {
                return Err(Failure::Usage(format!("unknown scenario '{name}'; valid scenarios: {}", valid_scenarios())));
            }
        }
        Some(_) => return Err(Failure::Usage("scenario must be a string".into())),
        None => return Err(Failure::Usage(format!("missing scenario; valid scenarios: {}", valid_scenarios()))),
    }
    let mut scenario: ScenarioConfig =
        toml::Value::Table(table).try_into().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    apply_overrides(&mut scenario, args)?;
    Ok(FileConfig { scenario, output, sweep, compare })
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn apply_overrides(config: &mut ScenarioConfig, args: &ScenarioArgs) -> CliResult<()> {
    if let Some(f) = &args.formulation {
        config.formulation = f.parse().map_err(usage)?;
    }
    if let Some(t) = &args.transmission {
        config.transmission = t.parse().map_err(usage)?;
    }
    if let Some(u) = &args.units {
        config.units = u.parse::<UnitMode>().map_err(usage)?;
    }
    Ok(())
}

pub fn validate(config: &ScenarioConfig) -> CliResult<()> {
    config.validate().map_err(usage)
}
