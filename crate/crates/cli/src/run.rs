use chronon_core::kinematics::chronon_theta0;
use chronon_core::scenario::{integrate_scenario, summarize, ScenarioConfig, Termination, TrajectorySummary};
use chronon_core::{UnitMode, UnitSystem};
use serde::Serialize;

use crate::config::{self, FileConfig};
use crate::output::{trajectory_csv, OutputSet, TrajectoryJson, SCHEMA_VERSION};
use crate::{CliResult, Failure, ScenarioArgs};

/// The electron's chronon in the chosen unit system. Dynamics always run in
/// natural units; this is the only place `units` enters.
#[derive(Debug, Serialize)]
pub struct Constants {
    pub units: UnitMode,
    pub theta0: f64,
    pub tau0: f64,
}

pub fn constants(units: UnitMode) -> CliResult<Constants> {
    let theta0 = chronon_theta0(&UnitSystem::for_mode(units)).map_err(|e| Failure::Numeric(e.to_string()))?;
    Ok(Constants { units, theta0, tau0: 2.0 * theta0 })
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a ScenarioConfig,
    termination: Termination,
    failure: Option<&'a str>,
    summary: &'a TrajectorySummary,
    electron_constants: Constants,
    manifest: Vec<String>,
}

pub fn execute(args: &ScenarioArgs) -> CliResult<()> {
    let file = config::load(args)?;
    config::validate(&file.scenario)?;
    run(&file, args)
}

fn run(file: &FileConfig, args: &ScenarioArgs) -> CliResult<()> {
    let config = &file.scenario;
    log::info!("running {} ({}, {} steps)", config.scenario.as_str(), config.formulation.as_str(), config.steps);
    let traj = integrate_scenario(config).map_err(|e| Failure::Usage(e.to_string()))?;
    let summary = summarize(config, &traj);
    let stem = file.stem();
    let mut out = OutputSet::new(&file.out_dir(args));
    out.add(&format!("{stem}.csv"), trajectory_csv(&traj)?);
    out.add_json(&format!("{stem}.json"), &TrajectoryJson { schema_version: SCHEMA_VERSION, trajectory: &traj })?;
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        command: "run",
        config,
        termination: traj.termination,
        failure: traj.failure.as_deref(),
        summary: &summary,
        electron_constants: constants(config.units)?,
        manifest: out.manifest_with("report.json"),
    };
    out.add_json("report.json", &report)?;
    out.commit()?;
    match traj.termination {
        Termination::Completed => Ok(()),
        t => Err(Failure::Numeric(format!(
            "integration ended with {} after {} steps: {}",
            t.as_str(),
            summary.steps_completed,
            traj.failure.as_deref().unwrap_or("")
        ))),
    }
}
