//! Cartesian parameter grids. Points run independently on the rayon pool;
//! rows come back in grid order so the CSV is deterministic.

use chronon_core::chronon::{Formulation, TransmissionMode};
use chronon_core::scenario::{integrate_scenario, summarize, ScenarioConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, SweepSection};
use crate::output::{to_csv, OutputSet, SCHEMA_VERSION};
use crate::{CliResult, Failure, ScenarioArgs};

const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Serialize)]
pub struct SweepRow {
    index: usize,
    tau0: f64,
    steps: usize,
    formulation: Formulation,
    transmission: TransmissionMode,
    mass: f64,
    charge: f64,
    omega: f64,
    stiffness: f64,
    onset_step: usize,
    /// `ok`, `invalid` (rejected before integration) or `failed`.
    status: &'static str,
    error: Option<String>,
    steps_completed: Option<usize>,
    termination: Option<&'static str>,
    max_residual: Option<f64>,
    max_pre_norm_drift: Option<f64>,
    max_post_norm_drift: Option<f64>,
    pre_pulse_response: Option<f64>,
    rotation_angle_per_step: Option<f64>,
    speed_ratio_per_step: Option<f64>,
    rapidity_per_step: Option<f64>,
    amplitude_drift: Option<f64>,
    final_u0: Option<f64>,
    final_u1: Option<f64>,
    final_u2: Option<f64>,
    final_u3: Option<f64>,
}

#[derive(Serialize)]
struct SweepReport {
    schema_version: u32,
    command: &'static str,
    base_config: ScenarioConfig,
    grid_points: usize,
    ok: usize,
    invalid: usize,
    failed: usize,
    manifest: Vec<String>,
}

fn expand<T: Clone>(grid: Vec<ScenarioConfig>, values: Option<Vec<T>>, set: impl Fn(&mut ScenarioConfig, T)) -> Vec<ScenarioConfig> {
    match values {
        None => grid,
        Some(values) => grid
            .into_iter()
            .flat_map(|c| {
                values.iter().map(|v| {
                    let mut c = c.clone();
                    set(&mut c, v.clone());
                    c
                }).collect::<Vec<_>>()
            })
            .collect(),
    }
}

fn non_empty<T>(name: &str, v: Option<Vec<T>>) -> CliResult<Option<Vec<T>>> {
    match v {
        Some(v) if v.is_empty() => Err(Failure::Usage(format!("sweep axis '{name}' is empty"))),
        v => Ok(v),
    }
}

/// Grid in a fixed axis order; the last axis varies fastest.
pub fn grid(base: &ScenarioConfig, sweep: &SweepSection) -> CliResult<Vec<ScenarioConfig>> {
    let axis = |name: &str, a: &Option<config::Axis>| a.as_ref().map(|a| a.values(name)).transpose();
    let mut g = vec![base.clone()];
    g = expand(g, axis("tau0", &sweep.tau0)?, |c, v| c.tau0 = v);
    g = expand(g, non_empty("steps", sweep.steps.clone())?, |c, v| c.steps = v);
    g = expand(g, axis("mass", &sweep.mass)?, |c, v| c.mass = v);
    g = expand(g, axis("charge", &sweep.charge)?, |c, v| c.charge = v);
    g = expand(g, axis("omega", &sweep.omega)?, |c, v| c.omega = v);
    g = expand(g, axis("stiffness", &sweep.stiffness)?, |c, v| c.stiffness = v);
    g = expand(g, non_empty("onset_step", sweep.onset_step.clone())?, |c, v| c.onset_step = v);
    g = expand(g, non_empty("formulation", sweep.formulation.clone())?, |c, v| c.formulation = v);
    g = expand(g, non_empty("transmission", sweep.transmission.clone())?, |c, v| c.transmission = v);
    if g.len() > MAX_GRID_POINTS {
        return Err(Failure::Usage(format!("sweep grid has {} points; the limit is {MAX_GRID_POINTS}", g.len())));
    }
    Ok(g)
}

pub fn run_point(index: usize, c: &ScenarioConfig) -> SweepRow {
    let mut row = SweepRow {
        index,
        tau0: c.tau0,
        steps: c.steps,
        formulation: c.formulation,
        transmission: c.transmission,
        mass: c.mass,
        charge: c.charge,
        omega: c.omega,
        stiffness: c.stiffness,
        onset_step: c.onset_step,
        status: "ok",
        error: None,
        steps_completed: None,
        termination: None,
        max_residual: None,
        max_pre_norm_drift: None,
        max_post_norm_drift: None,
        pre_pulse_response: None,
        rotation_angle_per_step: None,
        speed_ratio_per_step: None,
        rapidity_per_step: None,
        amplitude_drift: None,
        final_u0: None,
        final_u1: None,
        final_u2: None,
        final_u3: None,
    };
    if let Err(e) = c.validate() {
        row.status = "invalid";
        row.error = Some(e.to_string());
        return row;
    }
    let traj = match integrate_scenario(c) {
        Ok(t) => t,
        Err(e) => {
            row.status = "failed";
            row.error = Some(e.to_string());
            return row;
        }
    };
    let s = summarize(c, &traj);
    if !traj.is_complete() {
        row.status = "failed";
        row.error = traj.failure.clone();
    }
    row.steps_completed = Some(s.steps_completed);
    row.termination = Some(s.termination.as_str());
    row.max_residual = Some(s.max_residual);
    row.max_pre_norm_drift = Some(s.max_pre_norm_drift);
    row.max_post_norm_drift = Some(s.max_post_norm_drift);
    row.pre_pulse_response = s.pre_pulse_response;
    row.rotation_angle_per_step = s.rotation_angle_per_step;
    row.speed_ratio_per_step = s.speed_ratio_per_step;
    row.rapidity_per_step = s.rapidity_per_step;
    row.amplitude_drift = s.amplitude_drift;
    if let Some(u) = s.final_velocity {
        (row.final_u0, row.final_u1, row.final_u2, row.final_u3) = (Some(u[0]), Some(u[1]), Some(u[2]), Some(u[3]));
    }
    row
}

pub fn execute(args: &ScenarioArgs) -> CliResult<()> {
    let file = config::load(args)?;
    let points = grid(&file.scenario, &file.sweep.clone().unwrap_or_default())?;
    log::info!("sweeping {} grid points", points.len());
    let rows: Vec<SweepRow> = points.par_iter().enumerate().map(|(i, c)| run_point(i, c)).collect();
    let count = |status: &str| rows.iter().filter(|r| r.status == status).count();
    let (ok, invalid, failed) = (count("ok"), count("invalid"), count("failed"));
    for r in rows.iter().filter(|r| r.status != "ok") {
        log::warn!("grid point {} {}: {}", r.index, r.status, r.error.as_deref().unwrap_or(""));
    }

    let mut out = OutputSet::new(&file.out_dir(args));
    out.add("sweep.csv", to_csv(&rows)?);
    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        command: "sweep",
        base_config: file.scenario.clone(),
        grid_points: rows.len(),
        ok,
        invalid,
        failed,
        manifest: out.manifest_with("sweep_report.json"),
    };
    out.add_json("sweep_report.json", &report)?;
    out.commit()?;
    if ok == 0 {
        return Err(Failure::Numeric(format!("all {} grid points failed", rows.len())));
    }
    Ok(())
}
