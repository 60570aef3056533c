//! Same forcing through the retarded chronon lattice and the ALD reference.
//!
//! For a pulse the reference is the physical (non-runaway) Abraham–Lorentz
//! solution, obtained by integrating backward from the asymptotic state. For
//! a free particle it is the relativistic ALD equation started with the
//! configured seed acceleration, which runs away.

use chronon_core::ald::{self, fit_exponential_rate, AldParams, AldState, ExponentialFit};
use chronon_core::scenario::{integrate_scenario, summarize, ScenarioConfig, ScenarioKind, TrajectorySummary};
use chronon_core::{FieldSpec, FourVector, Vec3};
use serde::Serialize;

use crate::config::{self, CompareSection};
use crate::output::{to_csv, trajectory_csv, OutputSet, SCHEMA_VERSION};
use crate::{CliResult, Failure, ScenarioArgs};

/// Window before onset, in units of theta0, used for the pre-acceleration fit.
const PULSE_FIT_WINDOW: f64 = 8.0;
/// Runaway fit uses states with `|a| theta0` below this, where the growth is
/// still linear.
const RUNAWAY_FIT_LIMIT: f64 = 1e-3;

#[derive(Serialize)]
struct AldRow {
    n: usize,
    tau: f64,
    x0: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    u0: f64,
    u1: f64,
    u2: f64,
    u3: f64,
    a0: f64,
    a1: f64,
    a2: f64,
    a3: f64,
}

impl AldRow {
    fn new(n: usize, tau: f64, x: FourVector, u: FourVector, a: FourVector) -> Self {
        AldRow { n, tau, x0: x[0], x1: x[1], x2: x[2], x3: x[3], u0: u[0], u1: u[1], u2: u[2], u3: u[3], a0: a[0], a1: a[1], a2: a[2], a3: a[3] }
    }
}

#[derive(Serialize)]
struct FitReport {
    rate: f64,
    e_folding_time: f64,
    /// `rate * theta0`; 1 for the analytic solution.
    rate_times_theta0: f64,
    max_log_residual: f64,
    samples: usize,
}

impl FitReport {
    fn new(fit: ExponentialFit, theta0: f64, samples: usize) -> Self {
        FitReport {
            rate: fit.rate,
            e_folding_time: fit.e_folding_time(),
            rate_times_theta0: fit.rate * theta0,
            max_log_residual: fit.max_log_residual,
            samples,
        }
    }
}

#[derive(Serialize)]
struct AldSummary {
    equation: &'static str,
    theta0: f64,
    step: f64,
    termination: ald::Termination,
    states: usize,
    /// Largest `|v(t) - v(t_start)|` before the onset (pulse only).
    pre_pulse_response: Option<f64>,
    /// Largest `|a|` before the onset (pulse only).
    pre_pulse_acceleration: Option<f64>,
    fit: Option<FitReport>,
    fit_note: Option<String>,
}

#[derive(Serialize)]
struct ComparisonReport<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a ScenarioConfig,
    chronon: &'a TrajectorySummary,
    ald: AldSummary,
    manifest: Vec<String>,
}

pub fn execute(args: &ScenarioArgs) -> CliResult<()> {
    let file = config::load(args)?;
    let config = &file.scenario;
    config::validate(config)?;
    let theta0 = config.tau0 / 2.0;
    let params = AldParams::new(config.mass, config.charge, theta0).map_err(|e| Failure::Usage(e.to_string()))?;
    let (rows, ald_summary) = match config.scenario {
        ScenarioKind::EmPulse => pulse_reference(config, &params)?,
        ScenarioKind::Free => runaway_reference(config, &file.compare, &params)?,
        other => {
            return Err(Failure::Usage(format!("compare needs an em_pulse or free scenario, not {}", other.as_str())));
        }
    };
    let traj = integrate_scenario(config).map_err(|e| Failure::Usage(e.to_string()))?;
    let summary = summarize(config, &traj);

    let mut out = OutputSet::new(&file.out_dir(args));
    out.add("chronon.csv", trajectory_csv(&traj)?);
    out.add("ald.csv", to_csv(rows)?);
    let report = ComparisonReport {
        schema_version: SCHEMA_VERSION,
        command: "compare",
        config,
        chronon: &summary,
        ald: ald_summary,
        manifest: out.manifest_with("comparison.json"),
    };
    out.add_json("comparison.json", &report)?;
    out.commit()?;
    if traj.is_complete() {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("chronon integration ended with {}", traj.termination.as_str())))
    }
}

fn numeric(e: chronon_core::Error) -> Failure {
    Failure::Numeric(e.to_string())
}

/// Solves `[c0 c1 c2] x = rhs` by Cramer's rule.
fn solve3(cols: [Vec3; 3], rhs: Vec3) -> Option<Vec3> {
    let det = cols[0].dot(&cols[1].cross(&cols[2]));
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    Some(Vec3::new(
        rhs.dot(&cols[1].cross(&cols[2])) / det,
        cols[0].dot(&rhs.cross(&cols[2])) / det,
        cols[0].dot(&cols[1].cross(&rhs)) / det,
    ))
}

fn pulse_reference(config: &ScenarioConfig, params: &AldParams) -> CliResult<(Vec<AldRow>, AldSummary)> {
    let onset = config.onset_step as f64 * config.tau0;
    let after = (config.steps.saturating_sub(config.onset_step)) as f64 * config.tau0;
    if config.onset_step == 0 || after <= 0.0 {
        return Err(Failure::Usage("compare needs 0 < onset_step < steps".into()));
    }
    let field = config.field();
    let step = params.default_step();
    let solve = |vf: Vec3| ald::al_physical_pulse(params, &field, onset, onset, after, step, vf).map_err(numeric);
    // The physical branch is fixed by its final velocity, and the equation is
    // linear, so the start velocity is affine in it: match config.velocity.
    let start_of = |vf: Vec3| -> CliResult<Vec3> { Ok(solve(vf)?.states[0].v) };
    let base = start_of(Vec3::ZERO)?;
    let axes = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)];
    let mut cols = [Vec3::ZERO; 3];
    for (c, e) in cols.iter_mut().zip(axes) {
        *c = start_of(e)? - base;
    }
    let vf = solve3(cols, config.velocity - base).ok_or_else(|| Failure::Numeric("singular velocity map for the ALD pulse".into()))?;
    let traj = solve(vf)?;
    let shift = config.position - traj.states[0].r;
    let rows = traj
        .states
        .iter()
        .enumerate()
        .map(|(n, s)| AldRow::new(n, s.t, FourVector::from_parts(s.t, s.r + shift), FourVector::from_parts(1.0, s.v), FourVector::from_parts(0.0, s.a)))
        .collect();

    let v_start = traj.states[0].v;
    let before: Vec<_> = traj.states.iter().filter(|s| s.t < onset).collect();
    let response = before.iter().map(|s| (s.v - v_start).norm()).fold(0.0, f64::max);
    let peak = before.iter().map(|s| s.a.norm()).fold(0.0, f64::max);
    let window: Vec<_> = traj.states.iter().filter(|s| s.t <= onset && s.t >= onset - PULSE_FIT_WINDOW * params.theta0).collect();
    let (fit, fit_note) = if window.iter().any(|s| s.a.norm() == 0.0) {
        (None, Some("acceleration vanishes before onset; nothing to fit".to_string()))
    } else {
        let times: Vec<f64> = window.iter().map(|s| s.t).collect();
        let values: Vec<f64> = window.iter().map(|s| s.a.norm()).collect();
        match fit_exponential_rate(&times, &values) {
            Ok(f) => (Some(FitReport::new(f, params.theta0, times.len())), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let summary = AldSummary {
        equation: "abraham_lorentz_physical_branch",
        theta0: params.theta0,
        step,
        termination: traj.termination,
        states: traj.states.len(),
        pre_pulse_response: Some(response),
        pre_pulse_acceleration: Some(peak),
        fit,
        fit_note,
    };
    Ok((rows, summary))
}

fn runaway_reference(config: &ScenarioConfig, compare: &CompareSection, params: &AldParams) -> CliResult<(Vec<AldRow>, AldSummary)> {
    let u = FourVector::from_velocity(config.velocity).map_err(|e| Failure::Usage(e.to_string()))?;
    let seed = compare.seed_acceleration;
    // time component fixed by u·a = 0
    let a = FourVector::from_parts(u.spatial().dot(&seed) / u[0], seed);
    let init = AldState { s: 0.0, x: FourVector::from_parts(0.0, config.position), u, a };
    let step = params.default_step();
    let traj = ald::integrate_ald(&init, &FieldSpec::zero(), params, config.steps as f64 * config.tau0, step).map_err(numeric)?;
    let rows = traj.states.iter().enumerate().map(|(n, s)| AldRow::new(n, s.s, s.x, s.u, s.a)).collect();
    let linear: Vec<_> = traj
        .states
        .iter()
        .take_while(|s| s.a.spatial().norm() * params.theta0 < RUNAWAY_FIT_LIMIT)
        .collect();
    let (fit, fit_note) = if seed == Vec3::ZERO {
        (None, Some("no seed acceleration; the free solution stays inertial".to_string()))
    } else {
        let times: Vec<f64> = linear.iter().map(|s| s.s).collect();
        let values: Vec<f64> = linear.iter().map(|s| s.a.spatial().norm()).collect();
        match fit_exponential_rate(&times, &values) {
            Ok(f) => (Some(FitReport::new(f, params.theta0, times.len())), None),
            Err(e) => (None, Some(format!("{e} (seed too large for a linear-regime fit?)"))),
        }
    };
    let summary = AldSummary {
        equation: "abraham_lorentz_dirac",
        theta0: params.theta0,
        step,
        termination: traj.termination,
        states: traj.states.len(),
        pre_pulse_response: None,
        pre_pulse_acceleration: None,
        fit,
        fit_note,
    };
    Ok((rows, summary))
}
