//! Scenario presets: the relativistic exact cases (free, pulse, hyperbolic)
//! and the non-relativistic approximate ones (time-dependent force, constant
//! magnetic field, elastic force), each run through the chosen formulation
//! and transmission law.
//!
//! All dynamical quantities are in natural units. Non-relativistic lattice
//! states are stored as 4-vectors `x = (t, r)`, `u = (1, v)` so that every
//! trajectory shares one layout.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chronon::{
    transmission_update, ChrononState, Formulation, Particle, StepDiagnostics, Stepper, TransmissionLaw,
    TransmissionMode, TransmissionWindow,
};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::kinematics::{ChrononParams, FourVector, UnitMode, Vec3};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Free,
    EmPulse,
    Hyperbolic,
    TimeDependentForce,
    #[serde(rename = "constant_B")]
    ConstantB,
    Elastic,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Free,
        ScenarioKind::EmPulse,
        ScenarioKind::Hyperbolic,
        ScenarioKind::TimeDependentForce,
        ScenarioKind::ConstantB,
        ScenarioKind::Elastic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Free => "free",
            ScenarioKind::EmPulse => "em_pulse",
            ScenarioKind::Hyperbolic => "hyperbolic",
            ScenarioKind::TimeDependentForce => "time_dependent_force",
            ScenarioKind::ConstantB => "constant_B",
            ScenarioKind::Elastic => "elastic",
        }
    }

    pub fn is_relativistic(&self) -> bool {
        matches!(self, ScenarioKind::Free | ScenarioKind::EmPulse | ScenarioKind::Hyperbolic)
    }
}

impl core::str::FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownTag { kind: "scenario", tag: s.into() })
    }
}

/// One fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default = "default_formulation")]
    pub formulation: Formulation,
    #[serde(default)]
    pub transmission: TransmissionMode,
    /// Unit system for reported physical constants. Dynamics always run in
    /// natural units.
    #[serde(default = "default_units")]
    pub units: UnitMode,
    pub tau0: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub charge: f64,
    #[serde(default)]
    pub electric: Vec3,
    #[serde(default)]
    pub magnetic: Vec3,
    /// Angular frequency of the time-dependent force.
    #[serde(default)]
    pub omega: f64,
    /// Lattice index at which the pulse switches on.
    #[serde(default)]
    pub onset_step: usize,
    #[serde(default)]
    pub stiffness: f64,
    #[serde(default)]
    pub position: Vec3,
    /// Initial 3-velocity.
    #[serde(default)]
    pub velocity: Vec3,
    /// Velocity at lattice index 1 for the symmetric two-step recurrence;
    /// bootstrapped with an advanced step when absent.
    #[serde(default)]
    pub second_velocity: Option<Vec3>,
}

fn default_formulation() -> Formulation {
    Formulation::Retarded
}

fn default_units() -> UnitMode {
    UnitMode::Natural
}

fn one() -> f64 {
    1.0
}

impl ScenarioConfig {
    /// Config with the given scenario and lattice, everything else at its
    /// default (unit particle at rest, no fields).
    pub fn new(scenario: ScenarioKind, tau0: f64, steps: usize) -> Self {
        ScenarioConfig {
            scenario,
            formulation: Formulation::Retarded,
            transmission: TransmissionMode::Literal,
            units: UnitMode::Natural,
            tau0,
            steps,
            mass: 1.0,
            charge: 1.0,
            electric: Vec3::ZERO,
            magnetic: Vec3::ZERO,
            omega: 0.0,
            onset_step: 0,
            stiffness: 0.0,
            position: Vec3::ZERO,
            velocity: Vec3::ZERO,
            second_velocity: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.tau0 > 0.0) || !self.tau0.is_finite() {
            return bad("tau0 must be positive and finite");
        }
        if self.steps == 0 {
            return bad("steps must be at least 1");
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return bad("mass must be positive and finite");
        }
        let finite = [self.charge, self.omega, self.stiffness].iter().all(|x| x.is_finite())
            && [self.electric, self.magnetic, self.position, self.velocity].iter().all(|v| v.is_finite())
            && self.second_velocity.map_or(true, |v| v.is_finite());
        if !finite {
            return bad("all numeric fields must be finite");
        }
        if self.scenario.is_relativistic() {
            for v in [Some(self.velocity), self.second_velocity].into_iter().flatten() {
                if !(v.norm() < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "relativistic scenario needs |velocity| < 1 (c = 1), got {}",
                        v.norm()
                    )));
                }
            }
        }
        if self.second_velocity.is_some() && self.formulation != Formulation::Symmetric {
            return bad("second_velocity only applies to the symmetric formulation");
        }
        match self.scenario {
            ScenarioKind::Free => {
                if self.electric != Vec3::ZERO || self.magnetic != Vec3::ZERO || self.stiffness != 0.0 {
                    return bad("free scenario takes no field");
                }
            }
            ScenarioKind::EmPulse => {
                if self.onset_step == 0 || self.onset_step > self.steps {
                    return bad("em_pulse needs 1 <= onset_step <= steps");
                }
            }
            ScenarioKind::Hyperbolic => {
                if self.electric == Vec3::ZERO {
                    return bad("hyperbolic scenario needs a nonzero electric field");
                }
                if self.magnetic != Vec3::ZERO {
                    return bad("hyperbolic scenario takes no magnetic field");
                }
            }
            ScenarioKind::TimeDependentForce => {
                if self.electric == Vec3::ZERO {
                    return bad("time_dependent_force needs a nonzero electric amplitude");
                }
            }
            ScenarioKind::ConstantB => {
                if self.magnetic == Vec3::ZERO {
                    return bad("constant_B needs a nonzero magnetic field");
                }
            }
            ScenarioKind::Elastic => {
                if !(self.stiffness > 0.0) {
                    return bad("elastic scenario needs a positive stiffness");
                }
            }
        }
        if self.stiffness != 0.0 && self.scenario != ScenarioKind::Elastic {
            return bad("stiffness only applies to the elastic scenario");
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ChrononParams> {
        ChrononParams::new(self.tau0)
    }

    pub fn particle(&self) -> Result<Particle> {
        Particle::new(self.mass, self.charge)
    }

    pub fn field(&self) -> FieldSpec {
        match self.scenario {
            ScenarioKind::Free => FieldSpec::zero(),
            ScenarioKind::EmPulse => {
                FieldSpec::pulse(self.onset_step as f64 * self.tau0, self.electric, self.magnetic).named("em_pulse")
            }
            ScenarioKind::Hyperbolic => FieldSpec::uniform(self.electric, Vec3::ZERO).named("hyperbolic"),
            ScenarioKind::TimeDependentForce => {
                FieldSpec::oscillating(self.omega, self.electric, self.magnetic).named("time_dependent_force")
            }
            ScenarioKind::ConstantB => FieldSpec::uniform(self.electric, self.magnetic).named("constant_B"),
            ScenarioKind::Elastic => FieldSpec {
                electric: self.electric,
                magnetic: self.magnetic,
                ..FieldSpec::elastic(self.stiffness)
            },
        }
    }

    pub fn stepper(&self) -> Result<Stepper> {
        Ok(Stepper::new(self.params()?, self.particle()?).with_transmission(self.transmission))
    }
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Overflow,
    SolverFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Overflow => "overflow",
            Termination::SolverFailure => "solver_failure",
        }
    }
}

/// Lattice trajectory with per-step diagnostics. `diagnostics[i]` belongs to
/// the step that produced `states[i]`; entry 0 is the initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub scenario: ScenarioKind,
    pub formulation: Formulation,
    pub transmission: TransmissionMode,
    pub tau0: f64,
    pub states: Vec<ChrononState>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub termination: Termination,
    pub failure: Option<String>,
}

impl Trajectory {
    fn new(config: &ScenarioConfig) -> Self {
        Trajectory {
            scenario: config.scenario,
            formulation: config.formulation,
            transmission: config.transmission,
            tau0: config.tau0,
            states: Vec::with_capacity(config.steps + 1),
            diagnostics: Vec::with_capacity(config.steps + 1),
            termination: Termination::Completed,
            failure: None,
        }
    }

    fn push(&mut self, state: ChrononState, diag: StepDiagnostics) {
        self.states.push(state);
        self.diagnostics.push(diag);
    }

    fn fail(&mut self, err: Error) {
        log::warn!("integration stopped after {} states: {err}", self.states.len());
        self.termination = Termination::SolverFailure;
        self.failure = Some(err.to_string());
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn last(&self) -> Option<&ChrononState> {
        self.states.last()
    }
}

/// Validates `config` and integrates it. Validation errors are returned as
/// `Err`; a stepper failure mid-run ends the trajectory early with
/// [`Termination::SolverFailure`].
pub fn integrate_scenario(config: &ScenarioConfig) -> Result<Trajectory> {
    config.validate()?;
    let stepper = config.stepper()?;
    let field = config.field();
    let mut traj = Trajectory::new(config);
    if config.scenario.is_relativistic() {
        run_relativistic(config, &stepper, &field, &mut traj)?;
    } else {
        run_nonrel(config, &stepper, &field, &mut traj);
    }
    Ok(traj)
}

fn initial_diagnostics(u: &FourVector) -> StepDiagnostics {
    let drift = math::abs(u.square() + 1.0);
    StepDiagnostics { iterations: 0, residual: 0.0, pre_norm_drift: drift, post_norm_drift: drift }
}

fn run_relativistic(config: &ScenarioConfig, stepper: &Stepper, field: &FieldSpec, traj: &mut Trajectory) -> Result<()> {
    let u0 = FourVector::from_velocity(config.velocity)?;
    let start = ChrononState::new(0, 0.0, FourVector::from_parts(0.0, config.position), u0);
    traj.push(start, initial_diagnostics(&u0));
    let tau0 = config.tau0;
    match config.formulation {
        Formulation::Retarded | Formulation::Advanced => {
            let mut state = start;
            for _ in 0..config.steps {
                let step = if config.formulation == Formulation::Retarded {
                    stepper.step_retarded(&state, field)
                } else {
                    stepper.step_advanced(&state, field)
                };
                match step {
                    Ok((next, diag)) => {
                        traj.push(next, diag);
                        state = next;
                    }
                    Err(e) => {
                        traj.fail(e);
                        break;
                    }
                }
            }
        }
        Formulation::Symmetric => {
            let second = match config.second_velocity {
                Some(v) => FourVector::from_velocity(v).map(|u| (u, initial_diagnostics(&u))),
                None => stepper.advanced_velocity(&u0, 0.0, field),
            };
            let (u1, d1) = match second {
                Ok(pair) => pair,
                Err(e) => {
                    traj.fail(e);
                    return Ok(());
                }
            };
            let x1 = start.x + u0 * tau0;
            let mut prev = start;
            let mut curr = ChrononState::new(1, tau0, x1, u1);
            traj.push(curr, d1);
            for _ in 1..config.steps {
                match stepper.step_symmetric(&prev, &curr, field) {
                    Ok((next, diag)) => {
                        traj.push(next, diag);
                        prev = curr;
                        curr = next;
                    }
                    Err(e) => {
                        traj.fail(e);
                        break;
                    }
                }
            }
        }
    }
    Ok(())
}

fn nonrel_state(n: i64, tau0: f64, r: Vec3, v: Vec3) -> ChrononState {
    let t = n as f64 * tau0;
    ChrononState::new(n, t, FourVector::from_parts(t, r), FourVector::from_parts(1.0, v))
}

/// Scaled residual of the non-relativistic update, `tau0/m` times the
/// imbalance of the difference equation.
fn nonrel_residual(stepper: &Stepper, lhs_dv: Vec3, v_force: Vec3, t: f64, field: &FieldSpec, force: Vec3, span: f64) -> f64 {
    let (e, b) = field.electric_magnetic(t);
    let q = stepper.particle.charge;
    let rhs = (e * q + v_force.cross(&b) * q + force) * (span / stepper.particle.mass);
    (lhs_dv - rhs).0.iter().fold(0.0, |m: f64, x| m.max(math::abs(*x)))
}

fn run_nonrel(config: &ScenarioConfig, stepper: &Stepper, field: &FieldSpec, traj: &mut Trajectory) {
    let tau0 = config.tau0;
    let (r0, v0) = (config.position, config.velocity);
    traj.push(nonrel_state(0, tau0, r0, v0), StepDiagnostics::default());
    let law = TransmissionLaw::for_formulation(config.formulation, config.transmission);
    let exact = |dv: Vec3, v: Vec3, t: f64, force: Vec3, span: f64| nonrel_residual(stepper, dv, v, t, field, force, span);
    match config.formulation {
        Formulation::Retarded | Formulation::Advanced => {
            let (mut r, mut v) = (r0, v0);
            for n in 0..config.steps {
                let t = n as f64 * tau0;
                let force = field.mechanical_force(r);
                let step = if config.formulation == Formulation::Retarded {
                    stepper.step_retarded_nonrel(v, t + tau0, field, force).map(|vn| (vn, exact(vn - v, vn, t + tau0, force, tau0)))
                } else {
                    stepper.step_advanced_nonrel(v, t, field, force).map(|vn| (vn, exact(vn - v, v, t, force, tau0)))
                };
                let (v_next, residual) = match step {
                    Ok(pair) => pair,
                    Err(e) => return traj.fail(e),
                };
                let window = TransmissionWindow { x_prev: None, x: r, u: v, u_next: Some(v_next) };
                let r_next = match transmission_update(law, tau0, &window) {
                    Ok(x) => x,
                    Err(e) => return traj.fail(e),
                };
                r = r_next;
                v = v_next;
                traj.push(nonrel_state(n as i64 + 1, tau0, r, v), StepDiagnostics { residual, ..Default::default() });
            }
        }
        Formulation::Symmetric => {
            let force0 = field.mechanical_force(r0);
            let v1 = match config.second_velocity {
                Some(v) => v,
                None => match stepper.step_advanced_nonrel(v0, 0.0, field, force0) {
                    Ok(v) => v,
                    Err(e) => return traj.fail(e),
                },
            };
            let r1 = r0 + v0 * tau0;
            traj.push(nonrel_state(1, tau0, r1, v1), StepDiagnostics::default());
            let (mut r_prev, mut r, mut v_prev, mut v) = (r0, r1, v0, v1);
            for n in 1..config.steps {
                let t = n as f64 * tau0;
                let force = field.mechanical_force(r);
                let v_next = match stepper.step_symmetric_nonrel(v_prev, v, t, field, force) {
                    Ok(x) => x,
                    Err(e) => return traj.fail(e),
                };
                let residual = exact(v_next - v_prev, v, t, force, 2.0 * tau0);
                let window = TransmissionWindow { x_prev: Some(r_prev), x: r, u: v, u_next: None };
                let r_next = match transmission_update(law, tau0, &window) {
                    Ok(x) => x,
                    Err(e) => return traj.fail(e),
                };
                r_prev = r;
                r = r_next;
                v_prev = v;
                v = v_next;
                traj.push(nonrel_state(n as i64 + 1, tau0, r, v), StepDiagnostics { residual, ..Default::default() });
            }
        }
    }
}

/// Scalar summaries of a trajectory; scenario-specific entries are `None`
/// where they do not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub scenario: ScenarioKind,
    pub formulation: Formulation,
    pub transmission: TransmissionMode,
    pub tau0: f64,
    pub steps_completed: usize,
    pub termination: Termination,
    pub max_residual: f64,
    pub max_pre_norm_drift: f64,
    pub max_post_norm_drift: f64,
    /// Newton iteration count -> number of steps.
    pub iteration_histogram: BTreeMap<u32, usize>,
    /// Largest `|u_n - u_0|` over lattice points before the pulse onset.
    pub pre_pulse_response: Option<f64>,
    /// Mean per-step rotation of the velocity about the magnetic field.
    pub rotation_angle_per_step: Option<f64>,
    /// Mean per-step factor of the speed transverse to the magnetic field.
    pub speed_ratio_per_step: Option<f64>,
    /// Mean per-step rapidity increment along the electric field.
    pub rapidity_per_step: Option<f64>,
    /// `sqrt(E_end / E_0) - 1` for the oscillator energy `k r²/2 + m v²/2`.
    pub amplitude_drift: Option<f64>,
    pub final_velocity: Option<FourVector>,
}

pub fn summarize(config: &ScenarioConfig, traj: &Trajectory) -> TrajectorySummary {
    let mut histogram = BTreeMap::new();
    let (mut max_res, mut max_pre, mut max_post) = (0.0f64, 0.0f64, 0.0f64);
    for d in traj.diagnostics.iter().skip(1) {
        *histogram.entry(d.iterations).or_insert(0) += 1;
        max_res = max_res.max(d.residual);
        max_pre = max_pre.max(d.pre_norm_drift);
        max_post = max_post.max(d.post_norm_drift);
    }
    let states = &traj.states;
    let mut summary = TrajectorySummary {
        scenario: traj.scenario,
        formulation: traj.formulation,
        transmission: traj.transmission,
        tau0: traj.tau0,
        steps_completed: states.len().saturating_sub(1),
        termination: traj.termination,
        max_residual: max_res,
        max_pre_norm_drift: max_pre,
        max_post_norm_drift: max_post,
        iteration_histogram: histogram,
        pre_pulse_response: None,
        rotation_angle_per_step: None,
        speed_ratio_per_step: None,
        rapidity_per_step: None,
        amplitude_drift: None,
        final_velocity: states.last().map(|s| s.u),
    };
    let Some(first) = states.first() else {
        return summary;
    };
    match config.scenario {
        ScenarioKind::EmPulse => {
            let response = states
                .iter()
                .take_while(|s| (s.n as usize) < config.onset_step)
                .map(|s| (s.u - first.u).max_abs())
                .fold(0.0, f64::max);
            summary.pre_pulse_response = Some(response);
        }
        ScenarioKind::ConstantB if states.len() > 1 => {
            let axis = config.magnetic * (1.0 / config.magnetic.norm());
            let transverse = |s: &ChrononState| {
                let v = s.u.spatial();
                v - axis * v.dot(&axis)
            };
            let (mut angle, mut log_ratio) = (0.0, 0.0);
            for pair in states.windows(2) {
                let (a, b) = (transverse(&pair[0]), transverse(&pair[1]));
                angle += math::atan2(a.cross(&b).dot(&axis), a.dot(&b));
                log_ratio += math::ln(b.norm() / a.norm());
            }
            let n = (states.len() - 1) as f64;
            summary.rotation_angle_per_step = Some(math::abs(angle / n));
            summary.speed_ratio_per_step = Some(math::exp(log_ratio / n));
        }
        ScenarioKind::Hyperbolic if states.len() > 1 => {
            let dir = config.electric * (1.0 / config.electric.norm());
            let rapidity = |s: &ChrononState| math::asinh(s.u.spatial().dot(&dir));
            let last = &states[states.len() - 1];
            summary.rapidity_per_step = Some((rapidity(last) - rapidity(first)) / (states.len() - 1) as f64);
        }
        ScenarioKind::Elastic => {
            let energy = |s: &ChrononState| {
                0.5 * config.stiffness * s.x.spatial().norm_sq() + 0.5 * config.mass * s.u.spatial().norm_sq()
            };
            let (e0, e1) = (energy(first), energy(&states[states.len() - 1]));
            if e0 > 0.0 {
                summary.amplitude_drift = Some(math::sqrt(e1 / e0) - 1.0);
            }
        }
        _ => {}
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_kinds() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.as_str().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!(matches!("warp".parse::<ScenarioKind>(), Err(Error::UnknownTag { .. })));
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = ScenarioConfig::new(ScenarioKind::Free, 0.1, 10);
        assert!(c.validate().is_ok());
        c.tau0 = 0.0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new(ScenarioKind::Free, 0.1, 10);
        c.velocity = Vec3::new(1.0, 0.0, 0.0);
        assert!(c.validate().is_err());
        let c = ScenarioConfig::new(ScenarioKind::ConstantB, 0.1, 10);
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new(ScenarioKind::EmPulse, 0.1, 10);
        c.onset_step = 11;
        assert!(integrate_scenario(&c).is_err());
    }

    #[test]
    fn free_run_is_flat() {
        let mut c = ScenarioConfig::new(ScenarioKind::Free, 0.1, 50);
        c.velocity = Vec3::new(0.3, 0.1, 0.0);
        let t = integrate_scenario(&c).unwrap();
        assert!(t.is_complete());
        assert_eq!(t.len(), 51);
        for (s, d) in t.states.iter().zip(&t.diagnostics) {
            assert_eq!(s.u, t.states[0].u);
            assert_eq!(d.iterations, 0);
        }
    }

    #[test]
    fn nonrel_time_dependent_force_sums_impulses() {
        let mut c = ScenarioConfig::new(ScenarioKind::TimeDependentForce, 0.05, 40);
        c.electric = Vec3::new(0.02, 0.0, 0.0);
        c.omega = 3.0;
        let t = integrate_scenario(&c).unwrap();
        let mut v = 0.0;
        for (k, s) in t.states.iter().enumerate().skip(1) {
            v += 0.02 * math::cos(3.0 * k as f64 * 0.05) * 0.05;
            assert!((s.u[1] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn summary_histogram_counts_steps() {
        let mut c = ScenarioConfig::new(ScenarioKind::Hyperbolic, 0.1, 20);
        c.electric = Vec3::new(0.5, 0.0, 0.0);
        let t = integrate_scenario(&c).unwrap();
        let s = summarize(&c, &t);
        assert_eq!(s.iteration_histogram.values().sum::<usize>(), 20);
        assert!((s.rapidity_per_step.unwrap() - math::asinh(0.05)).abs() < 1e-12);
    }
}
