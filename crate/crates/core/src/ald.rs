//! Continuous Abraham–Lorentz–Dirac reference dynamics, natural units.
//!
//! Relativistic (proper time `s`):
//!
//! ```text
//! m du/ds = e F u + Gamma,   Gamma = m theta0 [u'' + u (u·u'')]
//! ```
//!
//! which, using `u·u'' = -a·a` for `a = du/ds`, gives the explicit third-order
//! system `u'' = (a - (e/m) F u)/theta0 + u (a·a)`.
//!
//! Non-relativistic (lab time `t`):
//!
//! ```text
//! m dv/dt - m theta0 d²v/dt² = e (E + v × B) + F_mech(r)
//! ```
//!
//! Lab time and proper time are identified for the comparisons: the
//! relativistic integrator evaluates fields at `s`, the non-relativistic one
//! at `t`. With the physical electron, `m theta0 = 2e²/3`.
//!
//! Both are integrated with fixed-step RK4. Runaway growth is the point of
//! interest, so overflow ends a trajectory with [`Termination::Overflow`]
//! rather than an error.

use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::kinematics::{FourVector, Vec3};
use crate::math;
use crate::ode::rk4_step;
pub use crate::scenario::Termination;

/// Magnitudes beyond this count as overflow.
const OVERFLOW_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AldParams {
    pub mass: f64,
    pub charge: f64,
    pub theta0: f64,
}

impl AldParams {
    pub fn new(mass: f64, charge: f64, theta0: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain("mass must be positive"));
        }
        if !(theta0 > 0.0) || !theta0.is_finite() || !charge.is_finite() {
            return Err(Error::Domain("theta0 must be positive and charge finite"));
        }
        Ok(AldParams { mass, charge, theta0 })
    }

    /// `theta0 = 2 e² / (3 m)` for a point charge.
    pub fn point_charge(mass: f64, charge: f64) -> Result<Self> {
        Self::new(mass, charge, 2.0 * charge * charge / (3.0 * mass))
    }

    /// Default RK4 step, `theta0 / 50`.
    pub fn default_step(&self) -> f64 {
        self.theta0 / 50.0
    }
}

/// `Gamma = m theta0 [u2 + u (u·u2)]`, the projector orthogonal to `u` applied
/// to `u2 = d²u/ds²`.
///
/// The projector is written as `g - u u/(u·u)`, which is the same thing on
/// the mass shell and stays exactly orthogonal to `u` when an integrator has
/// let `u·u` drift.
pub fn abraham_vector(params: &AldParams, u: &FourVector, u2: &FourVector) -> FourVector {
    (*u2 - *u * (u.dot(u2) / u.square())) * (params.mass * params.theta0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AldState {
    pub s: f64,
    pub x: FourVector,
    pub u: FourVector,
    /// `du/ds`.
    pub a: FourVector,
}

impl AldState {
    /// Checks `u·u = -1` and `u·a = 0` to `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !(self.x.is_finite() && self.u.is_finite() && self.a.is_finite()) {
            return Err(Error::NonFinite("ALD initial state"));
        }
        if math::abs(self.u.square() + 1.0) > tol {
            return Err(Error::Domain("ALD initial velocity must satisfy u·u = -1"));
        }
        if math::abs(self.u.dot(&self.a)) > tol * (1.0 + self.a.max_abs()) {
            return Err(Error::Domain("ALD initial acceleration must be orthogonal to u"));
        }
        Ok(())
    }

    fn pack(&self) -> Vec<f64> {
        self.x.0.iter().chain(self.u.0.iter()).chain(self.a.0.iter()).copied().collect()
    }

    fn unpack(s: f64, y: &[f64]) -> Self {
        let v = |i: usize| FourVector::new(y[i], y[i + 1], y[i + 2], y[i + 3]);
        AldState { s, x: v(0), u: v(4), a: v(8) }
    }

    fn overflowed(&self) -> bool {
        !self.u.is_finite() || !self.a.is_finite() || self.a.max_abs() > OVERFLOW_LIMIT || self.u.max_abs() > OVERFLOW_LIMIT
    }

    /// `d²u/ds²` from the equation of motion.
    pub fn jerk(&self, params: &AldParams, field: &FieldSpec) -> FourVector {
        ald_jerk(params, &field.tensor(self.s).apply(&self.u), &self.u, &self.a)
    }
}

fn ald_jerk(params: &AldParams, fu: &FourVector, u: &FourVector, a: &FourVector) -> FourVector {
    let drive = *fu * (params.charge / params.mass);
    (*a - drive) * (1.0 / params.theta0) + *u * a.square()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AldTrajectory {
    pub step: f64,
    pub states: Vec<AldState>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlState {
    pub t: f64,
    pub r: Vec3,
    pub v: Vec3,
    /// `dv/dt`.
    pub a: Vec3,
}

impl AlState {
    fn pack(&self) -> Vec<f64> {
        self.r.0.iter().chain(self.v.0.iter()).chain(self.a.0.iter()).copied().collect()
    }

    fn unpack(t: f64, y: &[f64]) -> Self {
        let v = |i: usize| Vec3::new(y[i], y[i + 1], y[i + 2]);
        AlState { t, r: v(0), v: v(3), a: v(6) }
    }

    fn overflowed(&self) -> bool {
        !self.v.is_finite() || !self.a.is_finite() || self.a.norm() > OVERFLOW_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlTrajectory {
    pub step: f64,
    /// Always in increasing time order.
    pub states: Vec<AlState>,
    pub termination: Termination,
}

impl AlTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

fn step_count(duration: f64, step: f64) -> Result<usize> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain("integration step must be positive"));
    }
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::Domain("duration must be non-negative"));
    }
    let n = duration / step;
    let rounded = math::round(n);
    if math::abs(n - rounded) > 1e-9 * n.max(1.0) {
        return Err(Error::Domain("duration must be a whole number of steps"));
    }
    Ok(rounded as usize)
}

fn run_ald(initial: &AldState, field: &FieldSpec, params: &AldParams, duration: f64, step: f64, sign: f64) -> Result<AldTrajectory> {
    initial.validate(1e-9)?;
    let n = step_count(duration, step)?;
    let h = sign * step;
    let mut rhs = |s: f64, y: &[f64], (lo, hi): (f64, f64)| -> Vec<f64> {
        let st = AldState::unpack(s, y);
        let (e, b) = field.electric_magnetic_in_step(s, lo, hi);
        let fu = crate::field::FieldTensor::from_electric_magnetic(e, b).apply(&st.u);
        let jerk = ald_jerk(params, &fu, &st.u, &st.a);
        st.u.0.iter().chain(st.a.0.iter()).chain(jerk.0.iter()).copied().collect()
    };
    let mut states = Vec::with_capacity(n + 1);
    states.push(*initial);
    let mut y = initial.pack();
    let mut termination = Termination::Completed;
    for k in 0..n {
        let s = initial.s + k as f64 * h;
        y = rk4_step(&mut rhs, s, &y, h);
        let st = AldState::unpack(initial.s + (k + 1) as f64 * h, &y);
        if st.overflowed() {
            log::info!("ALD trajectory overflowed at s = {}", st.s);
            termination = Termination::Overflow;
            break;
        }
        states.push(st);
    }
    if sign < 0.0 {
        states.reverse();
    }
    Ok(AldTrajectory { step, states, termination })
}

/// Integrates the relativistic ALD system forward over `duration` in proper
/// time with fixed RK4 steps.
pub fn integrate_ald(initial: &AldState, field: &FieldSpec, params: &AldParams, duration: f64, step: f64) -> Result<AldTrajectory> {
    run_ald(initial, field, params, duration, step, 1.0)
}

/// Integrates backward from `final_state` over `duration`; the returned
/// states are in increasing proper time.
pub fn integrate_ald_backward(final_state: &AldState, field: &FieldSpec, params: &AldParams, duration: f64, step: f64) -> Result<AldTrajectory> {
    run_ald(final_state, field, params, duration, step, -1.0)
}

/// External force `e (E + v × B) + F_mech(r)` at time `t` of the step `[lo, hi]`.
fn al_force(params: &AldParams, field: &FieldSpec, t: f64, lo: f64, hi: f64, r: Vec3, v: Vec3) -> Vec3 {
    let (e, b) = field.electric_magnetic_in_step(t, lo, hi);
    (e + v.cross(&b)) * params.charge + field.mechanical_force(r)
}

fn run_al(initial: &AlState, field: &FieldSpec, params: &AldParams, duration: f64, step: f64, sign: f64) -> Result<AlTrajectory> {
    if !(initial.r.is_finite() && initial.v.is_finite() && initial.a.is_finite()) {
        return Err(Error::NonFinite("Abraham–Lorentz initial state"));
    }
    let n = step_count(duration, step)?;
    let h = sign * step;
    let mut rhs = |t: f64, y: &[f64], (lo, hi): (f64, f64)| -> Vec<f64> {
        let st = AlState::unpack(t, y);
        let force = al_force(params, field, t, lo, hi, st.r, st.v);
        let jerk = (st.a - force * (1.0 / params.mass)) * (1.0 / params.theta0);
        st.v.0.iter().chain(st.a.0.iter()).chain(jerk.0.iter()).copied().collect()
    };
    let mut states = Vec::with_capacity(n + 1);
    states.push(*initial);
    let mut y = initial.pack();
    let mut termination = Termination::Completed;
    for k in 0..n {
        let t = initial.t + k as f64 * h;
        y = rk4_step(&mut rhs, t, &y, h);
        let st = AlState::unpack(initial.t + (k + 1) as f64 * h, &y);
        if st.overflowed() {
            log::info!("Abraham–Lorentz trajectory overflowed at t = {}", st.t);
            termination = Termination::Overflow;
            break;
        }
        states.push(st);
    }
    if sign < 0.0 {
        states.reverse();
    }
    Ok(AlTrajectory { step, states, termination })
}

/// Integrates the non-relativistic Abraham–Lorentz equation forward.
pub fn integrate_al_nonrel(initial: &AlState, field: &FieldSpec, params: &AldParams, duration: f64, step: f64) -> Result<AlTrajectory> {
    run_al(initial, field, params, duration, step, 1.0)
}

/// Integrates backward from `final_state`; states come out in increasing time.
pub fn integrate_al_nonrel_backward(final_state: &AlState, field: &FieldSpec, params: &AldParams, duration: f64, step: f64) -> Result<AlTrajectory> {
    run_al(final_state, field, params, duration, step, -1.0)
}

/// Radiation-reaction force `m theta0 d²v/dt²` implied by the equation of
/// motion at `state` (the field is sampled at `state.t`).
pub fn reaction_force(params: &AldParams, field: &FieldSpec, state: &AlState) -> Vec3 {
    let force = al_force(params, field, state.t, state.t, state.t, state.r, state.v);
    state.a * params.mass - force
}

/// The non-runaway solution for a field that is constant after `onset`: start
/// at `onset + after` on the asymptotic state `a = F/m` and integrate back to
/// `onset - before`. The runaway mode decays backward, so this selects the
/// physical branch; before the onset the acceleration is
/// `a(onset) e^((t - onset)/theta0)`.
///
/// `final_velocity` is the velocity at the end of the window.
pub fn al_physical_pulse(
    params: &AldParams,
    field: &FieldSpec,
    onset: f64,
    before: f64,
    after: f64,
    step: f64,
    final_velocity: Vec3,
) -> Result<AlTrajectory> {
    let t_end = onset + after;
    let force = al_force(params, field, t_end, t_end, t_end, Vec3::ZERO, final_velocity);
    let end = AlState { t: t_end, r: Vec3::ZERO, v: final_velocity, a: force * (1.0 / params.mass) };
    integrate_al_nonrel_backward(&end, field, params, before + after, step)
}

/// Least-squares fit of `ln|y| = intercept + rate * t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub rate: f64,
    pub intercept: f64,
    /// Largest absolute residual of `ln|y|` about the fitted line.
    pub max_log_residual: f64,
}

impl ExponentialFit {
    /// `1 / rate`.
    pub fn e_folding_time(&self) -> f64 {
        1.0 / self.rate
    }
}

pub fn fit_exponential_rate(times: &[f64], values: &[f64]) -> Result<ExponentialFit> {
    if times.len() != values.len() {
        return Err(Error::Shape("times and values differ in length"));
    }
    if times.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, available: times.len() });
    }
    if values.iter().any(|v| !(math::abs(*v) > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("exponential fit needs finite nonzero values"));
    }
    let n = times.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| math::ln(math::abs(*v))).collect();
    let mean_t = times.iter().sum::<f64>() / n;
    let mean_l = logs.iter().sum::<f64>() / n;
    let (mut stt, mut stl) = (0.0, 0.0);
    for (t, l) in times.iter().zip(&logs) {
        stt += (t - mean_t) * (t - mean_t);
        stl += (t - mean_t) * (l - mean_l);
    }
    if stt == 0.0 {
        return Err(Error::Domain("exponential fit needs distinct times"));
    }
    let rate = stl / stt;
    let intercept = mean_l - rate * mean_t;
    let max_log_residual = times.iter().zip(&logs).map(|(t, l)| math::abs(l - intercept - rate * t)).fold(0.0, f64::max);
    Ok(ExponentialFit { rate, intercept, max_log_residual })
}
