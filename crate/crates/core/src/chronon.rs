//! Finite-difference electron dynamics on a proper-time lattice of spacing
//! `tau0`.
//!
//! Three formulations of the velocity update, written in natural units with
//! the projector `P = g + u u` (so `P u = 0` when `u·u = -1`):
//!
//! ```text
//! retarded   (m/tau0)  P(u_n) [u_n - u_{n-1}]         = e F(tau_n) u_n
//! advanced   (m/tau0)  P(u_n) [u_{n+1} - u_n]         = e F(tau_n) u_n
//! symmetric  (m/2tau0) P(u_n) [u_{n+1} - u_{n-1}]     = e F(tau_n) u_n
//! ```
//!
//! together with a transmission law for positions. Retarded is implicit and
//! nonlinear (damped Newton). Advanced and symmetric are linear in the
//! unknown, but `P` is singular along `u`, so they are solved in the
//! orthogonal complement of `u` with the parallel part fixed by `u·u = -1`.
//!
//! The non-relativistic analogues act on 3-velocities with lab time
//! identified with proper time.

use core::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldTensor};
use crate::kinematics::{ChrononParams, FourVector, UnitMode, UnitSystem, Vec3};
use crate::math;

/// Rest-frame coupling `|kappa| max(|E|, |B|)` above which the retarded
/// solve is seeded at the exact root instead of at rest.
const STRONG_COUPLING: f64 = 1.0;

/// Charge and rest mass in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub mass: f64,
    pub charge: f64,
}

impl Particle {
    pub fn new(mass: f64, charge: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain("particle mass must be positive"));
        }
        if !charge.is_finite() {
            return Err(Error::NonFinite("particle charge"));
        }
        Ok(Particle { mass, charge })
    }

    /// Unit mass, unit charge.
    pub fn unit() -> Self {
        Particle { mass: 1.0, charge: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Retarded,
    Advanced,
    Symmetric,
}

impl Formulation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::Retarded => "retarded",
            Formulation::Advanced => "advanced",
            Formulation::Symmetric => "symmetric",
        }
    }
}

impl core::str::FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "retarded" => Ok(Formulation::Retarded),
            "advanced" => Ok(Formulation::Advanced),
            "symmetric" => Ok(Formulation::Symmetric),
            other => Err(Error::UnknownTag { kind: "formulation", tag: other.into() }),
        }
    }
}

/// Reading of the retarded transmission law. Advanced and symmetric have
/// only one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransmissionMode {
    /// `x_n - x_{n-1} = (tau0/2)(u_n - u_{n-1})`, as printed. Freezes free
    /// motion.
    #[default]
    Literal,
    /// `x_n - x_{n-1} = (tau0/2)(u_n + u_{n-1})`.
    Trapezoidal,
}

impl TransmissionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransmissionMode::Literal => "literal",
            TransmissionMode::Trapezoidal => "trapezoidal",
        }
    }
}

impl core::str::FromStr for TransmissionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(TransmissionMode::Literal),
            "trapezoidal" => Ok(TransmissionMode::Trapezoidal),
            other => Err(Error::UnknownTag { kind: "transmission mode", tag: other.into() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissionLaw {
    RetardedLiteral,
    RetardedTrapezoidal,
    Advanced,
    Symmetric,
}

impl TransmissionLaw {
    pub fn for_formulation(formulation: Formulation, mode: TransmissionMode) -> Self {
        match (formulation, mode) {
            (Formulation::Retarded, TransmissionMode::Literal) => TransmissionLaw::RetardedLiteral,
            (Formulation::Retarded, TransmissionMode::Trapezoidal) => TransmissionLaw::RetardedTrapezoidal,
            (Formulation::Advanced, _) => TransmissionLaw::Advanced,
            (Formulation::Symmetric, _) => TransmissionLaw::Symmetric,
        }
    }
}

impl core::str::FromStr for TransmissionLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "retarded_literal" => Ok(TransmissionLaw::RetardedLiteral),
            "retarded_trapezoidal" => Ok(TransmissionLaw::RetardedTrapezoidal),
            "advanced" => Ok(TransmissionLaw::Advanced),
            "symmetric" => Ok(TransmissionLaw::Symmetric),
            other => Err(Error::UnknownTag { kind: "transmission law", tag: other.into() }),
        }
    }
}

/// Lattice values around index `n` that a transmission law may read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionWindow<T> {
    /// `x_{n-1}`; needed by the symmetric law.
    pub x_prev: Option<T>,
    /// `x_n`.
    pub x: T,
    /// `u_n`.
    pub u: T,
    /// `u_{n+1}`; needed by the retarded laws.
    pub u_next: Option<T>,
}

/// Position `x_{n+1}` from the window around `n`.
///
/// Works for 4-vectors and, in the non-relativistic scenarios, 3-vectors.
pub fn transmission_update<T>(law: TransmissionLaw, tau0: f64, window: &TransmissionWindow<T>) -> Result<T>
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Sub<Output = T> + core::ops::Mul<f64, Output = T>,
{
    let w = window;
    match law {
        TransmissionLaw::RetardedLiteral => {
            let next = w.u_next.ok_or(Error::Shape("retarded transmission needs u_{n+1}"))?;
            Ok(w.x + (next - w.u) * (0.5 * tau0))
        }
        TransmissionLaw::RetardedTrapezoidal => {
            let next = w.u_next.ok_or(Error::Shape("retarded transmission needs u_{n+1}"))?;
            Ok(w.x + (next + w.u) * (0.5 * tau0))
        }
        TransmissionLaw::Advanced => Ok(w.x + w.u * tau0),
        TransmissionLaw::Symmetric => {
            let prev = w.x_prev.ok_or(Error::Shape("symmetric transmission needs x_{n-1}"))?;
            Ok(prev + w.u * (2.0 * tau0))
        }
    }
}

/// One lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrononState {
    pub n: i64,
    pub tau: f64,
    pub x: FourVector,
    pub u: FourVector,
}

impl ChrononState {
    pub fn new(n: i64, tau: f64, x: FourVector, u: FourVector) -> Self {
        ChrononState { n, tau, x, u }
    }

    /// Particle at rest at the origin at lattice index 0.
    pub fn at_rest() -> Self {
        ChrononState::new(0, 0.0, FourVector::ZERO, FourVector::new(1.0, 0.0, 0.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepDiagnostics {
    /// Newton iterations (retarded) or 0 for the explicit solves.
    pub iterations: u32,
    /// Scaled residual of the difference equation at the accepted velocity,
    /// before renormalization.
    pub residual: f64,
    /// `|u·u + 1|` before the final renormalization.
    pub pre_norm_drift: f64,
    /// `|u·u + 1|` after it.
    pub post_norm_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Absolute tolerance on the residual, in velocity units.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { tolerance: 1e-12, max_iterations: 50 }
    }
}

/// Lattice integrator for one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepper {
    pub params: ChrononParams,
    pub particle: Particle,
    pub transmission: TransmissionMode,
    pub settings: SolverSettings,
}

fn to_na(v: &FourVector) -> Vector4<f64> {
    Vector4::new(v[0], v[1], v[2], v[3])
}

fn from_na(v: &Vector4<f64>) -> FourVector {
    FourVector::new(v[0], v[1], v[2], v[3])
}

/// Mixed-index matrix `F^mu_nu` such that `m * u = F.apply(u)`.
fn mixed_matrix(f: &FieldTensor) -> Matrix4<f64> {
    Matrix4::from_fn(|mu, nu| if mu == 0 { -f.0[mu][nu] } else { f.0[mu][nu] })
}

/// Orthonormal basis (spacelike, `e·e = +1`) of the Minkowski complement of a
/// timelike `u`, by Gram–Schmidt on the projected spatial axes.
///
/// The projections of all four axes satisfy `sum_mu u^mu P e_mu = 0`; the time
/// axis is the one to drop because `u^0` never vanishes for timelike `u`.
pub fn orthogonal_frame(u: &FourVector) -> Result<[FourVector; 3]> {
    let uu = u.square();
    if !(uu < 0.0) {
        return Err(Error::Domain("frame needs a timelike vector"));
    }
    let mut frame = [FourVector::ZERO; 3];
    for k in 0..3 {
        let mut e = FourVector::ZERO;
        e[k + 1] = 1.0;
        // two passes keep the frame orthogonal for large boosts
        for _ in 0..2 {
            e = e - *u * (e.dot(u) / uu);
            for prev in frame.iter().take(k) {
                e = e - *prev * e.dot(prev);
            }
        }
        let nsq = e.square();
        if !(nsq > 0.0) {
            return Err(Error::Singular);
        }
        frame[k] = e * (1.0 / math::sqrt(nsq));
    }
    Ok(frame)
}

/// Solves `P(u) d = rhs` for the component of `d` orthogonal to `u`.
///
/// On the complement `P` acts as the identity, so the solve reduces to
/// projecting `rhs` on the frame. The returned scalar is `|rhs·u|`, the part
/// of `rhs` the projector cannot reach; it is zero for any antisymmetric
/// field.
pub fn solve_projected(u: &FourVector, rhs: &FourVector) -> Result<(FourVector, f64)> {
    let frame = orthogonal_frame(u)?;
    let mut d = FourVector::ZERO;
    for e in &frame {
        d += *e * rhs.dot(e);
    }
    Ok((d, math::abs(rhs.dot(u))))
}

/// Picks `lambda` among the real roots so that `base + lambda u` is
/// future-pointing, preferring the root of smaller magnitude.
fn choose_root(base: &FourVector, u: &FourVector, roots: [f64; 2]) -> Result<FourVector> {
    let mut best: Option<(f64, FourVector)> = None;
    for lambda in roots {
        let cand = *base + *u * lambda;
        if cand.time() > 0.0 && best.map_or(true, |(l, _)| math::abs(lambda) < math::abs(l)) {
            best = Some((lambda, cand));
        }
    }
    best.map(|(_, v)| v).ok_or(Error::NoRealRoot { discriminant: f64::NAN })
}

fn finish(u: FourVector, iterations: u32, residual: f64) -> Result<(FourVector, StepDiagnostics)> {
    if !u.is_finite() {
        return Err(Error::NonFinite("chronon step velocity"));
    }
    let pre = math::abs(u.square() + 1.0);
    let out = u.on_mass_shell()?;
    let post = math::abs(out.square() + 1.0);
    log::trace!("step: iterations={iterations} residual={residual:e} drift={pre:e}");
    Ok((out, StepDiagnostics { iterations, residual, pre_norm_drift: pre, post_norm_drift: post }))
}

/// Pure boost to the rest frame of a timelike 4-velocity `w = (w0, w_s)`.
struct RestFrame {
    w0: f64,
    ws: Vec3,
}

impl RestFrame {
    fn of(w: &FourVector) -> Self {
        let ws = w.spatial();
        RestFrame { w0: math::sqrt(1.0 + ws.norm_sq()), ws }
    }

    /// `E' = w0 E + w_s × B - w_s (w_s·E)/(1 + w0)` and the dual for `B'`.
    fn fields(&self, e: Vec3, b: Vec3) -> (Vec3, Vec3) {
        let k = 1.0 / (1.0 + self.w0);
        let ws = self.ws;
        let e_rest = e * self.w0 + ws.cross(&b) - ws * (ws.dot(&e) * k);
        let b_rest = b * self.w0 - ws.cross(&e) - ws * (ws.dot(&b) * k);
        (e_rest, b_rest)
    }

    fn to_lab(&self, u: &FourVector) -> FourVector {
        let us = u.spatial();
        let ws = self.ws;
        let t = self.w0 * u.time() + ws.dot(&us);
        let s = ws * u.time() + us + ws * (ws.dot(&us) / (1.0 + self.w0));
        FourVector::from_parts(t, s)
    }
}

impl Stepper {
    pub fn new(params: ChrononParams, particle: Particle) -> Self {
        Stepper { params, particle, transmission: TransmissionMode::Literal, settings: SolverSettings::default() }
    }

    pub fn with_transmission(mut self, mode: TransmissionMode) -> Self {
        self.transmission = mode;
        self
    }

    pub fn with_settings(mut self, settings: SolverSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn tau0(&self) -> f64 {
        self.params.tau0()
    }

    /// `e tau0 / m`.
    fn coupling(&self) -> f64 {
        self.particle.charge * self.tau0() / self.particle.mass
    }

    /// Scaled retarded residual `r = u - u_prev + u (u·(u - u_prev)) - kappa F u`
    /// and a round-off scale for it.
    fn retarded_residual(&self, u: &FourVector, prev: &FourVector, f: &FieldTensor) -> (FourVector, f64) {
        let d = *u - *prev;
        let s = u.dot(&d);
        let force = f.apply(u) * self.coupling();
        let r = d + *u * s - force;
        // magnitudes before cancellation: s = u·d loses about eps * sum |u_mu d^mu|
        let s_abs: f64 = u.0.iter().zip(d.0.iter()).map(|(a, b)| math::abs(a * b)).sum();
        let f_abs = f.0.iter().flatten().fold(0.0, |m: f64, x| m.max(math::abs(*x)));
        let u_sum: f64 = u.0.iter().map(|x| math::abs(*x)).sum();
        let scale = u.max_abs() + prev.max_abs() + u.max_abs() * s_abs + math::abs(self.coupling()) * f_abs * u_sum;
        (r, scale)
    }

    /// The retarded residual with `u·u = -1` substituted,
    /// `g(u) = (-u·u_prev) u - kappa F u - u_prev`.
    ///
    /// Contracting the plain residual with `u` gives `s (1 + u·u) = 0`, so it
    /// also vanishes on a spurious branch `s = 0` off the mass shell.
    /// Contracting `g` gives `(-u·u_prev)(1 + u·u) = 0`: its roots are on the
    /// shell unless `u·u_prev = 0`, which the caller rejects. On the shell `g`
    /// equals the plain residual.
    fn shell_residual(&self, u: &FourVector, prev: &FourVector, f: &FieldTensor) -> FourVector {
        *u * -u.dot(prev) - f.apply(u) * self.coupling() - *prev
    }

    /// Velocity `u_{n}` from `u_{n-1}`, with the field at `tau_n`.
    ///
    /// Damped Newton on the on-shell form of the residual, seeded at
    /// `u_{n-1}` and run in the rest frame of `u_{n-1}`, where the unknown is
    /// a boost of order `kappa` and nothing cancels at large gamma. The
    /// reported residual is that of the equation as written, in that frame.
    pub fn retarded_velocity(&self, prev: &FourVector, tau: f64, field: &FieldSpec) -> Result<(FourVector, StepDiagnostics)> {
        if !prev.is_finite() {
            return Err(Error::NonFinite("retarded seed velocity"));
        }
        let (r0, _) = self.retarded_residual(prev, prev, &field.tensor(tau));
        if r0.max_abs() == 0.0 {
            // Exact fixed point; leave the velocity untouched bit for bit.
            let drift = math::abs(prev.square() + 1.0);
            return Ok((*prev, StepDiagnostics { iterations: 0, residual: 0.0, pre_norm_drift: drift, post_norm_drift: drift }));
        }
        let frame = RestFrame::of(prev);
        let (e, b) = field.electric_magnetic(tau);
        let (e_rest, b_rest) = frame.fields(e, b);
        let f = FieldTensor::from_electric_magnetic(e_rest, b_rest);
        // Past unit coupling Newton from rest wanders; start at the exact root.
        let strength = math::abs(self.coupling()) * e_rest.norm().max(b_rest.norm());
        let seed = if strength < STRONG_COUPLING {
            FourVector::new(1.0, 0.0, 0.0, 0.0)
        } else {
            self.rest_frame_root(e_rest, b_rest)?
        };
        // g also vanishes off the shell where u·u_prev = 0; only a
        // future-pointing root is the step.
        let budget = self.settings.max_iterations;
        let (u, iterations, residual) = match self.newton_at_rest(seed, &f, budget) {
            Ok(found) if found.0[0] > 0.0 => found,
            first => {
                // the reseeded solve shares the iteration budget
                let spent = match &first {
                    Ok((_, it, _)) => *it,
                    Err(Error::NonConvergence { iterations, .. }) => *iterations as u32,
                    Err(Error::Singular) => 0,
                    Err(_) => budget,
                };
                if spent >= budget {
                    return Err(match first {
                        Ok((_, it, residual)) => Error::NonConvergence { iterations: it as usize, residual },
                        Err(e) => e,
                    });
                }
                log::debug!("retarded step: Newton missed the physical root; reseeding at the exact root");
                let (u, it, residual) = self.newton_at_rest(self.rest_frame_root(e_rest, b_rest)?, &f, budget - spent)?;
                (u, spent + it, residual)
            }
        };
        if !u.is_finite() {
            return Err(Error::NonFinite("chronon step velocity"));
        }
        let pre = math::abs(u.square() + 1.0);
        let out = frame.to_lab(&u.on_mass_shell()?).on_mass_shell()?;
        let post = math::abs(out.square() + 1.0);
        log::trace!("step: iterations={iterations} residual={residual:e} drift={pre:e}");
        Ok((out, StepDiagnostics { iterations, residual, pre_norm_drift: pre, post_norm_drift: post }))
    }

    /// Exact root of the rest-frame equation. With `w = u^0`, the spatial part
    /// is `us = kappa (w² E - w kappa B×E + kappa² B (B·E)) / (w² + kappa² B²)`
    /// and `s = w²` solves `s² + (kappa²B² - 1 - kappa²E²) s - kappa²B² - kappa⁴(B·E)² = 0`,
    /// which has exactly one positive root.
    fn rest_frame_root(&self, e: Vec3, b: Vec3) -> Result<FourVector> {
        let k = self.coupling();
        let (c2, p, q) = (k * k * b.norm_sq(), k * k * e.norm_sq(), k * k * k * k * b.dot(&e) * b.dot(&e));
        let lin = c2 - 1.0 - p;
        let con = c2 + q;
        let disc = math::sqrt(lin * lin + 4.0 * con);
        let s = if lin > 0.0 { 2.0 * con / (lin + disc) } else { (disc - lin) / 2.0 };
        let w = math::sqrt(s);
        let spatial = (e * s - b.cross(&e) * (w * k) + b * (k * k * b.dot(&e))) * (k / (s + c2));
        let u = FourVector::from_parts(w, spatial);
        if !(w > 0.0) || !u.is_finite() {
            return Err(Error::NonFinite("retarded rest-frame root"));
        }
        Ok(u)
    }

    fn newton_at_rest(&self, start: FourVector, f: &FieldTensor, max_iterations: u32) -> Result<(FourVector, u32, f64)> {
        let prev = &FourVector::new(1.0, 0.0, 0.0, 0.0);
        let fm = mixed_matrix(f) * self.coupling();
        let tol = self.settings.tolerance;
        let mut u = start;
        let mut g = self.shell_residual(&u, prev, f);
        let mut norm = g.max_abs();
        for it in 1..=max_iterations {
            let jac = Matrix4::identity() * -u.dot(prev) - to_na(&u) * to_na(&prev.lower()).transpose() - fm;
            let delta = jac.lu().solve(&(-to_na(&g))).ok_or(Error::Singular)?;
            let delta = from_na(&delta);
            let mut lambda = 1.0;
            loop {
                let cand = u + delta * lambda;
                let gc = self.shell_residual(&cand, prev, f);
                if gc.max_abs() < (1.0 - 1e-4 * lambda) * norm || lambda < 1e-6 {
                    u = cand;
                    g = gc;
                    break;
                }
                lambda *= 0.5;
            }
            norm = g.max_abs();
            let (r, scale) = self.retarded_residual(&u, prev, f);
            let residual = r.max_abs();
            let floor = 64.0 * f64::EPSILON * scale;
            let stalled = delta.max_abs() * lambda <= 4.0 * f64::EPSILON * u.max_abs();
            if residual <= tol || (stalled && residual <= floor) {
                return Ok((u, it, residual));
            }
            if stalled {
                return Err(Error::NonConvergence { iterations: it as usize, residual });
            }
        }
        let (r, _) = self.retarded_residual(&u, prev, f);
        Err(Error::NonConvergence { iterations: max_iterations as usize, residual: r.max_abs() })
    }

    /// Velocity `u_{n+1}` from `u_n` with the field at `tau_n`.
    pub fn advanced_velocity(&self, u: &FourVector, tau: f64, field: &FieldSpec) -> Result<(FourVector, StepDiagnostics)> {
        let rhs = field.tensor(tau).apply(u) * self.coupling();
        let (b, inconsistency) = solve_projected(u, &rhs)?;
        // (1 + lambda)^2 = 1 + b·b for u_{n+1} = (1 + lambda) u + b
        let disc = 1.0 + b.square();
        if !(disc >= 0.0) {
            return Err(Error::NoRealRoot { discriminant: disc });
        }
        let root = math::sqrt(disc);
        let next = choose_root(&b, u, [root, -root]).map_err(|_| Error::NoRealRoot { discriminant: disc })?;
        finish(next, 0, inconsistency)
    }

    /// Velocity `u_{n+1}` from `u_{n-1}` and `u_n` with the field at `tau_n`.
    pub fn symmetric_velocity(
        &self,
        prev: &FourVector,
        u: &FourVector,
        tau: f64,
        field: &FieldSpec,
    ) -> Result<(FourVector, StepDiagnostics)> {
        let rhs = field.tensor(tau).apply(u) * (2.0 * self.coupling());
        let (b, inconsistency) = solve_projected(u, &rhs)?;
        let w = *prev + b;
        // (w + lambda u)^2 = -1
        let uw = u.dot(&w);
        let disc = uw * uw + w.square() + 1.0;
        if !(disc >= 0.0) {
            return Err(Error::NoRealRoot { discriminant: disc });
        }
        let root = math::sqrt(disc);
        let next = choose_root(&w, u, [uw + root, uw - root]).map_err(|_| Error::NoRealRoot { discriminant: disc })?;
        finish(next, 0, inconsistency)
    }

    /// Retarded step: state at `n` to state at `n + 1`, position by the
    /// retarded transmission law in the stepper's mode.
    pub fn step_retarded(&self, state: &ChrononState, field: &FieldSpec) -> Result<(ChrononState, StepDiagnostics)> {
        let tau = state.tau + self.tau0();
        let (u, diag) = self.retarded_velocity(&state.u, tau, field)?;
        let law = TransmissionLaw::for_formulation(Formulation::Retarded, self.transmission);
        let window = TransmissionWindow { x_prev: None, x: state.x, u: state.u, u_next: Some(u) };
        let x = transmission_update(law, self.tau0(), &window)?;
        Ok((ChrononState::new(state.n + 1, tau, x, u), diag))
    }

    pub fn step_advanced(&self, state: &ChrononState, field: &FieldSpec) -> Result<(ChrononState, StepDiagnostics)> {
        let (u, diag) = self.advanced_velocity(&state.u, state.tau, field)?;
        let window = TransmissionWindow { x_prev: None, x: state.x, u: state.u, u_next: None };
        let x = transmission_update(TransmissionLaw::Advanced, self.tau0(), &window)?;
        Ok((ChrononState::new(state.n + 1, state.tau + self.tau0(), x, u), diag))
    }

    pub fn step_symmetric(
        &self,
        prev: &ChrononState,
        curr: &ChrononState,
        field: &FieldSpec,
    ) -> Result<(ChrononState, StepDiagnostics)> {
        if curr.n != prev.n + 1 {
            return Err(Error::Shape("symmetric step needs consecutive lattice states"));
        }
        let (u, diag) = self.symmetric_velocity(&prev.u, &curr.u, curr.tau, field)?;
        let window = TransmissionWindow { x_prev: Some(prev.x), x: curr.x, u: curr.u, u_next: None };
        let x = transmission_update(TransmissionLaw::Symmetric, self.tau0(), &window)?;
        Ok((ChrononState::new(curr.n + 1, curr.tau + self.tau0(), x, u), diag))
    }

    /// Non-relativistic retarded velocity: solves
    /// `(m/tau0)(v - v_prev) = e (E + v × B) + force` for `v`.
    pub fn step_retarded_nonrel(&self, v_prev: Vec3, t: f64, field: &FieldSpec, force: Vec3) -> Result<Vec3> {
        let (e, b) = field.electric_magnetic(t);
        let (m, q) = (self.particle.mass, self.particle.charge);
        let k = m / self.tau0();
        // v × B = -[B]× v, so (k I + q [B]×) v = k v_prev + q E + force
        let cross = Matrix3::new(0.0, -b[2], b[1], b[2], 0.0, -b[0], -b[1], b[0], 0.0);
        let a = Matrix3::identity() * k + cross * q;
        let rhs = v_prev * k + e * q + force;
        let v = a.lu().solve(&Vector3::new(rhs[0], rhs[1], rhs[2])).ok_or(Error::Singular)?;
        let out = Vec3::new(v[0], v[1], v[2]);
        if !out.is_finite() {
            return Err(Error::NonFinite("non-relativistic velocity"));
        }
        Ok(out)
    }

    /// Non-relativistic advanced velocity (explicit):
    /// `(m/tau0)(v_next - v) = e (E + v × B) + force`.
    pub fn step_advanced_nonrel(&self, v: Vec3, t: f64, field: &FieldSpec, force: Vec3) -> Result<Vec3> {
        let (e, b) = field.electric_magnetic(t);
        let q = self.particle.charge;
        let out = v + (e * q + v.cross(&b) * q + force) * (self.tau0() / self.particle.mass);
        out.is_finite().then_some(out).ok_or(Error::NonFinite("non-relativistic velocity"))
    }

    /// Non-relativistic symmetric velocity (explicit):
    /// `(m/2tau0)(v_next - v_prev) = e (E + v × B) + force`.
    pub fn step_symmetric_nonrel(&self, v_prev: Vec3, v: Vec3, t: f64, field: &FieldSpec, force: Vec3) -> Result<Vec3> {
        let (e, b) = field.electric_magnetic(t);
        let q = self.particle.charge;
        let out = v_prev + (e * q + v.cross(&b) * q + force) * (2.0 * self.tau0() / self.particle.mass);
        out.is_finite().then_some(out).ok_or(Error::NonFinite("non-relativistic velocity"))
    }
}

/// Uniform circular internal motion of the free electron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalSolution {
    pub beta0_sq: f64,
    pub beta0: f64,
    pub gamma: f64,
    /// `2 pi / tau0`.
    pub angular_frequency: f64,
    /// `beta0 c tau0 / 2 pi`.
    pub radius: f64,
    /// Magnetic moment of the circulating charge, in the units' own system.
    pub magnetic_moment: f64,
}

/// Internal solution `x' = -beta0 c sin(2 pi tau/tau0)`,
/// `y' = -beta0 c cos(2 pi tau/tau0)`, with the rotational energy fixed by
/// `(gamma - 1) m c^2 = m c^2`.
///
/// The moment is `I A` (`I A / c` in Gaussian units) for charge `e`
/// circulating once per `tau0`.
pub fn internal_solution(params: &ChrononParams, units: &UnitSystem) -> InternalSolution {
    // gamma = 2  =>  1 - beta^2 = 1/4
    let gamma = 2.0;
    let beta0_sq = 1.0 - 1.0 / (gamma * gamma);
    let beta0 = math::sqrt(beta0_sq);
    let tau0 = params.tau0();
    let c = units.c;
    let radius = beta0 * c * tau0 / (2.0 * PI);
    let current = units.charge / tau0;
    let mut moment = current * PI * radius * radius;
    if units.mode == UnitMode::Gaussian {
        moment /= c;
    }
    InternalSolution { beta0_sq, beta0, gamma, angular_frequency: 2.0 * PI / tau0, radius, magnetic_moment: moment }
}

/// `k e^3 / (4 pi m c^2)` (SI carries an extra factor `c`, Gaussian none).
pub fn classical_anomalous_moment(units: &UnitSystem) -> f64 {
    let UnitSystem { c, charge, rest_mass, coulomb, mode } = *units;
    let base = coulomb * charge * charge * charge / (4.0 * PI * rest_mass * c * c);
    if mode == UnitMode::Si {
        base * c
    } else {
        base
    }
}

/// Schwinger's term `(alpha / 2 pi)` times the Bohr magneton
/// (`e hbar / 2 m c` Gaussian, `e hbar / 2 m` SI).
pub fn schwinger_moment(units: &UnitSystem, alpha: f64) -> f64 {
    let magneton = units.charge * units.hbar() / (2.0 * units.rest_mass);
    let magneton = if units.mode == UnitMode::Si { magneton } else { magneton / units.c };
    alpha / (2.0 * PI) * magneton
}
