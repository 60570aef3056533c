//! Free motion of the infinite-order (Caldirola) model as a Fourier series,
//!
//! ```text
//! v(tau) = p/M + sum_(m>=1) E_m cos(m w0 tau) + H_m sin(m w0 tau),   w0 = pi/tau0,
//! ```
//!
//! its Euler–Lagrange residual, and spin/Hamiltonian both as closed forms and
//! as truncated-series oracles built on [`crate::nnm`].
//!
//! Mode amplitudes are purely spatial. Spin requires the center-of-mass frame
//! (zero spatial drift); the Hamiltonian accepts any drift.
//!
//! The oracles evaluate the series in the rescaled time `phi = w0 tau`, where
//! the Caldirola coefficients become `k_n = (-1)^n M pi^(2n)/(2n+1)!` and the
//! `j`-th derivative of mode `m` scales as `m^j`. This keeps high-order
//! derivatives finite for any `tau0`. Spin is then multiplied back by `1/w0`;
//! the Hamiltonian is invariant under the rescaling.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{ChrononParams, FourVector, Vec3};
use crate::math;
use crate::nnm::{self, DerivativeJet, NnmModel};
use crate::series::{self, PrecisionWarning, SeriesAccumulator, MAX_CERTIFIED_M};

/// Amplitudes of one harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mode {
    /// Cosine amplitude `E_m`.
    pub cos: Vec3,
    /// Sine amplitude `H_m`.
    pub sin: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMotion {
    mass: f64,
    params: ChrononParams,
    drift: FourVector,
    /// `modes[i]` is harmonic `m = i + 1`.
    modes: Vec<Mode>,
}

/// A value that may have lost precision to series cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checked<T> {
    pub value: T,
    pub warning: Option<PrecisionWarning>,
}

impl FourierMotion {
    pub fn new(mass: f64, params: ChrononParams, drift: FourVector, modes: Vec<Mode>) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain("mass must be positive"));
        }
        if !drift.is_finite() || modes.iter().any(|m| !m.cos.is_finite() || !m.sin.is_finite()) {
            return Err(Error::NonFinite("Fourier motion amplitudes"));
        }
        Ok(FourierMotion { mass, params, drift, modes })
    }

    /// Motion in its center-of-mass frame, drift `p = (M, 0, 0, 0)`.
    pub fn center_of_mass(mass: f64, params: ChrononParams, modes: Vec<Mode>) -> Result<Self> {
        Self::new(mass, params, FourVector::new(mass, 0.0, 0.0, 0.0), modes)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn params(&self) -> &ChrononParams {
        &self.params
    }

    pub fn omega0(&self) -> f64 {
        self.params.omega0()
    }

    pub fn drift(&self) -> FourVector {
        self.drift
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn max_mode(&self) -> u32 {
        self.modes.len() as u32
    }

    /// Highest harmonic with a nonzero amplitude.
    pub fn highest_active_mode(&self) -> u32 {
        self.modes
            .iter()
            .rposition(|m| *m != Mode::default())
            .map_or(0, |i| i as u32 + 1)
    }

    /// Same trajectory viewed from `tau -> tau + delta`: each `(E_m, H_m)` pair
    /// is rotated by `m w0 delta`.
    pub fn phase_shifted(&self, delta: f64) -> FourierMotion {
        let w0 = self.omega0();
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, mode)| {
                let angle = (i + 1) as f64 * w0 * delta;
                let (s, c) = (math::sin(angle), math::cos(angle));
                Mode { cos: mode.cos * c + mode.sin * s, sin: mode.sin * c - mode.cos * s }
            })
            .collect();
        FourierMotion { modes, ..self.clone() }
    }

    /// `order`-th derivative of the internal part with respect to
    /// `phi = w0 tau` (drift excluded).
    fn internal_phase_derivative(&self, order: usize, phi: f64) -> Vec3 {
        let shift = order as f64 * FRAC_PI_2;
        let mut out = Vec3::ZERO;
        for (i, mode) in self.modes.iter().enumerate() {
            let m = (i + 1) as f64;
            let angle = m * phi + shift;
            let scale = math_powi(m, order);
            out += (mode.cos * math::cos(angle) + mode.sin * math::sin(angle)) * scale;
        }
        out
    }

    /// `d^order v / dtau^order` at `tau`, from the analytically differentiated
    /// series.
    pub fn derivative(&self, order: usize, tau: f64) -> FourVector {
        let w0 = self.omega0();
        let internal = self.internal_phase_derivative(order, w0 * tau) * math_powi(w0, order);
        let drift = if order == 0 { self.drift * (1.0 / self.mass) } else { FourVector::ZERO };
        drift + FourVector::from_parts(0.0, internal)
    }

    /// Jet `v^(0..len)` at `tau` in physical time units.
    pub fn jet(&self, tau: f64, len: usize) -> DerivativeJet {
        DerivativeJet::from_fn(len, |n| self.derivative(n, tau))
    }

    /// Jet with derivatives taken with respect to `phi = w0 tau`.
    fn phase_jet(&self, tau: f64, len: usize) -> DerivativeJet {
        let phi = self.omega0() * tau;
        let drift = self.drift * (1.0 / self.mass);
        DerivativeJet::from_fn(len, |n| {
            let internal = FourVector::from_parts(0.0, self.internal_phase_derivative(n, phi));
            if n == 0 {
                drift + internal
            } else {
                internal
            }
        })
    }

    fn precision_warning(&self) -> Option<PrecisionWarning> {
        let m = self.highest_active_mode();
        (m > MAX_CERTIFIED_M).then(|| PrecisionWarning {
            lost_digits: PI * m as f64 / core::f64::consts::LN_10,
            reason: "mode index beyond the certified range (m > 8)",
        })
    }

    /// Truncation order actually used by the oracles: at most `n_trunc`, and
    /// low enough that `m_max^(2N+1)` stays finite. Fails if the series has
    /// not converged by then.
    fn oracle_order(&self, n_trunc: usize) -> Result<usize> {
        let m = self.highest_active_mode();
        if m <= 1 {
            return Ok(n_trunc);
        }
        let cap = ((690.0 / math::ln(m as f64) - 1.0) / 2.0) as usize;
        let order = n_trunc.min(cap);
        series::sinc_series(m as f64, order)?;
        Ok(order)
    }

    fn require_center_of_mass(&self) -> Result<()> {
        let p = self.drift.spatial().norm();
        if p != 0.0 {
            return Err(Error::NotCenterOfMass(p));
        }
        Ok(())
    }
}

fn math_powi(x: f64, n: usize) -> f64 {
    let mut out = 1.0;
    for _ in 0..n {
        out *= x;
    }
    out
}

/// The truncated Fourier velocity at `tau`.
pub fn fourier_velocity(motion: &FourierMotion, tau: f64) -> FourVector {
    motion.derivative(0, tau)
}

/// Partial sum of `sum_n M tau0^(2n)/(2n+1)! a^(2n)` on the Fourier solution.
///
/// For mode `m` the derivatives collapse to
/// `a^(2n) = (-1)^n (m w0)^(2n+1) (-E_m sin + H_m cos)`, so the mode contributes
/// `M m w0 [sum_n kbar_n m^(2n)] (-E_m sin + H_m cos)`.
pub fn el_residual_fourier(motion: &FourierMotion, tau: f64, n_trunc: usize) -> Result<Checked<FourVector>> {
    let w0 = motion.omega0();
    let mut out = Vec3::ZERO;
    for (i, mode) in motion.modes.iter().enumerate() {
        if *mode == Mode::default() {
            continue;
        }
        let m = (i + 1) as f64;
        let theta = m * w0 * tau;
        let direction = mode.sin * math::cos(theta) - mode.cos * math::sin(theta);
        let series = SeriesAccumulator::new(m, n_trunc).sum_weighted(|_| 1.0)?;
        out += direction * (motion.mass * m * w0 * series.value);
    }
    Ok(Checked { value: FourVector::from_parts(0.0, out), warning: motion.precision_warning() })
}

/// Closed-form spin as printed for the chronon theory,
/// `s = (1/4) sum_m (-1)^m E_m × H_m`.
///
/// This does not agree with the truncated series
/// ([`spin_truncated_oracle`]); see [`spin_mode_sum`] for the value the series
/// converges to.
pub fn spin_closed(motion: &FourierMotion) -> Result<Vec3> {
    motion.require_center_of_mass()?;
    let mut s = Vec3::ZERO;
    for (i, mode) in motion.modes.iter().enumerate() {
        let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
        s += mode.cos.cross(&mode.sin) * (0.25 * sign);
    }
    Ok(s)
}

/// Spin summed mode by mode from the series identities:
/// `s = (M/w0) sum_m (-1)^m / (2m) E_m × H_m`.
///
/// Each mode contributes `k_n (m w0)^(2n-1)` per inner term, `n` inner terms,
/// and `sum_n n kbar_n m^(2n-1) = (-1)^m/(2m)`.
pub fn spin_mode_sum(motion: &FourierMotion) -> Result<Vec3> {
    motion.require_center_of_mass()?;
    let scale = motion.mass / motion.omega0();
    let mut s = Vec3::ZERO;
    for (i, mode) in motion.modes.iter().enumerate() {
        let m = (i + 1) as f64;
        let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
        s += mode.cos.cross(&mode.sin) * (scale * sign / (2.0 * m));
    }
    Ok(s)
}

/// Spin from the truncated Noether double sum with Caldirola coefficients,
/// evaluated on the analytic jet of the motion at `tau = 0`.
pub fn spin_truncated_oracle(motion: &FourierMotion, n_trunc: usize) -> Result<Checked<Vec3>> {
    motion.require_center_of_mass()?;
    let order = motion.oracle_order(n_trunc)?;
    let model = NnmModel::caldirola(motion.mass, PI, order)?;
    let jet = motion.phase_jet(0.0, 2 * order);
    let s = nnm::spin_vector(&model, &jet)? * (1.0 / motion.omega0());
    Ok(Checked { value: s, warning: motion.precision_warning() })
}

/// Closed-form Hamiltonian as printed for the chronon theory,
/// `H = p²/2M + M³ sum_m [1 + (-1)^m] (E_m² + H_m²)`.
///
/// Like [`spin_closed`], this disagrees with the truncated series; see
/// [`hamiltonian_mode_sum`].
pub fn hamiltonian_closed(motion: &FourierMotion) -> f64 {
    let m = motion.mass;
    let internal: f64 = motion
        .modes
        .iter()
        .enumerate()
        .map(|(i, mode)| {
            let factor = if (i + 1) % 2 == 0 { 2.0 } else { 0.0 };
            factor * (mode.cos.norm_sq() + mode.sin.norm_sq())
        })
        .sum();
    motion.drift.square() / (2.0 * m) + m * m * m * internal
}

/// Hamiltonian summed mode by mode from the series identities:
/// `H = p²/2M + (M/4) sum_m (-1)^m (E_m² + H_m²)`.
///
/// The per-mode factor is `sum_(n>=0) (2n+1) kbar_n m^(2n) = (-1)^m`.
pub fn hamiltonian_mode_sum(motion: &FourierMotion) -> f64 {
    let m = motion.mass;
    let internal: f64 = motion
        .modes
        .iter()
        .enumerate()
        .map(|(i, mode)| {
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * (mode.cos.norm_sq() + mode.sin.norm_sq())
        })
        .sum();
    motion.drift.square() / (2.0 * m) + 0.25 * m * internal
}

/// Truncated jet-form Hamiltonian with Caldirola coefficients at `tau = 0`.
pub fn hamiltonian_truncated_oracle(motion: &FourierMotion, n_trunc: usize) -> Result<Checked<f64>> {
    hamiltonian_truncated_oracle_at(motion, 0.0, n_trunc)
}

/// Truncated jet-form Hamiltonian evaluated at an arbitrary `tau`.
pub fn hamiltonian_truncated_oracle_at(motion: &FourierMotion, tau: f64, n_trunc: usize) -> Result<Checked<f64>> {
    let order = motion.oracle_order(n_trunc)?;
    let model = NnmModel::caldirola(motion.mass, PI, order)?;
    let jet = motion.phase_jet(tau, 2 * order + 1);
    Ok(Checked { value: nnm::hamiltonian_value(&model, &jet)?, warning: motion.precision_warning() })
}
