//! External fields.
//!
//! A [`FieldSpec`] is a pair of constant vectors `E`, `B` modulated by a
//! scalar [`TimeProfile`], plus an optional elastic restoring force
//! `-stiffness * r` for the non-relativistic scenarios. Relativistic steppers
//! evaluate the profile at proper time; the non-relativistic ones at lab
//! time.

use serde::{Deserialize, Serialize};

use crate::kinematics::{FourVector, Vec3};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    Constant,
    /// Off for `t < onset`, on for `t >= onset`.
    Step { onset: f64 },
    /// `cos(omega t)`.
    Cosine { omega: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Step { onset } => {
                if t >= onset {
                    1.0
                } else {
                    0.0
                }
            }
            TimeProfile::Cosine { omega } => math::cos(omega * t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSpec {
    pub name: &'static str,
    pub electric: Vec3,
    pub magnetic: Vec3,
    pub profile: TimeProfile,
    /// Elastic constant `k` of a restoring force `-k r`; zero for pure EM.
    pub stiffness: f64,
}

impl FieldSpec {
    pub fn zero() -> Self {
        FieldSpec::uniform(Vec3::ZERO, Vec3::ZERO).named("free")
    }

    pub fn uniform(electric: Vec3, magnetic: Vec3) -> Self {
        FieldSpec { name: "uniform", electric, magnetic, profile: TimeProfile::Constant, stiffness: 0.0 }
    }

    /// Field switched on as an exact step at `onset`.
    pub fn pulse(onset: f64, electric: Vec3, magnetic: Vec3) -> Self {
        FieldSpec { profile: TimeProfile::Step { onset }, ..FieldSpec::uniform(electric, magnetic) }.named("pulse")
    }

    pub fn oscillating(omega: f64, electric: Vec3, magnetic: Vec3) -> Self {
        FieldSpec { profile: TimeProfile::Cosine { omega }, ..FieldSpec::uniform(electric, magnetic) }
            .named("oscillating")
    }

    pub fn elastic(stiffness: f64) -> Self {
        FieldSpec { stiffness, ..FieldSpec::uniform(Vec3::ZERO, Vec3::ZERO) }.named("elastic")
    }

    pub fn named(mut self, name: &'static str) -> Self {
        self.name = name;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.electric == Vec3::ZERO && self.magnetic == Vec3::ZERO && self.stiffness == 0.0
    }

    pub fn electric_magnetic(&self, t: f64) -> (Vec3, Vec3) {
        let s = self.profile.value(t);
        (self.electric * s, self.magnetic * s)
    }

    /// Like [`electric_magnetic`](Self::electric_magnetic) but for a stage of
    /// an integration step `[lo, hi]` (either order). A step profile whose
    /// onset sits on the step boundary is treated as constant over the step,
    /// taking the value at the step midpoint.
    pub fn electric_magnetic_in_step(&self, t: f64, lo: f64, hi: f64) -> (Vec3, Vec3) {
        match self.profile {
            TimeProfile::Step { .. } => self.electric_magnetic(0.5 * (lo + hi)),
            _ => self.electric_magnetic(t),
        }
    }

    pub fn mechanical_force(&self, r: Vec3) -> Vec3 {
        r * -self.stiffness
    }

    pub fn tensor(&self, t: f64) -> FieldTensor {
        let (e, b) = self.electric_magnetic(t);
        FieldTensor::from_electric_magnetic(e, b)
    }
}

/// Covariant field tensor `F_mu_nu`, antisymmetric by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldTensor(pub [[f64; 4]; 4]);

impl FieldTensor {
    /// `F_0i = -E_i`, `F_ij = eps_ijk B_k`.
    pub fn from_electric_magnetic(e: Vec3, b: Vec3) -> Self {
        let mut f = [[0.0; 4]; 4];
        for i in 0..3 {
            f[0][i + 1] = -e[i];
            f[i + 1][0] = e[i];
        }
        f[1][2] = b[2];
        f[2][1] = -b[2];
        f[2][3] = b[0];
        f[3][2] = -b[0];
        f[3][1] = b[1];
        f[1][3] = -b[1];
        FieldTensor(f)
    }

    /// Contravariant `F^mu_nu u^nu`; the Lorentz 4-force is `e` times this.
    ///
    /// For `u = gamma (1, v)` this gives `gamma (E·v, E + v×B)`.
    pub fn apply(&self, u: &FourVector) -> FourVector {
        let mut lowered = [0.0; 4];
        for (mu, row) in self.0.iter().enumerate() {
            lowered[mu] = row.iter().zip(u.0.iter()).map(|(f, c)| f * c).sum();
        }
        FourVector(lowered).lower()
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.0[i][j] == -self.0[j][i]))
    }
}
