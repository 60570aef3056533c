//! Minkowski algebra, unit systems and chronon parameters.
//!
//! Signature `(-,+,+,+)`: `a·b = -a0 b0 + a1 b1 + a2 b2 + a3 b3`. Vectors are
//! stored with upper (contravariant) indices; [`FourVector::lower`] flips the
//! sign of the time component.

use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::constants::*;
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3([self.0[0] * rhs, self.0[1] * rhs, self.0[2] * rhs])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A Minkowski 4-vector with contravariant components `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    pub fn from_parts(t: f64, spatial: Vec3) -> Self {
        FourVector([t, spatial.0[0], spatial.0[1], spatial.0[2]])
    }

    /// Future-pointing unit 4-velocity for a 3-velocity `v` (`c = 1`).
    pub fn from_velocity(v: Vec3) -> Result<Self> {
        let gamma = lorentz_gamma(v.norm())?;
        Ok(FourVector::from_parts(gamma, v * gamma))
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vec3 {
        Vec3([self.0[1], self.0[2], self.0[3]])
    }

    /// Covariant components `a_mu = g_mu_nu a^nu`.
    pub fn lower(&self) -> FourVector {
        FourVector([-self.0[0], self.0[1], self.0[2], self.0[3]])
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn square(&self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| if math::abs(*c) > m { math::abs(*c) } else { m })
    }

    pub fn euclidean_norm(&self) -> f64 {
        math::sqrt(self.0.iter().map(|c| c * c).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Rescale a timelike vector onto the unit hyperboloid `u·u = -1`.
    /// Projection onto the future mass shell along the time axis: keeps the
    /// spatial part and sets `u^0 = sqrt(1 + |u|²)`. Unlike rescaling, this
    /// stays accurate at large gamma, where `u·u` itself is only known to
    /// about `eps gamma²`.
    pub fn on_mass_shell(&self) -> Result<FourVector> {
        if !(self.time() > 0.0) || !self.is_finite() {
            return Err(Error::Domain("mass-shell projection needs a finite future-pointing vector"));
        }
        let s = self.spatial();
        Ok(FourVector::from_parts(math::sqrt(1.0 + s.norm_sq()), s))
    }

    pub fn normalized_timelike(&self) -> Result<FourVector> {
        let sq = self.square();
        if !(sq < 0.0) {
            return Err(Error::Domain("cannot normalize a non-timelike vector"));
        }
        Ok(*self * (1.0 / math::sqrt(-sq)))
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: FourVector) {
        for i in 0..4 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        let mut out = self;
        out -= rhs;
        out
    }
}

impl SubAssign for FourVector {
    fn sub_assign(&mut self, rhs: FourVector) {
        for i in 0..4 {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        FourVector(self.0.map(|c| c * rhs))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Minkowski inner product, signature `(-,+,+,+)`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    -a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] + a.0[3] * b.0[3]
}

/// `1/sqrt(1 - beta^2)` for `0 <= beta < 1`.
pub fn lorentz_gamma(beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain("speed must satisfy 0 <= beta < 1"));
    }
    Ok(1.0 / math::sqrt(1.0 - beta * beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    /// `c = 1`, `m0 = 1`, `k = 1`.
    Natural,
    /// Gaussian CGS: `k = 1`, charge in statC.
    Gaussian,
    /// SI with `k = 1/(4 pi eps0)`.
    Si,
}

impl core::str::FromStr for UnitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(UnitMode::Natural),
            "gaussian" | "cgs" => Ok(UnitMode::Gaussian),
            "si" => Ok(UnitMode::Si),
            other => Err(Error::UnknownTag { kind: "unit mode", tag: other.into() }),
        }
    }
}

/// Constants needed to turn the electron's charge and mass into a chronon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub mode: UnitMode,
    pub c: f64,
    pub charge: f64,
    pub rest_mass: f64,
    /// Coulomb constant `k = 1/(4 pi eps0)`.
    pub coulomb: f64,
}

impl UnitSystem {
    /// Natural units with unit charge.
    pub fn natural() -> Self {
        Self::natural_with_charge(1.0)
    }

    pub fn natural_with_charge(charge: f64) -> Self {
        UnitSystem { mode: UnitMode::Natural, c: 1.0, charge, rest_mass: 1.0, coulomb: 1.0 }
    }

    /// Electron in Gaussian CGS units.
    pub fn gaussian_electron() -> Self {
        UnitSystem {
            mode: UnitMode::Gaussian,
            c: SPEED_OF_LIGHT_CGS,
            charge: ELEMENTARY_CHARGE_CGS,
            rest_mass: ELECTRON_MASS_CGS,
            coulomb: 1.0,
        }
    }

    /// Electron in SI units.
    pub fn si_electron() -> Self {
        UnitSystem {
            mode: UnitMode::Si,
            c: SPEED_OF_LIGHT_SI,
            charge: ELEMENTARY_CHARGE_SI,
            rest_mass: ELECTRON_MASS_SI,
            coulomb: 1.0 / (4.0 * PI * VACUUM_PERMITTIVITY_SI),
        }
    }

    pub fn for_mode(mode: UnitMode) -> Self {
        match mode {
            UnitMode::Natural => Self::natural(),
            UnitMode::Gaussian => Self::gaussian_electron(),
            UnitMode::Si => Self::si_electron(),
        }
    }

    pub fn hbar(&self) -> f64 {
        match self.mode {
            UnitMode::Natural => 1.0,
            UnitMode::Gaussian => HBAR_CGS,
            UnitMode::Si => HBAR_SI,
        }
    }
}

/// Half-chronon `theta0 = (2/3) k e^2 / (m0 c^3)`; the chronon is `2 theta0`.
pub fn chronon_theta0(units: &UnitSystem) -> Result<f64> {
    let UnitSystem { c, charge, rest_mass, coulomb, .. } = *units;
    if !(rest_mass > 0.0) || !(c > 0.0) {
        return Err(Error::Domain("rest mass and c must be positive"));
    }
    if !(coulomb > 0.0) || charge == 0.0 || !charge.is_finite() {
        return Err(Error::Domain("charge must be nonzero and k positive"));
    }
    Ok(2.0 / 3.0 * coulomb * charge * charge / (rest_mass * c * c * c))
}

/// Proper-time quantum and the quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrononParams {
    tau0: f64,
}

impl ChrononParams {
    pub fn new(tau0: f64) -> Result<Self> {
        if !(tau0 > 0.0) || !tau0.is_finite() {
            return Err(Error::Domain("tau0 must be positive and finite"));
        }
        Ok(ChrononParams { tau0 })
    }

    pub fn from_units(units: &UnitSystem) -> Result<Self> {
        Self::new(2.0 * chronon_theta0(units)?)
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn theta0(&self) -> f64 {
        0.5 * self.tau0
    }

    /// Ground frequency of the internal motion, `pi / tau0`.
    pub fn omega0(&self) -> f64 {
        PI / self.tau0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dot_signature() {
        let t = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let x = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(&t, &t), -1.0);
        assert_eq!(minkowski_dot(&x, &x), 1.0);
        let c = 3.0;
        let rest = FourVector::new(c, 0.0, 0.0, 0.0);
        assert_eq!(rest.square(), -c * c);
    }

    #[test]
    fn theta0_unit_inputs() {
        let units = UnitSystem { mode: UnitMode::Natural, c: 1.0, charge: 1.0, rest_mass: 1.0, coulomb: 1.0 };
        assert_eq!(chronon_theta0(&units).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn theta0_electron() {
        for units in [UnitSystem::gaussian_electron(), UnitSystem::si_electron()] {
            let theta = chronon_theta0(&units).unwrap();
            assert!((theta / 6.266e-24 - 1.0).abs() < 1e-3, "{theta:e}");
        }
    }

    #[test]
    fn theta0_rejects_bad_mass() {
        let mut units = UnitSystem::natural();
        units.rest_mass = 0.0;
        assert!(matches!(chronon_theta0(&units), Err(Error::Domain(_))));
        units.rest_mass = 1.0;
        units.c = -1.0;
        assert!(chronon_theta0(&units).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(lorentz_gamma(0.0).unwrap(), 1.0);
        assert!((lorentz_gamma(0.75f64.sqrt()).unwrap() - 2.0).abs() < 1e-15);
        assert!((lorentz_gamma(0.6).unwrap() - 1.25).abs() < 1e-15);
        assert!(lorentz_gamma(1.0).is_err());
        assert!(lorentz_gamma(-0.1).is_err());
    }

    #[test]
    fn internal_energy_condition() {
        let gamma = lorentz_gamma(0.75f64.sqrt()).unwrap();
        assert!((gamma - 1.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chronon_params() {
        let p = ChrononParams::new(0.5).unwrap();
        assert_eq!(p.theta0(), 0.25);
        assert_eq!(p.omega0() * p.tau0(), PI);
        assert!(ChrononParams::new(0.0).is_err());
        assert!(ChrononParams::new(f64::NAN).is_err());
    }

    fn fv() -> impl Strategy<Value = FourVector> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(FourVector)
    }

    proptest! {
        #[test]
        fn dot_symmetric_bilinear(a in fv(), b in fv(), c in fv(), s in -5.0f64..5.0) {
            prop_assert_eq!(a.dot(&b), b.dot(&a));
            let lhs = (a * s + b).dot(&c);
            let rhs = s * a.dot(&c) + b.dot(&c);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
        }

        #[test]
        fn theta0_homogeneity(e in 0.1f64..10.0, m in 0.1f64..10.0, c in 0.1f64..10.0, s in 0.5f64..3.0) {
            let base = UnitSystem { mode: UnitMode::Natural, c, charge: e, rest_mass: m, coulomb: 1.0 };
            let t0 = chronon_theta0(&base).unwrap();
            let te = chronon_theta0(&UnitSystem { charge: e * s, ..base }).unwrap();
            let tm = chronon_theta0(&UnitSystem { rest_mass: m * s, ..base }).unwrap();
            let tc = chronon_theta0(&UnitSystem { c: c * s, ..base }).unwrap();
            prop_assert!((te / t0 - s * s).abs() < 1e-12 * s * s);
            prop_assert!((tm / t0 - 1.0 / s).abs() < 1e-12 / s);
            prop_assert!((tc / t0 - s.powi(-3)).abs() < 1e-12 * s.powi(-3));
        }
    }
}
