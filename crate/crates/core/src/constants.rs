//! Physical constants. Every numeric value used at the unit boundary lives
//! here; nothing else in the crate inlines a CODATA number.
//!
//! Source: CODATA 2018 recommended values (Tiesinga et al., Rev. Mod. Phys.
//! 93, 025010 (2021)). `e`, `c`, `h` are exact in the 2019 SI.

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;

/// Electron rest mass, kg.
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;

/// Vacuum electric permittivity, F/m.
pub const VACUUM_PERMITTIVITY_SI: f64 = 8.854_187_812_8e-12;

/// Reduced Planck constant, J s (exact, derived from h).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Fine-structure constant (dimensionless).
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// Speed of light, cm/s (exact).
pub const SPEED_OF_LIGHT_CGS: f64 = 2.997_924_58e10;

/// Elementary charge, statC. Equal to `e_SI * c_SI * 10`.
pub const ELEMENTARY_CHARGE_CGS: f64 = 4.803_204_712_570_263e-10;

/// Electron rest mass, g.
pub const ELECTRON_MASS_CGS: f64 = 9.109_383_701_5e-28;

/// Reduced Planck constant, erg s.
pub const HBAR_CGS: f64 = 1.054_571_817e-27;
