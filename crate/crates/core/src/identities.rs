//! The series-identity check suite: per-m sums against their closed values,
//! and spin/Hamiltonian closed forms against the truncated-series oracles on
//! a few fixed motions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{self, FourierMotion, Mode};
use crate::kinematics::{ChrononParams, Vec3};
use crate::series::{self, SeriesAccumulator, SeriesValue};

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerance for the integer-m identities: tighter for small m.
pub fn identity_tolerance(m: u32) -> f64 {
    if m <= 5 {
        1e-8
    } else {
        1e-6
    }
}

pub const DECOMPOSITION_TOLERANCE: f64 = 1e-10;
pub const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub name: String,
    pub m: Option<u32>,
    pub value: f64,
    pub expected: f64,
    /// Absolute error, or relative error for the oracle rows.
    pub error: f64,
    pub relative: bool,
    pub tolerance: f64,
    pub lost_digits: f64,
    pub passed: bool,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub schema_version: u32,
    pub max_m: u32,
    pub n_trunc: usize,
    pub rows: Vec<IdentityRow>,
    pub all_passed: bool,
    pub failing: Vec<String>,
}

fn series_row(name: String, m: u32, v: &SeriesValue, expected: f64, tolerance: f64) -> IdentityRow {
    let error = (v.value - expected).abs();
    IdentityRow {
        name,
        m: Some(m),
        value: v.value,
        expected,
        error,
        relative: false,
        tolerance,
        lost_digits: v.lost_digits,
        passed: error <= tolerance,
        warning: v.warning.map(|w| w.reason.to_string()),
    }
}

fn oracle_row(name: &str, value: f64, expected: f64, error: f64) -> IdentityRow {
    IdentityRow {
        name: name.to_string(),
        m: None,
        value,
        expected,
        error,
        relative: true,
        tolerance: ORACLE_TOLERANCE,
        lost_digits: 0.0,
        passed: error <= ORACLE_TOLERANCE,
        warning: None,
    }
}

fn sign(m: u32) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn mode(c: [f64; 3], s: [f64; 3]) -> Mode {
    Mode { cos: Vec3(c), sin: Vec3(s) }
}

/// Fixed center-of-mass motions used by the oracle rows: single odd mode,
/// single even mode, and a three-mode mixture.
pub fn canned_motions() -> Result<Vec<(&'static str, FourierMotion)>> {
    let params = ChrononParams::new(1.0)?;
    let single_odd = vec![mode([0.3, 0.0, 0.1], [0.0, 0.5, 0.0])];
    let single_even = vec![Mode::default(), mode([0.2, -0.1, 0.0], [0.1, 0.0, 0.4])];
    let mixed = vec![
        mode([0.3, 0.1, 0.0], [0.0, 0.2, -0.1]),
        mode([0.0, 0.25, 0.1], [0.15, 0.0, 0.2]),
        mode([0.1, 0.0, 0.2], [-0.2, 0.1, 0.0]),
    ];
    Ok(vec![
        ("single_m1", FourierMotion::center_of_mass(1.0, params, single_odd)?),
        ("single_m2", FourierMotion::center_of_mass(1.0, params, single_even)?),
        ("mixed_m1_m3", FourierMotion::center_of_mass(1.0, params, mixed)?),
    ])
}

fn relative_gap(a: Vec3, b: Vec3) -> f64 {
    let scale = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}

/// Runs every identity for `m = 1..=max_m` with truncation `n_trunc`, then the
/// spin and Hamiltonian oracle comparisons on [`canned_motions`].
pub fn run_identity_checks(max_m: u32, n_trunc: usize) -> Result<IdentityReport> {
    if max_m == 0 {
        return Err(Error::InvalidConfig("max m must be at least 1".into()));
    }
    if n_trunc == 0 {
        return Err(Error::InvalidConfig("n_trunc must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for m in 1..=max_m {
        let tol = identity_tolerance(m);
        let sinc = series::sinc_series(m as f64, n_trunc)?;
        let mut sinc_row = series_row(format!("sinc_{m}"), m, &sinc, 0.0, tol);
        if m > series::MAX_CERTIFIED_M {
            sinc_row.warning = Some("mode index beyond the certified range (m > 8)".into());
        }
        rows.push(sinc_row);
        let weighted = series::weighted_kbar_sum(m, n_trunc)?;
        rows.push(series_row(format!("weighted_{m}"), m, &weighted, sign(m) / 2.0, tol));
        let a = series::a_coefficient(m, n_trunc)?;
        rows.push(series_row(format!("A_{m}"), m, &a, sign(m) / 4.0, tol));
        let b = series::b_coefficient(m, n_trunc)?;
        rows.push(series_row(format!("B_{m}"), m, &b, 1.0 + sign(m), tol));
        let decomposition = SeriesValue { value: b.value - (1.0 + 4.0 * a.value + sinc.value), ..b };
        rows.push(series_row(format!("decomposition_{m}"), m, &decomposition, 0.0, DECOMPOSITION_TOLERANCE));
    }
    // direct accumulator check that the recurrence reproduces kbar at n <= 20
    let mut acc = SeriesAccumulator::new(1.0, 20);
    let mut worst = 0.0f64;
    for n in 0..=20usize {
        let pi_sq = core::f64::consts::PI * core::f64::consts::PI;
        let direct = sign(n as u32) * (0..n).fold(1.0, |p, _| p * pi_sq) / factorial(2 * n + 1);
        worst = worst.max(((acc.term() - direct) / direct).abs());
        if n < 20 {
            acc = acc.advanced();
        }
    }
    rows.push(IdentityRow {
        name: "kbar_recurrence".into(),
        m: None,
        value: worst,
        expected: 0.0,
        error: worst,
        relative: true,
        tolerance: 1e-13,
        lost_digits: 0.0,
        passed: worst <= 1e-13,
        warning: None,
    });

    for (label, motion) in canned_motions()? {
        let oracle = fourier::spin_truncated_oracle(&motion, n_trunc)?.value;
        let closed = fourier::spin_closed(&motion)?;
        let mode_sum = fourier::spin_mode_sum(&motion)?;
        rows.push(oracle_row(&format!("spin_closed_vs_oracle:{label}"), closed.norm(), oracle.norm(), relative_gap(closed, oracle)));
        rows.push(oracle_row(
            &format!("spin_mode_sum_vs_oracle:{label}"),
            mode_sum.norm(),
            oracle.norm(),
            relative_gap(mode_sum, oracle),
        ));
        let h_oracle = fourier::hamiltonian_truncated_oracle(&motion, n_trunc)?.value;
        let h_closed = fourier::hamiltonian_closed(&motion);
        let h_sum = fourier::hamiltonian_mode_sum(&motion);
        let rel = |x: f64| (x - h_oracle).abs() / h_oracle.abs().max(f64::MIN_POSITIVE);
        rows.push(oracle_row(&format!("hamiltonian_closed_vs_oracle:{label}"), h_closed, h_oracle, rel(h_closed)));
        rows.push(oracle_row(&format!("hamiltonian_mode_sum_vs_oracle:{label}"), h_sum, h_oracle, rel(h_sum)));
    }

    let failing: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    Ok(IdentityReport { schema_version: SCHEMA_VERSION, max_m, n_trunc, all_passed: failing.is_empty(), rows, failing })
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
