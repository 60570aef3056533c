//! Caldirola series coefficients and the sinc-series identities.
//!
//! The dimensionless coefficients are `kbar_n = (-1)^n pi^(2n) / (2n+1)!`.
//! Terms `kbar_n x^(2n)` are produced by the recurrence
//! `t_(n+1) = t_n * (-(pi x)^2) / ((2n+2)(2n+3))`, so no factorial is ever
//! formed, and summed with Neumaier compensation.
//!
//! At integer `x = m` the partial sums cancel down from a peak term of
//! roughly `e^(pi m)`; about `pi m / ln 10` decimal digits are lost. Below
//! `m = 8` that still leaves better than `1e-6` absolute accuracy.

use core::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::math;

pub const DEFAULT_N_TRUNC: usize = 300;

/// Largest integer argument for which the identity checks are certified in
/// double precision.
pub const MAX_CERTIFIED_M: u32 = 8;

/// Largest `|x|` accepted by [`sinc_series`] without a precision warning.
pub const MAX_CERTIFIED_X: f64 = 8.0;

/// Relative size below which a term counts as negligible.
const STOP_RATIO: f64 = 1e-16;

/// Early-stop threshold. Far below [`STOP_RATIO`] so that sums of the same
/// terms with different weights all stop past the point where the tail
/// matters, which keeps term-by-term identities between them exact.
const TAIL_RATIO: f64 = 1e-34;

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if math::abs(self.sum) >= math::abs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += math::abs(x);
    }

    /// Add `a * b` exactly: the rounding error of the product is recovered
    /// with a fused multiply-add and accumulated too.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let err = libm::fma(a, b, -p);
        self.add(p);
        self.add(err);
        self.abs_sum -= math::abs(err);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of absolute values of everything added so far.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionWarning {
    /// Estimated decimal digits lost to cancellation.
    pub lost_digits: f64,
    pub reason: &'static str,
}

/// A partial sum together with an estimate of how much it can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Absolute error bound from term rounding and cancellation.
    pub error_estimate: f64,
    pub lost_digits: f64,
    pub terms_used: usize,
    pub warning: Option<PrecisionWarning>,
}

impl SeriesValue {
    fn map(self, f: impl Fn(f64) -> f64, scale: f64) -> SeriesValue {
        SeriesValue {
            value: f(self.value),
            error_estimate: self.error_estimate * math::abs(scale),
            ..self
        }
    }
}

/// Walks the terms `kbar_n x^(2n)` for `n = 0, 1, ...` and accumulates
/// `sum_n weight(n) kbar_n x^(2n)`.
#[derive(Debug, Clone)]
pub struct SeriesAccumulator {
    n_trunc: usize,
    n: usize,
    term: f64,
    ratio: f64,
    sum: CompensatedSum,
    max_term: f64,
}

impl SeriesAccumulator {
    pub fn new(x: f64, n_trunc: usize) -> Self {
        let px = PI * x;
        SeriesAccumulator {
            n_trunc,
            n: 0,
            term: 1.0,
            ratio: -(px * px),
            sum: CompensatedSum::new(),
            max_term: 0.0,
        }
    }

    /// Current term `kbar_n x^(2n)`.
    pub fn term(&self) -> f64 {
        self.term
    }

    pub fn index(&self) -> usize {
        self.n
    }

    /// The accumulator moved on to the next term, without summing.
    pub fn advanced(mut self) -> Self {
        self.advance();
        self
    }

    fn advance(&mut self) {
        let n = self.n as f64;
        self.term *= self.ratio / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
        self.n += 1;
    }

    /// Sum `weight(n) kbar_n x^(2n)` for `n = 0..=n_trunc`, stopping early
    /// once the terms are decreasing and negligible against the largest seen.
    pub fn sum_weighted(mut self, weight: impl Fn(usize) -> f64) -> Result<SeriesValue> {
        loop {
            let w = weight(self.n);
            let weighted = w * self.term;
            self.sum.add_product(w, self.term);
            let mag = math::abs(weighted);
            if mag > self.max_term {
                self.max_term = mag;
            }
            // terms shrink once (2n+2)(2n+3) exceeds (pi x)^2
            let n = self.n as f64;
            let decreasing = (2.0 * n + 2.0) * (2.0 * n + 3.0) > -self.ratio;
            let negligible = mag <= TAIL_RATIO * self.max_term || self.term == 0.0;
            if decreasing && negligible && self.n > 0 {
                break;
            }
            if self.n >= self.n_trunc {
                if decreasing && mag <= STOP_RATIO * self.max_term {
                    break;
                }
                return Err(Error::TruncationTooShort { n_trunc: self.n_trunc, last_term: weighted });
            }
            self.advance();
        }
        let value = self.sum.value();
        // Each recurrence term carries ~n ulps of relative error; the
        // summation itself is exact to second order.
        let terms_used = self.n + 1;
        let error_estimate = f64::EPSILON * (self.sum.abs_sum() + self.max_term * terms_used as f64);
        let lost_digits = if self.max_term > 1.0 { math::log10(self.max_term) } else { 0.0 };
        Ok(SeriesValue { value, error_estimate, lost_digits, terms_used, warning: None })
    }
}

/// `kbar_n = (-1)^n pi^(2n) / (2n+1)!`, evaluated by the term recurrence.
pub fn kbar(n: usize) -> f64 {
    let mut acc = SeriesAccumulator::new(1.0, n);
    for _ in 0..n {
        acc.advance();
    }
    acc.term()
}

/// Partial sum of `sum_n kbar_n x^(2n)`, which converges to `sin(pi x)/(pi x)`.
pub fn sinc_series(x: f64, n_trunc: usize) -> Result<SeriesValue> {
    if !x.is_finite() {
        return Err(Error::NonFinite("sinc_series argument"));
    }
    let mut out = SeriesAccumulator::new(x, n_trunc).sum_weighted(|_| 1.0)?;
    if math::abs(x) > MAX_CERTIFIED_X {
        out.warning = Some(PrecisionWarning {
            lost_digits: out.lost_digits,
            reason: "argument beyond the double-precision cancellation budget (|x| > 8)",
        });
    }
    Ok(out)
}

fn check_mode_index(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("mode index must be a positive integer"));
    }
    Ok(())
}

fn with_mode_warning(mut v: SeriesValue, m: u32) -> SeriesValue {
    if m > MAX_CERTIFIED_M {
        v.warning = Some(PrecisionWarning {
            lost_digits: v.lost_digits,
            reason: "mode index beyond the certified range (m > 8)",
        });
    }
    v
}

/// `sum_n n kbar_n m^(2n)`; equals `(-1)^m / 2` for positive integer `m`.
pub fn weighted_kbar_sum(m: u32, n_trunc: usize) -> Result<SeriesValue> {
    check_mode_index(m)?;
    let v = SeriesAccumulator::new(m as f64, n_trunc).sum_weighted(|n| n as f64)?;
    Ok(with_mode_warning(v, m))
}

/// `A_m = (1/2) sum_n n kbar_n m^(2n)`.
///
/// Summed from `n = 0`; the `n = 0` term is zero because of the weight.
pub fn a_coefficient(m: u32, n_trunc: usize) -> Result<SeriesValue> {
    Ok(weighted_kbar_sum(m, n_trunc)?.map(|s| 0.5 * s, 0.5))
}

/// `B_m = 1 + 2 sum_(n>=0) (n + 1/2) kbar_n m^(2n) = 1 + 4 A_m + sinc(m)`.
///
/// The sum includes `n = 0`, which gives `1 + (-1)^m`. Starting the sum at
/// `n = 1` instead drops one unit and gives `(-1)^m`.
pub fn b_coefficient(m: u32, n_trunc: usize) -> Result<SeriesValue> {
    check_mode_index(m)?;
    let v = SeriesAccumulator::new(m as f64, n_trunc).sum_weighted(|n| 2.0 * n as f64 + 1.0)?;
    Ok(with_mode_warning(v.map(|s| 1.0 + s, 1.0), m))
}
