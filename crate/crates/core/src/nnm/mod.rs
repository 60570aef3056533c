//! Order-N non-Newtonian mechanics: a free particle whose Lagrangian
//! contains proper-time derivatives of the velocity up to order `N`,
//!
//! ```text
//! L = sum_(n=0..N) (1/2) k_n v^(n)·v^(n),   k_0 = M.
//! ```
//!
//! Every formula here takes a [`DerivativeJet`], the list
//! `v^(0), v^(1), ..., v^(K)` at one instant. Operations check the jet is
//! long enough and never pad it with zeros.

mod canonical;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kinematics::{FourVector, Vec3};

pub use canonical::*;

/// `(-1)^n` as a float.
#[inline]
fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnmModel {
    mass: f64,
    /// `k_1 ..= k_N`.
    coefficients: Vec<f64>,
}

impl NnmModel {
    /// Model with user-supplied `k_1..k_N`. Coefficients are accepted as
    /// given; a warning is logged when their signs do not alternate.
    pub fn new(mass: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !mass.is_finite() || coefficients.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite("model coefficients"));
        }
        let model = NnmModel { mass, coefficients };
        if !model.signs_alternate() {
            log::warn!("NNM coefficients do not alternate in sign; oscillatory solutions are not guaranteed");
        }
        Ok(model)
    }

    pub fn newtonian(mass: f64) -> Result<Self> {
        Self::new(mass, Vec::new())
    }

    /// Caldirola coefficients `k_n = (-1)^n M tau0^(2n) / (2n+1)!`, truncated
    /// at `order`. Built by recurrence; deep coefficients underflow to zero.
    pub fn caldirola(mass: f64, tau0: f64, order: usize) -> Result<Self> {
        if !(tau0 > 0.0) || !tau0.is_finite() {
            return Err(Error::Domain("tau0 must be positive and finite"));
        }
        let t2 = tau0 * tau0;
        let mut k = mass;
        let coefficients = (1..=order)
            .map(|n| {
                let n = n as f64;
                k *= -t2 / ((2.0 * n) * (2.0 * n + 1.0));
                k
            })
            .collect();
        Ok(NnmModel { mass, coefficients })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `k_n`, with `k_0 = M`.
    pub fn k(&self, n: usize) -> f64 {
        if n == 0 {
            self.mass
        } else {
            self.coefficients[n - 1]
        }
    }

    pub fn signs_alternate(&self) -> bool {
        (0..self.order()).all(|n| self.k(n) * self.k(n + 1) <= 0.0)
    }
}

/// Proper-time derivatives `v^(0..=K)` of the 4-velocity at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeJet {
    entries: Vec<FourVector>,
}

impl DerivativeJet {
    pub fn new(entries: Vec<FourVector>) -> Self {
        DerivativeJet { entries }
    }

    pub fn zero(len: usize) -> Self {
        DerivativeJet { entries: alloc::vec![FourVector::ZERO; len] }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> FourVector) -> Self {
        DerivativeJet { entries: (0..len).map(f).collect() }
    }

    /// Number of entries, `K + 1`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FourVector] {
        &self.entries
    }

    /// `v^(n)`.
    pub fn derivative(&self, n: usize) -> &FourVector {
        &self.entries[n]
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if self.entries.len() < needed {
            return Err(Error::JetTooShort { needed, available: self.entries.len() });
        }
        Ok(())
    }
}

impl core::ops::Add for &DerivativeJet {
    type Output = DerivativeJet;
    fn add(self, rhs: &DerivativeJet) -> DerivativeJet {
        let len = self.len().min(rhs.len());
        DerivativeJet::from_fn(len, |i| self.entries[i] + rhs.entries[i])
    }
}

/// Antisymmetric spin tensor `S_mu_nu` (covariant indices).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinTensor(pub [[f64; 4]; 4]);

impl SpinTensor {
    /// `s_i = (1/2) eps_ijk S_jk`.
    pub fn spin_vector(&self) -> Vec3 {
        let s = &self.0;
        Vec3::new(s[2][3], s[3][1], s[1][2])
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.0[i][j] + self.0[j][i] == 0.0))
    }
}

/// `L = sum_(n=0..N) (1/2) k_n v^(n)·v^(n)`.
pub fn lagrangian_value(model: &NnmModel, jet: &DerivativeJet) -> Result<f64> {
    let n_max = model.order();
    jet.require(n_max + 1)?;
    Ok((0..=n_max).map(|n| 0.5 * model.k(n) * jet.derivative(n).square()).sum())
}

/// Euler–Lagrange residual `M a + sum_(n=1..N) (-1)^n k_n a^(2n)`, where
/// `a^(j) = v^(j+1)`. Needs `v^(0..=2N+1)`.
pub fn eom_residual(model: &NnmModel, jet: &DerivativeJet) -> Result<FourVector> {
    let n_max = model.order();
    jet.require(2 * n_max + 2)?;
    let mut out = *jet.derivative(1) * model.mass();
    for n in 1..=n_max {
        out += *jet.derivative(2 * n + 1) * (parity(n) * model.k(n));
    }
    Ok(out)
}

/// `p_[l] = sum_(n=l..N) (-1)^(n-l) k_n v^(2n-l)`, conjugate to `x^(l)`.
/// `l = 0` is the conserved total momentum.
pub fn canonical_momentum(model: &NnmModel, jet: &DerivativeJet, l: usize) -> Result<FourVector> {
    let n_max = model.order();
    if l > n_max {
        return Err(Error::OrderIndexOutOfRange { index: l, order: n_max });
    }
    jet.require(2 * n_max - l + 1)?;
    let mut out = FourVector::ZERO;
    for n in l..=n_max {
        out += *jet.derivative(2 * n - l) * (parity(n - l) * model.k(n));
    }
    Ok(out)
}

/// Noether spin tensor
/// `S_mu_nu = sum_n k_n sum_(l<n) (-1)^(n-l-1) (v_mu^(l) v_nu^(2n-l-1) - v_nu^(l) v_mu^(2n-l-1))`.
pub fn spin_tensor(model: &NnmModel, jet: &DerivativeJet) -> Result<SpinTensor> {
    let n_max = model.order();
    jet.require(2 * n_max)?;
    let mut s = [[0.0; 4]; 4];
    for n in 1..=n_max {
        let k = model.k(n);
        for l in 0..n {
            let c = k * parity(n - l - 1);
            let a = jet.derivative(l).lower();
            let b = jet.derivative(2 * n - l - 1).lower();
            for mu in 0..4 {
                for nu in (mu + 1)..4 {
                    let w = c * (a[mu] * b[nu] - a[nu] * b[mu]);
                    s[mu][nu] += w;
                    s[nu][mu] -= w;
                }
            }
        }
    }
    Ok(SpinTensor(s))
}

/// Spin 3-vector `s = sum_n k_n sum_(l<n) (-1)^(n-l-1) v^(l) × v^(2n-l-1)`.
pub fn spin_vector(model: &NnmModel, jet: &DerivativeJet) -> Result<Vec3> {
    let n_max = model.order();
    jet.require(2 * n_max)?;
    let mut s = Vec3::ZERO;
    for n in 1..=n_max {
        let mut inner = Vec3::ZERO;
        for l in 0..n {
            let cross = jet.derivative(l).spatial().cross(&jet.derivative(2 * n - l - 1).spatial());
            inner += cross * parity(n - l - 1);
        }
        s += inner * model.k(n);
    }
    Ok(s)
}

/// Conserved Hamiltonian in jet form,
/// `H = (1/2) M v² + sum_n k_n [ (1/2) v^(n)² + sum_(l<n) (-1)^(n-l) v^(l)·v^(2n-l) ]`.
pub fn hamiltonian_value(model: &NnmModel, jet: &DerivativeJet) -> Result<f64> {
    let n_max = model.order();
    jet.require(2 * n_max + 1)?;
    let mut h = 0.5 * model.mass() * jet.derivative(0).square();
    for n in 1..=n_max {
        let mut bracket = 0.5 * jet.derivative(n).square();
        for l in 0..n {
            bracket += parity(n - l) * jet.derivative(l).dot(jet.derivative(2 * n - l));
        }
        h += model.k(n) * bracket;
    }
    Ok(h)
}
