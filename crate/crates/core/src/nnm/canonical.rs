//! Canonical (Ostrogradsky) representation: phase points, the phase-space
//! Hamiltonian, Poisson brackets and Hamilton-equation checks.
//!
//! Coordinates are `x_[l] = x^(l)` for `l = 0..=N` (so `x_[l] = v^(l-1)` for
//! `l >= 1`) with conjugate momenta `p_[l]`. All components are stored with
//! upper indices; a derivative with respect to a lower-index component picks
//! up the metric sign, so `{x_[0]^1, p_[0]^1} = +1` and
//! `{x_[0]^0, p_[0]^0} = -1`.
//!
//! Derivatives in brackets are central differences with step
//! `h = eps^(1/3) * max(1, |coordinate|)`.

use alloc::vec::Vec;

use super::{canonical_momentum, spin_vector, DerivativeJet, NnmModel};
use crate::error::{Error, Result};
use crate::kinematics::{FourVector, Vec3};
use crate::math;

const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    coordinates: Vec<FourVector>,
    momenta: Vec<FourVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Coordinate,
    Momentum,
}

impl PhasePoint {
    pub fn new(coordinates: Vec<FourVector>, momenta: Vec<FourVector>) -> Result<Self> {
        if coordinates.len() != momenta.len() {
            return Err(Error::Shape("coordinate and momentum lists differ in length"));
        }
        if coordinates.is_empty() {
            return Err(Error::Shape("phase point needs at least one canonical pair"));
        }
        Ok(PhasePoint { coordinates, momenta })
    }

    /// Number of canonical pairs, `N + 1`.
    pub fn pairs(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinate(&self, l: usize) -> &FourVector {
        &self.coordinates[l]
    }

    pub fn momentum(&self, l: usize) -> &FourVector {
        &self.momenta[l]
    }

    pub fn coordinates(&self) -> &[FourVector] {
        &self.coordinates
    }

    pub fn momenta(&self) -> &[FourVector] {
        &self.momenta
    }

    pub fn get(&self, slot: Slot, l: usize, mu: usize) -> f64 {
        match slot {
            Slot::Coordinate => self.coordinates[l][mu],
            Slot::Momentum => self.momenta[l][mu],
        }
    }

    pub fn set(&mut self, slot: Slot, l: usize, mu: usize, value: f64) {
        match slot {
            Slot::Coordinate => self.coordinates[l][mu] = value,
            Slot::Momentum => self.momenta[l][mu] = value,
        }
    }
}

/// A scalar function on phase space.
pub type PhaseFn<'a> = dyn Fn(&PhasePoint) -> f64 + 'a;

/// Phase point from a jet: `x_[0] = position`, `x_[l] = v^(l-1)`, and
/// `p_[l]` from [`canonical_momentum`], for `l = 0..=N`.
pub fn build_phase_point(model: &NnmModel, jet: &DerivativeJet, position: FourVector) -> Result<PhasePoint> {
    let n_max = model.order();
    jet.require(2 * n_max + 1)?;
    let mut coordinates = Vec::with_capacity(n_max + 1);
    let mut momenta = Vec::with_capacity(n_max + 1);
    for l in 0..=n_max {
        coordinates.push(if l == 0 { position } else { *jet.derivative(l - 1) });
        momenta.push(canonical_momentum(model, jet, l)?);
    }
    PhasePoint::new(coordinates, momenta)
}

/// Spin in canonical form, `s = sum_(l=1..N) x_[l] × p_[l]`.
pub fn spin_canonical(point: &PhasePoint) -> Result<Vec3> {
    if point.pairs() < 2 {
        return Err(Error::Shape("canonical spin needs N >= 1"));
    }
    let mut s = Vec3::ZERO;
    for l in 1..point.pairs() {
        s += point.coordinate(l).spatial().cross(&point.momentum(l).spatial());
    }
    Ok(s)
}

/// Hamiltonian as a function of canonical variables,
///
/// ```text
/// H = sum_(l<N) p_[l]·x_[l+1] + p_[N]²/(2 k_N) - (1/2) sum_(n<N) k_n x_[n+1]²,
/// ```
///
/// obtained from `sum_l p_[l]·x'_[l] - L` with `v^(N) = p_[N]/k_N`. On a jet it
/// equals [`hamiltonian_value`](super::hamiltonian_value).
pub fn canonical_hamiltonian(model: &NnmModel, point: &PhasePoint) -> Result<f64> {
    let n_max = model.order();
    if point.pairs() != n_max + 1 {
        return Err(Error::Shape("phase point does not match model order"));
    }
    let k_top = model.k(n_max);
    if k_top == 0.0 {
        return Err(Error::Domain("highest-order coefficient must be nonzero"));
    }
    let mut h = point.momentum(n_max).square() / (2.0 * k_top);
    for l in 0..n_max {
        let next = point.coordinate(l + 1);
        h += point.momentum(l).dot(next) - 0.5 * model.k(l) * next.square();
    }
    Ok(h)
}

fn difference_step(x: f64) -> f64 {
    math::cbrt(f64::EPSILON) * if math::abs(x) > 1.0 { math::abs(x) } else { 1.0 }
}

/// Central-difference partial derivative of `f` with respect to one upper-index
/// component.
pub fn partial(f: &PhaseFn<'_>, point: &PhasePoint, slot: Slot, l: usize, mu: usize) -> Result<f64> {
    let x = point.get(slot, l, mu);
    let h = difference_step(x);
    let mut probe = point.clone();
    probe.set(slot, l, mu, x + h);
    let plus = f(&probe);
    probe.set(slot, l, mu, x - h);
    let minus = f(&probe);
    if !plus.is_finite() || !minus.is_finite() {
        return Err(Error::NonFinite("phase-space function near the evaluation point"));
    }
    Ok((plus - minus) / (2.0 * h))
}

/// Gradient with respect to lower-index components: `(df/dx_[l]mu, df/dp_[l]mu)`,
/// returned as 4-vectors indexed by `mu`.
pub fn covariant_gradient(f: &PhaseFn<'_>, point: &PhasePoint) -> Result<(Vec<FourVector>, Vec<FourVector>)> {
    let mut dx = Vec::with_capacity(point.pairs());
    let mut dp = Vec::with_capacity(point.pairs());
    for l in 0..point.pairs() {
        let mut gx = FourVector::ZERO;
        let mut gp = FourVector::ZERO;
        for mu in 0..4 {
            gx[mu] = METRIC[mu] * partial(f, point, Slot::Coordinate, l, mu)?;
            gp[mu] = METRIC[mu] * partial(f, point, Slot::Momentum, l, mu)?;
        }
        dx.push(gx);
        dp.push(gp);
    }
    Ok((dx, dp))
}

/// `{f, g} = sum_l (df/dx_[l]^mu dg/dp_[l]mu - df/dp_[l]^mu dg/dx_[l]mu)`.
pub fn poisson_bracket(f: &PhaseFn<'_>, g: &PhaseFn<'_>, point: &PhasePoint) -> Result<f64> {
    let mut total = 0.0;
    for l in 0..point.pairs() {
        for mu in 0..4 {
            let fx = partial(f, point, Slot::Coordinate, l, mu)?;
            let fp = partial(f, point, Slot::Momentum, l, mu)?;
            let gx = partial(g, point, Slot::Coordinate, l, mu)?;
            let gp = partial(g, point, Slot::Momentum, l, mu)?;
            total += METRIC[mu] * (fx * gp - fp * gx);
        }
    }
    Ok(total)
}

fn hamiltonian_fn(model: &NnmModel) -> impl Fn(&PhasePoint) -> f64 + '_ {
    move |p: &PhasePoint| canonical_hamiltonian(model, p).unwrap_or(f64::NAN)
}

fn explicit_time_derivative(g: &dyn Fn(f64, &PhasePoint) -> f64, tau: f64, point: &PhasePoint) -> Result<f64> {
    let h = difference_step(tau);
    let d = (g(tau + h, point) - g(tau - h, point)) / (2.0 * h);
    if !d.is_finite() {
        return Err(Error::NonFinite("explicit time derivative"));
    }
    Ok(d)
}

/// `dG/dtau + {H, G}`, with the bracket in exactly this order.
///
/// With the bracket defined above, `{H, G} = -{G, H}`, so for a coordinate
/// this gives the negative of its Hamilton-equation rate; see
/// [`time_derivative`] for the `{G, H}` ordering.
pub fn evolve_via_bracket(
    model: &NnmModel,
    g: &dyn Fn(f64, &PhasePoint) -> f64,
    tau: f64,
    point: &PhasePoint,
) -> Result<f64> {
    canonical_hamiltonian(model, point)?;
    let h = hamiltonian_fn(model);
    let g_now = |p: &PhasePoint| g(tau, p);
    Ok(explicit_time_derivative(g, tau, point)? + poisson_bracket(&h, &g_now, point)?)
}

/// `dG/dtau + {G, H}`, the rate that agrees with the Hamilton equations.
pub fn time_derivative(
    model: &NnmModel,
    g: &dyn Fn(f64, &PhasePoint) -> f64,
    tau: f64,
    point: &PhasePoint,
) -> Result<f64> {
    canonical_hamiltonian(model, point)?;
    let h = hamiltonian_fn(model);
    let g_now = |p: &PhasePoint| g(tau, p);
    Ok(explicit_time_derivative(g, tau, point)? + poisson_bracket(&g_now, &h, point)?)
}

/// One sample of a trajectory: proper time, position and derivative jet.
#[derive(Debug, Clone, PartialEq)]
pub struct JetSample {
    pub tau: f64,
    pub position: FourVector,
    pub jet: DerivativeJet,
}

fn sample_spacing(samples: &[JetSample]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, available: samples.len() });
    }
    let step = samples[1].tau - samples[0].tau;
    if !(step > 0.0) {
        return Err(Error::Domain("samples must be ordered by increasing tau"));
    }
    for w in samples.windows(2) {
        if math::abs((w[1].tau - w[0].tau) - step) > 1e-9 * step {
            return Err(Error::Domain("samples must be evenly spaced"));
        }
    }
    Ok(step)
}

/// Largest violation of `x'_[l] = dH/dp_[l]` and `p'_[l] = -dH/dx_[l]` over
/// the interior samples. Rates along the trajectory are central differences
/// across neighbouring samples; the Hamiltonian gradient is a central
/// difference in phase space.
pub fn hamilton_equations_residual(model: &NnmModel, samples: &[JetSample]) -> Result<f64> {
    let step = sample_spacing(samples)?;
    let points = samples
        .iter()
        .map(|s| build_phase_point(model, &s.jet, s.position))
        .collect::<Result<Vec<_>>>()?;
    canonical_hamiltonian(model, &points[0])?;
    let h = hamiltonian_fn(model);
    let mut worst: f64 = 0.0;
    for i in 1..points.len() - 1 {
        let (dh_dx, dh_dp) = covariant_gradient(&h, &points[i])?;
        for l in 0..points[i].pairs() {
            let x_rate = (*points[i + 1].coordinate(l) - *points[i - 1].coordinate(l)) * (0.5 / step);
            let p_rate = (*points[i + 1].momentum(l) - *points[i - 1].momentum(l)) * (0.5 / step);
            worst = worst.max((x_rate - dh_dp[l]).max_abs());
            worst = worst.max((p_rate + dh_dx[l]).max_abs());
        }
    }
    Ok(worst)
}

/// Largest `|ds/dtau - p_[0] × v|` over interior samples of evenly spaced
/// jets, with `ds/dtau` from central differences of [`spin_vector`].
pub fn spin_rate_check(model: &NnmModel, jets: &[DerivativeJet], step: f64) -> Result<f64> {
    if jets.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, available: jets.len() });
    }
    if !(step > 0.0) {
        return Err(Error::Domain("sample spacing must be positive"));
    }
    let spins = jets.iter().map(|j| spin_vector(model, j)).collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 1..jets.len() - 1 {
        let rate = (spins[i + 1] - spins[i - 1]) * (0.5 / step);
        let p0 = canonical_momentum(model, &jets[i], 0)?;
        let expected = p0.spatial().cross(&jets[i].derivative(0).spatial());
        worst = worst.max((rate - expected).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnm::hamiltonian_value;
    use alloc::vec;

    fn fv(t: f64, x: f64, y: f64, z: f64) -> FourVector {
        FourVector::new(t, x, y, z)
    }

    #[test]
    fn phase_point_shapes() {
        let m0 = NnmModel::newtonian(2.0).unwrap();
        let v = fv(1.0, 0.1, 0.0, 0.0);
        let x = fv(0.0, 1.0, 2.0, 3.0);
        let pp = build_phase_point(&m0, &DerivativeJet::new(vec![v]), x).unwrap();
        assert_eq!(pp.pairs(), 1);
        assert_eq!(*pp.coordinate(0), x);
        assert_eq!(*pp.momentum(0), v * 2.0);

        let k1 = -0.2;
        let m1 = NnmModel::new(1.0, vec![k1]).unwrap();
        let a = fv(0.0, 0.3, 0.1, 0.0);
        let jet = DerivativeJet::new(vec![v, a, fv(0.0, 0.5, 0.0, 0.0)]);
        let pp = build_phase_point(&m1, &jet, x).unwrap();
        assert_eq!(pp.pairs(), 2);
        assert_eq!(*pp.coordinate(1), v);
        assert_eq!(*pp.momentum(1), a * k1);
        assert_eq!(*pp.momentum(0), v - *jet.derivative(2) * k1);
        assert!(PhasePoint::new(vec![x], vec![]).is_err());
    }

    #[test]
    fn canonical_spin_n1() {
        let k1 = 0.7;
        let m1 = NnmModel::new(1.0, vec![k1]).unwrap();
        let jet = DerivativeJet::new(vec![fv(1.0, 0.2, 0.3, 0.0), fv(0.0, 0.0, 0.4, 0.5), fv(0.0, 1.0, 0.0, 0.0)]);
        let pp = build_phase_point(&m1, &jet, FourVector::ZERO).unwrap();
        let s = spin_canonical(&pp).unwrap();
        let expected = jet.derivative(0).spatial().cross(&jet.derivative(1).spatial()) * k1;
        assert!((s - expected).norm() < 1e-16);
        assert!((s - spin_vector(&m1, &jet).unwrap()).norm() < 1e-15);

        let zero_higher = PhasePoint::new(vec![fv(0.0, 1.0, 2.0, 3.0), FourVector::ZERO], vec![fv(1.0, 1.0, 1.0, 1.0); 2]).unwrap();
        assert_eq!(spin_canonical(&zero_higher).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn canonical_hamiltonian_matches_jet_form() {
        let model = NnmModel::new(1.3, vec![-0.4, 0.05, -0.002]).unwrap();
        let jet = DerivativeJet::from_fn(7, |i| {
            let s = i as f64;
            fv(1.0 + 0.1 * s, 0.3 - 0.05 * s * s, 0.2 * s, -0.1 + 0.01 * s)
        });
        let pp = build_phase_point(&model, &jet, fv(0.5, 1.0, 2.0, 3.0)).unwrap();
        let a = canonical_hamiltonian(&model, &pp).unwrap();
        let b = hamiltonian_value(&model, &jet).unwrap();
        assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn bracket_conventions() {
        let model = NnmModel::new(1.0, vec![-0.5]).unwrap();
        let pp = PhasePoint::new(
            vec![fv(0.3, 1.0, -2.0, 0.5), fv(1.1, 0.2, 0.1, 0.0)],
            vec![fv(1.2, 0.4, 0.0, -0.3), fv(0.0, 0.1, 0.2, 0.3)],
        )
        .unwrap();
        let x1 = |p: &PhasePoint| p.coordinate(0)[1];
        let p1 = |p: &PhasePoint| p.momentum(0)[1];
        let x0 = |p: &PhasePoint| p.coordinate(0)[0];
        let p0 = |p: &PhasePoint| p.momentum(0)[0];
        assert!((poisson_bracket(&x1, &p1, &pp).unwrap() - 1.0).abs() < 1e-9);
        assert!((poisson_bracket(&x0, &p0, &pp).unwrap() + 1.0).abs() < 1e-9);
        assert_eq!(poisson_bracket(&x1, &x1, &pp).unwrap(), 0.0);
        let h = |p: &PhasePoint| canonical_hamiltonian(&model, p).unwrap();
        assert!(poisson_bracket(&h, &p1, &pp).unwrap().abs() < 1e-9);
    }

    #[test]
    fn bracket_rejects_non_finite() {
        let pp = PhasePoint::new(vec![fv(0.0, 0.0, 0.0, 0.0)], vec![fv(1.0, 0.0, 0.0, 0.0)]).unwrap();
        let bad = |p: &PhasePoint| if p.coordinate(0)[1] > 0.0 { f64::INFINITY } else { 0.0 };
        let ok = |p: &PhasePoint| p.momentum(0)[1];
        assert!(matches!(poisson_bracket(&bad, &ok, &pp), Err(Error::NonFinite(_))));
    }

    #[test]
    fn evolution_orderings() {
        let model = NnmModel::new(1.0, vec![-0.5]).unwrap();
        let pp = PhasePoint::new(
            vec![fv(0.3, 1.0, -2.0, 0.5), fv(1.1, 0.2, 0.1, 0.0)],
            vec![fv(1.2, 0.4, 0.0, -0.3), fv(0.0, 0.1, 0.2, 0.3)],
        )
        .unwrap();
        let h = |_: f64, p: &PhasePoint| canonical_hamiltonian(&model, p).unwrap();
        assert!(evolve_via_bracket(&model, &h, 0.0, &pp).unwrap().abs() < 1e-9);
        let p1 = |_: f64, p: &PhasePoint| p.momentum(0)[1];
        assert!(evolve_via_bracket(&model, &p1, 0.0, &pp).unwrap().abs() < 1e-9);
        // dx/dtau = x_[1] by Hamilton's equation
        let x1 = |_: f64, p: &PhasePoint| p.coordinate(0)[1];
        let rate = pp.coordinate(1)[1];
        assert!((time_derivative(&model, &x1, 0.0, &pp).unwrap() - rate).abs() < 1e-9);
        assert!((evolve_via_bracket(&model, &x1, 0.0, &pp).unwrap() + rate).abs() < 1e-9);
        // explicit time dependence enters additively
        let xt = |t: f64, p: &PhasePoint| p.coordinate(0)[1] + 3.0 * t;
        assert!((time_derivative(&model, &xt, 0.5, &pp).unwrap() - rate - 3.0).abs() < 1e-8);
    }

    #[test]
    fn residual_and_rate_need_three_samples() {
        let model = NnmModel::newtonian(1.0).unwrap();
        let s = JetSample { tau: 0.0, position: FourVector::ZERO, jet: DerivativeJet::zero(1) };
        assert!(matches!(
            hamilton_equations_residual(&model, &[s.clone(), s]),
            Err(Error::InsufficientSamples { needed: 3, available: 2 })
        ));
        assert!(spin_rate_check(&model, &[DerivativeJet::zero(1)], 0.1).is_err());
    }

    #[test]
    fn uniform_motion_residuals_vanish() {
        let model = NnmModel::caldirola(1.0, 0.8, 2).unwrap();
        let v = fv(1.25, 0.75, 0.0, 0.0);
        let step = 0.01;
        let samples: Vec<_> = (0..5)
            .map(|i| {
                let tau = i as f64 * step;
                let mut entries = vec![FourVector::ZERO; 5];
                entries[0] = v;
                JetSample { tau, position: v * tau, jet: DerivativeJet::new(entries) }
            })
            .collect();
        assert!(hamilton_equations_residual(&model, &samples).unwrap() < 1e-10);
        let jets: Vec<_> = samples.iter().map(|s| s.jet.clone()).collect();
        assert_eq!(spin_rate_check(&model, &jets, step).unwrap(), 0.0);
    }
}
