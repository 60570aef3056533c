//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`).

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use chronon_core::ald::{al_physical_pulse, fit_exponential_rate, integrate_al_nonrel, integrate_ald, AlState, AldParams, AldState};
use chronon_core::chronon::{classical_anomalous_moment, internal_solution, schwinger_moment, Formulation};
use chronon_core::constants::FINE_STRUCTURE;
use chronon_core::fourier::{
    el_residual_fourier, hamiltonian_closed, hamiltonian_mode_sum, hamiltonian_truncated_oracle, hamiltonian_truncated_oracle_at,
    spin_closed, spin_mode_sum, spin_truncated_oracle, FourierMotion, Mode,
};
use chronon_core::identities::{identity_tolerance, DECOMPOSITION_TOLERANCE, ORACLE_TOLERANCE};
use chronon_core::kinematics::chronon_theta0;
use chronon_core::nnm::{
    build_phase_point, canonical_momentum, hamilton_equations_residual, spin_canonical, spin_rate_check, spin_vector,
    DerivativeJet, JetSample, NnmModel,
};
use chronon_core::scenario::{integrate_scenario, summarize, ScenarioConfig, ScenarioKind};
use chronon_core::series::{a_coefficient, b_coefficient, sinc_series, weighted_kbar_sum};
use chronon_core::{ChrononParams, FieldSpec, FourVector, UnitSystem, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sign(m: u32) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn random_vec(rng: &mut impl Rng) -> Vec3 {
    Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_motion(rng: &mut impl Rng) -> FourierMotion {
    let count = rng.random_range(1..=4);
    let modes = (0..count).map(|_| Mode { cos: random_vec(rng), sin: random_vec(rng) }).collect();
    FourierMotion::center_of_mass(1.0, ChrononParams::new(1.0).unwrap(), modes).unwrap()
}

fn chronon_value() -> Outcome {
    let theta0 = chronon_theta0(&UnitSystem::si_electron()).map_err(|e| e.to_string())?;
    let gaussian = chronon_theta0(&UnitSystem::gaussian_electron()).map_err(|e| e.to_string())?;
    let rel = (theta0 / 6.266e-24 - 1.0).abs();
    check(rel < 1e-3 && (gaussian / theta0 - 1.0).abs() < 1e-9, format!("theta0 = {theta0:.4e} s (rel {rel:.1e})"))
}

fn series_identities() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=8 {
        let tol = identity_tolerance(m);
        let sinc = sinc_series(m as f64, 300).map_err(|e| e.to_string())?.value.abs();
        let weighted = (weighted_kbar_sum(m, 300).map_err(|e| e.to_string())?.value - sign(m) / 2.0).abs();
        if sinc > tol || weighted > tol {
            return Err(format!("m={m}: sinc {sinc:.2e}, weighted {weighted:.2e}, tol {tol:.0e}"));
        }
        worst = worst.max(sinc / tol).max(weighted / tol);
    }
    Ok(format!("m = 1..8, worst error {worst:.2} of tolerance"))
}

fn closed_coefficients() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=8 {
        let tol = identity_tolerance(m);
        let a = a_coefficient(m, 300).map_err(|e| e.to_string())?.value;
        let b = b_coefficient(m, 300).map_err(|e| e.to_string())?.value;
        let s = sinc_series(m as f64, 300).map_err(|e| e.to_string())?.value;
        let (ea, eb) = ((a - sign(m) / 4.0).abs(), (b - (1.0 + sign(m))).abs());
        let decomposition = (b - (1.0 + 4.0 * a + s)).abs();
        if ea > tol || eb > tol || decomposition > DECOMPOSITION_TOLERANCE {
            return Err(format!("m={m}: A err {ea:.2e}, B err {eb:.2e}, decomposition {decomposition:.2e}"));
        }
        worst = worst.max(ea / tol).max(eb / tol);
    }
    Ok(format!("A_m, B_m for m = 1..8, worst error {worst:.2} of tolerance"))
}

fn spin_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut corrected) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let mo = random_motion(&mut rng);
        let oracle = spin_truncated_oracle(&mo, 200).map_err(|e| e.to_string())?.value;
        let closed = spin_closed(&mo).map_err(|e| e.to_string())?;
        worst = worst.max((closed - oracle).norm() / oracle.norm());
        let sum = spin_mode_sum(&mo).map_err(|e| e.to_string())?;
        corrected = corrected.max((sum - oracle).norm() / oracle.norm());
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst <= ORACLE_TOLERANCE && elapsed < 5.0,
        format!("100 motions in {elapsed:.2} s, printed spin worst relative gap {worst:.3e} (mode sum {corrected:.1e})"),
    )
}

fn hamiltonian_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut phase, mut corrected) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let mo = random_motion(&mut rng);
        let oracle = hamiltonian_truncated_oracle(&mo, 200).map_err(|e| e.to_string())?.value;
        worst = worst.max((hamiltonian_closed(&mo) - oracle).abs() / oracle.abs());
        corrected = corrected.max((hamiltonian_mode_sum(&mo) - oracle).abs() / oracle.abs());
        for k in 0..10 {
            let h = hamiltonian_truncated_oracle_at(&mo, 0.37 * k as f64 + 0.11, 200).map_err(|e| e.to_string())?.value;
            phase = phase.max((h - oracle).abs() / oracle.abs());
        }
    }
    check(
        worst <= ORACLE_TOLERANCE && phase <= 1e-8,
        format!("printed form worst relative gap {worst:.3e} (mode sum {corrected:.1e}); oracle phase spread {phase:.1e}"),
    )
}

fn fourier_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let unit = |rng: &mut ChaCha8Rng| {
        let v = random_vec(rng);
        v * (1.0 / v.norm())
    };
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let modes = (0..4).map(|_| Mode { cos: unit(&mut rng), sin: unit(&mut rng) }).collect();
        let mo = FourierMotion::center_of_mass(1.0, ChrononParams::new(1.0).unwrap(), modes).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let r = el_residual_fourier(&mo, rng.random_range(0.0..3.0), 300).map_err(|e| e.to_string())?;
            worst = worst.max(r.value.euclidean_norm());
        }
    }
    check(worst < 1e-7, format!("worst residual {worst:.2e} over 100 samples, modes m = 1..4"))
}

fn internal() -> Outcome {
    let units = UnitSystem::gaussian_electron();
    let params = ChrononParams::from_units(&units).map_err(|e| e.to_string())?;
    let sol = internal_solution(&params, &units);
    let classical = classical_anomalous_moment(&units);
    let schwinger = schwinger_moment(&units, FINE_STRUCTURE);
    let (r1, r2) = ((sol.magnetic_moment / classical - 1.0).abs(), (classical / schwinger - 1.0).abs());
    check(
        sol.beta0_sq == 0.75 && sol.gamma == 2.0 && r1 < 5e-3 && r2 < 5e-3,
        format!("beta0² = {}, gamma = {}, mu = {:.4e} (classical rel {r1:.1e}, Schwinger rel {r2:.1e})", sol.beta0_sq, sol.gamma, sol.magnetic_moment),
    )
}

fn no_pre_acceleration() -> Outcome {
    let mut c = ScenarioConfig::new(ScenarioKind::EmPulse, 0.01, 1600);
    c.onset_step = 1200;
    c.velocity = Vec3::new(0.2, -0.1, 0.05);
    c.electric = Vec3::new(0.5, 0.2, 0.0);
    c.magnetic = Vec3::new(0.0, 0.3, 1.0);
    let t = integrate_scenario(&c).map_err(|e| e.to_string())?;
    let u0 = t.states[0].u.0.map(f64::to_bits);
    let before: Vec<_> = t.states.iter().filter(|s| (s.n as usize) < c.onset_step).collect();
    let exact = before.iter().all(|s| s.u.0.map(f64::to_bits) == u0);
    let after = (t.last().unwrap().u - t.states[0].u).max_abs();
    check(
        t.is_complete() && exact && before.len() >= 1000 && after > 0.0,
        format!("{} pre-onset lattice points bit-identical; post-pulse change {after:.3e}", before.len()),
    )
}

fn ald_pathologies() -> Outcome {
    let start = Instant::now();
    let p = AldParams::new(1.0, 1.0, 0.05).map_err(|e| e.to_string())?;
    let init = AldState { s: 0.0, x: FourVector::ZERO, u: FourVector::new(1.0, 0.0, 0.0, 0.0), a: FourVector::new(0.0, 1e-9, 0.0, 0.0) };
    let traj = integrate_ald(&init, &FieldSpec::zero(), &p, 8.0 * p.theta0, p.default_step()).map_err(|e| e.to_string())?;
    let times: Vec<f64> = traj.states.iter().map(|s| s.s).collect();
    let accel: Vec<f64> = traj.states.iter().map(|s| s.a[1]).collect();
    let rel_fold = fit_exponential_rate(&times, &accel).map_err(|e| e.to_string())?.e_folding_time() / p.theta0 - 1.0;

    let nr = AlState { t: 0.0, r: Vec3::ZERO, v: Vec3::ZERO, a: Vec3::new(0.0, 2e-3, 0.0) };
    let nr_traj = integrate_al_nonrel(&nr, &FieldSpec::zero(), &p, 20.0 * p.theta0, p.default_step()).map_err(|e| e.to_string())?;
    let nr_accel: Vec<f64> = nr_traj.states.iter().map(|s| s.a[1]).collect();
    let nr_fold = fit_exponential_rate(&nr_traj.times(), &nr_accel).map_err(|e| e.to_string())?.e_folding_time() / p.theta0 - 1.0;

    let onset = 1.0;
    let field = FieldSpec::pulse(onset, Vec3::new(0.02, 0.0, 0.0), Vec3::ZERO);
    let pulse = al_physical_pulse(&p, &field, onset, 10.0 * p.theta0, 2.0 * p.theta0, p.default_step(), Vec3::ZERO)
        .map_err(|e| e.to_string())?;
    let window: Vec<_> = pulse.states.iter().filter(|s| s.t <= onset + 1e-12 && s.t >= onset - 8.0 * p.theta0).collect();
    let fit = fit_exponential_rate(&window.iter().map(|s| s.t).collect::<Vec<_>>(), &window.iter().map(|s| s.a[0]).collect::<Vec<_>>())
        .map_err(|e| e.to_string())?;
    let rel_rate = fit.rate * p.theta0 - 1.0;
    let elapsed = start.elapsed().as_secs_f64();
    check(
        rel_fold.abs() < 0.01 && nr_fold.abs() < 0.01 && rel_rate.abs() < 0.05 && elapsed < 10.0,
        format!("runaway e-folding {rel_fold:+.1e} (rel), {nr_fold:+.1e} (nonrel); pre-acceleration rate {rel_rate:+.1e}; {elapsed:.2} s"),
    )
}

fn normalization() -> Outcome {
    let (mut post, mut pre) = (0.0f64, 0.0f64);
    for formulation in [Formulation::Retarded, Formulation::Advanced, Formulation::Symmetric] {
        for kind in [ScenarioKind::Free, ScenarioKind::EmPulse, ScenarioKind::Hyperbolic] {
            let mut c = ScenarioConfig::new(kind, 0.01, 500);
            c.formulation = formulation;
            c.velocity = Vec3::new(0.3, 0.1, -0.2);
            c.onset_step = 100;
            if kind != ScenarioKind::Free {
                c.electric = Vec3::new(0.5, -0.3, 0.2);
            }
            if kind == ScenarioKind::EmPulse {
                c.magnetic = Vec3::new(0.1, 0.8, -0.4);
            }
            let t = integrate_scenario(&c).map_err(|e| e.to_string())?;
            if !t.is_complete() {
                return Err(format!("{} {} stopped: {:?}", kind.as_str(), formulation.as_str(), t.failure));
            }
            let s = summarize(&c, &t);
            post = post.max(s.max_post_norm_drift);
            pre = pre.max(s.max_pre_norm_drift);
        }
    }
    check(post < 1e-12 && pre < 1e-6, format!("worst post-renormalization {post:.1e}, pre-renormalization {pre:.1e} per step"))
}

const K: [f64; 4] = [-0.7, 0.31, -0.053, 0.0047];

fn basis_jet(len: usize, i: usize, j: Option<usize>) -> DerivativeJet {
    DerivativeJet::from_fn(len, |n| {
        FourVector::new(0.0, if n == i { 1.0 } else { 0.0 }, if Some(n) == j { 1.0 } else { 0.0 }, 0.0)
    })
}

fn random_jet(rng: &mut impl Rng, len: usize) -> DerivativeJet {
    DerivativeJet::from_fn(len, |_| {
        FourVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn nnm_structure() -> Outcome {
    let model = NnmModel::new(1.3, K.to_vec()).map_err(|e| e.to_string())?;
    for i in 0..9 {
        let jet = basis_jet(9, i, None);
        let d = |n: usize| *jet.derivative(n);
        let printed = d(0) * 1.3 - d(2) * K[0] + d(4) * K[1] - d(6) * K[2] + d(8) * K[3];
        if canonical_momentum(&model, &jet, 0).map_err(|e| e.to_string())? != printed {
            return Err(format!("momentum coefficient of v^({i})"));
        }
    }
    for i in 0..8 {
        for j in (0..8).filter(|&j| j != i) {
            let jet = basis_jet(8, i, Some(j));
            let d = |n: usize| jet.derivative(n).spatial();
            let (v, a, a1, a2, a3, a4, a5, a6) = (d(0), d(1), d(2), d(3), d(4), d(5), d(6), d(7));
            let printed = v.cross(&a) * K[0]
                + (a.cross(&a1) - v.cross(&a2)) * K[1]
                + (a1.cross(&a2) - a.cross(&a3) + v.cross(&a4)) * K[2]
                + (a2.cross(&a3) - a1.cross(&a4) + a.cross(&a5) - v.cross(&a6)) * K[3];
            if (spin_vector(&model, &jet).map_err(|e| e.to_string())? - printed).norm() > 1e-15 {
                return Err(format!("spin coefficient of v^({i}) x v^({j})"));
            }
        }
    }
    // spin rate on v(tau) = sum a cos(w tau) + b sin(w tau)
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rate = 0.0f64;
    for order in 1..=4 {
        let sub = NnmModel::new(1.0, K[..order].to_vec()).map_err(|e| e.to_string())?;
        let terms: Vec<(f64, FourVector, FourVector)> = (0..3)
            .map(|_| (rng.random_range(0.3..1.7), random_jet(&mut rng, 1).entries()[0], random_jet(&mut rng, 1).entries()[0]))
            .collect();
        let h = 2e-4;
        let jets: Vec<_> = (0..9)
            .map(|i| {
                let tau = 0.4 + i as f64 * h;
                DerivativeJet::from_fn(2 * order + 1, |n| {
                    terms.iter().fold(FourVector::ZERO, |acc, (w, a, b)| {
                        let phase = w * tau + n as f64 * PI / 2.0;
                        acc + (*a * phase.cos() + *b * phase.sin()) * w.powi(n as i32)
                    })
                })
            })
            .collect();
        rate = rate.max(spin_rate_check(&sub, &jets, h).map_err(|e| e.to_string())?);
    }
    let mut canonical = 0.0f64;
    for _ in 0..200 {
        let order = rng.random_range(1..=5usize);
        let coeffs: Vec<f64> = (1..=order).map(|n| sign(n as u32) * rng.random_range(0.01..2.0)).collect();
        let m = NnmModel::new(rng.random_range(0.1..3.0), coeffs).map_err(|e| e.to_string())?;
        let jet = random_jet(&mut rng, 2 * order + 1);
        let point = build_phase_point(&m, &jet, random_jet(&mut rng, 1).entries()[0]).map_err(|e| e.to_string())?;
        let direct = spin_vector(&m, &jet).map_err(|e| e.to_string())?;
        let c = spin_canonical(&point).map_err(|e| e.to_string())?;
        canonical = canonical.max((c - direct).norm() / direct.norm().max(1.0));
    }
    check(
        rate < 1e-6 && canonical < 1e-12,
        format!("N = 4 printed forms exact; spin-rate error {rate:.1e}; canonical vs jet spin {canonical:.1e}"),
    )
}

fn hamilton_equivalence() -> Outcome {
    let model = NnmModel::new(1.0, vec![-0.25]).map_err(|e| e.to_string())?;
    let w = (-model.mass() / model.k(1)).sqrt();
    let v0 = FourVector::new(1.2, 0.3, -0.1, 0.2);
    let a = FourVector::new(0.1, 0.4, 0.0, -0.2);
    let b = FourVector::new(-0.05, 0.0, 0.3, 0.1);
    let residual = |h: f64| {
        let samples: Vec<JetSample> = (0..21)
            .map(|i| {
                let tau = 0.3 + i as f64 * h;
                let (c, s) = ((w * tau).cos(), (w * tau).sin());
                let jet = DerivativeJet::from_fn(3, |n| match n {
                    0 => v0 + a * c + b * s,
                    1 => (b * c - a * s) * w,
                    _ => (a * c + b * s) * (-w * w),
                });
                JetSample { tau, position: v0 * tau + a * (s / w) - b * (c / w), jet }
            })
            .collect();
        hamilton_equations_residual(&model, &samples)
    };
    let r: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&h| residual(h)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let ratios = [r[0] / r[1], r[1] / r[2]];
    check(
        r[2] < 1e-6 && ratios.iter().all(|q| *q > 3.5 && *q < 4.5),
        format!("residual {:.2e} at h = 1e-3, refinement ratios {:.2}, {:.2}", r[2], ratios[0], ratios[1]),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("chronon value", chronon_value),
        ("series identities", series_identities),
        ("closed-form coefficients", closed_coefficients),
        ("spin oracle equivalence", spin_oracle),
        ("Hamiltonian oracle equivalence", hamiltonian_oracle),
        ("Fourier solution validity", fourier_validity),
        ("internal solution", internal),
        ("no pre-acceleration (chronon)", no_pre_acceleration),
        ("ALD pathologies", ald_pathologies),
        ("normalization", normalization),
        ("NNM structure", nnm_structure),
        ("Hamilton/EL equivalence", hamilton_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
