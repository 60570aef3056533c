use chronon_core::ald::{
    abraham_vector, al_physical_pulse, fit_exponential_rate, integrate_al_nonrel, integrate_ald, reaction_force,
    AlState, AldParams, AldState, Termination,
};
use chronon_core::{FieldSpec, FourVector, Vec3};

fn params() -> AldParams {
    AldParams::new(1.0, 1.0, 0.05).unwrap()
}

fn at_rest(a: FourVector) -> AldState {
    AldState { s: 0.0, x: FourVector::ZERO, u: FourVector::new(1.0, 0.0, 0.0, 0.0), a }
}

#[test]
fn relativistic_runaway_e_folds_in_theta0() {
    let p = params();
    let init = at_rest(FourVector::new(0.0, 1e-9, 0.0, 0.0));
    let traj = integrate_ald(&init, &FieldSpec::zero(), &p, 8.0 * p.theta0, p.default_step()).unwrap();
    assert_eq!(traj.termination, Termination::Completed);
    let times: Vec<f64> = traj.states.iter().map(|s| s.s).collect();
    let accel: Vec<f64> = traj.states.iter().map(|s| s.a[1]).collect();
    let fit = fit_exponential_rate(&times, &accel).unwrap();
    assert!((fit.e_folding_time() / p.theta0 - 1.0).abs() < 0.01, "{}", fit.e_folding_time());
}

#[test]
fn nonrelativistic_runaway_e_folds_in_theta0() {
    let p = params();
    let init = AlState { t: 0.0, r: Vec3::ZERO, v: Vec3::ZERO, a: Vec3::new(0.0, 2e-3, 0.0) };
    let traj = integrate_al_nonrel(&init, &FieldSpec::zero(), &p, 20.0 * p.theta0, p.default_step()).unwrap();
    let accel: Vec<f64> = traj.states.iter().map(|s| s.a[1]).collect();
    let fit = fit_exponential_rate(&traj.times(), &accel).unwrap();
    assert!((fit.e_folding_time() / p.theta0 - 1.0).abs() < 0.01);
    // and keeps growing until it overflows
    let long = integrate_al_nonrel(&init, &FieldSpec::zero(), &p, 2000.0 * p.theta0, p.default_step()).unwrap();
    assert_eq!(long.termination, Termination::Overflow);
}

fn driven_final_u(step: f64) -> FourVector {
    let p = params();
    let field = FieldSpec::uniform(Vec3::new(0.3, 0.1, 0.0), Vec3::new(0.0, 0.0, 0.8));
    let u = FourVector::from_velocity(Vec3::new(0.2, 0.0, 0.1)).unwrap();
    // seed on the physical branch, a ~ (e/m) F u
    let fu = field.tensor(0.0).apply(&u);
    let a = fu - u * (fu.dot(&u) / u.square());
    let init = AldState { s: 0.0, x: FourVector::ZERO, u, a };
    integrate_ald(&init, &field, &p, 0.4, step).unwrap().states.last().unwrap().u
}

#[test]
fn rk4_converges_at_least_at_third_order() {
    let reference = driven_final_u(1e-4);
    let err = |h: f64| (driven_final_u(h) - reference).max_abs();
    let (e1, e2) = (err(4e-3), err(2e-3));
    assert!(e1 / e2 > 8.0, "ratio {}", e1 / e2);
}

#[test]
fn normalization_drift_is_fourth_order() {
    let drift = |h: f64| {
        let p = params();
        let field = FieldSpec::uniform(Vec3::new(0.3, 0.1, 0.0), Vec3::new(0.0, 0.0, 0.8));
        let u = FourVector::from_velocity(Vec3::new(0.2, 0.0, 0.1)).unwrap();
        let fu = field.tensor(0.0).apply(&u);
        let init = AldState { s: 0.0, x: FourVector::ZERO, u, a: fu };
        let traj = integrate_ald(&init, &field, &p, 0.4, h).unwrap();
        traj.states.iter().map(|s| (s.u.square() + 1.0).abs()).fold(0.0, f64::max)
    };
    let (d1, d2) = (drift(4e-3), drift(2e-3));
    assert!(d1 / d2 > 12.0 && d1 / d2 < 20.0, "ratio {}", d1 / d2);
}

#[test]
fn abraham_vector_is_orthogonal_along_a_trajectory() {
    let p = params();
    let field = FieldSpec::uniform(Vec3::new(0.5, 0.0, 0.2), Vec3::new(0.3, 0.0, 0.0));
    let init = at_rest(FourVector::new(0.0, 0.5, 0.0, 0.2));
    let traj = integrate_ald(&init, &field, &p, 0.5, p.default_step()).unwrap();
    for s in &traj.states {
        let gamma = abraham_vector(&p, &s.u, &s.jerk(&p, &field));
        assert!(gamma.dot(&s.u).abs() <= 1e-13 * gamma.max_abs().max(1e-300) * s.u.max_abs());
    }
}

#[test]
fn reaction_force_is_m_theta0_times_jerk() {
    let p = params();
    let field = FieldSpec::oscillating(3.0, Vec3::new(0.4, -0.2, 0.0), Vec3::new(0.0, 0.0, 0.5));
    let init = AlState { t: 0.0, r: Vec3::ZERO, v: Vec3::new(0.1, 0.0, 0.0), a: Vec3::new(0.4, -0.25, 0.0) };
    let h = p.default_step();
    let traj = integrate_al_nonrel(&init, &field, &p, 0.3, h).unwrap();
    let jerks: Vec<Vec3> = traj
        .states
        .windows(5)
        .map(|w| (w[0].a - w[1].a * 8.0 + w[3].a * 8.0 - w[4].a) * (p.mass * p.theta0 / (12.0 * h)))
        .collect();
    let scale = jerks.iter().map(|j| j.norm()).fold(0.0, f64::max);
    for (w, expected) in traj.states.windows(5).zip(&jerks) {
        // five-point central difference of the integrated acceleration
        let got = reaction_force(&p, &field, &w[2]);
        assert!((got - *expected).norm() <= 1e-6 * scale, "{got:?} vs {expected:?}");
    }
}

#[test]
fn pulse_pre_acceleration_decays_at_one_over_theta0() {
    let p = params();
    let onset = 1.0;
    let field = FieldSpec::pulse(onset, Vec3::new(0.02, 0.0, 0.0), Vec3::ZERO);
    let traj = al_physical_pulse(&p, &field, onset, 10.0 * p.theta0, 2.0 * p.theta0, p.default_step(), Vec3::ZERO).unwrap();
    let before: Vec<_> = traj.states.iter().filter(|s| s.t <= onset + 1e-12).collect();
    let at = |t: f64| before.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs())).unwrap().a[0];
    let ratio = at(onset - 5.0 * p.theta0) / at(onset);
    assert!((ratio / (-5.0f64).exp() - 1.0).abs() < 0.05, "{ratio}");
    let window: Vec<_> = before.iter().filter(|s| s.t >= onset - 8.0 * p.theta0).collect();
    let fit = fit_exponential_rate(&window.iter().map(|s| s.t).collect::<Vec<_>>(), &window.iter().map(|s| s.a[0]).collect::<Vec<_>>()).unwrap();
    assert!((fit.rate * p.theta0 - 1.0).abs() < 0.05, "{}", fit.rate);
    // the acceleration anticipates the force: already nonzero before onset
    assert!(at(onset - p.theta0) > 0.0);
}

#[test]
fn zero_amplitude_pulse_stays_inertial() {
    let p = params();
    let field = FieldSpec::pulse(1.0, Vec3::ZERO, Vec3::ZERO);
    let v = Vec3::new(0.1, 0.0, 0.0);
    let traj = al_physical_pulse(&p, &field, 1.0, 5.0 * p.theta0, p.theta0, p.default_step(), v).unwrap();
    assert!(traj.states.iter().all(|s| s.a == Vec3::ZERO && s.v == v));
}
