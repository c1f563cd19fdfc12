use proptest::prelude::*;
use yawtune::lti::{series, unity_feedback, TransferFunction};
use yawtune::sim::{pi_tf, SimConfig};
use yawtune::{default_yaw_plant, simulate_pi_loop, simulate_step, PIGains};

const REFERENCE_GAINS: [(f64, f64); 3] = [(260.0, 70.0), (296.0, 81.0), (230.0, 90.0)];

/// Unit step response of wn^2 / (s^2 + 2 zeta wn s + wn^2), 0 < zeta < 1.
fn underdamped_step(zeta: f64, wn: f64, t: f64) -> f64 {
    let wd = wn * (1.0 - zeta * zeta).sqrt();
    let phi = (1.0 - zeta * zeta).sqrt().atan2(zeta);
    1.0 - (-zeta * wn * t).exp() / (1.0 - zeta * zeta).sqrt() * (wd * t + phi).sin()
}

#[test]
fn rk4_matches_closed_form_second_order() {
    let (zeta, wn) = (0.5, 2.0);
    let sys = TransferFunction::from_coeffs(&[wn * wn], &[1.0, 2.0 * zeta * wn, wn * wn]).unwrap();
    let tr = simulate_step(&sys, &SimConfig::with_horizon(10.0)).unwrap();
    let worst = tr
        .t()
        .iter()
        .zip(tr.y())
        .map(|(&t, &y)| (y - underdamped_step(zeta, wn, t)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "max error {worst}");
}

#[test]
fn time_domain_loop_matches_algebraic_closed_loop() {
    let plant = default_yaw_plant();
    let cfg = SimConfig::default();
    for (kp, ki) in REFERENCE_GAINS {
        let gains = PIGains::new(kp, ki).unwrap();
        let loop_trace = simulate_pi_loop(&plant, gains, &cfg).unwrap();
        let cl = unity_feedback(&series(&pi_tf(gains).unwrap(), &plant)).unwrap();
        let tf_trace = simulate_step(&cl, &cfg).unwrap();
        assert_eq!(loop_trace.len(), tf_trace.len());
        for (a, b) in loop_trace.y().iter().zip(tf_trace.y()) {
            assert!((a - b).abs() < 1e-6, "({kp}, {ki}): {a} vs {b}");
        }
    }
}

#[test]
fn integral_action_removes_steady_state_error() {
    let cfg = SimConfig::with_horizon(20.0);
    for (kp, ki) in REFERENCE_GAINS {
        let tr =
            simulate_pi_loop(&default_yaw_plant(), PIGains::new(kp, ki).unwrap(), &cfg).unwrap();
        let last = *tr.y().last().unwrap();
        assert!((1.0 - last).abs() < 0.005, "({kp}, {ki}) -> y(20) = {last}");
    }
}

#[test]
fn trace_shape() {
    let cfg = SimConfig::default();
    let tr = simulate_pi_loop(
        &default_yaw_plant(),
        PIGains::new(260.0, 70.0).unwrap(),
        &cfg,
    )
    .unwrap();
    assert_eq!(tr.len(), 15_001);
    assert_eq!(tr.t_final(), 15.0);
    assert!(tr
        .samples()
        .all(|s| s.e == s.r - s.y && s.y.is_finite() && s.u.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn doubling_reference_doubles_output(kp in 0.0f64..500.0, ki in 0.0f64..200.0, amp in 0.1f64..5.0) {
        let plant = default_yaw_plant();
        let gains = PIGains::new(kp, ki).unwrap();
        let base = SimConfig { reference_amplitude: amp, t_final: 5.0, ..SimConfig::default() };
        let double = SimConfig { reference_amplitude: 2.0 * amp, ..base };
        let a = simulate_pi_loop(&plant, gains, &base);
        let b = simulate_pi_loop(&plant, gains, &double);
        if let (Ok(a), Ok(b)) = (a, b) {
            let scale = a.y().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.y().iter().zip(b.y()) {
                prop_assert!((2.0 * x - y).abs() <= 1e-9 * scale.max(1e-12));
            }
        }
    }

    #[test]
    fn error_identity_is_exact(kp in 0.0f64..500.0, ki in 0.0f64..200.0, sat in prop::option::of(1.0f64..100.0)) {
        let cfg = SimConfig { t_final: 3.0, saturation: sat, ..SimConfig::default() };
        if let Ok(tr) = simulate_pi_loop(&default_yaw_plant(), PIGains::new(kp, ki).unwrap(), &cfg) {
            for s in tr.samples() {
                prop_assert_eq!(s.e, s.r - s.y);
            }
            if let Some(limit) = sat {
                prop_assert!(tr.u().iter().all(|u| u.abs() <= limit));
            }
        }
    }
}
