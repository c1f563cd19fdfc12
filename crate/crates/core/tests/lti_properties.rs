use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yawtune::lti::{
    is_stable, series, to_state_space, unity_feedback, Polynomial, TransferFunction,
};
use yawtune::sim::pi_tf;
use yawtune::{default_yaw_plant, PIGains};

/// Real parts of the roots of a monic polynomial, from the companion matrix.
fn root_real_parts(coeffs: &[f64]) -> Vec<f64> {
    let lead = coeffs[0];
    let n = coeffs.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().map(|z| z.re).collect()
}

#[test]
fn routh_agrees_with_companion_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tested = 0;
    let mut stable_cases = 0;
    let mut draws = 0;
    while tested < 1000 {
        draws += 1;
        let degree = if draws % 2 == 0 { 3 } else { 4 };
        let mut c: Vec<f64> = (0..=degree).map(|_| rng.random_range(-5.0..=5.0)).collect();
        if c[0] == 0.0 {
            c[0] = 1.0;
        }
        let re = root_real_parts(&c);
        if re.iter().any(|r| r.abs() < 1e-6) {
            continue;
        }
        let oracle = re.iter().all(|&r| r < 0.0);
        let tf = TransferFunction::from_coeffs(&[1.0], &c).unwrap();
        assert_eq!(
            is_stable(&tf).unwrap(),
            oracle,
            "coefficients {c:?}, real parts {re:?}"
        );
        stable_cases += oracle as usize;
        tested += 1;
    }
    // uniform coefficients give mostly unstable polynomials; make sure both
    // branches were exercised
    assert!(stable_cases > 10, "{stable_cases}");
}

#[test]
fn routh_agrees_on_hurwitz_biased_samples() {
    // products of (s + a) and (s^2 + b s + c) factors with random signs
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let a: f64 = rng.random_range(-3.0..3.0);
        let b: f64 = rng.random_range(-3.0..3.0);
        let c: f64 = rng.random_range(0.01..5.0);
        let p = Polynomial::new(vec![1.0, a])
            .unwrap()
            .mul(&Polynomial::new(vec![1.0, b, c]).unwrap());
        let re = root_real_parts(p.coeffs());
        if re.iter().any(|r| r.abs() < 1e-6) {
            continue;
        }
        let tf = TransferFunction::new(Polynomial::constant(1.0), p).unwrap();
        assert_eq!(is_stable(&tf).unwrap(), a > 0.0 && b > 0.0);
    }
}

#[test]
fn integral_action_gives_unit_dc_gain() {
    let g = default_yaw_plant();
    for (kp, ki) in [
        (260.0, 70.0),
        (296.0, 81.0),
        (230.0, 90.0),
        (0.0, 1.0),
        (3.0, 0.5),
    ] {
        let c = pi_tf(PIGains::new(kp, ki).unwrap()).unwrap();
        let cl = unity_feedback(&series(&c, &g)).unwrap();
        assert!(
            (cl.dc_gain() - 1.0).abs() < 1e-12,
            "({kp}, {ki}) -> {}",
            cl.dc_gain()
        );
    }
}

#[test]
fn realization_recovers_reference_loops() {
    let g = default_yaw_plant();
    let mut systems = vec![g.clone()];
    for (kp, ki) in [(260.0, 70.0), (296.0, 81.0), (230.0, 90.0)] {
        let c = pi_tf(PIGains::new(kp, ki).unwrap()).unwrap();
        let open = series(&c, &g);
        systems.push(unity_feedback(&open).unwrap());
        systems.push(open);
    }
    for tf in systems {
        let back = to_state_space(&tf).to_transfer_function().unwrap();
        assert_coeffs_close(back.den().coeffs(), tf.den().coeffs(), 1e-9);
        assert_coeffs_close(back.num().coeffs(), tf.num().coeffs(), 1e-9);
    }
}

fn assert_coeffs_close(a: &[f64], b: &[f64], rel: f64) {
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= rel * scale.max(1e-300), "{a:?} vs {b:?}");
    }
}

fn poly_strategy() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-10.0f64..10.0, 1..6).prop_map(|mut c| {
        if c[0] == 0.0 {
            c[0] = 1.0;
        }
        Polynomial::new(c).unwrap()
    })
}

proptest! {
    #[test]
    fn mul_commutes(a in poly_strategy(), b in poly_strategy()) {
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_coeffs_close(ab.coeffs(), ba.coeffs(), 1e-12);
    }

    #[test]
    fn mul_associates(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        let left = a.mul(&b).mul(&c);
        let right = a.mul(&b.mul(&c));
        assert_coeffs_close(left.coeffs(), right.coeffs(), 1e-12);
    }

    #[test]
    fn mul_degree_adds(a in poly_strategy(), b in poly_strategy()) {
        prop_assert_eq!(a.mul(&b).degree(), a.degree() + b.degree());
    }

    #[test]
    fn realization_round_trip(
        den in prop::collection::vec(-5.0f64..5.0, 1..5),
        num in prop::collection::vec(-5.0f64..5.0, 1..5),
    ) {
        let mut den_c = vec![1.0];
        den_c.extend(den);
        let num_c: Vec<f64> = num.into_iter().take(den_c.len()).collect();
        let tf = TransferFunction::from_coeffs(&num_c, &den_c).unwrap();
        let ss = to_state_space(&tf);
        prop_assert_eq!(ss.order(), tf.order());
        prop_assert_eq!(ss.d() != 0.0, !tf.num().is_zero() && tf.num().degree() == tf.order());
        let back = ss.to_transfer_function().unwrap();
        assert_coeffs_close(back.den().coeffs(), tf.den().coeffs(), 1e-9);
        // numerator may shed exactly-zero leading terms differently; compare
        // by evaluation at a few points instead of coefficient lists
        for s in [0.3, 1.7, -2.9] {
            let (a, b) = (back.num().eval(s), tf.num().eval(s));
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{} vs {}", a, b);
        }
    }
}
