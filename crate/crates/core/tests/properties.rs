use std::f64::consts::PI;

use kerrsim::driven::DriveSpec;
use kerrsim::evolution::{evolved_state, integrate_wei_norman_at, ModelParams};
use kerrsim::fock::{coherent_state, FockOperator};
use kerrsim::kerr::*;
use kerrsim::observables::{husimi_point, median5};
use kerrsim::reparam::{heisenberg_exp_mass, rho_inverse, rho_map, MassSpec};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn beta_strategy(max: f64) -> impl Strategy<Value = C64> {
    (0.05..max, 0.0..2.0 * PI).prop_map(|(r, phi)| C64::from_polar(r, phi))
}

fn mass_table() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((0.05..1.0f64, 0.2..3.0f64), 2..12).prop_map(|steps| {
        let mut t = 0.0;
        let mut times = vec![0.0];
        let mut masses = vec![1.0];
        for (dt, m) in steps {
            t += dt;
            times.push(t);
            masses.push(m);
        }
        (times, masses)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_map_is_increasing_and_invertible((times, masses) in mass_table(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let end = *times.last().unwrap();
        let m = MassSpec::tabulated(times, masses).unwrap();
        let (a, b) = if u < v { (u * end, v * end) } else { (v * end, u * end) };
        let (ra, rb) = (rho_map(&m, a).unwrap(), rho_map(&m, b).unwrap());
        prop_assert!(rb >= ra);
        if b > a + 1e-9 {
            prop_assert!(rb > ra);
        }
        let back = rho_inverse(&m, rb).unwrap();
        prop_assert!((back - b).abs() < 1e-8, "{} vs {}", back, b);
    }

    #[test]
    fn heisenberg_coefficients_are_symplectic(m0 in 0.2..5.0f64, w in 0.3..3.0f64, frac in -0.95..0.95f64) {
        let gamma = 2.0 * w * frac;
        for k in 0..100 {
            let t = 0.1 * k as f64;
            let c = heisenberg_exp_mass(m0, w, gamma, t).unwrap();
            prop_assert!((c.determinant() - 1.0).abs() < 1e-10, "t = {}: {}", t, c.determinant());
        }
    }

    #[test]
    fn kerr_states_are_poissonian(beta in beta_strategy(2.0), xi in 0.0..2.0 * PI) {
        let p = KerrStateParams::new(beta, xi);
        let m = mandel_q(p).unwrap();
        prop_assert!(m.q.abs() < 1e-9);
        prop_assert!((m.g2 - 1.0).abs() < 1e-9 / beta.norm_sqr().max(1e-2));
        let psi = kerr_state(p, p.default_truncation()).unwrap();
        let reference = coherent_state(beta, p.default_truncation()).unwrap();
        for (a, b) in psi.probabilities().iter().zip(reference.probabilities()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn kerr_state_is_an_eigenstate_of_b(beta in beta_strategy(2.0), xi in 0.0..2.0 * PI) {
        let n = 60;
        let psi = kerr_state(KerrStateParams::new(beta, xi), n).unwrap();
        let b_psi = deformed_ladder_b(xi, n).apply(&psi).unwrap();
        let expected = psi.scaled(beta);
        prop_assert!(b_psi.distance(&expected).unwrap() < 1e-10);
        let from_vacuum = deformed_displacement(beta, xi, n)
            .apply(&kerr_state(KerrStateParams::new(C64::new(0.0, 0.0), 0.0), n).unwrap())
            .unwrap();
        prop_assert!(from_vacuum.distance(&psi).unwrap() < 1e-9);
    }

    #[test]
    fn variance_closed_form_matches_moments(beta in beta_strategy(2.0), xi in 0.0..2.0 * PI) {
        let p = KerrStateParams::new(beta, xi);
        let psi = kerr_state(p, 80).unwrap();
        let (q, mom) = quadrature_variances(p);
        let (q_m, mom_m) = quadrature_ratios_from_state(&psi);
        prop_assert!((q - q_m).abs() < 1e-8, "{} vs {}", q, q_m);
        prop_assert!((mom - mom_m).abs() < 1e-8, "{} vs {}", mom, mom_m);
    }

    #[test]
    fn husimi_is_bounded(beta in beta_strategy(2.5), xi in 0.0..2.0 * PI, g in beta_strategy(6.0)) {
        let psi = kerr_state(KerrStateParams::new(beta, xi), 70).unwrap();
        let q = husimi_point(&psi, g);
        prop_assert!((0.0..=1.0 / PI + 1e-12).contains(&q));
    }

    #[test]
    fn median_filter_stays_within_range(values in prop::collection::vec(-5.0..5.0f64, 1..60)) {
        let m = median5(&values);
        prop_assert_eq!(m.len(), values.len());
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m.iter().all(|v| *v >= lo && *v <= hi));
    }

    #[test]
    fn ladder_commutator_is_identity_on_the_interior(n in 4usize..40) {
        let a = FockOperator::annihilation(n);
        let c = a.commutator(&a.dagger());
        prop_assert!(c.block_deviation(&FockOperator::identity(n), n - 1) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolved_states_stay_normalized(chi in 0.0..0.5f64, alpha in beta_strategy(2.0), t in 0.0..6.0f64) {
        let p = ModelParams::new(1.0, chi, DriveSpec::Cosine { amplitude: 1.0, frequency: 1.0 }, alpha).unwrap();
        let sol = integrate_wei_norman_at(&p, &[0.0, t], 1e-10).unwrap();
        let psi = evolved_state(&p, &sol, t, 80).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-9);
    }
}
