use proptest::prelude::*;
use zpf_core::forces::Assembly;
use zpf_core::mc::{estimate_correlator, exact_phase_average, sample_realization, McOptions, NodeRule, Observable};
use zpf_core::params::RotationConfig;
use zpf_core::selfconsistency::{balance_residual, solve_orbit, verify_regime};
use zpf_core::{Error, QuadratureSpec, DEFAULT_INV_ALPHA};

#[test]
fn orbit_is_sub_classical_at_physical_alpha() {
    let spec = QuadratureSpec::default();
    let sol = solve_orbit(1.0 / DEFAULT_INV_ALPHA, Assembly::Paper, 1, &spec).unwrap();
    assert!((sol.w - 205.86991305427193).abs() < 1e-6);
    assert!(balance_residual(sol.w, sol.alpha, &sol.coefficients).abs() < 1e-10);
    let report = verify_regime(&sol);
    assert!(report.sub_classical_radius);
    assert!(report.damping_order_one);
    assert_eq!(report.conclusion, "sub-classical-radius");
}

#[test]
fn strong_coupling_has_no_orbit() {
    let spec = QuadratureSpec::default();
    assert!(matches!(
        solve_orbit(0.5, Assembly::Paper, 1, &spec),
        Err(Error::NoRoot { .. })
    ));
}

#[test]
fn ensemble_is_deterministic_and_thread_independent() {
    let cfg = RotationConfig::with_gamma_omega(0.05, 1.0, 0.0, 1.0 / DEFAULT_INV_ALPHA).unwrap();
    let a = estimate_correlator(Observable::E3d1E3, 0.7, &cfg, 3, 64, 7).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| estimate_correlator(Observable::E3d1E3, 0.7, &cfg, 3, 64, 7).unwrap());
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = estimate_correlator(Observable::E3d1E3, 0.7, &cfg, 3, 64, 8).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn ensemble_mean_matches_phase_average() {
    let cfg = RotationConfig::with_gamma_omega(0.05, 1.0, 0.0, 1.0 / DEFAULT_INV_ALPHA).unwrap();
    let exact = exact_phase_average(Observable::EzHy, 0.9, &cfg, 3, &McOptions::for_n_max(3)).unwrap();
    let est = estimate_correlator(Observable::EzHy, 0.9, &cfg, 3, 2000, 11).unwrap();
    assert!(est.z_score(exact).abs() < 4.0, "z = {}", est.z_score(exact));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn phases_lie_in_one_period(seed in any::<u64>()) {
        let rule = NodeRule { n_theta: 4, n_phi: 8 };
        let r = sample_realization(2, &rule, seed).unwrap();
        prop_assert_eq!(r.phases.len(), 2 * rule.len() * 2);
        prop_assert!(r.phases.iter().all(|&p| (0.0..std::f64::consts::TAU).contains(&p)));
        let again = sample_realization(2, &rule, seed).unwrap();
        prop_assert_eq!(r.phases, again.phases);
    }

    #[test]
    fn weaker_coupling_gives_larger_orbit(inv in 120.0f64..400.0) {
        let spec = QuadratureSpec::default();
        let a = solve_orbit(1.0 / inv, Assembly::Paper, 1, &spec).unwrap();
        let b = solve_orbit(1.0 / (inv * 1.1), Assembly::Paper, 1, &spec).unwrap();
        prop_assert!(b.w > a.w);
        prop_assert!(a.residual.abs() < 1e-9);
    }
}
