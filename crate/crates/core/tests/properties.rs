use kato_lab::exponents::{self, Scenario};
use kato_lab::lab::{fit_power_law, SweepResult};
use kato_lab::odi::{c0, certify_lemma1, integrate_extremal, ExtremalControls, OdiProblem};
use kato_lab::report::{Command, ExperimentConfig, ExponentsConfig, Tolerances};
use proptest::prelude::*;

/// ODI parameters of the wave problem: growth `t^{n+1-(n-1)p/2}` and the
/// Hölder weight `(t+R)^{-n(p-1)}`.
fn wave_parameters(n: u32, p: f64) -> (f64, f64) {
    let n = n as f64;
    (n + 1.0 - (n - 1.0) * p / 2.0, n * (p - 1.0))
}

proptest! {
    #[test]
    fn gamma_vanishes_at_p0(n in 2u32..200) {
        let p0 = exponents::p0(n).unwrap();
        prop_assert!(exponents::gamma(p0, n).unwrap().abs() < 1e-9 * (n as f64));
        prop_assert!(exponents::gamma(p0 * 0.99, n).unwrap() > 0.0);
        prop_assert!(exponents::gamma(p0 * 1.01, n).unwrap() < 0.0);
        prop_assert!(exponents::p0(n + 1).unwrap() < p0);
    }

    #[test]
    fn m_is_a_quarter_of_gamma(n in 2u32..12, t in 0.01f64..0.99) {
        let p = 1.0 + t * (exponents::p0(n).unwrap() - 1.0);
        let (a, q) = wave_parameters(n, p);
        let prob = OdiProblem::lemma1(p, a, q, 0.0, 1.0);
        let gamma = exponents::gamma(p, n).unwrap();
        prop_assert!((prob.m() - gamma / 4.0).abs() < 1e-12 * (1.0 + gamma));
    }

    #[test]
    fn c0_is_independent_of_a_and_threshold_scales(
        p in 1.2f64..4.0,
        q in 0.1f64..3.0,
        extra in 0.2f64..2.0,
        a_coef in 1e-3f64..1e3,
        lambda in 1e-2f64..1e2,
    ) {
        let a = ((q - 2.0) / (p - 1.0)).max(0.0) + extra;
        let mut prob = OdiProblem::lemma1(p, a, q, 0.0, 1.0);
        prob.coef_a = a_coef;
        let first = certify_lemma1(&prob).unwrap();
        prob.coef_a = lambda * a_coef;
        let second = certify_lemma1(&prob).unwrap();
        prop_assert_eq!(first.c0, second.c0);
        prop_assert_eq!(first.delta, second.delta);
        let expected = first.threshold * lambda.powf(-(p - 1.0) / (2.0 * first.m));
        prop_assert!((second.threshold - expected).abs() <= 1e-10 * expected);
        prop_assert!(c0(p, a, q, 1.0, first.delta) == first.c0);
    }

    #[test]
    fn larger_initial_slope_blows_up_sooner(
        p in 1.5f64..3.5,
        q in 0.2f64..2.0,
        f0 in 0.1f64..2.0,
        f0p in 0.2f64..2.0,
        factor in 1.1f64..3.0,
    ) {
        let controls = ExtremalControls { horizon: 1e4, ..Default::default() };
        let slow = integrate_extremal(&OdiProblem::lemma1(p, 1.0, q, f0, f0p), &controls);
        let fast = integrate_extremal(&OdiProblem::lemma1(p, 1.0, q, f0, factor * f0p), &controls);
        if let (Ok(slow), Ok(fast)) = (slow, fast) {
            prop_assert!(fast.t_blow_hi < slow.t_blow_lo);
        }
    }

    #[test]
    fn fit_recovers_exact_power_laws(kappa in 0.05f64..3.0, coef in 0.01f64..100.0, lo in 0.001f64..0.05) {
        let eps: Vec<f64> = (0..8).map(|k| lo * 10f64.powf(1.2 * (7 - k) as f64 / 7.0)).collect();
        let result = SweepResult::synthetic(Scenario::GeneralNd, 3, 2.0, &eps, |e| coef * e.powf(-kappa));
        let fit = fit_power_law(&result, -kappa, 0.15, 1).unwrap();
        prop_assert!((fit.slope + kappa).abs() < 1e-10);
        prop_assert!((fit.intercept - coef.ln()).abs() < 1e-9);
    }

    #[test]
    fn config_round_trips_through_toml(
        n in 1u32..20,
        p in 1.01f64..10.0,
        seed in 0..=i64::MAX as u64,
        slope in 0.01f64..0.5,
        table in proptest::option::of((2u32..5, 5u32..30)),
    ) {
        let cfg = ExperimentConfig {
            output_dir: None,
            seed,
            tolerances: Tolerances { slope, ..Default::default() },
            command: Command::Exponents(ExponentsConfig { n: Some(n), p: Some(p), table, a_of_eps: None }),
        };
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}

#[test]
fn seeds_beyond_toml_integers_are_rejected() {
    let mut cfg = ExperimentConfig::new(Command::Exponents(ExponentsConfig::default()));
    cfg.seed = u64::MAX;
    assert!(cfg.to_toml().is_err());
}
