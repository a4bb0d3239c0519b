use mspace::harness::{find, generate_instance, replay, rng, run_suite, InstanceConstraints, SuiteConfig, TrialContext, CHECKS};
use mspace::{Error, Quadrature};

fn config(seed: u64, filter: &[&str], trials: usize) -> SuiteConfig {
    SuiteConfig { seed, trials: Some(trials), filter: filter.iter().map(|s| s.to_string()).collect(), ..SuiteConfig::default() }
}

#[test]
fn instances_are_deterministic_and_validated() {
    let constraints = InstanceConstraints { real_symmetric: true, clark_alpha: None };
    let a = generate_instance(1, (2, 2), (1, 3), constraints).unwrap();
    let b = generate_instance(1, (2, 2), (1, 3), constraints).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.u.is_real_symmetric());
    assert!(matches!(generate_instance(1, (0, 3), (1, 3), constraints), Err(Error::InvalidRange(_))));
    assert!(matches!(generate_instance(1, (2, 33), (1, 3), constraints), Err(Error::InvalidRange(_))));
}

#[test]
fn random_instances_respect_the_zero_cap() {
    for seed in 0..1000 {
        let spec = generate_instance(seed, (1, 6), (0, 4), InstanceConstraints::default()).unwrap();
        assert!(spec.u.degree() <= 6);
        assert!(spec.u.zeros().iter().all(|a| a.norm() <= 0.85));
        assert!((spec.u.constant().norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn every_registered_check_has_trials() {
    assert!(CHECKS.iter().all(|c| c.trials > 0));
    let report = run_suite(&config(0, &[], 1)).unwrap();
    assert_eq!(report.checks.len(), CHECKS.len());
    assert!(report.checks.iter().all(|c| c.trials == 1));
}

#[test]
fn group_filter_runs_only_the_dictionary() {
    let report = run_suite(&config(2, &["dictionary"], 3)).unwrap();
    let ids: Vec<_> = report.checks.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["dictionary.identities", "dictionary.transports", "dictionary.conjugations"]);
    assert!(report.passed);
}

#[test]
fn fixed_seed_gives_identical_bytes() {
    let run = || serde_json::to_vec(&run_suite(&config(7, &["core", "clark", "reports.unitary"], 10)).unwrap()).unwrap();
    assert_eq!(run(), run());
}

#[test]
fn impossible_quadrature_tolerance_is_reported_per_trial() {
    let cfg = SuiteConfig { quadrature: Quadrature { tol: 1e-15, start: 64, cap: 1024 }, ..config(3, &["core", "structure"], 4) };
    let report = run_suite(&cfg).unwrap();
    assert!(!report.passed);
    assert_eq!(report.checks.len(), 4);
    let errors: usize = report.checks.iter().map(|c| c.errors).sum();
    assert!(errors > 0);
    let messages: Vec<_> = report.checks.iter().flat_map(|c| &c.counterexamples).filter_map(|x| x.error.as_deref()).collect();
    assert!(messages.iter().any(|m| m.contains("did not converge")), "{messages:?}");
    assert!(report.checks.iter().any(|c| c.quadrature.failures > 0));
}

#[test]
fn counterexamples_replay_to_the_same_residual() {
    let report = run_suite(&SuiteConfig { seed: 7, filter: vec!["products.hankel-toeplitz".into()], ..SuiteConfig::default() }).unwrap();
    let check = &report.checks[0];
    assert!(!check.counterexamples.is_empty(), "expected recorded disagreements");
    for example in &check.counterexamples {
        let spec = example.spec.as_ref().expect("failing trial embeds its problem");
        let json = serde_json::to_string(spec).unwrap();
        let reloaded = serde_json::from_str(&json).unwrap();
        let outcome = replay(&reloaded, None).unwrap();
        assert!(!outcome.pass);
        let recorded = example.residual.unwrap();
        assert!((outcome.residual - recorded).abs() <= 1e-14, "{} vs {recorded}", outcome.residual);
    }
}

#[test]
fn recorded_trials_regenerate_from_their_seeds() {
    let mut cfg = config(11, &["sedlock.round-trip", "products.mixed"], 6);
    cfg.records = true;
    let report = run_suite(&cfg).unwrap();
    let ctx = TrialContext { tol: cfg.tol, quadrature: cfg.quadrature };
    for check in &report.checks {
        assert_eq!(check.records.len(), 6);
        let registered = find(&check.id).unwrap();
        for record in &check.records {
            let mut spec = (registered.generate)(&mut rng(record.seed), record.seed, &ctx).unwrap();
            spec.operation = check.id.clone();
            let outcome = replay(&spec, None).unwrap();
            assert_eq!(outcome.pass, record.pass);
            assert!((outcome.residual - record.residual.unwrap()).abs() <= 1e-14);
        }
    }
}
