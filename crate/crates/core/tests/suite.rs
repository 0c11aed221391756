use besq_core::suite::{run_identity_suite, Mutation, SuiteConfig, CATALOG, DEFAULT_SEED};

fn small() -> SuiteConfig {
    SuiteConfig {
        n_samples: 4_000,
        n_moment: 4_000,
        n_hitting: 400,
        hitting_step: 1e-3,
        solver_steps: 256,
        ..SuiteConfig::default()
    }
}

#[test]
fn default_run_covers_catalog_except_escape() {
    let report = run_identity_suite(&small(), DEFAULT_SEED).unwrap();
    let ids: Vec<&str> = report.results.iter().map(|r| r.identity_id.as_str()).collect();
    let expected: Vec<&str> = CATALOG.iter().copied().filter(|id| *id != "escape").collect();
    assert_eq!(ids, expected);
    assert_eq!(report.skipped.len(), 1);
    assert_eq!(report.skipped[0].identity_id, "escape");
    assert!(!report.skipped[0].reason.is_empty());
    for r in &report.results {
        assert_eq!(r.passed, r.statistic < r.critical_value, "{}", r.identity_id);
        assert!(r.n > 0);
    }
    assert!(report.timestamp.is_none());
    assert_eq!(report.config["n_samples"], 4_000);
}

#[test]
fn same_seed_same_report() {
    let cfg = SuiteConfig {
        only: vec!["pms".into(), "cor1".into(), "post_hit".into(), "lamperti".into()],
        ..small()
    };
    let a = run_identity_suite(&cfg, 7).unwrap().to_json().unwrap();
    let b = run_identity_suite(&cfg, 7).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    let c = run_identity_suite(&cfg, 8).unwrap().to_json().unwrap();
    assert_ne!(a, c);
}

#[test]
fn seeds_do_not_depend_on_selection() {
    let one = SuiteConfig {
        only: vec!["plus".into()],
        ..small()
    };
    let two = SuiteConfig {
        only: vec!["pms".into(), "plus".into()],
        ..small()
    };
    let a = run_identity_suite(&one, 3).unwrap();
    let b = run_identity_suite(&two, 3).unwrap();
    assert_eq!(a.results[0], b.results[1]);
}

#[test]
fn mutated_entry_fails_and_others_pass() {
    let ids = ["pms", "besa", "plus", "cond_moment", "time_inversion"];
    for target in ["pms", "cond_moment"] {
        let cfg = SuiteConfig {
            only: ids.iter().map(|s| s.to_string()).collect(),
            n_samples: 20_000,
            n_moment: 20_000,
            mutation: Some(Mutation {
                identity: target.into(),
                delta_shift: 1.0,
            }),
            ..small()
        };
        let report = run_identity_suite(&cfg, DEFAULT_SEED).unwrap();
        for r in &report.results {
            assert_eq!(r.passed, r.identity_id != target, "{target}: {r:?}");
        }
        let hit = report.results.iter().find(|r| r.identity_id == target).unwrap();
        assert_eq!(hit.details["mutated_delta_shift"], 1.0);
    }
}

#[test]
fn escape_runs_when_selected() {
    let cfg = SuiteConfig {
        only: vec!["escape".into()],
        ..small()
    };
    let report = run_identity_suite(&cfg, DEFAULT_SEED).unwrap();
    assert_eq!(report.results.len(), 1);
    assert!(report.skipped.is_empty());
    let r = &report.results[0];
    assert_eq!(r.identity_id, "escape");
    assert!(r.details.contains_key("p_eps_0.001"));
}

#[test]
fn skip_list_is_reported() {
    let cfg = SuiteConfig {
        skip: vec!["escape".into(), "distr".into(), "refprinc".into()],
        ..small()
    };
    let report = run_identity_suite(&cfg, 1).unwrap();
    let skipped: Vec<&str> = report.skipped.iter().map(|s| s.identity_id.as_str()).collect();
    assert_eq!(skipped, ["escape", "refprinc", "distr"]);
    assert_eq!(report.results.len(), CATALOG.len() - 3);
    assert_eq!(report.skipped[2].reason, "skipped by configuration");
    let only = SuiteConfig {
        only: vec!["pms".into()],
        ..cfg
    };
    assert!(run_identity_suite(&only, 1).unwrap().skipped.is_empty());
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        SuiteConfig {
            alpha: 0.0,
            ..SuiteConfig::default()
        },
        SuiteConfig {
            n_samples: 10,
            ..SuiteConfig::default()
        },
        SuiteConfig {
            only: vec!["nope".into()],
            ..SuiteConfig::default()
        },
        SuiteConfig {
            hitting_step: 0.5,
            ..SuiteConfig::default()
        },
        SuiteConfig {
            mutation: Some(Mutation {
                identity: "bogus".into(),
                delta_shift: 1.0,
            }),
            ..SuiteConfig::default()
        },
    ];
    for cfg in bad {
        assert!(run_identity_suite(&cfg, 1).is_err(), "{cfg:?}");
    }
}

#[test]
fn config_json_round_trip_and_unknown_fields() {
    let cfg: SuiteConfig = serde_json::from_str(r#"{"alpha": 0.05, "only": ["pms"]}"#).unwrap();
    assert_eq!(cfg.alpha, 0.05);
    assert_eq!(cfg.n_samples, SuiteConfig::default().n_samples);
    let back: SuiteConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
    assert!(serde_json::from_str::<SuiteConfig>(r#"{"alpah": 0.05}"#).is_err());
}
