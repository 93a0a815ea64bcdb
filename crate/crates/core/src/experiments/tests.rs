use super::*;
use crate::sampler::DistributionSpec;

fn small(name: ProtocolName) -> ExperimentConfig {
    let mut c = ExperimentConfig::preset(name);
    c.trials = 6;
    c.seed = 7;
    match name {
        ProtocolName::EtClustering => {
            c.m = vec![10, 20];
            c.n = vec![1, 2];
        }
        ProtocolName::DiscreteExample => {
            c.m = vec![20, 40];
            c.n = vec![3];
        }
        ProtocolName::ToeplitzAnticoncentration => c.n = vec![1, 3],
        ProtocolName::DetGrowth => c.m = vec![8, 16, 32],
        ProtocolName::ZeroRadius => c.degree = Some(128),
        ProtocolName::PoleClustering => {
            c.n = vec![4, 8];
            c.degree = Some(96);
        }
        ProtocolName::InequalitySuite => c.degree = Some(24),
    }
    c
}

#[test]
fn presets_validate_and_round_trip() {
    for name in ProtocolName::ALL {
        let c = ExperimentConfig::preset(name);
        c.validate().unwrap();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(name.as_str().parse::<ProtocolName>().unwrap(), name);
    }
}

#[test]
fn unknown_protocol_lists_valid_names() {
    let err = "nope".parse::<ProtocolName>().unwrap_err().to_string();
    assert!(err.contains("et-clustering") && err.contains("pole-clustering"));
}

#[test]
fn rejects_bad_configs() {
    let mut c = ExperimentConfig::preset(ProtocolName::EtClustering);
    c.trials = 0;
    assert!(c.validate().is_err());
    let mut c = ExperimentConfig::preset(ProtocolName::EtClustering);
    c.degree = Some(10);
    assert!(c.validate().is_err());
    let mut c = ExperimentConfig::preset(ProtocolName::DiscreteExample);
    c.distribution = DistributionSpec::Gaussian;
    assert!(c.validate().is_err());
    let mut c = ExperimentConfig::preset(ProtocolName::ZeroRadius);
    c.s_values = vec![4, 4096];
    assert!(c.validate().is_err());
    let text = r#"{"name":"det-growth","distribution":{"kind":"gaussian"},"trials":3,"seed":1,"m":[4],"n":[1],"bogus":1}"#;
    assert!(ExperimentConfig::from_json(text).is_err());
    let text = r#"{"schema_version":9,"name":"det-growth","distribution":{"kind":"gaussian"},"trials":3,"seed":1,"m":[4],"n":[1]}"#;
    assert!(ExperimentConfig::from_json(text).is_err());
}

#[test]
fn every_protocol_runs_small() {
    for name in ProtocolName::ALL {
        let c = small(name);
        let out = run(&c).unwrap();
        let cells = Plan::new(&c).cells.len();
        assert_eq!(out.records.len(), cells * c.trials, "{name}");
        assert_eq!(out.summary.cells.len(), cells, "{name}");
        assert!(!out.summary.verdicts.is_empty(), "{name}");
        if name.checks_inequalities() {
            assert_eq!(out.summary.invariant_violations, 0, "{name}");
        }
    }
}

fn run_with_threads(c: &ExperimentConfig, threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    let out = pool.install(|| run(c).unwrap());
    let dir = tempfile::tempdir().unwrap();
    write_run(&out, dir.path()).unwrap();
    std::fs::read(dir.path().join(TRIALS_FILE)).unwrap()
}

#[test]
fn trials_csv_independent_of_thread_count() {
    for name in [ProtocolName::EtClustering, ProtocolName::PoleClustering] {
        let c = small(name);
        assert_eq!(run_with_threads(&c, 1), run_with_threads(&c, 4), "{name}");
    }
}

#[test]
fn csv_round_trip() {
    let c = small(ProtocolName::ZeroRadius);
    let out = run(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_run(&out, dir.path()).unwrap();
    let back = read_records(&dir.path().join(TRIALS_FILE)).unwrap();
    assert_eq!(back, out.records);
    let header = std::fs::read_to_string(dir.path().join(TRIALS_FILE)).unwrap();
    assert_eq!(header.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let roots = read_roots(&dir.path().join(ROOTS_FILE)).unwrap();
    assert_eq!(roots.len(), 128);
    let summary: RunSummary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap())
            .unwrap();
    assert_eq!(summary.records, out.summary.records);
}

#[test]
fn shared_seed_protocols_reuse_the_sequence() {
    let c = small(ProtocolName::DetGrowth);
    let out = run(&c).unwrap();
    let first: Vec<u64> = out
        .records
        .iter()
        .filter(|r| r.m == 8)
        .map(|r| r.trial_index)
        .collect();
    let last: Vec<u64> = out
        .records
        .iter()
        .filter(|r| r.m == 32)
        .map(|r| r.trial_index)
        .collect();
    assert_eq!(first, last);
}

#[test]
fn rho_n_matches_direct_sum() {
    let (r, n) = (0.9f64, 40);
    let direct: f64 = (0..=n).map(|k| r.powi(2 * k as i32)).sum();
    assert!((radius::log_rho_n(r, n) - direct.ln()).abs() < 1e-12);
}
