use coreset_core::bench::{
    aggregate, compare_report, read_results, run_experiment, write_results, DatasetSpec, ExperimentConfig, Family,
    GridConfig,
};
use coreset_core::metrics::MetricName;
use coreset_core::samplers::{Method, SamplerConfig};

fn config(methods: &[Method], replications: usize) -> ExperimentConfig {
    let spec = DatasetSpec::Synthetic {
        name: "synthetic".into(),
        n: 3000,
        d: 4,
        beta: None,
        seed: None,
        test_fraction: 0.05,
        intercept: true,
    };
    let mut cfg = ExperimentConfig::new(vec![spec], methods.iter().copied().map(SamplerConfig::new).collect());
    cfg.replications = replications;
    cfg.base_seed = 11;
    cfg.grid = GridConfig {
        size_lo: 200,
        size_hi: 800,
        size_count: 3,
    };
    cfg
}

#[test]
fn identity_mode_reproduces_the_full_fit() {
    let mut cfg = config(&[Method::Uniform], 2);
    cfg.identity_mode = true;
    let records = run_experiment(&cfg, 2).unwrap();
    assert_eq!(records.len(), 6);
    for r in records {
        let m = r.metrics.unwrap();
        assert_eq!((m.rel_nll_error, m.coef_mse, m.rel_roc), (0.0, 0.0, 1.0));
    }
}

#[test]
fn grid_cardinality_and_canonical_order() {
    let cfg = config(&[Method::Uniform, Method::Leverage], 4);
    let records = run_experiment(&cfg, 3).unwrap();
    assert_eq!(records.len(), 2 * 3 * 4);
    let keys: Vec<(String, usize, usize)> = records.iter().map(|r| (r.method.clone(), r.size, r.rep)).collect();
    assert_eq!(keys[0], ("uniform".into(), 200, 0));
    assert_eq!(keys[5], ("uniform".into(), 400, 1));
    assert_eq!(keys[12], ("leverage".into(), 200, 0));
    assert!(records.iter().all(|r| r.is_ok()));
}

#[test]
fn csv_is_identical_across_thread_counts() {
    let cfg = config(&[Method::Kmeans, Method::OsmacMse, Method::Monotonic], 3);
    let mut outputs = Vec::new();
    for threads in [1, 4] {
        let mut buf = Vec::new();
        write_results(&run_experiment(&cfg, threads).unwrap(), &mut buf).unwrap();
        outputs.push(buf);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(read_results(&outputs[0][..]).unwrap().len(), 27);
}

#[test]
fn deterministic_scores_are_shared_across_replications() {
    // Leverage scores do not change between replications, but coresets do.
    let cfg = config(&[Method::Leverage], 2);
    let records = run_experiment(&cfg, 1).unwrap();
    let a = records[0].metrics.unwrap();
    let b = records[1].metrics.unwrap();
    assert_ne!(a.coef_mse, b.coef_mse);
}

#[test]
fn l1_mode_reports_support_accuracy() {
    let mut cfg = config(&[Method::Uniform, Method::Lewis], 2);
    cfg.l1_mode = true;
    cfg.fit.lambda1 = 1e-3;
    let records = run_experiment(&cfg, 2).unwrap();
    for r in &records {
        let s = r.metrics.unwrap().support_accuracy.unwrap();
        assert!((0.0..=1.0).contains(&s));
    }
    let agg = aggregate(&records);
    assert!(agg.iter().any(|a| a.metric == MetricName::SupportAcc));
}

#[test]
fn report_families_on_real_runs() {
    let cfg = config(&Method::ALL, 3);
    let agg = aggregate(&run_experiment(&cfg, 4).unwrap());
    let vs = compare_report(&agg, Family::VsUniform).unwrap();
    let pairs = compare_report(&agg, Family::AllPairs).unwrap();
    assert_eq!(vs.len(), 6 * 3);
    assert_eq!(pairs.len(), 15 * 3);
    assert!(vs.iter().chain(&pairs).all(|r| (0.0..=1.0).contains(&r.p_corrected)));
}

#[test]
fn changing_the_seed_changes_results() {
    let a = run_experiment(&config(&[Method::Uniform], 1), 1).unwrap();
    let mut cfg = config(&[Method::Uniform], 1);
    cfg.base_seed = 12;
    let b = run_experiment(&cfg, 1).unwrap();
    assert_ne!(a, b);
}
