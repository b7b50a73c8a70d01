// SPDX-License-Identifier: Apache-2.0

use sawlab_core::harness::{catalog, run_experiment, run_to_dir, validate, ExperimentConfig};
use sawlab_core::Error;

#[test]
fn catalog_has_one_experiment_per_criterion() {
    let ids: Vec<&str> = catalog().iter().map(|e| e.id).collect();
    assert!(ids.len() >= 10);
    for id in ["exact-counts", "kesten", "chordal-restriction", "saw-vs-sle", "schwarzian-bubble"] {
        assert!(ids.contains(&id), "{id} missing");
    }
}

#[test]
fn same_config_gives_byte_identical_artifacts() {
    let cfg = ExperimentConfig::new("eight-vs-five", 11).with_param("groups", 40);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ra, fa) = run_to_dir(&cfg, a.path()).unwrap();
    let (rb, fb) = run_to_dir(&cfg, b.path()).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
    }
    assert!(a.path().join("report.json").exists());
    assert!(a.path().join("tables").join("estimates.csv").exists());
}

#[test]
fn report_embeds_hash_seed_and_versions() {
    let cfg = ExperimentConfig::new("exponent-algebra", 5);
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.seed, 5);
    assert_eq!(r.config_hash, cfg.hash());
    assert_eq!(r.config_hash.len(), 64);
    assert!(r.versions.contains_key("sawlab-core"));
    assert!(r.passed);
}

#[test]
fn malformed_configs_name_the_field() {
    let field = |text: &str| match ExperimentConfig::from_json(text).and_then(|c| validate(&c)) {
        Err(Error::Config { field, .. }) => field,
        other => panic!("expected a config error, got {other:?}"),
    };
    assert_eq!(field(r#"{"experiment": "kesten", "seed": "x"}"#), "seed");
    assert_eq!(field(r#"{"experiment": "kesten", "seed": 1, "params": {"max_k": -3}}"#), "params.max_k");
    assert_eq!(field(r#"{"experiment": "kesten", "seed": 1, "params": {"max_kk": 3}}"#), "params.max_kk");
    assert_eq!(field(r#"{"experiment": "nondisconnection", "seed": 1, "params": {"eps": [0.5]}}"#), "params.eps");
    assert_eq!(field(r#"{"experiment": "nu-pivot", "seed": 1, "params": {"lengths": [1, 2, "x"]}}"#), "params.lengths[2]");
}

#[test]
fn unknown_experiment_is_invalid() {
    let err = run_experiment(&ExperimentConfig::new("no-such-thing", 1)).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)), "{err:?}");
}

// Under the null, KS p-values are uniform, so 100 split-half tests reject
// at level 0.01 at most five times with probability above 0.99.
#[test]
fn ks_null_rejection_count_is_binomial() {
    let cfg = ExperimentConfig::new("ks-null", 3).with_param("samples", 200);
    let r = run_experiment(&cfg).unwrap();
    assert!(r.passed, "{:?}", r.tests);
}
