use std::path::Path;

use proptest::prelude::*;

use super::*;
use crate::dynamics::FlipRateSpec;
use crate::error::Error;

fn parse(text: &str) -> Result<ExperimentSpec, Error> {
    parse_config_with_default(text, Path::new("out"))
}

fn config_line(err: Error) -> usize {
    match err {
        Error::Config { line, .. } => line,
        other => panic!("expected a config error, got {other:?}"),
    }
}

const MINIMAL_E1: &str = "\
[model]
model = sf
alpha = 0.5

[topology]
n = 100000

[run]
scenario = E1
";

#[test]
fn minimal_config_gets_defaults() {
    let spec = parse(MINIMAL_E1).unwrap();
    assert_eq!(spec.scenario, Scenario::E1);
    assert_eq!(spec.model, ModelSpec::sf_pure(0.5));
    assert_eq!(spec.topology, Topology::Ring { n: 100_000 });
    assert_eq!(spec.initial, InitialDistribution::Product { rho: 0.5 });
    assert_eq!(spec.replicas, 1);
    assert_eq!(spec.seed, 0);
    assert_eq!(spec.sample_times, vec![0.25, 0.5, 1.0, 2.0]);
    assert_eq!(spec.output_dir, Path::new("out"));
    assert_eq!(spec.tolerance, None);
}

#[test]
fn negative_alpha_names_its_line() {
    let text = MINIMAL_E1.replace("alpha = 0.5", "alpha = -1");
    let err = parse(&text).unwrap_err();
    assert!(err.is_validation());
    assert_eq!(config_line(err), 3);
}

#[test]
fn gamma_under_sa_is_unknown() {
    let text = "[model]\nmodel = sa\nalpha = 0.3\nbeta = 0.7\ngamma = 0.25\n[topology]\nn = 100\n[run]\nscenario = E5\n";
    let err = parse(text).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("gamma") && msg.contains("unknown"), "{msg}");
    assert_eq!(config_line(err), 5);
}

#[test]
fn other_config_errors() {
    // Missing required key, inside a present section.
    let err = parse("[model]\nmodel = sf\n[topology]\nn = 10\n[run]\nscenario = E1\n").unwrap_err();
    assert_eq!(config_line(err), 1);
    // Missing section.
    assert!(matches!(parse("[model]\nmodel = sf\nalpha = 1\n[run]\nscenario = E1\n"), Err(Error::ConfigMissing(_))));
    for (text, line) in [
        ("[model]\nmodel = sf\nalpha = 0.5\nalpha = 0.6\n", 4),
        ("[nonsense]\n", 1),
        ("alpha = 1\n", 1),
        ("[model]\nmodel = xx\nalpha = 1\n[topology]\nn = 10\n[run]\nscenario = E1\n", 2),
        ("[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 2\n[run]\nscenario = E1\n", 5),
        ("[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 10\n[run]\nscenario = E9\n", 7),
        ("[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 10\n[run]\nscenario = E1\nsample_times = 1, 0.5\n", 8),
        ("[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 10\n[run]\nscenario = E1\nreplicas = 0\n", 8),
        // Freezing needs alpha >= 1.
        ("[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 10\n[run]\nscenario = E2\n", 3),
        // Wrong model for the scenario.
        ("[model]\nmodel = sa\nalpha = 0.5\nbeta = 0.2\n[topology]\nn = 10\n[run]\nscenario = E1\n", 2),
        // The grid must bracket the critical rate 0.5.
        (
            "[model]\nmodel = sf\nalpha = 0.5\nflip = glauber\ngamma = 0.25\n[topology]\nn = 10\n[run]\nscenario = E4\nalpha_grid = 0.1, 0.2\n",
            10,
        ),
        ("[model]\nmodel = sf\nalpha = 0.5\nflip = glauber\ngamma = 0.9\n[topology]\nn = 10\n[run]\nscenario = E1\n", 5),
    ] {
        let err = parse(text).unwrap_err();
        assert_eq!(config_line(err), line, "{text}");
    }
}

#[test]
fn comments_and_case() {
    let text = "# header\n[model]   # trailing\nmodel = sf # pure flips\nalpha = 0.5\n\n[topology]\nkind = interval\nn = 20\n[run]\nscenario = e1\n";
    let spec = parse(text).unwrap();
    assert_eq!(spec.scenario, Scenario::E1);
    assert_eq!(spec.topology, Topology::Interval { n: 20 });
}

#[test]
fn scenario_defaults() {
    let base = "[model]\nmodel = sf\nalpha = 2\n[topology]\nn = 1000\n[run]\nscenario = E2\n";
    assert_eq!(parse(base).unwrap().scenario, Scenario::E2 { epsilon: 1e-3, t_max: 10.0 });
    let e7 = "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nkind = interval\nn = 100000\n[run]\nscenario = E7\n";
    let spec = parse(e7).unwrap();
    assert_eq!(spec.scenario, Scenario::E7 { sizes: vec![1000, 10_000, 100_000], window: 5 });
    assert_eq!(spec.initial, InitialDistribution::SingleOne { y: 50_000 });
    assert!(spec.sample_times.is_empty());
}

fn spec_strategy() -> impl Strategy<Value = ExperimentSpec> {
    let model = prop_oneof![
        (0.0f64..3.0).prop_map(ModelSpec::sf_pure),
        (0.0f64..3.0, -0.5f64..0.5).prop_map(|(alpha, gamma)| ModelSpec::Sf { alpha, flip: FlipRateSpec::Glauber { gamma } }),
        (0.0f64..3.0, -0.99f64..0.99).prop_map(|(alpha, kappa)| ModelSpec::Sf { alpha, flip: FlipRateSpec::Biased { kappa } }),
        (0.0f64..3.0, 0.0f64..3.0).prop_map(|(alpha, beta)| ModelSpec::Sa { alpha, beta }),
    ];
    let topology = (3usize..5000, any::<bool>())
        .prop_map(|(n, ring)| if ring { Topology::Ring { n } } else { Topology::Interval { n } });
    let times = prop::collection::btree_set(0u32..100_000, 1..8)
        .prop_map(|s| s.into_iter().map(|k| k as f64 / 128.0).collect::<Vec<f64>>());
    (model, topology, times, 1usize..100, any::<u64>(), prop::option::of(1e-6f64..1.0), prop::option::of(1u64..u64::MAX), 0u8..4, 0.0f64..=1.0)
        .prop_map(|(model, topology, sample_times, replicas, seed, tolerance, max_events, init, rho)| {
            let initial = match init {
                0 => InitialDistribution::Product { rho },
                1 => InitialDistribution::AllOnes,
                2 => InitialDistribution::AllTwos,
                _ => InitialDistribution::SingleOne { y: topology.len() - 1 },
            };
            ExperimentSpec {
                scenario: Scenario::Custom,
                model,
                topology,
                initial,
                replicas,
                sample_times,
                seed,
                output_dir: "runs/a b".into(),
                tolerance,
                max_events,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn emit_then_parse_round_trips(spec in spec_strategy()) {
        let text = emit_config(&spec);
        prop_assert_eq!(parse(&text).unwrap(), spec);
    }
}

#[test]
fn catalog_specs_round_trip() {
    let configs = [
        MINIMAL_E1.to_string(),
        "[model]\nmodel = sf\nalpha = 2\n[topology]\nn = 1000\n[initial]\nkind = all_ones\n[run]\nscenario = E2\nepsilon = 0.01\n".into(),
        "[model]\nmodel = sf\nalpha = 0.4\n[topology]\nn = 1000\n[run]\nscenario = E3\nblock_sizes = 2, 3, 4\n".into(),
        "[model]\nmodel = sf\nalpha = 0.4\nflip = biased\nkappa = 0.3\n[topology]\nn = 1000\n[run]\nscenario = E4\nalpha_grid = 0.2, 0.9\n".into(),
        "[model]\nmodel = sa\nalpha = 0.3\nbeta = 0.7\n[topology]\nn = 1000\n[run]\nscenario = E5\ntolerance = 0.02\n".into(),
        "[model]\nmodel = sa\nalpha = 0.5\nbeta = 0.5\n[topology]\nn = 1000\n[run]\nscenario = E6\nmax_events = 100000\n".into(),
        "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nkind = interval\nn = 1000\n[run]\nscenario = E7\nsizes = 100, 1000\nwindow = 3\n".into(),
    ];
    for text in configs {
        let spec = parse(&text).unwrap();
        assert_eq!(parse(&emit_config(&spec)).unwrap(), spec, "{text}");
    }
}

fn small_run(text: &str) -> (RunOutcome, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let spec = parse_config_with_default(text, dir.path()).unwrap();
    (run_experiment(&spec).unwrap(), dir)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn e1_theory_column() {
    let text = "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 2000\n[run]\nscenario = E1\nreplicas = 3\n";
    let (out, _dir) = small_run(text);
    let rows = csv_rows(&out.data_path);
    assert_eq!(rows[0].join(","), CSV_HEADER);
    let at_one: Vec<_> = rows[1..].iter().filter(|r| r[0] == "1").collect();
    assert_eq!(at_one.len(), 4);
    for r in at_one {
        let theory: f64 = r[4].parse().unwrap();
        assert!((theory - 0.283834).abs() < 5e-7, "{theory}");
    }
    assert_eq!(out.summary.scenario, "E1");
    assert_eq!(out.summary.checks.len(), 4);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out.summary_path).unwrap()).unwrap();
    for key in ["scenario", "params", "checks", "manifest_path"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    for key in ["name", "measured", "expected", "tolerance", "pass"] {
        assert!(json["checks"][0].get(key).is_some(), "{key}");
    }
}

#[test]
fn e5_theory_is_linear() {
    let text = "[model]\nmodel = sa\nalpha = 0.3\nbeta = 0.7\n[topology]\nn = 2000\n[initial]\nrho = 0.2\n[run]\nscenario = E5\nreplicas = 2\n";
    let (out, _dir) = small_run(text);
    let rows = csv_rows(&out.data_path);
    for r in &rows[1..] {
        let t: f64 = r[0].parse().unwrap();
        let theory: f64 = r[4].parse().unwrap();
        if t <= 1.9 {
            assert!((theory - (0.2 + 0.4 * t)).abs() < 1e-12, "{t}: {theory}");
        }
    }
}

#[test]
fn runs_are_byte_identical_and_digests_match() {
    let text = "[model]\nmodel = sf\nalpha = 0.5\nflip = glauber\ngamma = 0.2\n[topology]\nn = 500\n[run]\nscenario = E1\nreplicas = 4\nseed = 7\n";
    let (a, _da) = small_run(text);
    let (b, _db) = small_run(text);
    assert_eq!(std::fs::read(&a.data_path).unwrap(), std::fs::read(&b.data_path).unwrap());
    let dir = a.manifest_path.parent().unwrap();
    let manifest = RunManifest::read(&a.manifest_path).unwrap();
    assert_eq!(manifest.master_seed, 7);
    assert_eq!(manifest.streams.len(), 4);
    assert_eq!(parse(&manifest.spec).unwrap().model, ModelSpec::Sf { alpha: 0.5, flip: FlipRateSpec::Glauber { gamma: 0.2 } });
    for f in &manifest.files {
        use sha2::Digest;
        let bytes = std::fs::read(dir.join(&f.path)).unwrap();
        assert_eq!(hex::encode(sha2::Sha256::digest(&bytes)), f.sha256);
    }
}

#[test]
fn event_budget_flags_partial_results() {
    let text = "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 1000\n[run]\nscenario = E1\nmax_events = 500\n";
    let (out, _dir) = small_run(text);
    assert!(out.partial());
    assert!(out.summary.partial);
    let rows = csv_rows(&out.data_path);
    assert!(rows.len() < 1 + 2 * 4);
}

#[test]
fn small_catalog_runs() {
    let cases = [
        "[model]\nmodel = sf\nalpha = 2\n[topology]\nn = 2000\n[initial]\nkind = all_ones\n[run]\nscenario = E2\nreplicas = 2\n",
        "[model]\nmodel = sf\nalpha = 0.4\n[topology]\nn = 2000\n[run]\nscenario = E3\nsample_times = 2, 4\naverage_from = 2\nblock_samples = 2000\n",
        "[model]\nmodel = sf\nalpha = 0.4\nflip = biased\nkappa = 0.3\n[topology]\nn = 2000\n[run]\nscenario = E4\nalpha_grid = 0.2, 0.9\nsample_times = 2, 4\naverage_from = 2\n",
        "[model]\nmodel = sa\nalpha = 0.5\nbeta = 0.5\n[topology]\nn = 2000\n[run]\nscenario = E6\nsample_times = 0, 1\nblock_samples = 2000\n",
        "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nkind = interval\nn = 1000\n[run]\nscenario = E7\nsizes = 100, 1000\nreplicas = 5\n",
        "[model]\nmodel = sa\nalpha = 0.7\nbeta = 0.2\n[topology]\nn = 300\n[run]\nscenario = custom\nsample_times = 0.5, 1\n",
    ];
    for text in cases {
        let (out, _dir) = small_run(text);
        assert!(!out.partial(), "{text}");
        let rows = csv_rows(&out.data_path);
        assert!(rows.len() > 1, "{text}");
        assert!(rows.iter().all(|r| r.len() == 6), "{text}");
    }
}

#[test]
fn oracle_run_and_size_limit() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 6\n[initial]\nkind = all_ones\n[run]\nscenario = custom\nsample_times = 0.1, 1\n";
    let spec = parse_config_with_default(text, dir.path()).unwrap();
    let out = run_oracle(&spec).unwrap();
    assert!(out.summary.all_pass(), "{:?}", out.summary.checks);
    assert!(out.data_path.ends_with("custom_oracle_data.csv"));
    let big = parse_config_with_default(&text.replace("n = 6", "n = 20"), dir.path()).unwrap();
    let err = run_oracle(&big).unwrap_err();
    assert!(matches!(err, Error::TooLarge { n: 20, .. }) && err.is_validation());
}

#[test]
fn plot_script() {
    let text = "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 300\n[run]\nscenario = E1\n";
    let (out, dir) = small_run(text);
    let script = emit_plot_script(&out.manifest_path).unwrap();
    assert!(script.contains("\"e1_data.csv\""));
    assert!(!script.contains(dir.path().to_str().unwrap()));
    let mut empty = out.manifest.clone();
    empty.files.clear();
    assert!(plot_script_for(&empty).is_err());
    std::fs::remove_file(&out.data_path).unwrap();
    assert!(emit_plot_script(&out.manifest_path).is_err());
}

#[test]
fn property_suite_passes() {
    for outcome in run_property_suite(1) {
        assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
    }
}
