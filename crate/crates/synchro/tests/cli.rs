use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use synchro::recipes::{recipe, RECIPE_NAMES};
use synchro::report::read_csv;
use synchro::run::{self, Overrides};
use synchro::spec::{CoveringSpec, SelectionName, SimulateSpec};
use synchro::{Error, ExperimentSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synchro"))
}

/// The single-ball experiment cut down to a few thousand steps.
fn short_spec() -> ExperimentSpec {
    let mut s = recipe("single-ball").unwrap();
    s.simulate = Some(SimulateSpec { steps: Some(3000), periods: None });
    s.tube.record_stride = 250;
    s.tube.radius_rule = synchro::spec::RuleName::LogNorm;
    s.workers = 2;
    s
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = short_spec();
    run::simulate(&spec, &dir.path().join("a")).unwrap();
    run::simulate(&spec, &dir.path().join("b")).unwrap();
    for f in ["trace_0.csv", "orbit_plane1.svg", "orbit_plane2.svg"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn csv_files_carry_the_run_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let spec = short_spec();
    run::simulate(&spec, dir.path()).unwrap();
    let path = dir.path().join("trace_0.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let first = text.lines().next().unwrap();
    for key in ["tau=2e-4", "T=34564", "k=5", "epsilon=1e-4", "r0=3.5e-8", "lambda_stride=1", "synchro 0."] {
        assert!(first.contains(key), "{key} missing from {first}");
    }
    let (header, rows) = read_csv(&path).unwrap();
    assert_eq!(header[0], "step");
    // step 0, every 250th step and the last one
    assert_eq!(rows.len(), 3000 / 250 + 1);
    assert!(rows.iter().all(|r| r[header.iter().position(|h| h == "zone").unwrap()] != ""));
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = recipe("brusselator-10").unwrap();
    spec.config.k = 1;
    spec.balls.truncate(4);
    for (w, sub) in [(1, "one"), (3, "three")] {
        spec.workers = w;
        run::verify(&spec, &dir.path().join(sub)).unwrap();
    }
    let a = std::fs::read(dir.path().join("one/table.csv")).unwrap();
    let b = std::fs::read(dir.path().join("three/table.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn covering_verification_writes_one_row_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = recipe("brusselator-10").unwrap();
    spec.config.k = 1;
    spec.covering = Some(CoveringSpec { radius: 1.2e-6, selection: SelectionName::Diagonal, budget: 100 });
    let out = run::verify(&spec, dir.path()).unwrap();
    let (_, rows) = read_csv(&dir.path().join("table.csv")).unwrap();
    assert_eq!(rows.len(), out.summary["pairs"].as_array().unwrap().len());
    assert!(!rows.is_empty());
    let cover = run::cover(&spec, &dir.path().join("cover")).unwrap();
    let counts = cover.summary["counts"].as_array().unwrap();
    assert_eq!(rows.len() as u64, counts[0].as_u64().unwrap().min(counts[1].as_u64().unwrap()));
}

#[test]
fn lambda_map_marks_both_zones_on_the_brusselator() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = recipe("single-ball").unwrap();
    spec.tube.lambda_stride = 500;
    let out = run::lambda_map(&spec, dir.path()).unwrap();
    let f = out.summary["contractive_fraction"].as_f64().unwrap();
    assert!(f > 0.05 && f < 0.95, "{f}");
    assert!(dir.path().join("lambda_plane1.svg").exists());
}

#[test]
fn zero_steps_is_a_usage_error() {
    let mut spec = short_spec();
    spec.simulate = Some(SimulateSpec { steps: Some(0), periods: None });
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(run::simulate(&spec, dir.path()), Err(Error::Usage(_))));
}

#[test]
fn reproduce_rejects_unknown_ids() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(run::reproduce("fig9", dir.path(), &Overrides::default()), Err(Error::Usage(_))));
    let status = bin().args(["reproduce", "fig9", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn passing_reproduction_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["reproduce", "fig2", "--record-stride", "1000", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let (_, rows) = read_csv(&dir.path().join("fig2/diff.csv")).unwrap();
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn failing_checks_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["reproduce", "fig4", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL expansion factor"));
}

#[test]
fn malformed_spec_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = recipe("single-ball").unwrap().to_toml().replace("period_steps", "period_stepz");
    std::fs::write(&path, text).unwrap();
    let out = bin().arg("verify").arg("--spec").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("period_stepz"), "{err}");
}

#[test]
fn missing_spec_is_a_usage_error() {
    let out = bin().arg("verify").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_spec_files_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    for name in RECIPE_NAMES {
        let out = bin().arg("show").arg("--spec").arg(dir.join(format!("{name}.toml"))).output().unwrap();
        assert!(out.status.success());
        let shown = ExperimentSpec::parse(&String::from_utf8(out.stdout).unwrap(), name).unwrap();
        assert_eq!(shown, recipe(name).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn spec_round_trips_through_toml(
        which in 0usize..RECIPE_NAMES.len(),
        seed in 0..=i64::MAX as u64,
        workers in 0usize..8,
        lambda_stride in 1u64..100,
        k in 1u64..40,
        eps in 1e-6..0.5f64,
        shift in -1e-7..1e-7f64,
    ) {
        let mut s = recipe(RECIPE_NAMES[which]).unwrap();
        s.seed = seed;
        s.workers = workers;
        s.tube.lambda_stride = lambda_stride;
        s.config.k = k;
        s.config.epsilon = eps;
        for b in &mut s.balls {
            b.center1[0] += shift;
        }
        let text = s.to_toml();
        let back = ExperimentSpec::parse(&text, "generated").unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_toml(), text);
    }
}
