use std::fs;

use gmhd2d_core::app::sweep::{summary_csv, SUMMARY_FILE, SUMMARY_HEADER};
use gmhd2d_core::app::{run, sweep, RunConfig, SweepSpec};
use gmhd2d_core::mhd::SimParams;
use gmhd2d_core::regime::Region;
use gmhd2d_core::timestepper::StepPolicy;

fn base() -> RunConfig {
    RunConfig {
        params: SimParams { nu: 0.5, eta: 0.5, alpha: 0.0, beta: 0.0, n: 16 },
        policy: StepPolicy::fixed(0.02, 0.2),
        sample_interval: 0.05,
        ..RunConfig::default()
    }
}

#[test]
fn single_pair_sweep_matches_run() {
    let spec = SweepSpec { alpha_values: vec![0.4], beta_values: vec![1.0], base: base(), max_parallel: 1 };
    let rows = sweep(&spec).unwrap();
    let mut cfg = base();
    cfg.params.alpha = 0.4;
    cfg.params.beta = 1.0;
    let out = run(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].history, out.history);
    assert_eq!(rows[0].max_x, out.max_x());
    assert_eq!(rows[0].blowup, "none");
}

#[test]
fn summary_is_written_per_sweep_with_per_run_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = base();
    b.output_dir = Some(dir.path().to_path_buf());
    let spec = SweepSpec { alpha_values: vec![0.4, 0.2], beta_values: vec![1.0, 1.3], base: b, max_parallel: 3 };
    let rows = sweep(&spec).unwrap();
    let text = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(text.lines().next(), Some(SUMMARY_HEADER));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(rows[3].verdict.source, Region::FractionalDiffusionLowAlpha);
    assert!(dir.path().join("alpha_0.2_beta_1.3").join("diagnostics.csv").exists());
    let again = sweep(&spec).unwrap();
    assert_eq!(summary_csv(&rows, false), summary_csv(&again, false));
}
