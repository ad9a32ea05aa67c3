use std::fs;

use gmhd2d_core::app::runner::{checkpoint_path, DIAGNOSTICS_FILE};
use gmhd2d_core::app::{load_checkpoint, make_initial_condition, run, run_from, save_checkpoint, InitialCondition, RunConfig};
use gmhd2d_core::diagnostics::DiagnosticsRecord;
use gmhd2d_core::mhd::SimParams;
use gmhd2d_core::spectral::SpectralGrid;
use gmhd2d_core::timestepper::StepPolicy;
use gmhd2d_core::Error;

fn params() -> SimParams {
    SimParams { nu: 0.2, eta: 0.3, alpha: 0.4, beta: 1.0, n: 16 }
}

#[test]
fn checkpoint_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SpectralGrid::new(16).unwrap();
    let ic = InitialCondition::RandomSmooth { seed: 3, spectral_slope: 1.0, cutoff: 5 };
    let state = make_initial_condition(&ic, &grid).unwrap();
    let path = dir.path().join("s.bin");
    save_checkpoint(&state, &params(), &path).unwrap();
    assert_eq!(fs::metadata(&path).unwrap().len(), 55 + 2 * 16 * 16 * 16);
    let (back, p) = load_checkpoint(&path).unwrap();
    assert_eq!(p, params());
    assert_eq!(back.w().coeffs(), state.w().coeffs());
    assert_eq!(back.j().coeffs(), state.j().coeffs());
}

#[test]
fn truncated_and_missing_files_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SpectralGrid::new(16).unwrap();
    let state = make_initial_condition(&InitialCondition::OrszagTang, &grid).unwrap();
    let path = dir.path().join("s.bin");
    save_checkpoint(&state, &params(), &path).unwrap();
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::CorruptHeader)));
    assert!(matches!(load_checkpoint(&dir.path().join("nope.bin")), Err(Error::Io { .. })));
}

#[test]
fn csv_matches_history_and_resume_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = |sub: &str| RunConfig {
        params: params(),
        policy: StepPolicy::fixed(0.01, 0.6),
        sample_interval: 0.1,
        checkpoint_interval: Some(0.2),
        output_dir: Some(dir.path().join(sub)),
        ..RunConfig::default()
    };
    let full = run(&cfg("a")).unwrap();
    assert_eq!(full.checkpoints.len(), 3);
    assert_eq!(full.checkpoints[0], checkpoint_path(&dir.path().join("a"), 1));

    let csv = fs::read_to_string(dir.path().join("a").join(DIAGNOSTICS_FILE)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(DiagnosticsRecord::CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), full.history.len());
    for (row, rec) in rows.iter().zip(&full.history) {
        assert_eq!(*row, rec.to_csv_row());
    }

    for ckpt in &full.checkpoints[..2] {
        let (state, p) = load_checkpoint(ckpt).unwrap();
        assert_eq!(p, params());
        let resumed = run_from(state, &cfg("b")).unwrap();
        assert_eq!(resumed.final_state.w().coeffs(), full.final_state.w().coeffs());
        assert_eq!(resumed.final_state.j().coeffs(), full.final_state.j().coeffs());
        assert_eq!(resumed.history.last(), full.history.last());
    }
}
