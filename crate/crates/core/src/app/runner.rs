//! Time integration driver with sampling, CSV output and checkpoints.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::app::checkpoint::save_checkpoint;
use crate::app::config::RunConfig;
use crate::app::ic::make_initial_condition;
use crate::diagnostics::{sample, DiagnosticsConfig, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::mhd::MhdState;
use crate::regime::{classify, RegimeVerdict};
use crate::spectral::SpectralGrid;
use crate::timestepper::{detect_blowup, BlowupVerdict, Integrator};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub final_state: MhdState,
    pub history: Vec<DiagnosticsRecord>,
    pub blowup: BlowupVerdict,
    pub regime: RegimeVerdict,
    pub steps: usize,
    /// `true` when `t_end` was reached.
    pub completed: bool,
    pub checkpoints: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn max_x(&self) -> f64 {
        self.history.iter().map(|r| r.x).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_y(&self) -> f64 {
        self.history.iter().map(|r| r.y).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Path of the `index`-th checkpoint file inside `dir`.
pub fn checkpoint_path(dir: &Path, index: u64) -> PathBuf {
    dir.join(format!("checkpoint_{index:06}.bin"))
}

struct CsvSink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvSink {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(DIAGNOSTICS_FILE);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut sink = CsvSink {
            path,
            out: BufWriter::new(file),
        };
        sink.line(DiagnosticsRecord::CSV_HEADER)?;
        Ok(sink)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}")
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

/// Schedule of events at integer multiples of a fixed interval.
struct Cadence {
    interval: f64,
    next_index: u64,
}

impl Cadence {
    fn after(interval: f64, t: f64) -> Self {
        let mut next_index = (t / interval).floor() as u64;
        while next_index as f64 * interval <= t * (1.0 + 1e-12) + 1e-14 {
            next_index += 1;
        }
        Cadence { interval, next_index }
    }

    fn next_time(&self) -> f64 {
        self.next_index as f64 * self.interval
    }

    fn due(&self, t: f64) -> bool {
        let next = self.next_time();
        t >= next - 1e-12 * next.max(1.0)
    }
}

/// Builds the initial condition from `config` and integrates it.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let grid = SpectralGrid::new(config.params.n)?;
    let state = make_initial_condition(&config.ic, &grid)?;
    run_from(state, config)
}

/// Integrates `state` from its own time up to `t_end`.
pub fn run_from(mut state: MhdState, config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let params = &config.params;
    let grid = state.grid().clone();
    if grid.n() != params.n {
        return Err(Error::GridMismatch(params.n, grid.n()));
    }
    let integrator = Integrator::new(&grid, params);
    let diag = DiagnosticsConfig::for_params(params);
    let policy = &config.policy;
    let t_end = policy.t_end;

    let mut sink = match &config.output_dir {
        Some(dir) => Some(CsvSink::create(dir)?),
        None => None,
    };
    let mut history = Vec::new();
    let mut record = |state: &MhdState, history: &mut Vec<DiagnosticsRecord>| -> Result<()> {
        let rec = sample(state, params, &diag);
        if let Some(sink) = sink.as_mut() {
            sink.line(&rec.to_csv_row())?;
        }
        history.push(rec);
        Ok(())
    };

    record(&state, &mut history)?;
    let mut blowup = detect_blowup(&history, &state, &config.thresholds);
    let mut samples = Cadence::after(config.sample_interval, state.time());
    let mut checkpoints = config
        .checkpoint_interval
        .map(|c| Cadence::after(c, state.time()));
    let mut written = Vec::new();
    let mut steps = 0usize;
    let end_tol = 1e-12 * t_end.max(1.0);

    while !blowup.triggered && state.time() < t_end - end_tol && steps < policy.max_steps {
        let t = state.time();
        let mut event = samples.next_time().min(t_end);
        if let Some(c) = &checkpoints {
            event = event.min(c.next_time());
        }
        let dt = policy.dt_for(&state);
        let gap = event - t;
        let (dt, lands) = if (gap - dt).abs() <= 1e-9 * dt {
            (dt, true)
        } else if dt > gap {
            (gap, true)
        } else {
            (dt, false)
        };
        state = integrator.step(&state, dt)?;
        steps += 1;
        if !lands {
            continue;
        }
        state.set_time(event);

        if let Some(c) = checkpoints.as_mut() {
            if c.due(event) {
                let dir = config.output_dir.as_ref().expect("validated");
                let path = checkpoint_path(dir, c.next_index);
                save_checkpoint(&state, params, &path)?;
                written.push(path);
                *c = Cadence::after(c.interval, event);
            }
        }
        if samples.due(event) || event >= t_end {
            record(&state, &mut history)?;
            blowup = detect_blowup(&history, &state, &config.thresholds);
            samples = Cadence::after(config.sample_interval, event);
        }
    }

    let completed = state.time() >= t_end - end_tol;
    Ok(RunOutcome {
        final_state: state,
        history,
        blowup,
        regime: classify(params.alpha, params.beta),
        steps,
        completed,
        checkpoints: written,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::app::ic::InitialCondition;
    use crate::timestepper::StepPolicy;

    #[test]
    fn cadence_skips_current_time() {
        let c = Cadence::after(0.1, 0.0);
        assert_eq!(c.next_index, 1);
        let c = Cadence::after(0.1, 0.30000000000000004);
        assert_eq!(c.next_index, 4);
        let c = Cadence::after(0.25, 0.3);
        assert_eq!(c.next_index, 2);
    }

    #[test]
    fn zero_state_stays_zero() {
        let config = RunConfig {
            ic: InitialCondition::Zero,
            policy: StepPolicy::fixed(0.05, 0.5),
            params: crate::mhd::SimParams { n: 16, ..RunConfig::default().params },
            ..RunConfig::default()
        };
        let out = run(&config).unwrap();
        assert!(out.completed);
        assert!(!out.blowup.triggered);
        assert_eq!(out.final_state.w().l2_norm(), 0.0);
        assert_eq!(out.final_state.j().l2_norm(), 0.0);
        assert_eq!(out.history.len(), 6);
    }

    #[test]
    fn samples_land_on_interval_multiples() {
        let config = RunConfig {
            policy: StepPolicy::fixed(0.03, 0.3),
            params: crate::mhd::SimParams { n: 16, ..RunConfig::default().params },
            ..RunConfig::default()
        };
        let out = run(&config).unwrap();
        let times: Vec<f64> = out.history.iter().map(|r| r.time).collect();
        assert_eq!(times.len(), 4);
        for (k, t) in times.iter().enumerate() {
            assert!((t - 0.1 * k as f64).abs() < 1e-15, "{t}");
        }
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }
}
