//! Parallel sweeps over `(α, β)` grids.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::app::config::RunConfig;
use crate::app::runner::run;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::regime::{classify, RegimeVerdict};

pub const THREADS_ENV: &str = "GMHD2D_THREADS";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_HEADER: &str = "alpha,beta,verdict,margin,max_X,max_Y,blowup,wall_seconds";

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub alpha_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub base: RunConfig,
    pub max_parallel: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_values.is_empty() || self.beta_values.is_empty() {
            return Err(Error::Config("sweep needs at least one alpha and one beta".into()));
        }
        if self.max_parallel == 0 {
            return Err(Error::Config("max_parallel must be at least 1".into()));
        }
        self.base.validate()
    }

    /// `(α, β)` pairs in α-major order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.alpha_values
            .iter()
            .flat_map(|&a| self.beta_values.iter().map(move |&b| (a, b)))
            .collect()
    }

    /// Worker count: `max_parallel`, capped by `GMHD2D_THREADS` when set.
    pub fn threads(&self) -> usize {
        let cap = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0);
        match cap {
            Some(t) => self.max_parallel.min(t),
            None => self.max_parallel,
        }
    }

    fn config_for(&self, alpha: f64, beta: f64) -> RunConfig {
        let mut cfg = self.base.clone();
        cfg.params.alpha = alpha;
        cfg.params.beta = beta;
        cfg.output_dir = self
            .base
            .output_dir
            .as_ref()
            .map(|d| d.join(format!("alpha_{alpha}_beta_{beta}")));
        cfg
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub verdict: RegimeVerdict,
    pub max_x: f64,
    pub max_y: f64,
    /// Blow-up label, `none`, or the error that stopped the run.
    pub blowup: String,
    pub error: Option<String>,
    pub wall_seconds: f64,
    pub history: Vec<DiagnosticsRecord>,
}

impl SweepRow {
    pub fn to_csv_row(&self, with_wall_time: bool) -> String {
        let wall = if with_wall_time {
            format!("{:.3}", self.wall_seconds)
        } else {
            String::new()
        };
        format!(
            "{},{},{},{:e},{:e},{:e},{},{}",
            self.alpha,
            self.beta,
            self.verdict.source,
            self.verdict.margin,
            self.max_x,
            self.max_y,
            self.blowup.replace(',', ";"),
            wall
        )
    }
}

/// Summary table; wall times are left blank when `with_wall_time` is false.
pub fn summary_csv(rows: &[SweepRow], with_wall_time: bool) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for row in rows {
        let _ = writeln!(s, "{}", row.to_csv_row(with_wall_time));
    }
    s
}

fn run_one(spec: &SweepSpec, alpha: f64, beta: f64) -> SweepRow {
    let start = Instant::now();
    let result = run(&spec.config_for(alpha, beta));
    let wall_seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => SweepRow {
            alpha,
            beta,
            max_x: out.max_x(),
            max_y: out.max_y(),
            blowup: out.blowup.label(),
            verdict: out.regime,
            error: None,
            wall_seconds,
            history: out.history,
        },
        Err(e) => SweepRow {
            alpha,
            beta,
            verdict: classify(alpha, beta),
            max_x: f64::NAN,
            max_y: f64::NAN,
            blowup: format!("error: {e}"),
            error: Some(e.to_string()),
            wall_seconds,
            history: Vec::new(),
        },
    }
}

/// Runs every pair; failures are recorded per row and do not stop the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pairs = spec.pairs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads())
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(a, b)| run_one(spec, a, b))
            .collect()
    });
    if let Some(dir) = &spec.base.output_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(SUMMARY_FILE);
        write_summary(&rows, &path)?;
    }
    Ok(rows)
}

pub fn write_summary(rows: &[SweepRow], path: &Path) -> Result<()> {
    fs::write(path, summary_csv(rows, true)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhd::SimParams;
    use crate::regime::Region;
    use crate::timestepper::StepPolicy;

    fn spec(max_parallel: usize) -> SweepSpec {
        SweepSpec {
            alpha_values: vec![0.4, 0.2, 1.0 / 3.0],
            beta_values: vec![1.0, 1.3],
            base: RunConfig {
                params: SimParams { n: 16, ..RunConfig::default().params },
                policy: StepPolicy::fixed(0.02, 0.1),
                sample_interval: 0.05,
                ..RunConfig::default()
            },
            max_parallel,
        }
    }

    #[test]
    fn alpha_major_order_and_verdicts() {
        let rows = sweep(&spec(2)).unwrap();
        let pairs: Vec<_> = rows.iter().map(|r| (r.alpha, r.beta)).collect();
        assert_eq!(pairs, spec(1).pairs());
        assert_eq!(rows[0].verdict.source, Region::FullDiffusionThirdAlpha);
        assert_eq!(rows[3].verdict.source, Region::FractionalDiffusionLowAlpha);
        assert_eq!(rows[4].verdict.source, Region::Uncovered);
        assert!(rows.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let a = summary_csv(&sweep(&spec(1)).unwrap(), false);
        let b = summary_csv(&sweep(&spec(4)).unwrap(), false);
        assert_eq!(a, b);
    }

    #[test]
    fn failures_are_recorded() {
        let mut s = spec(1);
        s.alpha_values = vec![0.4, 5.0];
        s.beta_values = vec![1.0];
        let rows = sweep(&s).unwrap();
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.is_some());
        assert!(rows[1].blowup.starts_with("error"));
    }

    #[test]
    fn empty_lists_rejected() {
        let mut s = spec(1);
        s.beta_values.clear();
        assert!(sweep(&s).is_err());
    }
}
