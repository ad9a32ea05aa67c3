//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::app::ic::{InitialCondition, ModeTarget};
use crate::error::{Error, Result};
use crate::mhd::SimParams;
use crate::spectral::Axis;
use crate::timestepper::{BlowupThresholds, DtMode, StepPolicy};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub policy: StepPolicy,
    pub ic: InitialCondition,
    pub sample_interval: f64,
    /// Where the diagnostics CSV and checkpoints go; `None` keeps the run in memory.
    pub output_dir: Option<PathBuf>,
    pub checkpoint_interval: Option<f64>,
    pub thresholds: BlowupThresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: SimParams {
                nu: 1.0,
                eta: 1.0,
                alpha: 0.4,
                beta: 1.0,
                n: 64,
            },
            policy: StepPolicy::default(),
            ic: InitialCondition::OrszagTang,
            sample_interval: 0.1,
            output_dir: None,
            checkpoint_interval: None,
            thresholds: BlowupThresholds::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_err(format!("{key}: cannot parse {value:?}")))
}

fn parse_axis(value: &str) -> Result<Axis> {
    match value {
        "1" | "x" => Ok(Axis::X),
        "2" | "y" => Ok(Axis::Y),
        _ => Err(config_err(format!("ic.axis: expected 1 or 2, got {value:?}"))),
    }
}

#[derive(Default)]
struct IcKeys {
    kind: Option<String>,
    axis: Option<Axis>,
    wavenumber: Option<i64>,
    amplitude: Option<f64>,
    target: Option<ModeTarget>,
    seed: Option<u64>,
    slope: Option<f64>,
    cutoff: Option<i64>,
}

impl IcKeys {
    fn build(self) -> Result<InitialCondition> {
        let kind = self.kind.as_deref().unwrap_or("orszag_tang");
        Ok(match kind {
            "orszag_tang" => InitialCondition::OrszagTang,
            "zero" => InitialCondition::Zero,
            "single_mode" => InitialCondition::SingleMode {
                axis: self.axis.unwrap_or(Axis::Y),
                wavenumber: self.wavenumber.unwrap_or(1),
                amplitude: self.amplitude.unwrap_or(1.0),
                target: self.target.unwrap_or(ModeTarget::U),
            },
            "random_smooth" => InitialCondition::RandomSmooth {
                seed: self.seed.unwrap_or(0),
                spectral_slope: self.slope.unwrap_or(2.0),
                cutoff: self.cutoff.unwrap_or(8),
            },
            other => return Err(config_err(format!("unknown ic {other:?}"))),
        })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut ic = IcKeys::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => cfg.params.n = parse_num(key, value)?,
                "nu" => cfg.params.nu = parse_num(key, value)?,
                "eta" => cfg.params.eta = parse_num(key, value)?,
                "alpha" => cfg.params.alpha = parse_num(key, value)?,
                "beta" => cfg.params.beta = parse_num(key, value)?,
                "dt_mode" => {
                    cfg.policy.dt_mode = match value {
                        "fixed" => DtMode::Fixed,
                        "cfl" => DtMode::Cfl,
                        _ => return Err(config_err(format!("dt_mode: unknown {value:?}"))),
                    }
                }
                "dt" => cfg.policy.dt_fixed = Some(parse_num(key, value)?),
                "cfl" => cfg.policy.cfl_number = parse_num(key, value)?,
                "t_end" => cfg.policy.t_end = parse_num(key, value)?,
                "max_steps" => cfg.policy.max_steps = parse_num(key, value)?,
                "sample_interval" => cfg.sample_interval = parse_num(key, value)?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "checkpoint_interval" => {
                    cfg.checkpoint_interval = match value {
                        "none" => None,
                        v => Some(parse_num(key, v)?),
                    }
                }
                "tail_threshold" => cfg.thresholds.tail_fraction = parse_num(key, value)?,
                "growth_factor" => cfg.thresholds.growth_factor = parse_num(key, value)?,
                "ic" => ic.kind = Some(value.to_string()),
                "ic.axis" => ic.axis = Some(parse_axis(value)?),
                "ic.wavenumber" => ic.wavenumber = Some(parse_num(key, value)?),
                "ic.amplitude" => ic.amplitude = Some(parse_num(key, value)?),
                "ic.target" => {
                    ic.target = Some(match value {
                        "u" => ModeTarget::U,
                        "b" => ModeTarget::B,
                        _ => return Err(config_err(format!("ic.target: expected u or b, got {value:?}"))),
                    })
                }
                "ic.seed" => ic.seed = Some(parse_num(key, value)?),
                "ic.slope" => ic.slope = Some(parse_num(key, value)?),
                "ic.cutoff" => ic.cutoff = Some(parse_num(key, value)?),
                _ => return Err(config_err(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        cfg.ic = ic.build()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.policy.validate()?;
        if !(self.sample_interval > 0.0 && self.sample_interval <= self.policy.t_end) {
            return Err(config_err("sample_interval must lie in (0, t_end]"));
        }
        if let Some(c) = self.checkpoint_interval {
            if !(c > 0.0 && c.is_finite()) {
                return Err(config_err("checkpoint_interval must be positive"));
            }
            if self.output_dir.is_none() {
                return Err(config_err("checkpoint_interval needs output_dir"));
            }
        }
        if !(self.thresholds.tail_fraction > 0.0 && self.thresholds.growth_factor > 1.0) {
            return Err(config_err("blow-up thresholds must be positive"));
        }
        Ok(())
    }

    /// Renders the configuration back into the text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "n = {}\nnu = {:?}\neta = {:?}\nalpha = {:?}\nbeta = {:?}", p.n, p.nu, p.eta, p.alpha, p.beta);
        let mode = match self.policy.dt_mode {
            DtMode::Fixed => "fixed",
            DtMode::Cfl => "cfl",
        };
        let _ = writeln!(s, "dt_mode = {mode}");
        if let Some(dt) = self.policy.dt_fixed {
            let _ = writeln!(s, "dt = {dt:?}");
        }
        let _ = writeln!(
            s,
            "cfl = {:?}\nt_end = {:?}\nmax_steps = {}\nsample_interval = {:?}",
            self.policy.cfl_number, self.policy.t_end, self.policy.max_steps, self.sample_interval
        );
        if let Some(dir) = &self.output_dir {
            let _ = writeln!(s, "output_dir = {}", dir.display());
        }
        if let Some(c) = self.checkpoint_interval {
            let _ = writeln!(s, "checkpoint_interval = {c:?}");
        }
        let _ = writeln!(
            s,
            "tail_threshold = {:?}\ngrowth_factor = {:?}\nic = {}",
            self.thresholds.tail_fraction,
            self.thresholds.growth_factor,
            self.ic.name()
        );
        match self.ic {
            InitialCondition::SingleMode { axis, wavenumber, amplitude, target } => {
                let axis = if axis == Axis::X { 1 } else { 2 };
                let target = if target == ModeTarget::U { "u" } else { "b" };
                let _ = writeln!(
                    s,
                    "ic.axis = {axis}\nic.wavenumber = {wavenumber}\nic.amplitude = {amplitude:?}\nic.target = {target}"
                );
            }
            InitialCondition::RandomSmooth { seed, spectral_slope, cutoff } => {
                let _ = writeln!(s, "ic.seed = {seed}\nic.slope = {spectral_slope:?}\nic.cutoff = {cutoff}");
            }
            _ => {}
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = "\
# decay test
n = 32
nu = 1.0
eta = 0.5   # trailing comment
alpha = 0.5
beta = 1
dt_mode = fixed
dt = 1e-3
t_end = 1
sample_interval = 0.25
ic = single_mode
ic.axis = 2
ic.wavenumber = 1
ic.amplitude = 1.0
ic.target = u
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.params.n, 32);
        assert_eq!(cfg.params.eta, 0.5);
        assert_eq!(cfg.policy.dt_mode, DtMode::Fixed);
        assert_eq!(cfg.policy.dt_fixed, Some(1e-3));
        assert_eq!(
            cfg.ic,
            InitialCondition::SingleMode {
                axis: Axis::Y,
                wavenumber: 1,
                amplitude: 1.0,
                target: ModeTarget::U
            }
        );
    }

    #[test]
    fn text_round_trip() {
        let cfg = RunConfig {
            ic: InitialCondition::RandomSmooth { seed: 7, spectral_slope: 1.5, cutoff: 6 },
            output_dir: Some(PathBuf::from("/tmp/x")),
            checkpoint_interval: Some(0.5),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("bogus = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("n = abc"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("no equals sign"), Err(Error::Config(_))));
        assert!(RunConfig::parse("n = 48").is_err());
        assert!(RunConfig::parse("sample_interval = 10\nt_end = 1").is_err());
        assert!(RunConfig::parse("checkpoint_interval = 0.5").is_err());
    }
}
