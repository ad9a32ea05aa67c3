//! Integrating-factor RK4 time stepping, CFL control and the blow-up monitor.
//!
//! The linear dissipation `−ν|k|^{2α}`, `−η|k|^{2β}` is absorbed into exact
//! per-mode exponentials; only the quadratic terms go through the classical
//! four-stage scheme (Lawson form):
//!
//! ```text
//! a = N(y)
//! b = N(E½ (y + h/2 a))
//! c = N(E½ y + h/2 b)
//! d = N(E y + h E½ c)
//! y' = E y + h/6 (E a + 2 E½ (b + c) + d)
//! ```

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::mhd::{velocity_nonlinearity, vorticity_nonlinearity, MhdState, SimParams, VelocityState};
use crate::spectral::{ScalarField, SpectralGrid, VectorField};

/// One Lawson RK4 step over a set of spectral arrays.
fn lawson_rk4<F>(fields: &[&[Complex64]], rates: &[&[f64]], dt: f64, mut nonlinear: F) -> Vec<Vec<Complex64>>
where
    F: FnMut(&[Vec<Complex64>]) -> Vec<Vec<Complex64>>,
{
    let full: Vec<Vec<f64>> = rates
        .iter()
        .map(|r| r.iter().map(|&l| (-l * dt).exp()).collect())
        .collect();
    let half: Vec<Vec<f64>> = rates
        .iter()
        .map(|r| r.iter().map(|&l| (-l * 0.5 * dt).exp()).collect())
        .collect();
    let h2 = 0.5 * dt;

    let y: Vec<Vec<Complex64>> = fields.iter().map(|f| f.to_vec()).collect();
    let combine = |f: &dyn Fn(usize, usize) -> Complex64| -> Vec<Vec<Complex64>> {
        (0..y.len())
            .map(|v| (0..y[v].len()).map(|i| f(v, i)).collect())
            .collect()
    };

    let ka = nonlinear(&y);
    let s2 = combine(&|v, i| half[v][i] * (y[v][i] + ka[v][i] * h2));
    let kb = nonlinear(&s2);
    let s3 = combine(&|v, i| half[v][i] * y[v][i] + kb[v][i] * h2);
    let kc = nonlinear(&s3);
    let s4 = combine(&|v, i| full[v][i] * y[v][i] + half[v][i] * kc[v][i] * dt);
    let kd = nonlinear(&s4);
    combine(&|v, i| {
        full[v][i] * y[v][i]
            + (full[v][i] * ka[v][i] + 2.0 * half[v][i] * (kb[v][i] + kc[v][i]) + kd[v][i])
                * (dt / 6.0)
    })
}

fn all_finite(c: &[Complex64]) -> bool {
    c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Integrator for the `(w, j)` system with cached damping rates.
#[derive(Clone, Debug)]
pub struct Integrator {
    grid: Arc<SpectralGrid>,
    params: SimParams,
    rate_w: Vec<f64>,
    rate_j: Vec<f64>,
    nonlinear: bool,
}

impl Integrator {
    pub fn new(grid: &Arc<SpectralGrid>, params: &SimParams) -> Self {
        let (rate_w, rate_j) = params.damping_rates(grid);
        Integrator {
            grid: Arc::clone(grid),
            params: *params,
            rate_w,
            rate_j,
            nonlinear: true,
        }
    }

    /// Drops the quadratic terms, leaving pure exponential decay.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// Advances `(w, j)` by `dt`.
    pub fn step(&self, state: &MhdState, dt: f64) -> Result<MhdState> {
        assert!(dt > 0.0, "time step must be positive");
        let grid = &self.grid;
        let nonlinear = self.nonlinear;
        let mut out = lawson_rk4(
            &[state.w().coeffs(), state.j().coeffs()],
            &[&self.rate_w, &self.rate_j],
            dt,
            |y| {
                if nonlinear {
                    let (nw, nj) = vorticity_nonlinearity(grid, &y[0], &y[1]);
                    vec![nw, nj]
                } else {
                    vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 2]
                }
            },
        );
        let time = state.time() + dt;
        if !out.iter().all(|c| all_finite(c)) {
            return Err(Error::NonFiniteState { time });
        }
        let mut j = out.pop().expect("two fields");
        let mut w = out.pop().expect("two fields");
        w[0] = Complex64::new(0.0, 0.0);
        j[0] = Complex64::new(0.0, 0.0);
        Ok(MhdState::from_parts_unchecked(
            time,
            ScalarField::from_coeffs(grid, w),
            ScalarField::from_coeffs(grid, j),
        ))
    }

    /// Advances the velocity-form state `(u, b)` by `dt`.
    pub fn step_velocity(&self, state: &VelocityState, dt: f64) -> Result<VelocityState> {
        assert!(dt > 0.0, "time step must be positive");
        let grid = &self.grid;
        let (rate_u, rate_b) = (&self.rate_w, &self.rate_j);
        let nonlinear = self.nonlinear;
        let out = lawson_rk4(
            &[
                state.u.c1.coeffs(),
                state.u.c2.coeffs(),
                state.b.c1.coeffs(),
                state.b.c2.coeffs(),
            ],
            &[rate_u, rate_u, rate_b, rate_b],
            dt,
            |y| {
                if nonlinear {
                    velocity_nonlinearity(grid, [&y[0], &y[1]], [&y[2], &y[3]]).into()
                } else {
                    vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 4]
                }
            },
        );
        let time = state.time + dt;
        if !out.iter().all(|c| all_finite(c)) {
            return Err(Error::NonFiniteState { time });
        }
        let mut it = out.into_iter().map(|c| ScalarField::from_coeffs(grid, c));
        let mut next = || it.next().expect("four fields");
        Ok(VelocityState {
            time,
            u: VectorField::new(next(), next()),
            b: VectorField::new(next(), next()),
        })
    }
}

/// Single IF-RK4 step of the `(w, j)` system.
pub fn step(state: &MhdState, params: &SimParams, dt: f64) -> Result<MhdState> {
    Integrator::new(state.grid(), params).step(state, dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtMode {
    Fixed,
    Cfl,
}

/// How the step size is chosen and when the run stops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub dt_mode: DtMode,
    /// Step size in fixed mode; upper cap in CFL mode when set.
    pub dt_fixed: Option<f64>,
    pub cfl_number: f64,
    pub t_end: f64,
    pub max_steps: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            dt_mode: DtMode::Cfl,
            dt_fixed: Some(1e-2),
            cfl_number: 0.5,
            t_end: 5.0,
            max_steps: 10_000_000,
        }
    }
}

impl StepPolicy {
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        StepPolicy {
            dt_mode: DtMode::Fixed,
            dt_fixed: Some(dt),
            t_end,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad("dt must be positive");
            }
        } else if self.dt_mode == DtMode::Fixed {
            return bad("fixed dt mode needs dt");
        }
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive");
        }
        Ok(())
    }

    /// Step size proposed for `state` under this policy.
    pub fn dt_for(&self, state: &MhdState) -> f64 {
        match self.dt_mode {
            DtMode::Fixed => self.dt_fixed.expect("validated fixed policy"),
            DtMode::Cfl => cfl_dt(state, self),
        }
    }
}

/// `cfl · Δx / max(‖u‖_∞ + ‖b‖_∞, 1e−8)`, capped by `dt_fixed` when set.
pub fn cfl_dt(state: &MhdState, policy: &StepPolicy) -> f64 {
    let speed = state.u().max_magnitude() + state.b().max_magnitude();
    let dt = policy.cfl_number * state.grid().dx() / speed.max(1e-8);
    match policy.dt_fixed {
        Some(cap) => dt.min(cap),
        None => dt,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupReason {
    SpectrumTail,
    NormGrowth,
    NonFinite,
}

/// Engineering thresholds for [`detect_blowup`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupThresholds {
    /// Maximum tolerated fraction of enstrophy in the spectral tail band.
    pub tail_fraction: f64,
    /// Maximum tolerated ratio `max X(t) / X(0)`.
    pub growth_factor: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        BlowupThresholds {
            tail_fraction: 0.01,
            growth_factor: 1e6,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlowupVerdict {
    pub triggered: bool,
    pub reason: Option<BlowupReason>,
    pub time: Option<f64>,
    pub details: Option<DiagnosticsRecord>,
}

impl BlowupVerdict {
    fn hit(reason: BlowupReason, time: f64, details: Option<DiagnosticsRecord>) -> Self {
        BlowupVerdict {
            triggered: true,
            reason: Some(reason),
            time: Some(time),
            details,
        }
    }

    pub fn label(&self) -> String {
        match (self.reason, self.time) {
            (Some(r), Some(t)) => format!("{}@{}", r.as_str(), t),
            _ => "none".to_string(),
        }
    }
}

impl BlowupReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlowupReason::SpectrumTail => "spectrum_tail",
            BlowupReason::NormGrowth => "norm_growth",
            BlowupReason::NonFinite => "non_finite",
        }
    }
}

/// Flags non-finite data, an over-full spectral tail, or runaway `X(t)`.
pub fn detect_blowup(
    history: &[DiagnosticsRecord],
    state: &MhdState,
    thresholds: &BlowupThresholds,
) -> BlowupVerdict {
    let last = history.last().cloned();
    if !state.is_finite() || history.iter().any(|r| !r.is_finite()) {
        return BlowupVerdict::hit(BlowupReason::NonFinite, state.time(), last);
    }
    let Some(latest) = history.last() else {
        return BlowupVerdict::default();
    };
    if latest.spectrum_tail > thresholds.tail_fraction {
        return BlowupVerdict::hit(BlowupReason::SpectrumTail, latest.time, last);
    }
    let x0 = history[0].x;
    if x0 > 0.0 {
        let max_x = history.iter().map(|r| r.x).fold(0.0, f64::max);
        if max_x > thresholds.growth_factor * x0 {
            return BlowupVerdict::hit(BlowupReason::NormGrowth, latest.time, last);
        }
    }
    BlowupVerdict::default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::lab::random_divergence_free;

    fn params(nu: f64, eta: f64, alpha: f64, beta: f64, n: usize) -> SimParams {
        SimParams {
            nu,
            eta,
            alpha,
            beta,
            n,
        }
    }

    fn cos_state(g: &Arc<SpectralGrid>) -> MhdState {
        MhdState::new(0.0, ScalarField::from_fn(g, |x, _| x.cos()), ScalarField::zeros(g)).unwrap()
    }

    #[test]
    fn single_mode_decays_exactly() {
        let g = SpectralGrid::new(16).unwrap();
        for alpha in [0.0, 0.35, 0.5, 1.0, 2.0] {
            let s = step(&cos_state(&g), &params(1.0, 1.0, alpha, 1.0, 16), 0.1).unwrap();
            let expect = ScalarField::from_fn(&g, |x, _| (-0.1f64).exp() * x.cos());
            assert!((s.w() - &expect).l2_norm() <= 1e-10 * expect.l2_norm());
            assert!((s.time() - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = SpectralGrid::new(16).unwrap();
        let s = step(&MhdState::zero(&g), &params(0.0, 0.0, 1.0, 1.0, 16), 0.1).unwrap();
        assert_eq!(s.w().energy_sum() + s.j().energy_sum(), 0.0);
    }

    #[test]
    fn linear_dynamics_exact_at_any_dt() {
        let g = SpectralGrid::new(16).unwrap();
        let u = random_divergence_free(&g, 1, 5, 1.0);
        let b = random_divergence_free(&g, 2, 5, 1.0);
        let s0 = MhdState::from_fields(0.0, &u, &b).unwrap();
        let p = params(0.8, 0.3, 0.7, 1.3, 16);
        for dt in [1e-3, 0.5, 10.0] {
            let s = Integrator::new(&g, &p).linear_only().step(&s0, dt).unwrap();
            for idx in 0..g.len() {
                let k = g.kmag()[idx];
                if k == 0.0 {
                    continue;
                }
                let ew = s0.w().coeffs()[idx] * (-0.8 * k.powf(1.4) * dt).exp();
                let ej = s0.j().coeffs()[idx] * (-0.3 * k.powf(2.6) * dt).exp();
                assert!((s.w().coeffs()[idx] - ew).norm() <= 1e-12 * ew.norm().max(1e-300));
                assert!((s.j().coeffs()[idx] - ej).norm() <= 1e-12 * ej.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn stepping_commutes_with_current_reversal() {
        let g = SpectralGrid::new(32).unwrap();
        let u = random_divergence_free(&g, 5, 10, 1.0);
        let b = random_divergence_free(&g, 6, 10, 1.0);
        let s0 = MhdState::from_fields(0.0, &u, &b).unwrap();
        let p = params(0.1, 0.2, 0.4, 1.0, 32);
        let a = step(&s0.with_negated_current(), &p, 0.01).unwrap();
        let b = step(&s0, &p, 0.01).unwrap().with_negated_current();
        assert!((a.w() - b.w()).l2_norm() <= 1e-12 * b.w().l2_norm());
        assert!((a.j() - b.j()).l2_norm() <= 1e-12 * b.j().l2_norm());
    }

    #[test]
    fn non_finite_coefficients_are_reported() {
        let g = SpectralGrid::new(16).unwrap();
        let mut w = ScalarField::from_fn(&g, |x, _| x.cos());
        w.coeffs_mut()[g.index_of(1, 0)] = Complex64::new(f64::NAN, 0.0);
        let s = MhdState::from_parts_unchecked(0.0, w, ScalarField::zeros(&g));
        let err = step(&s, &params(1.0, 1.0, 1.0, 1.0, 16), 0.01).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
    }

    #[test]
    fn cfl_examples() {
        let policy = StepPolicy {
            dt_mode: DtMode::Cfl,
            dt_fixed: None,
            cfl_number: 0.5,
            t_end: 1.0,
            max_steps: 10,
        };
        let g64 = SpectralGrid::new(64).unwrap();
        let dt = cfl_dt(&cos_state(&g64), &policy);
        assert!((dt - 0.5 * (2.0 * std::f64::consts::PI / 64.0)).abs() < 1e-12);
        assert!((dt - 0.04909).abs() < 1e-5);

        let g128 = SpectralGrid::new(128).unwrap();
        let dt2 = cfl_dt(&cos_state(&g128), &policy);
        assert!((dt2 - 0.5 * dt).abs() < 1e-12);

        let zero = MhdState::zero(&g64);
        assert!((cfl_dt(&zero, &policy) - 0.5 * g64.dx() / 1e-8).abs() < 1e-3);
        let capped = StepPolicy {
            dt_fixed: Some(0.01),
            ..policy
        };
        assert_eq!(cfl_dt(&zero, &capped), 0.01);
    }

    fn record(time: f64, x: f64, tail: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            time,
            x,
            spectrum_tail: tail,
            ..Default::default()
        }
    }

    #[test]
    fn blowup_detector_rules() {
        let g = SpectralGrid::new(16).unwrap();
        let s = cos_state(&g);
        let th = BlowupThresholds::default();
        let calm = [record(0.0, 2.0, 0.0), record(1.0, 1.0, 0.0)];
        assert!(!detect_blowup(&calm, &s, &th).triggered);

        let tail = [record(0.0, 2.0, 0.0), record(1.0, 1.0, 0.02)];
        let v = detect_blowup(&tail, &s, &th);
        assert_eq!(v.reason, Some(BlowupReason::SpectrumTail));
        assert_eq!(v.time, Some(1.0));

        let growth = [record(0.0, 1.0, 0.0), record(1.0, 2e6, 0.0)];
        assert_eq!(detect_blowup(&growth, &s, &th).reason, Some(BlowupReason::NormGrowth));

        let mut w = s.w().clone();
        w.coeffs_mut()[3] = Complex64::new(f64::NAN, 0.0);
        let bad = MhdState::from_parts_unchecked(1.0, w, ScalarField::zeros(&g));
        let v = detect_blowup(&calm, &bad, &th);
        assert!(v.triggered);
        assert_eq!(v.reason, Some(BlowupReason::NonFinite));
    }
}
