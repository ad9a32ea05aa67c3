//! Norm diagnostics tracked along a run, the discrete energy balance, and the
//! functional-inequality lab ([`lab`]).

pub mod lab;

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mhd::{MhdState, SimParams};
use crate::spectral::{power_symbol, refined_grid, PhysicalField, ScalarField};

/// Homogeneous Sobolev norm `‖Λ^s f‖_{L²}`; the mean counts only at `s = 0`.
pub fn sobolev_norm(field: &ScalarField, s: f64) -> Result<f64> {
    if s < 0.0 {
        field.require_zero_mean()?;
    }
    Ok(sobolev_norm_sq_unchecked(field, s).sqrt())
}

pub(crate) fn sobolev_norm_sq_unchecked(field: &ScalarField, s: f64) -> f64 {
    let sum: f64 = field
        .coeffs()
        .iter()
        .zip(field.grid().kmag())
        .skip(if s < 0.0 { 1 } else { 0 })
        .map(|(c, &k)| power_symbol(k, 2.0 * s) * c.norm_sqr())
        .sum();
    4.0 * PI * PI * sum
}

/// `‖f‖_{L^p}` by uniform-grid quadrature; `p = ∞` gives the grid maximum.
///
/// For `p > 2` the field is first zero-padded onto a grid twice as fine.
pub fn lp_norm(field: &ScalarField, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1");
    let phys = if p > 2.0 {
        field.resample(&refined_grid(field.grid(), 2)).to_physical()
    } else {
        field.to_physical()
    };
    lp_norm_physical(&phys, p)
}

/// Raw quadrature `(Σ|f(xᵢ)|^p Δx²)^{1/p}` of grid samples.
pub fn lp_norm_physical(field: &PhysicalField, p: f64) -> f64 {
    if p.is_infinite() {
        return field.max_abs();
    }
    if p == 2.0 {
        return field.integrate_with(|v| v * v).sqrt();
    }
    field.integrate_with(|v| v.abs().powf(p)).powf(1.0 / p)
}

/// Which a-priori estimate the `γ` exponent is taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRegime {
    /// Full magnetic diffusion `β = 1`: `γ = 2 − α(1+α)/(1−α)`, needs `1 < γ < 1+α`.
    BetaOne,
    /// Fractional diffusion: `γ = 3 − β − α(1+α)/(1−α)`, needs `β < γ < α+β`.
    FractionalBeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaChoice {
    pub gamma: f64,
    pub regime: GammaRegime,
    pub admissible: bool,
}

impl GammaChoice {
    /// Integrability exponent of `w` paired with this `γ`:
    /// `2(1+α)/(2−γ)` or `2(1+α)/(3−β−γ)`. Infinite when the denominator
    /// is not positive.
    pub fn lp_exponent(&self, alpha: f64, beta: f64) -> f64 {
        let denom = match self.regime {
            GammaRegime::BetaOne => 2.0 - self.gamma,
            GammaRegime::FractionalBeta => 3.0 - beta - self.gamma,
        };
        let p = 2.0 * (1.0 + alpha) / denom;
        if denom > 0.0 && p.is_finite() {
            p.max(1.0)
        } else {
            f64::INFINITY
        }
    }
}

pub fn gamma_choice(alpha: f64, beta: f64, regime: GammaRegime) -> Result<GammaChoice> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::ParameterOutOfRange(format!(
            "alpha = {alpha} outside [0, 1)"
        )));
    }
    let shift = alpha * (1.0 + alpha) / (1.0 - alpha);
    let (gamma, admissible) = match regime {
        GammaRegime::BetaOne => {
            if beta != 1.0 {
                return Err(Error::RegimeMismatch(format!("beta = {beta}, expected 1")));
            }
            let g = 2.0 - shift;
            (g, 1.0 < g && g < 1.0 + alpha)
        }
        GammaRegime::FractionalBeta => {
            let g = 3.0 - beta - shift;
            (g, beta < g && g < alpha + beta)
        }
    };
    Ok(GammaChoice {
        gamma,
        regime,
        admissible,
    })
}

/// Exponents used by [`sample`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// Order of the `‖Λ^γ b‖²` monitor.
    pub gamma: f64,
    /// Integrability exponent of the `‖w‖_{L^p}` monitor.
    pub p: f64,
    /// Width of the spectral tail band as a fraction of the retained range.
    pub tail_band: f64,
}

impl DiagnosticsConfig {
    /// `γ` and `p` from the estimate matching `(α, β)`.
    ///
    /// Outside `α ∈ [0, 1)` the formulas are undefined; `γ = 1, p = 2` is used.
    pub fn for_params(params: &SimParams) -> Self {
        let regime = if params.beta == 1.0 {
            GammaRegime::BetaOne
        } else {
            GammaRegime::FractionalBeta
        };
        match gamma_choice(params.alpha, params.beta, regime) {
            Ok(choice) => DiagnosticsConfig {
                gamma: choice.gamma,
                p: choice.lp_exponent(params.alpha, params.beta),
                tail_band: 1.0 / 6.0,
            },
            Err(_) => DiagnosticsConfig {
                gamma: 1.0,
                p: 2.0,
                tail_band: 1.0 / 6.0,
            },
        }
    }
}

/// One time sample of every monitored norm.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    /// `‖u‖² + ‖b‖²`
    pub energy: f64,
    /// `‖w‖² + ‖j‖²`
    pub x: f64,
    /// `‖∇w‖² + ‖∇j‖²`
    pub y: f64,
    /// `ν ‖Λ^α u‖²`
    pub diss_u: f64,
    /// `η ‖Λ^β b‖²`
    pub diss_b: f64,
    /// `‖Λ^γ b‖²`
    pub hgamma_b: f64,
    /// `‖w‖_{L^p}`
    pub lp_w: f64,
    /// Fraction of `‖w‖² + ‖j‖²` carried by the tail band.
    pub spectrum_tail: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "time,energy,X,Y,diss_u,diss_b,hgamma_b,lp_w,spectrum_tail";

    pub fn to_csv_row(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.values().iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{v:e}").expect("writing to a String");
        }
        s
    }

    pub fn values(&self) -> [f64; 9] {
        [
            self.time,
            self.energy,
            self.x,
            self.y,
            self.diss_u,
            self.diss_b,
            self.hgamma_b,
            self.lp_w,
            self.spectrum_tail,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Fraction of `Σ(|ŵ|² + |ĵ|²)` in modes with `max(|k1|,|k2|) > (1 − band)·k_max`.
pub fn spectrum_tail(state: &MhdState, band: f64) -> f64 {
    let grid = state.grid();
    let cutoff = (1.0 - band) * grid.max_retained() as f64;
    let (mut tail, mut total) = (0.0, 0.0);
    for (idx, (w, j)) in state.w().coeffs().iter().zip(state.j().coeffs()).enumerate() {
        let e = w.norm_sqr() + j.norm_sqr();
        total += e;
        let (k1, k2) = grid.wavevector(idx);
        if k1.abs().max(k2.abs()) as f64 > cutoff {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

pub fn sample(state: &MhdState, params: &SimParams, config: &DiagnosticsConfig) -> DiagnosticsRecord {
    let u = state.u();
    let b = state.b();
    let sq = |f: &ScalarField, s: f64| sobolev_norm_sq_unchecked(f, s);
    DiagnosticsRecord {
        time: state.time(),
        energy: sq(&u.c1, 0.0) + sq(&u.c2, 0.0) + sq(&b.c1, 0.0) + sq(&b.c2, 0.0),
        x: sq(state.w(), 0.0) + sq(state.j(), 0.0),
        y: sq(state.w(), 1.0) + sq(state.j(), 1.0),
        diss_u: params.nu * (sq(&u.c1, params.alpha) + sq(&u.c2, params.alpha)),
        diss_b: params.eta * (sq(&b.c1, params.beta) + sq(&b.c2, params.beta)),
        hgamma_b: sq(&b.c1, config.gamma) + sq(&b.c2, config.gamma),
        lp_w: lp_norm(state.w(), config.p),
        spectrum_tail: spectrum_tail(state, config.tail_band),
    }
}

/// `max_t |E(t) + 2∫₀ᵗ(diss_u + diss_b) − E(0)| / E(0)` with the trapezoid rule.
///
/// Returns 0 when `E(0) = 0`.
pub fn energy_balance_residual(history: &[DiagnosticsRecord]) -> Result<f64> {
    if history.len() < 2 {
        return Err(Error::InsufficientSamples(history.len()));
    }
    let e0 = history[0].energy;
    if e0 == 0.0 {
        return Ok(0.0);
    }
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    for pair in history.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        integral += 0.5 * (b.time - a.time) * (a.diss_u + a.diss_b + b.diss_u + b.diss_b);
        worst = worst.max((b.energy + 2.0 * integral - e0).abs());
    }
    Ok(worst / e0)
}
