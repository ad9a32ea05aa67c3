//! Numerical checks of the functional inequalities behind the a priori
//! estimates, evaluated on random band-limited torus fields.
//!
//! Where an inequality carries a non-constructive constant the checks only
//! report empirical ratios. The positivity inequality
//! `2∫|Λ^α(f^{p/2})|² ≤ p∫|f|^{p−2} f Λ^{2α} f` holds with constant one and is
//! asserted outright.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::{lp_norm, lp_norm_physical, sobolev_norm};
use crate::error::{Error, Result};
use crate::spectral::{
    curl, lambda_pow, leray_project, partial_derivative, refined_grid, Axis, PhysicalField,
    ScalarField, SpectralGrid, VectorField,
};

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream))
}

/// `true` for the representative of each `{k, −k}` pair.
pub(crate) fn is_canonical(k1: i64, k2: i64) -> bool {
    k1 > 0 || (k1 == 0 && k2 > 0)
}

/// Random real, mean-free field with modes `0 < |k| ≤ cutoff`, amplitude
/// `U(0, 1] · |k|^{−slope}` and uniform random phase.
pub fn random_scalar(grid: &Arc<SpectralGrid>, seed: u64, cutoff: i64, slope: f64) -> ScalarField {
    let mut rng = rng_for(seed, 0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let nyq = (grid.n() / 2) as i64;
    for idx in 0..grid.len() {
        let (k1, k2) = grid.wavevector(idx);
        let k = grid.kmag()[idx];
        if !is_canonical(k1, k2) || k > cutoff as f64 || k1.abs() >= nyq || k2.abs() >= nyq {
            continue;
        }
        let amp = (1.0 - rng.gen::<f64>()) * k.powf(-slope);
        let phase = rng.gen_range(0.0..2.0 * PI);
        let c = Complex64::from_polar(amp, phase);
        coeffs[idx] = c;
        coeffs[grid.conjugate_index(idx)] = c.conj();
    }
    ScalarField::from_coeffs(grid, coeffs)
}

/// Random divergence-free, mean-free vector field `∇^⊥ψ` with band-limited `ψ`.
pub fn random_divergence_free(
    grid: &Arc<SpectralGrid>,
    seed: u64,
    cutoff: i64,
    slope: f64,
) -> VectorField {
    let psi = random_scalar(grid, seed, cutoff, slope + 1.0);
    let u = VectorField::new(
        partial_derivative(&psi, Axis::Y).scaled(-1.0),
        partial_derivative(&psi, Axis::X),
    );
    leray_project(&u)
}

/// Largest `max(|k1|, |k2|)` among non-negligible coefficients.
fn bandwidth(f: &ScalarField) -> i64 {
    let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let grid = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-15 * scale)
        .map(|(idx, _)| {
            let (k1, k2) = grid.wavevector(idx);
            k1.abs().max(k2.abs())
        })
        .max()
        .unwrap_or(0)
}

/// Grid on which a degree-`degree` polynomial in `f` is integrated exactly.
fn exact_grid(f: &ScalarField, degree: usize) -> Arc<SpectralGrid> {
    let need = degree as i64 * bandwidth(f) + 1;
    let mut m = f.grid().n();
    while (m as i64) < need {
        m *= 2;
    }
    SpectralGrid::new(m).expect("power of two")
}

/// Outcome of one inequality evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `‖∇f‖_{L^p}` (pointwise Frobenius norm) against `‖curl f‖_{L^p}`.
pub fn gradient_curl_check(f: &VectorField, p: f64) -> Result<InequalityCheck> {
    if !(p > 1.0) {
        return Err(Error::ParameterOutOfRange(format!("p = {p} must exceed 1")));
    }
    let ratio = f.divergence_ratio();
    if ratio > 1e-8 {
        return Err(Error::NotDivergenceFree { ratio });
    }
    f.c1.require_zero_mean()?;
    f.c2.require_zero_mean()?;
    let grid = if p > 2.0 {
        refined_grid(f.grid(), 2)
    } else {
        Arc::clone(f.grid())
    };
    let on = |s: ScalarField| s.resample(&grid).to_physical();
    let grads = [
        on(partial_derivative(&f.c1, Axis::X)),
        on(partial_derivative(&f.c1, Axis::Y)),
        on(partial_derivative(&f.c2, Axis::X)),
        on(partial_derivative(&f.c2, Axis::Y)),
    ];
    let frob: Vec<f64> = (0..grid.len())
        .map(|i| grads.iter().map(|g| g.values()[i].powi(2)).sum::<f64>().sqrt())
        .collect();
    let lhs = lp_norm_physical(&PhysicalField::from_values(&grid, frob), p);
    let rhs = lp_norm_physical(&on(curl(f)), p);
    let ratio = if lhs == 0.0 && rhs == 0.0 { 1.0 } else { lhs / rhs };
    Ok(InequalityCheck { lhs, rhs, ratio })
}

/// Positivity inequality `2∫|Λ^α(f^{p/2})|² ≤ p∫|f|^{p−2} f Λ^{2α} f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides by quadrature on a grid fine enough to make them exact.
pub fn positivity_check(f: &ScalarField, p: f64, alpha: f64) -> Result<PositivityCheck> {
    if !(p >= 2.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2)) {
        return Err(Error::OddP(p));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ParameterOutOfRange(format!("alpha = {alpha} outside [0, 1]")));
    }
    let half = (p as i32) / 2;
    let grid = exact_grid(f, p as usize);
    let fm = f.resample(&grid);
    let fphys = fm.to_physical();
    let power = PhysicalField::from_values(
        &grid,
        fphys.values().iter().map(|v| v.powi(half)).collect(),
    );
    let lam_power = lambda_pow(&power.to_spectral(), alpha)?.to_physical();
    let lhs = 2.0 * lam_power.integrate_with(|v| v * v);

    let lam_f = lambda_pow(&fm, 2.0 * alpha)?.to_physical();
    let integrand = PhysicalField::from_values(
        &grid,
        fphys
            .values()
            .iter()
            .zip(lam_f.values())
            .map(|(v, l)| v.powi(p as i32 - 1) * l)
            .collect(),
    );
    let rhs = p * integrand.integrate_with(|v| v);
    Ok(PositivityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-8 * rhs.abs(),
    })
}

/// Alias-free product `fg` on a grid twice as fine.
fn product_fine(f: &ScalarField, g: &ScalarField) -> ScalarField {
    let fine = refined_grid(f.grid(), 2);
    f.resample(&fine)
        .to_physical()
        .mul(&g.resample(&fine).to_physical())
        .to_spectral()
}

/// `‖fg‖_{Ḣ^{σ₁+σ₂−1}} / (‖f‖_{Ḣ^{σ₁}} ‖g‖_{Ḣ^{σ₂}})` with `fg` mean-projected.
pub fn product_estimate_check(f: &ScalarField, g: &ScalarField, sigma1: f64, sigma2: f64) -> Result<f64> {
    if !(sigma1 < 1.0 && sigma2 < 1.0 && sigma1 + sigma2 > 0.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "need sigma1, sigma2 < 1 and sigma1 + sigma2 > 0, got ({sigma1}, {sigma2})"
        )));
    }
    f.check_same_grid(g)?;
    let denom = sobolev_norm(f, sigma1)? * sobolev_norm(g, sigma2)?;
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let mut fg = product_fine(f, g);
    fg.set_mean_zero();
    Ok(sobolev_norm(&fg, sigma1 + sigma2 - 1.0)? / denom)
}

/// Hölder exponents of the commutator estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderExponents {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl HolderExponents {
    pub fn validate(&self) -> Result<()> {
        let inv = |q: f64| 1.0 / q;
        let open = |q: f64| q > 1.0 && q.is_finite();
        if !(open(self.p) && open(self.p2) && open(self.p3) && self.p1 >= 1.0 && self.p4 >= 1.0) {
            return Err(Error::ExponentMismatch(format!("{self:?} outside (1, ∞)")));
        }
        let gap_a = (inv(self.p) - inv(self.p1) - inv(self.p2)).abs();
        let gap_b = (inv(self.p) - inv(self.p3) - inv(self.p4)).abs();
        if gap_a > 1e-12 || gap_b > 1e-12 {
            return Err(Error::ExponentMismatch(format!(
                "1/p - 1/p1 - 1/p2 = {gap_a:e}, 1/p - 1/p3 - 1/p4 = {gap_b:e}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutatorCheck {
    /// `‖Λ^s(fg) − fΛ^s g‖_{L^p}`
    pub lhs: f64,
    /// `‖∇f‖_{L^{p1}} ‖Λ^{s−1}g‖_{L^{p2}}`
    pub gradient_part: f64,
    /// `‖Λ^s f‖_{L^{p3}} ‖g‖_{L^{p4}}`
    pub fractional_part: f64,
    /// `lhs / (gradient_part + fractional_part)`, zero when `lhs` vanishes.
    pub ratio: f64,
}

/// Kato–Ponce type commutator `Λ^s(fg) − fΛ^s g` and its two bounding products.
///
/// For `s < 1`, `Λ^{s−1}` acts on `g` with its mean removed.
pub fn commutator_check(
    f: &ScalarField,
    g: &ScalarField,
    s: f64,
    exps: &HolderExponents,
) -> Result<CommutatorCheck> {
    if !(s > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("s = {s} must be positive")));
    }
    exps.validate()?;
    f.check_same_grid(g)?;
    let fine = refined_grid(f.grid(), 2);
    let ff = f.resample(&fine);
    let gf = g.resample(&fine);
    let fg = ff.to_physical().mul(&gf.to_physical()).to_spectral();
    let f_lam_g = ff
        .to_physical()
        .mul(&lambda_pow(&gf, s)?.to_physical())
        .to_spectral();
    let commutator = &lambda_pow(&fg, s)? - &f_lam_g;
    let lhs = lp_norm(&commutator, exps.p);

    let fx = partial_derivative(f, Axis::X).to_physical();
    let fy = partial_derivative(f, Axis::Y).to_physical();
    let grad_mag = PhysicalField::from_values(
        f.grid(),
        fx.values()
            .iter()
            .zip(fy.values())
            .map(|(a, b)| a.hypot(*b))
            .collect(),
    );
    // |∇f| is not band-limited, so it is integrated on the native grid.
    let grad_norm = lp_norm_physical(&grad_mag, exps.p1);
    let mut g0 = g.clone();
    if s < 1.0 {
        g0.set_mean_zero();
    }
    let gradient_part = grad_norm * lp_norm(&lambda_pow(&g0, s - 1.0)?, exps.p2);
    let fractional_part = lp_norm(&lambda_pow(f, s)?, exps.p3) * lp_norm(g, exps.p4);
    let denom = gradient_part + fractional_part;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / denom };
    Ok(CommutatorCheck {
        lhs,
        gradient_part,
        fractional_part,
        ratio,
    })
}

/// Summary of the positivity inequality over a batch of random fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivitySweep {
    pub cases: usize,
    pub failures: usize,
    /// Largest `|lhs − rhs| / |rhs|` among the `p = 2` cases.
    pub max_p2_deviation: f64,
    /// Largest `lhs / rhs` among all cases.
    pub max_ratio: f64,
}

pub fn positivity_sweep(
    grid: &Arc<SpectralGrid>,
    seed: u64,
    fields: usize,
    ps: &[f64],
    alphas: &[f64],
) -> Result<PositivitySweep> {
    let cutoff = (grid.n() / 6) as i64;
    let mut out = PositivitySweep {
        cases: 0,
        failures: 0,
        max_p2_deviation: 0.0,
        max_ratio: 0.0,
    };
    for i in 0..fields {
        let f = random_scalar(grid, seed.wrapping_add(i as u64), cutoff, 0.5);
        for &p in ps {
            for &alpha in alphas {
                let c = positivity_check(&f, p, alpha)?;
                out.cases += 1;
                if !c.holds {
                    out.failures += 1;
                }
                if c.rhs != 0.0 {
                    out.max_ratio = out.max_ratio.max(c.lhs / c.rhs);
                }
                if p == 2.0 {
                    let dev = (c.lhs - c.rhs).abs() / c.rhs.abs();
                    out.max_p2_deviation = out.max_p2_deviation.max(dev);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientCurlSweep {
    pub fields: usize,
    /// Largest `|lhs − rhs| / rhs` at `p = 2`.
    pub max_p2_deviation: f64,
    /// Ratios `‖∇f‖_{L^4} / ‖curl f‖_{L^4}`.
    pub p4_ratios: Vec<f64>,
}

impl GradientCurlSweep {
    pub fn max_p4_ratio(&self) -> f64 {
        self.p4_ratios.iter().copied().fold(0.0, f64::max)
    }
}

pub fn gradient_curl_sweep(grid: &Arc<SpectralGrid>, seed: u64, fields: usize) -> Result<GradientCurlSweep> {
    let cutoff = grid.max_retained();
    let mut out = GradientCurlSweep {
        fields,
        max_p2_deviation: 0.0,
        p4_ratios: Vec::with_capacity(fields),
    };
    for i in 0..fields {
        let f = random_divergence_free(grid, seed.wrapping_add(i as u64), cutoff, 1.0);
        let c2 = gradient_curl_check(&f, 2.0)?;
        out.max_p2_deviation = out.max_p2_deviation.max((c2.lhs - c2.rhs).abs() / c2.rhs);
        out.p4_ratios.push(gradient_curl_check(&f, 4.0)?.ratio);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductSweep {
    pub ratios: Vec<f64>,
    /// Maximum ratio of each resample batch.
    pub batch_maxima: Vec<f64>,
}

impl ProductSweep {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn median_batch_max(&self) -> f64 {
        let mut v = self.batch_maxima.clone();
        v.sort_by(f64::total_cmp);
        let m = v.len();
        if m == 0 {
            0.0
        } else if m % 2 == 1 {
            v[m / 2]
        } else {
            0.5 * (v[m / 2 - 1] + v[m / 2])
        }
    }

    /// Finite, and the overall max stays within twice the median batch max.
    pub fn is_stable(&self) -> bool {
        self.ratios.iter().all(|r| r.is_finite()) && self.max_ratio() < 2.0 * self.median_batch_max()
    }
}

pub fn product_sweep(
    grid: &Arc<SpectralGrid>,
    seed: u64,
    pairs: usize,
    batches: usize,
    sigma: (f64, f64),
) -> Result<ProductSweep> {
    let cutoff = grid.max_retained();
    let mut ratios = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let s = seed.wrapping_add(2 * i as u64);
        let f = random_scalar(grid, s, cutoff, 1.0);
        let g = random_scalar(grid, s + 1, cutoff, 1.0);
        ratios.push(product_estimate_check(&f, &g, sigma.0, sigma.1)?);
    }
    let per = pairs.div_ceil(batches.max(1));
    let batch_maxima = ratios
        .chunks(per.max(1))
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .collect();
    Ok(ProductSweep {
        ratios,
        batch_maxima,
    })
}

/// One line of the `verify` report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Spectral property suite plus the inequality lab, as run by `verify`.
pub fn run_verification(seed: u64, n: usize) -> Result<Vec<CheckOutcome>> {
    let grid = SpectralGrid::new(n)?;
    let mut out = Vec::new();
    let cutoff = grid.max_retained();

    let (mut rt, mut pars, mut comp, mut idem) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..20 {
        let f = random_scalar(&grid, seed.wrapping_add(i), cutoff, 0.5);
        let phys = f.to_physical();
        let back = phys.to_spectral().to_physical();
        let scale = phys.max_abs();
        for (a, b) in back.values().iter().zip(phys.values()) {
            rt = rt.max((a - b).abs() / scale);
        }
        let quad = phys.integrate_with(|v| v * v);
        let spec = 4.0 * PI * PI * f.energy_sum();
        pars = pars.max((quad - spec).abs() / spec);
        let lhs = lambda_pow(&lambda_pow(&f, 0.7)?, -1.9)?;
        let rhs = lambda_pow(&f, -1.2)?;
        comp = comp.max((&lhs - &rhs).l2_norm() / rhs.l2_norm());
        let v = VectorField::new(f.clone(), random_scalar(&grid, seed ^ (i + 77), cutoff, 0.5));
        let p = leray_project(&v);
        idem = idem.max((&leray_project(&p) - &p).l2_norm() / p.l2_norm());
    }
    out.push(CheckOutcome::new("transform round trip", rt < 1e-12, format!("max rel error {rt:e}")));
    out.push(CheckOutcome::new("parseval", pars < 1e-10, format!("max rel error {pars:e}")));
    out.push(CheckOutcome::new("lambda composition", comp < 1e-12, format!("max rel error {comp:e}")));
    out.push(CheckOutcome::new("leray idempotence", idem < 1e-12, format!("max rel error {idem:e}")));

    let pos = positivity_sweep(&grid, seed, 100, &[2.0, 4.0, 8.0], &[0.25, 0.5, 0.75, 1.0])?;
    out.push(CheckOutcome::new(
        "positivity inequality",
        pos.failures == 0 && pos.max_p2_deviation < 1e-9,
        format!(
            "{} cases, {} failures, max lhs/rhs {:.6}, p=2 deviation {:e}",
            pos.cases, pos.failures, pos.max_ratio, pos.max_p2_deviation
        ),
    ));

    let gc = gradient_curl_sweep(&grid, seed, 100)?;
    let p4_finite = gc.p4_ratios.iter().all(|r| r.is_finite());
    out.push(CheckOutcome::new(
        "gradient-curl bound",
        gc.max_p2_deviation < 1e-12 && p4_finite,
        format!(
            "p=2 deviation {:e}, max p=4 ratio {:.6}",
            gc.max_p2_deviation,
            gc.max_p4_ratio()
        ),
    ));

    let prod = product_sweep(&grid, seed, 200, 4, (0.3, 0.4))?;
    out.push(CheckOutcome::new(
        "product estimate",
        prod.is_stable(),
        format!(
            "max ratio {:.6}, median batch max {:.6}",
            prod.max_ratio(),
            prod.median_batch_max()
        ),
    ));

    let exps = HolderExponents {
        p: 2.0,
        p1: 4.0,
        p2: 4.0,
        p3: 4.0,
        p4: 4.0,
    };
    let mut max_comm: f64 = 0.0;
    let mut finite = true;
    for i in 0..20u64 {
        let f = random_scalar(&grid, seed.wrapping_add(1000 + 2 * i), cutoff / 2, 1.0);
        let g = random_scalar(&grid, seed.wrapping_add(1001 + 2 * i), cutoff / 2, 1.0);
        for s in [0.5, 1.0, 1.5] {
            let c = commutator_check(&f, &g, s, &exps)?;
            finite &= c.ratio.is_finite();
            max_comm = max_comm.max(c.ratio);
        }
    }
    out.push(CheckOutcome::new(
        "commutator estimate",
        finite,
        format!("max ratio {max_comm:.6}"),
    ));
    Ok(out)
}
