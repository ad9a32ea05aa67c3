//! MHD state, velocity/vorticity reconstruction and right-hand sides.

use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    self, curl, dealias_in_place, forward_pair, inverse_pair, lambda_pow, leray_in_place,
    power_symbol, Axis, ScalarField, SpectralGrid, VectorField,
};

/// Physical parameters of one simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Kinematic viscosity ν.
    pub nu: f64,
    /// Magnetic diffusivity η.
    pub eta: f64,
    /// Dissipation exponent α (velocity sees `ν Λ^{2α}`).
    pub alpha: f64,
    /// Diffusion exponent β (magnetic field sees `η Λ^{2β}`).
    pub beta: f64,
    /// Grid points per side.
    pub n: usize,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::ParameterOutOfRange(what.to_string()));
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return bad("nu must be finite and >= 0");
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return bad("eta must be finite and >= 0");
        }
        if !(0.0..=2.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 2]");
        }
        if !(0.0..=2.0).contains(&self.beta) {
            return bad("beta must lie in [0, 2]");
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::InvalidGridSize(self.n));
        }
        Ok(())
    }

    /// Per-mode damping rates `ν|k|^{2α}` and `η|k|^{2β}`.
    pub fn damping_rates(&self, grid: &SpectralGrid) -> (Vec<f64>, Vec<f64>) {
        let rates = |coef: f64, exp: f64| {
            grid.kmag()
                .iter()
                .map(|&k| coef * power_symbol(k, 2.0 * exp))
                .collect::<Vec<_>>()
        };
        (rates(self.nu, self.alpha), rates(self.eta, self.beta))
    }
}

/// Solution `(w, j)` at time `t`, with lazily reconstructed `(u, b)`.
#[derive(Clone, Debug)]
pub struct MhdState {
    time: f64,
    w: ScalarField,
    j: ScalarField,
    velocities: OnceLock<(VectorField, VectorField)>,
}

impl MhdState {
    /// Builds a state; means are checked and then pinned to exactly zero.
    pub fn new(time: f64, mut w: ScalarField, mut j: ScalarField) -> Result<Self> {
        w.check_same_grid(&j)?;
        w.require_zero_mean()?;
        j.require_zero_mean()?;
        w.set_mean_zero();
        j.set_mean_zero();
        Ok(MhdState {
            time,
            w,
            j,
            velocities: OnceLock::new(),
        })
    }

    pub fn zero(grid: &Arc<SpectralGrid>) -> Self {
        MhdState {
            time: 0.0,
            w: ScalarField::zeros(grid),
            j: ScalarField::zeros(grid),
            velocities: OnceLock::new(),
        }
    }

    /// State from divergence-free velocity and magnetic fields.
    pub fn from_fields(time: f64, u: &VectorField, b: &VectorField) -> Result<Self> {
        Self::new(time, curl2d(u), curl2d(b))
    }

    pub(crate) fn from_parts_unchecked(time: f64, w: ScalarField, j: ScalarField) -> Self {
        MhdState {
            time,
            w,
            j,
            velocities: OnceLock::new(),
        }
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    #[inline]
    pub fn w(&self) -> &ScalarField {
        &self.w
    }

    #[inline]
    pub fn j(&self) -> &ScalarField {
        &self.j
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.w.grid()
    }

    /// Velocity `u`, reconstructed once per state.
    pub fn u(&self) -> &VectorField {
        &self.reconstructed().0
    }

    /// Magnetic field `b`, reconstructed once per state.
    pub fn b(&self) -> &VectorField {
        &self.reconstructed().1
    }

    fn reconstructed(&self) -> &(VectorField, VectorField) {
        self.velocities.get_or_init(|| {
            (
                biot_savart(&self.w),
                biot_savart(&self.j),
            )
        })
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.j.is_finite()
    }

    /// Copy with `j` (hence `b`) negated.
    pub fn with_negated_current(&self) -> MhdState {
        MhdState::from_parts_unchecked(self.time, self.w.clone(), self.j.scaled(-1.0))
    }
}

/// Time derivative of `(w, j)` split into dissipative and nonlinear parts.
#[derive(Clone, Debug)]
pub struct Tendency {
    pub dw_linear: ScalarField,
    pub dw_nonlinear: ScalarField,
    pub dj_linear: ScalarField,
    pub dj_nonlinear: ScalarField,
}

impl Tendency {
    pub fn dw(&self) -> ScalarField {
        &self.dw_linear + &self.dw_nonlinear
    }

    pub fn dj(&self) -> ScalarField {
        &self.dj_linear + &self.dj_nonlinear
    }
}

fn biot_savart(w: &ScalarField) -> VectorField {
    let grid = w.grid();
    let mut u1 = Vec::with_capacity(grid.len());
    let mut u2 = Vec::with_capacity(grid.len());
    for (idx, c) in w.coeffs().iter().enumerate() {
        let psi = stream_coeff(grid, idx, *c);
        u1.push(-grid.ik(idx, Axis::Y) * psi);
        u2.push(grid.ik(idx, Axis::X) * psi);
    }
    VectorField::new(
        ScalarField::from_coeffs(grid, u1),
        ScalarField::from_coeffs(grid, u2),
    )
}

#[inline]
fn stream_coeff(grid: &SpectralGrid, idx: usize, w: Complex64) -> Complex64 {
    let k = grid.kmag()[idx];
    if k == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        -w / (k * k)
    }
}

/// Biot–Savart: `u = ∇^⊥ψ = (−∂₂ψ, ∂₁ψ)` with `Δψ = w`.
pub fn velocity_from_vorticity(w: &ScalarField) -> Result<VectorField> {
    w.require_zero_mean()?;
    Ok(biot_savart(w))
}

/// Scalar curl `∂₁v₂ − ∂₂v₁`.
pub fn curl2d(v: &VectorField) -> ScalarField {
    curl(v)
}

/// Physical-space samples of everything the vorticity-form nonlinearity needs.
struct VorticityGridFields {
    u1: Vec<f64>,
    u2: Vec<f64>,
    b1: Vec<f64>,
    b2: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    jx: Vec<f64>,
    jy: Vec<f64>,
    u1x: Vec<f64>,
    u1y: Vec<f64>,
    u2x: Vec<f64>,
    b1x: Vec<f64>,
    b1y: Vec<f64>,
    b2x: Vec<f64>,
}

impl VorticityGridFields {
    fn new(grid: &SpectralGrid, w: &[Complex64], j: &[Complex64]) -> Self {
        let len = grid.len();
        let mut specs: [Vec<Complex64>; 14] = std::array::from_fn(|_| Vec::with_capacity(len));
        for idx in 0..len {
            let ikx = grid.ik(idx, Axis::X);
            let iky = grid.ik(idx, Axis::Y);
            let psi = stream_coeff(grid, idx, w[idx]);
            let phi = stream_coeff(grid, idx, j[idx]);
            let (u1, u2) = (-iky * psi, ikx * psi);
            let (b1, b2) = (-iky * phi, ikx * phi);
            let vals = [
                u1,
                u2,
                b1,
                b2,
                ikx * w[idx],
                iky * w[idx],
                ikx * j[idx],
                iky * j[idx],
                ikx * u1,
                iky * u1,
                ikx * u2,
                ikx * b1,
                iky * b1,
                ikx * b2,
            ];
            for (s, v) in specs.iter_mut().zip(vals) {
                s.push(v);
            }
        }
        let mut phys = Vec::with_capacity(14);
        for pair in specs.chunks(2) {
            let (a, b) = inverse_pair(grid, &pair[0], &pair[1]);
            phys.push(a);
            phys.push(b);
        }
        let mut it = phys.into_iter();
        let mut next = || it.next().expect("fourteen fields");
        VorticityGridFields {
            u1: next(),
            u2: next(),
            b1: next(),
            b2: next(),
            wx: next(),
            wy: next(),
            jx: next(),
            jy: next(),
            u1x: next(),
            u1y: next(),
            u2x: next(),
            b1x: next(),
            b1y: next(),
            b2x: next(),
        }
    }
}

/// Nonlinear part of the vorticity/current equations, dealiased and mean-free.
pub(crate) fn vorticity_nonlinearity(
    grid: &SpectralGrid,
    w: &[Complex64],
    j: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let f = VorticityGridFields::new(grid, w, j);
    let len = grid.len();
    let mut nw = Vec::with_capacity(len);
    let mut nj = Vec::with_capacity(len);
    for i in 0..len {
        let u_grad_w = f.u1[i] * f.wx[i] + f.u2[i] * f.wy[i];
        let b_grad_j = f.b1[i] * f.jx[i] + f.b2[i] * f.jy[i];
        let u_grad_j = f.u1[i] * f.jx[i] + f.u2[i] * f.jy[i];
        let b_grad_w = f.b1[i] * f.wx[i] + f.b2[i] * f.wy[i];
        // ∂₂u₂ = −∂₁u₁ and ∂₂b₂ = −∂₁b₁ are not needed by the stretching term.
        let stretch = 2.0
            * (f.b1x[i] * (f.u2x[i] + f.u1y[i]) - f.u1x[i] * (f.b2x[i] + f.b1y[i]));
        nw.push(-u_grad_w + b_grad_j);
        nj.push(-u_grad_j + b_grad_w + stretch);
    }
    let (mut nw, mut nj) = forward_pair(grid, &nw, &nj);
    dealias_in_place(grid, &mut nw);
    dealias_in_place(grid, &mut nj);
    nw[0] = Complex64::new(0.0, 0.0);
    nj[0] = Complex64::new(0.0, 0.0);
    (nw, nj)
}

/// `2[∂₁b₁(∂₁u₂ + ∂₂u₁) − ∂₁u₁(∂₁b₂ + ∂₂b₁)]`, dealiased with zero mean.
pub fn stretching_term(u: &VectorField, b: &VectorField) -> ScalarField {
    use spectral::partial_derivative as d;
    let grid = u.grid();
    let b1x = d(&b.c1, Axis::X).to_physical();
    let u2x = d(&u.c2, Axis::X).to_physical();
    let u1y = d(&u.c1, Axis::Y).to_physical();
    let u1x = d(&u.c1, Axis::X).to_physical();
    let b2x = d(&b.c2, Axis::X).to_physical();
    let b1y = d(&b.c1, Axis::Y).to_physical();
    let values = (0..grid.len())
        .map(|i| {
            2.0 * (b1x.values()[i] * (u2x.values()[i] + u1y.values()[i])
                - u1x.values()[i] * (b2x.values()[i] + b1y.values()[i]))
        })
        .collect();
    let mut out = spectral::PhysicalField::from_values(grid, values).to_spectral();
    dealias_in_place(grid, out.coeffs_mut());
    out.set_mean_zero();
    out
}

/// Right-hand side of the vorticity/current system
///
/// ```text
/// ∂t w = −(u·∇)w + (b·∇)j − ν Λ^{2α} w
/// ∂t j = −(u·∇)j + (b·∇)w + T − η Λ^{2β} j
/// ```
///
/// where `T` is [`stretching_term`].
pub fn rhs_vorticity_form(state: &MhdState, params: &SimParams) -> Tendency {
    let grid = state.grid();
    let (nw, nj) = vorticity_nonlinearity(grid, state.w().coeffs(), state.j().coeffs());
    let lin = |f: &ScalarField, coef: f64, exp: f64| {
        lambda_pow(f, 2.0 * exp)
            .expect("nonnegative exponent")
            .scaled(-coef)
    };
    Tendency {
        dw_linear: lin(state.w(), params.nu, params.alpha),
        dw_nonlinear: ScalarField::from_coeffs(grid, nw),
        dj_linear: lin(state.j(), params.eta, params.beta),
        dj_nonlinear: ScalarField::from_coeffs(grid, nj),
    }
}

/// `(u, b)` pair for the velocity-form integration path.
#[derive(Clone, Debug)]
pub struct VelocityState {
    pub time: f64,
    pub u: VectorField,
    pub b: VectorField,
}

impl VelocityState {
    pub fn from_state(state: &MhdState) -> Self {
        VelocityState {
            time: state.time(),
            u: state.u().clone(),
            b: state.b().clone(),
        }
    }

    pub fn vorticity(&self) -> ScalarField {
        curl2d(&self.u)
    }

    pub fn current(&self) -> ScalarField {
        curl2d(&self.b)
    }
}

/// Nonlinear velocity-form terms: `P[−(u·∇)u + (b·∇)b]`, `P[−(u·∇)b + (b·∇)u]`.
pub(crate) fn velocity_nonlinearity(
    grid: &SpectralGrid,
    u: [&[Complex64]; 2],
    b: [&[Complex64]; 2],
) -> [Vec<Complex64>; 4] {
    let len = grid.len();
    let grad = |c: &[Complex64], axis: Axis| -> Vec<Complex64> {
        c.iter()
            .enumerate()
            .map(|(idx, v)| grid.ik(idx, axis) * v)
            .collect()
    };
    let (u1, u2) = inverse_pair(grid, u[0], u[1]);
    let (b1, b2) = inverse_pair(grid, b[0], b[1]);
    let (u1x, u1y) = inverse_pair(grid, &grad(u[0], Axis::X), &grad(u[0], Axis::Y));
    let (u2x, u2y) = inverse_pair(grid, &grad(u[1], Axis::X), &grad(u[1], Axis::Y));
    let (b1x, b1y) = inverse_pair(grid, &grad(b[0], Axis::X), &grad(b[0], Axis::Y));
    let (b2x, b2y) = inverse_pair(grid, &grad(b[1], Axis::X), &grad(b[1], Axis::Y));

    let mut nu1 = Vec::with_capacity(len);
    let mut nu2 = Vec::with_capacity(len);
    let mut nb1 = Vec::with_capacity(len);
    let mut nb2 = Vec::with_capacity(len);
    for i in 0..len {
        nu1.push(-(u1[i] * u1x[i] + u2[i] * u1y[i]) + (b1[i] * b1x[i] + b2[i] * b1y[i]));
        nu2.push(-(u1[i] * u2x[i] + u2[i] * u2y[i]) + (b1[i] * b2x[i] + b2[i] * b2y[i]));
        nb1.push(-(u1[i] * b1x[i] + u2[i] * b1y[i]) + (b1[i] * u1x[i] + b2[i] * u1y[i]));
        nb2.push(-(u1[i] * b2x[i] + u2[i] * b2y[i]) + (b1[i] * u2x[i] + b2[i] * u2y[i]));
    }
    let (mut nu1, mut nu2) = forward_pair(grid, &nu1, &nu2);
    let (mut nb1, mut nb2) = forward_pair(grid, &nb1, &nb2);
    for c in [&mut nu1, &mut nu2, &mut nb1, &mut nb2] {
        dealias_in_place(grid, c);
    }
    leray_in_place(grid, &mut nu1, &mut nu2);
    leray_in_place(grid, &mut nb1, &mut nb2);
    [nu1, nu2, nb1, nb2]
}

/// Velocity-form tendencies `(du, db)`
///
/// ```text
/// du = P[−(u·∇)u + (b·∇)b] − ν Λ^{2α} u
/// db = P[−(u·∇)b + (b·∇)u] − η Λ^{2β} b
/// ```
pub fn rhs_velocity_form(
    u: &VectorField,
    b: &VectorField,
    params: &SimParams,
) -> Result<(VectorField, VectorField)> {
    for f in [u, b] {
        let ratio = f.divergence_ratio();
        if ratio > 1e-8 {
            return Err(Error::NotDivergenceFree { ratio });
        }
    }
    let grid = u.grid();
    let [nu1, nu2, nb1, nb2] = velocity_nonlinearity(
        grid,
        [u.c1.coeffs(), u.c2.coeffs()],
        [b.c1.coeffs(), b.c2.coeffs()],
    );
    let damp = |f: &ScalarField, n: Vec<Complex64>, coef: f64, exp: f64| {
        let lin = lambda_pow(f, 2.0 * exp).expect("nonnegative exponent");
        let coeffs = n
            .iter()
            .zip(lin.coeffs())
            .map(|(a, l)| a - l * coef)
            .collect();
        ScalarField::from_coeffs(grid, coeffs)
    };
    let du = VectorField::new(
        damp(&u.c1, nu1, params.nu, params.alpha),
        damp(&u.c2, nu2, params.nu, params.alpha),
    );
    let db = VectorField::new(
        damp(&b.c1, nb1, params.eta, params.beta),
        damp(&b.c2, nb2, params.eta, params.beta),
    );
    Ok((du, db))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::diagnostics::lab::random_divergence_free;
    use crate::spectral::{dealias, partial_derivative, PhysicalField};

    fn grid(n: usize) -> Arc<SpectralGrid> {
        SpectralGrid::new(n).unwrap()
    }

    fn params(nu: f64, eta: f64, alpha: f64, beta: f64, n: usize) -> SimParams {
        SimParams {
            nu,
            eta,
            alpha,
            beta,
            n,
        }
    }

    fn close(a: &ScalarField, b: &ScalarField, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    fn vec_fn(
        g: &Arc<SpectralGrid>,
        f1: impl Fn(f64, f64) -> f64,
        f2: impl Fn(f64, f64) -> f64,
    ) -> VectorField {
        VectorField::new(ScalarField::from_fn(g, f1), ScalarField::from_fn(g, f2))
    }

    #[test]
    fn biot_savart_examples() {
        let g = grid(16);
        let u = velocity_from_vorticity(&ScalarField::from_fn(&g, |x, _| x.cos())).unwrap();
        assert!(u.c1.energy_sum() < 1e-30);
        assert!(close(&u.c2, &ScalarField::from_fn(&g, |x, _| x.sin()), 1e-15));

        let u = velocity_from_vorticity(&ScalarField::zeros(&g)).unwrap();
        assert_eq!(u.l2_norm(), 0.0);

        let wy = ScalarField::from_fn(&g, |_, y| y.cos());
        let u = velocity_from_vorticity(&wy).unwrap();
        assert!(close(&u.c1, &ScalarField::from_fn(&g, |_, y| -y.sin()), 1e-15));
        assert!(u.c2.energy_sum() < 1e-30);
        assert!(close(&curl2d(&u), &wy, 1e-15));

        assert!(velocity_from_vorticity(&ScalarField::from_fn(&g, |_, _| 1.0)).is_err());
    }

    #[test]
    fn curl_examples() {
        let g = grid(16);
        let v = vec_fn(&g, |_, _| 0.0, |x, _| x.sin());
        assert!(close(&curl2d(&v), &ScalarField::from_fn(&g, |x, _| x.cos()), 1e-15));

        let grad = vec_fn(&g, |x, y| -x.sin() * y.cos(), |x, y| -x.cos() * y.sin());
        assert!(curl2d(&grad).l2_norm() < 1e-14);

        let ot = vec_fn(&g, |_, y| -y.sin(), |x, _| x.sin());
        let expect = ScalarField::from_fn(&g, |x, y| x.cos() + y.cos());
        assert!(close(&curl2d(&ot), &expect, 1e-15));
    }

    #[test]
    fn vorticity_rhs_single_velocity_mode() {
        let g = grid(16);
        let state = MhdState::new(0.0, ScalarField::from_fn(&g, |x, _| x.cos()), ScalarField::zeros(&g))
            .unwrap();
        let t = rhs_vorticity_form(&state, &params(1.0, 1.0, 0.5, 1.0, 16));
        assert!(close(&t.dw(), &ScalarField::from_fn(&g, |x, _| -x.cos()), 1e-14));
        assert!(t.dj().l2_norm() < 1e-14);
    }

    #[test]
    fn vorticity_rhs_single_magnetic_mode() {
        let g = grid(16);
        let b = vec_fn(&g, |_, _| 0.0, |x, _| x.sin());
        let state = MhdState::from_fields(0.0, &VectorField::zeros(&g), &b).unwrap();
        assert!(close(state.j(), &ScalarField::from_fn(&g, |x, _| x.cos()), 1e-15));
        let t = rhs_vorticity_form(&state, &params(0.0, 1.0, 0.5, 1.0, 16));
        assert!(close(&t.dj(), &ScalarField::from_fn(&g, |x, _| -x.cos()), 1e-13));
        assert!(t.dw().l2_norm() < 1e-14);
        assert!(stretching_term(state.u(), state.b()).l2_norm() < 1e-14);
    }

    #[test]
    fn zero_state_has_zero_tendency() {
        let g = grid(16);
        let state = MhdState::zero(&g);
        let t = rhs_vorticity_form(&state, &params(1.0, 1.0, 0.3, 1.2, 16));
        assert_eq!(t.dw().energy_sum(), 0.0);
        assert_eq!(t.dj().energy_sum(), 0.0);
        let z = VectorField::zeros(&g);
        let (du, db) = rhs_velocity_form(&z, &z, &params(1.0, 1.0, 0.3, 1.2, 16)).unwrap();
        assert_eq!(du.l2_norm(), 0.0);
        assert_eq!(db.l2_norm(), 0.0);
    }

    #[test]
    fn velocity_rhs_examples() {
        let g = grid(16);
        let p = params(1.0, 1.0, 0.5, 1.0, 16);
        let sinx = vec_fn(&g, |_, _| 0.0, |x, _| x.sin());
        let z = VectorField::zeros(&g);
        let (du, db) = rhs_velocity_form(&sinx, &z, &p).unwrap();
        assert!(du.c1.energy_sum() < 1e-30);
        assert!(close(&du.c2, &ScalarField::from_fn(&g, |x, _| -x.sin()), 1e-14));
        assert!(db.l2_norm() < 1e-14);

        let p0 = params(1.0, 0.0, 0.5, 1.0, 16);
        let (du, db) = rhs_velocity_form(&z, &sinx, &p0).unwrap();
        assert!(du.l2_norm() < 1e-14);
        assert!(db.l2_norm() < 1e-14);
    }

    #[test]
    fn velocity_rhs_rejects_compressible_input() {
        let g = grid(16);
        let grad = vec_fn(&g, |x, _| -x.sin(), |_, _| 0.0);
        let z = VectorField::zeros(&g);
        let err = rhs_velocity_form(&grad, &z, &params(1.0, 1.0, 1.0, 1.0, 16)).unwrap_err();
        assert!(matches!(err, Error::NotDivergenceFree { .. }));
    }

    #[test]
    fn stretching_vanishes_without_either_field() {
        let g = grid(16);
        let v = random_divergence_free(&g, 3, 4, 1.0);
        let z = VectorField::zeros(&g);
        assert_eq!(stretching_term(&z, &v).energy_sum(), 0.0);
        assert_eq!(stretching_term(&v, &z).energy_sum(), 0.0);
    }

    /// Products on the physical grid with 2/3 dealiasing, built from the
    /// generic field operations only.
    fn advect(v: &VectorField, f: &ScalarField) -> ScalarField {
        let g = v.grid();
        let fx = partial_derivative(f, Axis::X).to_physical();
        let fy = partial_derivative(f, Axis::Y).to_physical();
        let v1 = v.c1.to_physical();
        let v2 = v.c2.to_physical();
        let vals = (0..g.len())
            .map(|i| v1.values()[i] * fx.values()[i] + v2.values()[i] * fy.values()[i])
            .collect();
        dealias(&PhysicalField::from_values(g, vals).to_spectral())
    }

    fn advect_vec(v: &VectorField, f: &VectorField) -> VectorField {
        VectorField::new(advect(v, &f.c1), advect(v, &f.c2))
    }

    #[test]
    fn stretching_matches_curl_identity() {
        // T = curl[(b·∇)u − (u·∇)b] + (u·∇)j − (b·∇)w
        let g = grid(8);
        for seed in 0..5 {
            let u = random_divergence_free(&g, seed, 2, 1.0);
            let b = random_divergence_free(&g, seed + 100, 2, 1.0);
            let w = curl2d(&u);
            let j = curl2d(&b);
            let inner = &advect_vec(&b, &u) - &advect_vec(&u, &b);
            let mut oracle = &(&curl2d(&inner) + &advect(&u, &j)) - &advect(&b, &w);
            oracle.set_mean_zero();
            let t = stretching_term(&u, &b);
            assert!((&t - &oracle).l2_norm() <= 1e-10 * oracle.l2_norm().max(1e-300));
        }
    }

    #[test]
    fn linear_part_is_exactly_the_damping() {
        let g = grid(16);
        let u = random_divergence_free(&g, 11, 5, 1.0);
        let b = random_divergence_free(&g, 12, 5, 1.0);
        let state = MhdState::from_fields(0.0, &u, &b).unwrap();
        let with = rhs_vorticity_form(&state, &params(0.7, 0.3, 0.4, 1.1, 16));
        let without = rhs_vorticity_form(&state, &params(0.0, 0.0, 0.4, 1.1, 16));
        assert_eq!(with.dw_nonlinear.coeffs(), without.dw_nonlinear.coeffs());
        assert_eq!(with.dj_nonlinear.coeffs(), without.dj_nonlinear.coeffs());
        let expect_w = lambda_pow(state.w(), 0.8).unwrap().scaled(-0.7);
        let expect_j = lambda_pow(state.j(), 2.2).unwrap().scaled(-0.3);
        assert_eq!(with.dw_linear.coeffs(), expect_w.coeffs());
        assert_eq!(with.dj_linear.coeffs(), expect_j.coeffs());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn formulations_agree(seed in any::<u64>(), alpha in 0.0f64..2.0, beta in 0.0f64..2.0) {
            let g = grid(32);
            let u = random_divergence_free(&g, seed, 10, 1.0);
            let b = random_divergence_free(&g, seed ^ 0x5555, 10, 1.0);
            let p = params(0.3, 0.6, alpha, beta, 32);
            let (du, db) = rhs_velocity_form(&u, &b, &p).unwrap();
            let state = MhdState::from_fields(0.0, &u, &b).unwrap();
            let t = rhs_vorticity_form(&state, &p);
            let dw = t.dw();
            let dj = t.dj();
            prop_assert!((&curl2d(&du) - &dw).l2_norm() <= 1e-9 * dw.l2_norm());
            prop_assert!((&curl2d(&db) - &dj).l2_norm() <= 1e-9 * dj.l2_norm());
            prop_assert!(db.is_divergence_free(1e-10));
        }

        #[test]
        fn nonlinearity_conserves_energy(seed in any::<u64>()) {
            let g = grid(32);
            let u = random_divergence_free(&g, seed, 10, 1.0);
            let b = random_divergence_free(&g, seed.wrapping_mul(3), 10, 1.0);
            let (du, db) = rhs_velocity_form(&u, &b, &params(0.0, 0.0, 1.0, 1.0, 32)).unwrap();
            let scale = du.l2_norm() * u.l2_norm() + db.l2_norm() * b.l2_norm();
            prop_assert!((du.inner(&u) + db.inner(&b)).abs() <= 1e-10 * scale);
        }

        #[test]
        fn tendencies_are_mean_free(seed in any::<u64>()) {
            let g = grid(16);
            let u = random_divergence_free(&g, seed, 5, 1.0);
            let b = random_divergence_free(&g, seed ^ 1, 5, 1.0);
            let state = MhdState::from_fields(0.0, &u, &b).unwrap();
            let t = rhs_vorticity_form(&state, &params(1.0, 1.0, 0.5, 1.0, 16));
            prop_assert_eq!(t.dw().mean().norm(), 0.0);
            prop_assert_eq!(t.dj().mean().norm(), 0.0);
        }

        #[test]
        fn cached_fields_match_state(seed in any::<u64>()) {
            let g = grid(16);
            let u = random_divergence_free(&g, seed, 5, 1.0);
            let b = random_divergence_free(&g, seed ^ 9, 5, 1.0);
            let state = MhdState::from_fields(0.0, &u, &b).unwrap();
            prop_assert!((&curl2d(state.u()) - state.w()).l2_norm() <= 1e-10 * state.w().l2_norm());
            prop_assert!((&curl2d(state.b()) - state.j()).l2_norm() <= 1e-10 * state.j().l2_norm());
            prop_assert!((state.u() - &u).l2_norm() <= 1e-12 * u.l2_norm());
        }
    }
}
