//! Fourier transforms and linear spectral operators on the 2π-periodic torus.

mod field;
mod grid;

use std::sync::Arc;

use rustfft::num_complex::Complex64;

pub use field::{PhysicalField, ScalarField, VectorField};
pub use grid::SpectralGrid;

use crate::error::Result;

/// Coordinate direction of a partial derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

/// Physical samples to normalized Fourier coefficients (mean mode = average).
pub fn transform_forward(field: &PhysicalField) -> ScalarField {
    let grid = field.grid();
    let scale = 1.0 / grid.len() as f64;
    let mut data: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    grid.fft_forward(&mut data);
    for c in &mut data {
        *c *= scale;
    }
    ScalarField::from_coeffs(grid, data)
}

/// Coefficients back to physical samples; the imaginary residue is dropped.
pub fn transform_inverse(field: &ScalarField) -> PhysicalField {
    let grid = field.grid();
    let mut data = field.coeffs().to_vec();
    grid.fft_inverse(&mut data);
    PhysicalField::from_values(grid, data.into_iter().map(|c| c.re).collect())
}

/// Inverse-transforms two real fields with one complex FFT.
pub(crate) fn inverse_pair(
    grid: &SpectralGrid,
    a: &[Complex64],
    b: &[Complex64],
) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
    grid.fft_inverse(&mut data);
    data.into_iter().map(|z| (z.re, z.im)).unzip()
}

/// Forward-transforms two real fields with one complex FFT.
pub(crate) fn forward_pair(
    grid: &SpectralGrid,
    a: &[f64],
    b: &[f64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut data: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    grid.fft_forward(&mut data);
    let scale = 0.5 / grid.len() as f64;
    let mut fa = Vec::with_capacity(data.len());
    let mut fb = Vec::with_capacity(data.len());
    for idx in 0..data.len() {
        let z = data[idx];
        let zc = data[grid.conjugate_index(idx)].conj();
        fa.push((z + zc) * scale);
        // (z - zc) / (2i)
        let d = (z - zc) * scale;
        fb.push(Complex64::new(d.im, -d.re));
    }
    (fa, fb)
}

/// Symbol `|k|^r` with the mean-mode convention: 1 when `r == 0`, else 0.
#[inline]
pub(crate) fn power_symbol(kmag: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else if kmag == 0.0 {
        0.0
    } else {
        kmag.powf(r)
    }
}

/// Fractional power `Λ^r`: multiplies each coefficient by `|k|^r`.
///
/// Negative `r` requires a mean-free input and leaves the mean at zero.
pub fn lambda_pow(field: &ScalarField, r: f64) -> Result<ScalarField> {
    if r < 0.0 {
        field.require_zero_mean()?;
    }
    let grid = field.grid();
    let coeffs = field
        .coeffs()
        .iter()
        .zip(grid.kmag())
        .map(|(c, &k)| c * power_symbol(k, r))
        .collect();
    Ok(ScalarField::from_coeffs(grid, coeffs))
}

/// Solves `Δψ = f` with mean-zero `ψ` (symbol `−1/|k|²`).
pub fn inverse_laplacian(field: &ScalarField) -> Result<ScalarField> {
    field.require_zero_mean()?;
    let grid = field.grid();
    let coeffs = field
        .coeffs()
        .iter()
        .zip(grid.kmag())
        .map(|(c, &k)| if k == 0.0 { Complex64::new(0.0, 0.0) } else { -c / (k * k) })
        .collect();
    Ok(ScalarField::from_coeffs(grid, coeffs))
}

pub fn partial_derivative(field: &ScalarField, axis: Axis) -> ScalarField {
    let grid = field.grid();
    let coeffs = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| grid.ik(idx, axis) * c)
        .collect();
    ScalarField::from_coeffs(grid, coeffs)
}

/// Zeroes every mode outside the 2/3-rule mask.
pub fn dealias(field: &ScalarField) -> ScalarField {
    let mut out = field.clone();
    dealias_in_place(field.grid(), out.coeffs_mut());
    out
}

pub(crate) fn dealias_in_place(grid: &SpectralGrid, coeffs: &mut [Complex64]) {
    for (c, &keep) in coeffs.iter_mut().zip(grid.dealias_mask()) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Leray projection onto divergence-free fields; the mean passes through.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let mut c1 = v.c1.coeffs().to_vec();
    let mut c2 = v.c2.coeffs().to_vec();
    leray_in_place(grid, &mut c1, &mut c2);
    VectorField::new(
        ScalarField::from_coeffs(grid, c1),
        ScalarField::from_coeffs(grid, c2),
    )
}

pub(crate) fn leray_in_place(grid: &SpectralGrid, c1: &mut [Complex64], c2: &mut [Complex64]) {
    for idx in 1..grid.len() {
        let (k1, k2) = grid.wavevector(idx);
        let (k1, k2) = (k1 as f64, k2 as f64);
        let k2sum = k1 * k1 + k2 * k2;
        let dot = (c1[idx] * k1 + c2[idx] * k2) / k2sum;
        c1[idx] -= dot * k1;
        c2[idx] -= dot * k2;
    }
}

/// Scalar curl `∂₁v₂ − ∂₂v₁`.
pub fn curl(v: &VectorField) -> ScalarField {
    &partial_derivative(&v.c2, Axis::X) - &partial_derivative(&v.c1, Axis::Y)
}

/// Grid holding `factor · n` points per side, used for alias-free quadrature.
pub fn refined_grid(grid: &Arc<SpectralGrid>, factor: usize) -> Arc<SpectralGrid> {
    SpectralGrid::new(grid.n() * factor).expect("refined grid of a valid grid is valid")
}
