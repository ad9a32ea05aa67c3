use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::grid::SpectralGrid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Real scalar field on the torus held by its Fourier coefficients.
///
/// Coefficients are normalized so that the mean-mode coefficient equals the
/// spatial average: `f(x) = Σ_k c(k) e^{i k·x}`.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

/// Real samples of a field on the uniform physical grid.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
}

/// Pair of spectral scalar components `(f1, f2)`.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub c1: ScalarField,
    pub c2: ScalarField,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient array size mismatch");
        ScalarField {
            grid: Arc::clone(grid),
            coeffs,
        }
    }

    /// Samples `f(x, y)` on the grid and transforms.
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        PhysicalField::from_fn(grid, f).to_spectral()
    }

    /// Single real Fourier mode `amp · cos(k·x)` built directly in spectral space.
    pub fn cosine_mode(grid: &Arc<SpectralGrid>, k1: i64, k2: i64, amp: f64) -> Self {
        let mut field = Self::zeros(grid);
        if k1 == 0 && k2 == 0 {
            field.coeffs[0] = Complex64::new(amp, 0.0);
        } else {
            field.coeffs[grid.index_of(k1, k2)] += Complex64::new(0.5 * amp, 0.0);
            field.coeffs[grid.index_of(-k1, -k2)] += Complex64::new(0.5 * amp, 0.0);
        }
        field
    }

    /// Single real Fourier mode `amp · sin(k·x)`.
    pub fn sine_mode(grid: &Arc<SpectralGrid>, k1: i64, k2: i64, amp: f64) -> Self {
        let mut field = Self::zeros(grid);
        if k1 != 0 || k2 != 0 {
            field.coeffs[grid.index_of(k1, k2)] += Complex64::new(0.0, -0.5 * amp);
            field.coeffs[grid.index_of(-k1, -k2)] += Complex64::new(0.0, 0.5 * amp);
        }
        field
    }

    #[inline]
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of wavevector `(k1, k2)`.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.coeffs[self.grid.index_of(k1, k2)]
    }

    /// Mean-mode coefficient (the spatial average).
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn set_mean_zero(&mut self) {
        self.coeffs[0] = ZERO;
    }

    /// `Σ |c(k)|²`.
    pub fn energy_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖f‖_{L²}` via Parseval.
    pub fn l2_norm(&self) -> f64 {
        2.0 * PI * self.energy_sum().sqrt()
    }

    /// `∫ f g dx` for real fields, via Parseval.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        4.0 * PI * PI * s
    }

    /// Errors with `NonzeroMean` unless `|c0| ≤ 1e-12 · ‖f‖_{L²}`.
    pub fn require_zero_mean(&self) -> Result<()> {
        let mean = self.coeffs[0].norm();
        let norm = self.l2_norm();
        if mean <= 1e-12 * norm {
            Ok(())
        } else {
            Err(Error::NonzeroMean { mean, norm })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn to_physical(&self) -> PhysicalField {
        super::transform_inverse(self)
    }

    /// Max-norm of the coefficient difference.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Zero-pads or truncates onto another grid, dropping the Nyquist lines.
    pub fn resample(&self, target: &Arc<SpectralGrid>) -> ScalarField {
        let mut out = ScalarField::zeros(target);
        let limit = (self.grid.n().min(target.n()) / 2) as i64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let (k1, k2) = self.grid.wavevector(idx);
            if k1.abs() < limit && k2.abs() < limit {
                out.coeffs[target.index_of(k1, k2)] = *c;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        ScalarField {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub(crate) fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid.n() == other.grid.n() {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.grid.n(), other.grid.n()))
        }
    }

    fn zip_with(&self, other: &ScalarField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid.n(), other.grid.n(), "grid mismatch");
        ScalarField {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scaled(rhs)
    }
}

impl PhysicalField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        PhysicalField {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<SpectralGrid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value array size mismatch");
        PhysicalField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let h = grid.dx();
        let mut values = Vec::with_capacity(n * n);
        for i1 in 0..n {
            for i2 in 0..n {
                values.push(f(i1 as f64 * h, i2 as f64 * h));
            }
        }
        PhysicalField {
            grid: Arc::clone(grid),
            values,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn to_spectral(&self) -> ScalarField {
        super::transform_forward(self)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PhysicalField) -> PhysicalField {
        PhysicalField {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Uniform-grid quadrature `Σ g(f(x_i)) Δx²`.
    pub fn integrate_with(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.dx();
        self.values.iter().map(|&v| g(v)).sum::<f64>() * h * h
    }
}

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Self {
        assert_eq!(c1.grid().n(), c2.grid().n(), "component grid mismatch");
        VectorField { c1, c2 }
    }

    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        VectorField {
            c1: ScalarField::zeros(grid),
            c2: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.c1.grid()
    }

    /// `‖f‖_{L²}` of the vector field.
    pub fn l2_norm(&self) -> f64 {
        2.0 * PI * (self.c1.energy_sum() + self.c2.energy_sum()).sqrt()
    }

    /// `∫ f·g dx`.
    pub fn inner(&self, other: &VectorField) -> f64 {
        self.c1.inner(&other.c1) + self.c2.inner(&other.c2)
    }

    pub fn divergence(&self) -> ScalarField {
        use super::{partial_derivative, Axis};
        &partial_derivative(&self.c1, Axis::X) + &partial_derivative(&self.c2, Axis::Y)
    }

    /// `‖∇·f‖ / ‖f‖`, zero for the zero field.
    pub fn divergence_ratio(&self) -> f64 {
        let norm = self.l2_norm();
        if norm == 0.0 {
            0.0
        } else {
            self.divergence().l2_norm() / norm
        }
    }

    /// Holds when `‖∇·f‖ ≤ tol · ‖f‖`.
    pub fn is_divergence_free(&self, tol: f64) -> bool {
        self.divergence_ratio() <= tol
    }

    pub fn scaled(&self, s: f64) -> VectorField {
        VectorField {
            c1: self.c1.scaled(s),
            c2: self.c2.scaled(s),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    /// Pointwise max of `|f(x)|` on the physical grid.
    pub fn max_magnitude(&self) -> f64 {
        let p1 = self.c1.to_physical();
        let p2 = self.c2.to_physical();
        p1.values()
            .iter()
            .zip(p2.values())
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField {
            c1: &self.c1 + &rhs.c1,
            c2: &self.c2 + &rhs.c2,
        }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField {
            c1: &self.c1 - &rhs.c1,
            c2: &self.c2 - &rhs.c2,
        }
    }
}
