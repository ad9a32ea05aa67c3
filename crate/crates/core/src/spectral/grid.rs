use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform `n × n` discretization of `[0, 2π)²` with its Fourier tables.
///
/// Modes are stored row-major: flat index `i1 * n + i2` holds the coefficient
/// of wavevector `(k1, k2) = (wavenumber(i1), wavenumber(i2))`, where the
/// first index runs along `x` and the second along `y`. Physical samples use
/// the same layout with `(x, y) = (2π i1 / n, 2π i2 / n)`.
pub struct SpectralGrid {
    n: usize,
    wavenumbers: Vec<i64>,
    kmag: Vec<f64>,
    mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid").field("n", &self.n).finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl SpectralGrid {
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        let half = (n / 2) as i64;
        let wavenumbers: Vec<i64> = (0..n as i64)
            .map(|i| if i < half { i } else { i - n as i64 })
            .collect();
        // 2/3 rule on the max-norm: keep max(|k1|, |k2|) <= n/3.
        let cutoff = n as f64 / 3.0;
        let mut kmag = Vec::with_capacity(n * n);
        let mut mask = Vec::with_capacity(n * n);
        for &k1 in &wavenumbers {
            for &k2 in &wavenumbers {
                kmag.push(((k1 * k1 + k2 * k2) as f64).sqrt());
                mask.push(k1.abs().max(k2.abs()) as f64 <= cutoff);
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(SpectralGrid {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
            kmag,
            mask,
        }))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `2π / n`.
    pub fn dx(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }

    /// Signed integer wavenumber stored at position `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        self.wavenumbers[i]
    }

    /// Integer wavevector of flat mode index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.wavenumbers[idx / self.n], self.wavenumbers[idx % self.n])
    }

    /// Flat index holding wavevector `(k1, k2)` (taken modulo `n`).
    pub fn index_of(&self, k1: i64, k2: i64) -> usize {
        let n = self.n as i64;
        (k1.rem_euclid(n) * n + k2.rem_euclid(n)) as usize
    }

    /// Flat index of the mode `-k` for the mode at `idx`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    /// Euclidean norm `|k|` for each flat mode index.
    #[inline]
    pub fn kmag(&self) -> &[f64] {
        &self.kmag
    }

    /// Dealiasing mask, `true` where the mode is retained.
    #[inline]
    pub fn dealias_mask(&self) -> &[bool] {
        &self.mask
    }

    /// Largest retained wavenumber along an axis.
    pub fn max_retained(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// `true` when the axis index sits on the Nyquist wavenumber `-n/2`,
    /// where odd-order symbols are set to zero to keep real fields real.
    #[inline]
    pub(crate) fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Multiplier `i k_axis` for a first derivative, zero on the Nyquist line.
    #[inline]
    pub(crate) fn ik(&self, idx: usize, axis: super::Axis) -> Complex64 {
        let i = match axis {
            super::Axis::X => idx / self.n,
            super::Axis::Y => idx % self.n,
        };
        if self.is_nyquist(i) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, self.wavenumbers[i] as f64)
        }
    }

    /// Unnormalized 2D forward DFT in place.
    pub(crate) fn fft_forward(&self, data: &mut [Complex64]) {
        self.fft2(data, &self.forward);
    }

    /// Unnormalized 2D inverse DFT in place.
    pub(crate) fn fft_inverse(&self, data: &mut [Complex64]) {
        self.fft2(data, &self.inverse);
    }

    fn fft2(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.len());
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(SpectralGrid::new(4).is_err());
        assert!(SpectralGrid::new(12).is_err());
        assert!(SpectralGrid::new(8).is_ok());
    }

    #[test]
    fn mean_mode_is_origin() {
        let g = SpectralGrid::new(16).unwrap();
        assert_eq!(g.wavevector(0), (0, 0));
        assert_eq!(g.kmag()[0], 0.0);
    }

    #[test]
    fn mask_follows_two_thirds_rule() {
        let g = SpectralGrid::new(16).unwrap();
        assert!(!g.dealias_mask()[g.index_of(7, 0)]);
        assert!(g.dealias_mask()[g.index_of(5, 0)]);
        assert!(g.dealias_mask()[g.index_of(-5, 5)]);
        assert!(!g.dealias_mask()[g.index_of(-6, 0)]);
        assert!(!g.dealias_mask()[g.index_of(-8, 0)]);
        for idx in 0..g.len() {
            let (k1, k2) = g.wavevector(idx);
            assert_eq!(g.dealias_mask()[idx], k1.abs().max(k2.abs()) <= 5);
        }
    }

    #[test]
    fn conjugate_index_negates_wavevector() {
        let g = SpectralGrid::new(8).unwrap();
        for idx in 0..g.len() {
            let (k1, k2) = g.wavevector(idx);
            let c = g.conjugate_index(idx);
            assert_eq!(c, g.index_of(-k1, -k2));
        }
    }
}
