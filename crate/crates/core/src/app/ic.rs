//! Built-in initial data.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics::lab::random_divergence_free;
use crate::error::{Error, Result};
use crate::mhd::MhdState;
use crate::spectral::{dealias, leray_project, Axis, ScalarField, SpectralGrid, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeTarget {
    U,
    B,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// `u = (−sin y, sin x)`, `b = (−sin y, sin 2x)`.
    #[default]
    OrszagTang,
    /// Component `axis` of the target field is `amplitude · sin(wavenumber · s)`,
    /// with `s` the other coordinate; the remaining field is zero.
    SingleMode {
        axis: Axis,
        wavenumber: i64,
        amplitude: f64,
        target: ModeTarget,
    },
    /// Seeded random phases, amplitude `|k|^{−slope}` for `|k| ≤ cutoff`.
    RandomSmooth {
        seed: u64,
        spectral_slope: f64,
        cutoff: i64,
    },
    Zero,
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::OrszagTang => "orszag_tang",
            InitialCondition::SingleMode { .. } => "single_mode",
            InitialCondition::RandomSmooth { .. } => "random_smooth",
            InitialCondition::Zero => "zero",
        }
    }

    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        match *self {
            InitialCondition::SingleMode { wavenumber, amplitude, .. } => {
                let kmax = grid.max_retained();
                if wavenumber < 1 || wavenumber > kmax {
                    return Err(Error::BadSpec(format!(
                        "single_mode wavenumber {wavenumber} outside 1..={kmax}"
                    )));
                }
                if !amplitude.is_finite() {
                    return Err(Error::BadSpec("single_mode amplitude must be finite".into()));
                }
            }
            InitialCondition::RandomSmooth { spectral_slope, cutoff, .. } => {
                if cutoff < 1 {
                    return Err(Error::BadSpec("random_smooth cutoff must be at least 1".into()));
                }
                if !spectral_slope.is_finite() {
                    return Err(Error::BadSpec("random_smooth slope must be finite".into()));
                }
            }
            InitialCondition::OrszagTang | InitialCondition::Zero => {}
        }
        Ok(())
    }
}

/// Builds `(w, j)` at `t = 0` for the given initial data.
pub fn make_initial_condition(ic: &InitialCondition, grid: &Arc<SpectralGrid>) -> Result<MhdState> {
    ic.validate(grid)?;
    let (u, b) = match *ic {
        InitialCondition::OrszagTang => {
            let u = VectorField::new(
                ScalarField::from_fn(grid, |_, y| -y.sin()),
                ScalarField::from_fn(grid, |x, _| x.sin()),
            );
            let b = VectorField::new(
                ScalarField::from_fn(grid, |_, y| -y.sin()),
                ScalarField::from_fn(grid, |x, _| (2.0 * x).sin()),
            );
            (u, b)
        }
        InitialCondition::SingleMode { axis, wavenumber, amplitude, target } => {
            let k = wavenumber as f64;
            let field = match axis {
                Axis::X => VectorField::new(
                    ScalarField::from_fn(grid, |_, y| amplitude * (k * y).sin()),
                    ScalarField::zeros(grid),
                ),
                Axis::Y => VectorField::new(
                    ScalarField::zeros(grid),
                    ScalarField::from_fn(grid, |x, _| amplitude * (k * x).sin()),
                ),
            };
            match target {
                ModeTarget::U => (field, VectorField::zeros(grid)),
                ModeTarget::B => (VectorField::zeros(grid), field),
            }
        }
        InitialCondition::RandomSmooth { seed, spectral_slope, cutoff } => {
            let make = |s: u64| {
                let v = random_divergence_free(grid, s, cutoff, spectral_slope);
                leray_project(&VectorField::new(dealias(&v.c1), dealias(&v.c2)))
            };
            (make(seed), make(seed ^ 0x9e37_79b9_7f4a_7c15))
        }
        InitialCondition::Zero => (VectorField::zeros(grid), VectorField::zeros(grid)),
    };
    MhdState::from_fields(0.0, &u, &b)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn orszag_tang_energy() {
        let grid = SpectralGrid::new(32).unwrap();
        let s = make_initial_condition(&InitialCondition::OrszagTang, &grid).unwrap();
        let eu = s.u().l2_norm().powi(2);
        let eb = s.b().l2_norm().powi(2);
        assert!((eu - 4.0 * PI * PI).abs() < 1e-10);
        assert!((eb - 4.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn single_mode_vorticity() {
        let grid = SpectralGrid::new(16).unwrap();
        let ic = InitialCondition::SingleMode {
            axis: Axis::Y,
            wavenumber: 1,
            amplitude: 1.0,
            target: ModeTarget::U,
        };
        let s = make_initial_condition(&ic, &grid).unwrap();
        let expected = ScalarField::from_fn(&grid, |x, _| x.cos());
        assert!(s.w().max_abs_diff(&expected) < 1e-14);
        assert!(s.j().l2_norm() == 0.0);
        let u2 = ScalarField::from_fn(&grid, |x, _| x.sin());
        assert!(s.u().c2.max_abs_diff(&u2) < 1e-14);
        assert!(s.u().c1.l2_norm() < 1e-14);
    }

    #[test]
    fn random_smooth_is_deterministic() {
        let grid = SpectralGrid::new(32).unwrap();
        let ic = InitialCondition::RandomSmooth { seed: 11, spectral_slope: 2.0, cutoff: 8 };
        let a = make_initial_condition(&ic, &grid).unwrap();
        let b = make_initial_condition(&ic, &grid).unwrap();
        assert_eq!(a.w().coeffs(), b.w().coeffs());
        assert_eq!(a.j().coeffs(), b.j().coeffs());
        assert!(a.u().is_divergence_free(1e-12));
        assert!(a.w().l2_norm() > 0.0);
    }

    #[test]
    fn bad_specs_rejected() {
        let grid = SpectralGrid::new(16).unwrap();
        let ic = InitialCondition::SingleMode {
            axis: Axis::X,
            wavenumber: 9,
            amplitude: 1.0,
            target: ModeTarget::B,
        };
        assert!(matches!(make_initial_condition(&ic, &grid), Err(Error::BadSpec(_))));
        let ic = InitialCondition::RandomSmooth { seed: 0, spectral_slope: 1.0, cutoff: 0 };
        assert!(matches!(make_initial_condition(&ic, &grid), Err(Error::BadSpec(_))));
    }
}
