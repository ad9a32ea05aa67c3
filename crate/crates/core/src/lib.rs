//! Pseudo-spectral simulation and diagnostics for the two-dimensional
//! generalized MHD system
//!
//! ```text
//! ∂t u + (u·∇)u − (b·∇)b + ∇π + ν Λ^{2α} u = 0
//! ∂t b + (u·∇)b − (b·∇)u      + η Λ^{2β} b = 0,   ∇·u = ∇·b = 0
//! ```
//!
//! on the 2π-periodic torus, where `Λ = (−Δ)^{1/2}` acts as the Fourier
//! multiplier `|k|`. The prognostic variables are the vorticity `w = ∇×u`
//! and current `j = ∇×b`; the velocity form is kept for cross-checking.
//!
//! Module map:
//! - [`spectral`]: grid, transforms and linear Fourier multipliers.
//! - [`mhd`]: state, Biot–Savart reconstruction and both right-hand sides.
//! - [`timestepper`]: integrating-factor RK4, CFL control, blow-up monitor.
//! - [`diagnostics`]: norms, per-sample records, energy balance and the
//!   functional-inequality lab.
//! - [`regime`]: classification of `(α, β)` against known regularity regions.
//! - [`app`]: configuration, initial data, runs, sweeps and checkpoints.

pub mod app;
pub mod diagnostics;
pub mod error;
pub mod mhd;
pub mod regime;
pub mod spectral;
pub mod timestepper;

pub use error::{Error, Result};
pub use mhd::{MhdState, SimParams};
pub use spectral::{PhysicalField, ScalarField, SpectralGrid, VectorField};
