//! Frequency-lattice representation of vector fields: transforms between
//! physical and spectral space, Leray–Helmholtz projection, and the
//! dealiased nonlinear and Coriolis terms.
//!
//! Coefficients sample the continuum Fourier transform. With
//! `V = L₁L₂L₃` the box volume and `volξ = (2π)³/V` the lattice cell,
//!
//! ```text
//! u(x) = (2π)⁻³ Σ_ξ û(ξ) e^{ix·ξ} volξ,      û(ξ) = Σ_x u(x) e^{−ix·ξ} δx₁δx₂δx₃,
//! ```
//!
//! so products in physical space correspond to the Riemann sum of
//! `(2π)⁻³ (â ∗ b̂)` and every discrete `L^p` norm of `û` approximates its
//! continuum counterpart independently of the box size.

mod fft;
mod field;
mod lattice;
mod ops;
pub mod snapshot;

pub use field::{PhysicalVectorField, ScalarSpectrum, SpectralVectorField};
pub use lattice::{make_lattice, FrequencyLattice};
pub use ops::{
    advective_product, coriolis_term, divergence, energy, energy_physical, helmholtz_project,
    inner_product, nonlinear_term, nonlinear_term_conservative, Advection,
};
