//! Spectral library for the three-dimensional Navier–Stokes equations with
//! Coriolis force
//!
//! ```text
//! ∂ₜu − Δu + Ω e₃×u + u·∇u + ∇p = 0,   div u = 0.
//! ```
//!
//! Fields live on a (possibly anisotropic) periodic frequency lattice that
//! samples the continuum Fourier transform `û(ξ) = ∫ e^{−ix·ξ} u(x) dx`.
//! On top of that representation the crate provides
//!
//! - homogeneous Fourier–Besov norms built from a smooth dyadic partition
//!   of unity ([`littlewood_paley`]),
//! - the exact Stokes–Coriolis semigroup and its pointwise Fourier bounds
//!   ([`stokes_coriolis`]),
//! - the ε-family of large, single-dyadic-block initial data
//!   ([`large_data`]),
//! - numerical evaluation of the global-existence smallness conditions
//!   ([`conditions`]),
//! - an integrating-factor Runge–Kutta solver for the full nonlinear system
//!   with a perturbation (bootstrap) monitor ([`solver`]).

pub mod conditions;
pub mod error;
pub mod large_data;
pub mod littlewood_paley;
pub mod quadrature;
pub mod random;
pub mod smooth;
pub mod solver;
pub mod spectral;
pub mod stokes_coriolis;

pub use error::{Error, Result};
pub use littlewood_paley::{BesovParams, DyadicPartition, NormSeries};
pub use spectral::{FrequencyLattice, PhysicalVectorField, ScalarSpectrum, SpectralVectorField};
