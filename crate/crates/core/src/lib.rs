//! Simulation of spontaneous parametric down-conversion in poled two-mode
//! waveguides.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: Bessel functions, complex `erfi`, bracketed root finding
//!   and adaptive quadrature.
//! * [`materials`]: Sellmeier dispersion models for KTP and fused silica,
//!   cladding construction and the effective-nonlinearity catalog.
//! * [`planar`] and [`fiber`]: guided-mode solvers for the symmetric slab and
//!   the step-index fiber.
//! * [`qpm`]: phase mismatch, poling-period curves, intersection and
//!   tangency design.
//! * [`biphoton`]: overlap amplitudes and the spectral function for uniform
//!   and linearly chirped poling.
//! * [`interferometry`]: Hong-Ou-Mandel and polarization coincidence,
//!   visibilities and the entanglement length.
//!
//! Units: wavelengths and lengths in µm, angular frequencies in rad/s,
//! propagation constants in rad/µm, delays in s.

pub mod biphoton;
pub mod error;
pub mod fiber;
pub mod interferometry;
pub mod materials;
pub mod numerics;
pub mod planar;
pub mod qpm;
pub mod units;
pub mod waveguide;

pub use error::{Error, Result};
