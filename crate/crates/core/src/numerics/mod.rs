//! Special functions and generic numerical routines.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod erfi;
mod quadrature;
mod roots;

pub use bessel::{bessel_j, bessel_j_zero, bessel_k};
pub use erfi::{erf_complex, erfi_complex, faddeeva};
pub use quadrature::{gauss_legendre, integrate_adaptive, integrate_gauss_legendre, GaussLegendre};
pub use roots::{find_root_bracketed, RootOptions};

pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type ComplexValue = Complex64;
