//! Guided modes of the symmetric dielectric slab.
//!
//! The core occupies |z| ≤ h/2. Mode m satisfies
//! tan(k_z h/2 − mπ/2) = F γ / k_z, where F = 1 for TE (o) and
//! F = (n₁/n₂)² for TM (e). Even m has a cosine core profile, odd m a sine.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::materials::{cladding_index, core_index, MaterialSpec, PolarizationAxis};
use crate::numerics::find_root_bracketed;
use crate::units::{omega_from_lambda, wavenumber};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarGeometry {
    /// Core thickness in µm.
    pub h_um: f64,
    pub material: MaterialSpec,
}

impl PlanarGeometry {
    pub fn new(h_um: f64, material: MaterialSpec) -> Result<Self> {
        if !(h_um > 0.0 && h_um.is_finite()) {
            return Err(Error::Invalid(format!("slab thickness must be positive, got {h_um}")));
        }
        Ok(Self { h_um, material })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarMode {
    pub m: u32,
    pub pol: PolarizationAxis,
    pub omega: f64,
    pub beta: f64,
    pub kz: f64,
    pub gamma: f64,
    pub norm: f64,
    pub h_um: f64,
    pub n1: f64,
    pub n2: f64,
}

/// Per-wavelength slab constants.
struct SlabConstants {
    n1: f64,
    n2: f64,
    k0: f64,
    k_max: f64,
    factor: f64,
}

fn slab_constants(geom: &PlanarGeometry, pol: PolarizationAxis, lambda_um: f64) -> Result<SlabConstants> {
    let n1 = core_index(&geom.material, pol, lambda_um)?;
    let n2 = cladding_index(&geom.material, pol, lambda_um)?;
    let k0 = wavenumber(omega_from_lambda(lambda_um));
    let k_max = k0 * (n1 * n1 - n2 * n2).sqrt();
    let factor = if pol.is_tm() { (n1 / n2).powi(2) } else { 1.0 };
    Ok(SlabConstants { n1, n2, k0, k_max, factor })
}

/// Pole-free form of the dispersion relation:
/// k_z sin φ − F γ cos φ with φ = k_z h/2 − mπ/2.
fn characteristic(kz: f64, m: u32, h: f64, k_max: f64, factor: f64) -> f64 {
    let gamma = (k_max * k_max - kz * kz).max(0.0).sqrt();
    let phi = 0.5 * kz * h - 0.5 * m as f64 * PI;
    kz * phi.sin() - factor * gamma * phi.cos()
}

/// Number of guided modes of the given polarization.
pub fn count_guided_modes(geom: &PlanarGeometry, pol: PolarizationAxis, lambda_um: f64) -> Result<u32> {
    let c = slab_constants(geom, pol, lambda_um)?;
    let v = c.k_max * geom.h_um / PI;
    let whole = v.floor();
    Ok(if whole == v { whole as u32 } else { whole as u32 + 1 }.max(1))
}

/// Solves mode `m` at vacuum wavelength `lambda_um`.
pub fn solve_planar_mode(geom: &PlanarGeometry, pol: PolarizationAxis, m: u32, lambda_um: f64) -> Result<PlanarMode> {
    let c = slab_constants(geom, pol, lambda_um)?;
    let h = geom.h_um;
    let lo = m as f64 * PI / h;
    if lo >= c.k_max {
        return Err(Error::ModeCutoff { mode: format!("slab {pol} m={m}"), lambda_um });
    }
    let hi = ((m + 1) as f64 * PI / h).min(c.k_max);
    let f = |kz: f64| characteristic(kz, m, h, c.k_max, c.factor);
    let tol = 4.0 * f64::EPSILON * hi;
    let kz = find_root_bracketed(f, lo, hi, tol).map_err(|_| Error::SolverFailure {
        mode: format!("slab {pol} m={m} at {lambda_um} µm"),
        lo,
        hi,
    })?;
    let k1 = c.n1 * c.k0;
    let beta = (k1 * k1 - kz * kz).sqrt();
    let gamma = (c.k_max * c.k_max - kz * kz).max(0.0).sqrt();
    if !(gamma > 0.0) {
        return Err(Error::ModeCutoff { mode: format!("slab {pol} m={m}"), lambda_um });
    }
    let half = 0.5 * kz * h;
    let (edge, sign) = if m.is_multiple_of(2) { (half.cos(), 1.0) } else { (half.sin(), -1.0) };
    let norm_sq = 0.5 * h + sign * (kz * h).sin() / (2.0 * kz) + edge * edge / gamma;
    Ok(PlanarMode {
        m,
        pol,
        omega: omega_from_lambda(lambda_um),
        beta,
        kz,
        gamma,
        norm: 1.0 / norm_sq.sqrt(),
        h_um: h,
        n1: c.n1,
        n2: c.n2,
    })
}

impl PlanarMode {
    pub fn is_even(&self) -> bool {
        self.m.is_multiple_of(2)
    }

    /// TM boundary factor F.
    pub fn factor(&self) -> f64 {
        if self.pol.is_tm() {
            (self.n1 / self.n2).powi(2)
        } else {
            1.0
        }
    }

    pub fn k_max(&self) -> f64 {
        (self.kz * self.kz + self.gamma * self.gamma).sqrt()
    }

    /// Dispersion-relation residual, scaled by k_max.
    pub fn residual(&self) -> f64 {
        let k_max = self.k_max();
        (characteristic(self.kz, self.m, self.h_um, k_max, self.factor()) / k_max).abs()
    }

    /// Core profile value at the interface |z| = h/2, before normalization.
    pub fn edge_value(&self) -> f64 {
        let half = 0.5 * self.kz * self.h_um;
        if self.is_even() {
            half.cos()
        } else {
            half.sin()
        }
    }
}

/// Normalized transverse profile u(z), with ∫ u² dz = 1.
pub fn planar_profile_eval(mode: &PlanarMode, z: f64) -> f64 {
    let half_h = 0.5 * mode.h_um;
    if z.abs() <= half_h {
        let phase = mode.kz * z;
        mode.norm * if mode.is_even() { phase.cos() } else { phase.sin() }
    } else {
        let tail = mode.norm * mode.edge_value() * (-mode.gamma * (z.abs() - half_h)).exp();
        if mode.is_even() || z > 0.0 {
            tail
        } else {
            -tail
        }
    }
}
