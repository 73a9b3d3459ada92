//! Linearly polarized modes of the weakly guiding step-index fiber.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::materials::{cladding_index, core_index, MaterialSpec, PolarizationAxis};
use crate::numerics::{bessel_j, bessel_j_zero, bessel_k, find_root_bracketed};
use crate::units::{omega_from_lambda, wavenumber};
use crate::{Error, Result};

/// Fiber indices come from the y-axis model; the fiber material is isotropic.
const FIBER_AXIS: PolarizationAxis = PolarizationAxis::O;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberGeometry {
    /// Core radius in µm.
    pub a_um: f64,
    pub material: MaterialSpec,
}

impl FiberGeometry {
    pub fn new(a_um: f64, material: MaterialSpec) -> Result<Self> {
        if !(a_um > 0.0 && a_um.is_finite()) {
            return Err(Error::Invalid(format!("core radius must be positive, got {a_um}")));
        }
        Ok(Self { a_um, material })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMode {
    pub l: i32,
    pub m: u32,
    pub omega: f64,
    pub beta: f64,
    pub kt: f64,
    pub gamma: f64,
    pub norm: f64,
    pub a_um: f64,
    pub n1: f64,
    pub n2: f64,
}

/// V = (ωa/c)(n₁² − n₂²)^{1/2}.
pub fn fiber_v_parameter(geom: &FiberGeometry, lambda_um: f64) -> Result<f64> {
    let n1 = core_index(&geom.material, FIBER_AXIS, lambda_um)?;
    let n2 = cladding_index(&geom.material, FIBER_AXIS, lambda_um)?;
    Ok(wavenumber(omega_from_lambda(lambda_um)) * geom.a_um * (n1 * n1 - n2 * n2).sqrt())
}

/// J_n for signed n, using J₋ₙ = (−1)ⁿ Jₙ.
fn bessel_j_signed(order: i32, x: f64) -> Result<f64> {
    let v = bessel_j(order.unsigned_abs(), x)?;
    Ok(if order < 0 && order % 2 != 0 { -v } else { v })
}

/// K_n for signed n, using K₋ₙ = Kₙ.
fn bessel_k_signed(order: i32, x: f64) -> Result<f64> {
    bessel_k(order.unsigned_abs(), x)
}

/// Characteristic function X J_{l−1}(X) + Y [K_{l−1}(Y)/K_l(Y)] J_l(X),
/// free of poles in X. Zero at the LP_lm propagation constants.
fn characteristic(l: u32, x: f64, v: f64) -> Result<f64> {
    let l = l as i32;
    let y = (v * v - x * x).max(0.0).sqrt();
    let core = x * bessel_j_signed(l - 1, x)?;
    let clad =
        if y > 0.0 { y * bessel_k_signed(l - 1, y)? / bessel_k_signed(l, y)? * bessel_j_signed(l, x)? } else { 0.0 };
    Ok(core + clad)
}

/// Memoized Bessel zero; the solver asks for the same few zeros repeatedly.
fn j_zero(order: u32, k: u32) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&z) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(order, k)) {
        return Ok(z);
    }
    let z = bessel_j_zero(order, k)?;
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert((order, k), z);
    Ok(z)
}

/// Cutoff value of V for LP_lm: j_{1,m−1} for l = 0 (with j_{1,0} = 0) and
/// j_{l−1,m} otherwise.
pub fn cutoff_v(l: u32, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Invalid("radial index m starts at 1".into()));
    }
    match l {
        0 if m == 1 => Ok(0.0),
        0 => j_zero(1, m - 1),
        _ => j_zero(l - 1, m),
    }
}

/// Number of guided modes counting both azimuthal signs for l ≠ 0.
pub fn count_fiber_modes(geom: &FiberGeometry, lambda_um: f64) -> Result<u32> {
    let v = fiber_v_parameter(geom, lambda_um)?;
    let mut count = 0;
    for l in 0.. {
        let mut any = false;
        for m in 1.. {
            if cutoff_v(l, m)? >= v {
                break;
            }
            any = true;
            count += if l == 0 { 1 } else { 2 };
        }
        if !any {
            break;
        }
    }
    Ok(count)
}

/// Solves LP_{l,m} at vacuum wavelength `lambda_um`.
pub fn solve_fiber_mode(geom: &FiberGeometry, l: i32, m: u32, lambda_um: f64) -> Result<FiberMode> {
    let order = l.unsigned_abs();
    let label = || format!("LP l={l} m={m}");
    let n1 = core_index(&geom.material, FIBER_AXIS, lambda_um)?;
    let n2 = cladding_index(&geom.material, FIBER_AXIS, lambda_um)?;
    let k0 = wavenumber(omega_from_lambda(lambda_um));
    let a = geom.a_um;
    let v = k0 * a * (n1 * n1 - n2 * n2).sqrt();
    let lo = cutoff_v(order, m)?;
    if lo >= v {
        return Err(Error::ModeCutoff { mode: label(), lambda_um });
    }
    let hi = j_zero(order, m)?.min(v);
    let x = find_root_bracketed(|x| characteristic(order, x, v).unwrap_or(f64::NAN), lo, hi, 4.0 * f64::EPSILON * hi)
        .map_err(|_| Error::SolverFailure { mode: format!("{} at {lambda_um} µm", label()), lo, hi })?;
    let y = (v * v - x * x).max(0.0).sqrt();
    if !(y > 0.0) {
        return Err(Error::ModeCutoff { mode: label(), lambda_um });
    }
    let kt = x / a;
    let k1 = n1 * k0;
    let beta = (k1 * k1 - kt * kt).sqrt();
    let gamma = y / a;

    let li = order as i32;
    let j = bessel_j(order, x)?;
    let core = j * j - bessel_j_signed(li - 1, x)? * bessel_j_signed(li + 1, x)?;
    let kl = bessel_k(order, y)?;
    let clad = bessel_k_signed(li - 1, y)? * bessel_k_signed(li + 1, y)? - kl * kl;
    let scale = j / kl;
    let integral = std::f64::consts::PI * a * a * (core + scale * scale * clad);
    Ok(FiberMode {
        l,
        m,
        omega: omega_from_lambda(lambda_um),
        beta,
        kt,
        gamma,
        norm: 1.0 / integral.sqrt(),
        a_um: a,
        n1,
        n2,
    })
}

impl FiberMode {
    pub fn v(&self) -> f64 {
        self.a_um * (self.kt * self.kt + self.gamma * self.gamma).sqrt()
    }

    /// Characteristic-equation residual, scaled by V.
    pub fn residual(&self) -> f64 {
        let x = self.kt * self.a_um;
        let v = self.v();
        characteristic(self.l.unsigned_abs(), x, v).map(|f| (f / v).abs()).unwrap_or(f64::INFINITY)
    }

    /// Real radial amplitude; continuous at r = a.
    pub fn radial(&self, r: f64) -> f64 {
        let order = self.l.unsigned_abs();
        if r <= self.a_um {
            self.norm * bessel_j(order, self.kt * r).unwrap_or(f64::NAN)
        } else {
            let x = self.kt * self.a_um;
            let y = self.gamma * self.a_um;
            let scale = bessel_j(order, x).unwrap_or(f64::NAN) / bessel_k(order, y).unwrap_or(f64::NAN);
            self.norm * scale * bessel_k(order, self.gamma * r).unwrap_or(0.0)
        }
    }
}

/// Normalized profile u(r, φ) = R(r) e^{jlφ}, with ∫∫|u|² r dr dφ = 1.
pub fn fiber_profile_eval(mode: &FiberMode, r: f64, phi: f64) -> Complex64 {
    Complex64::from_polar(mode.radial(r.max(0.0)), mode.l as f64 * phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::silica;

    fn fiber(a: f64) -> FiberGeometry {
        FiberGeometry::new(a, silica()).unwrap()
    }

    #[test]
    fn v_is_linear_in_radius() {
        let v1 = fiber_v_parameter(&fiber(1.0), 0.9).unwrap();
        let v2 = fiber_v_parameter(&fiber(2.0), 0.9).unwrap();
        assert!((v2 - 2.0 * v1).abs() < 1e-14);
        assert!(fiber_v_parameter(&fiber(1e-9), 0.9).unwrap() < 1e-8);
    }

    #[test]
    fn azimuthal_degeneracy() {
        let g = fiber(2.613);
        let plus = solve_fiber_mode(&g, 1, 1, 0.9).unwrap();
        let minus = solve_fiber_mode(&g, -1, 1, 0.9).unwrap();
        assert_eq!(plus.beta, minus.beta);
    }

    #[test]
    fn vortex_vanishes_on_axis() {
        let mode = solve_fiber_mode(&fiber(2.613), 1, 1, 0.9).unwrap();
        assert_eq!(fiber_profile_eval(&mode, 0.0, 0.3).norm(), 0.0);
    }

    #[test]
    fn cutoffs() {
        assert_eq!(cutoff_v(0, 1).unwrap(), 0.0);
        assert!((cutoff_v(1, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((cutoff_v(0, 2).unwrap() - 3.831_705_970_207_512).abs() < 1e-13);
    }
}
