//! Physical constants and unit conversions.

use std::f64::consts::PI;

/// Speed of light in vacuum, µm/s.
pub const SPEED_OF_LIGHT_UM_PER_S: f64 = 2.997_924_58e14;

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_um`.
pub fn omega_from_lambda(lambda_um: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_UM_PER_S / lambda_um
}

/// Vacuum wavelength (µm) of light with angular frequency `omega`.
pub fn lambda_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_UM_PER_S / omega
}

/// Vacuum wavenumber k₀ = ω/c in rad/µm.
pub fn wavenumber(omega: f64) -> f64 {
    omega / SPEED_OF_LIGHT_UM_PER_S
}

pub const MM: f64 = 1.0e3;
pub const CM: f64 = 1.0e4;
pub const FS: f64 = 1.0e-15;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_round_trip() {
        for lambda in [0.406, 0.532, 0.81, 1.55] {
            let back = lambda_from_omega(omega_from_lambda(lambda));
            assert!((back - lambda).abs() < 1e-15);
        }
    }

    #[test]
    fn wavenumber_matches_two_pi_over_lambda() {
        let k0 = wavenumber(omega_from_lambda(0.5));
        assert!((k0 - 4.0 * PI).abs() < 1e-12);
    }
}
