//! Complex error functions built on the Faddeeva function
//! w(z) = exp(−z²) erfc(−jz).

use std::f64::consts::FRAC_2_SQRT_PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Below this modulus erf is summed from its Maclaurin series, which avoids
/// the cancellation in 1 − exp(−z²)·w(jz) near the origin.
const SERIES_RADIUS: f64 = 1.0;

/// Largest Re(z²) for which exp(z²) stays representable.
const MAX_EXPONENT: f64 = 708.0;

/// Imaginary error function erfi(z) = −j·erf(jz).
pub fn erfi_complex(z: Complex64) -> Result<Complex64> {
    check(z)?;
    let e = erf_complex(Complex64::new(-z.im, z.re))?;
    Ok(Complex64::new(e.im, -e.re))
}

/// Error function of a complex argument.
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    check(z)?;
    if z.norm() < SERIES_RADIUS {
        return Ok(erf_series(z));
    }
    if z.re < 0.0 {
        return erf_complex(-z).map(|v| -v);
    }
    // Re z ≥ 0: erf z = 1 − exp(−z²) w(jz), with jz in the closed upper
    // half-plane where w is bounded.
    let minus_z2 = -(z * z);
    if minus_z2.re > MAX_EXPONENT {
        return Err(Error::Overflow(format!("erf({z}) exceeds the representable range")));
    }
    let w = faddeeva(Complex64::new(-z.im, z.re))?;
    Ok(Complex64::new(1.0, 0.0) - minus_z2.exp() * w)
}

fn check(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite complex argument {z}")))
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    // erf z = 2/√π Σ (−1)^k z^{2k+1} / (k! (2k+1))
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    for k in 1..80 {
        power *= -z2 / k as f64;
        let term = power / (2 * k + 1) as f64;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// Faddeeva function w(z) (Poppe & Wijers, ACM TOMS 680): a Taylor-type
/// series inside a small ellipse about the origin, Laplace continued
/// fraction with Gautschi's shift elsewhere, then reflection for Im z < 0.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    check(z)?;
    let xabs = z.re.abs();
    let yabs = z.im.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let xabsq = xabs * xabs;
    let mut xquad = xabsq - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;
    let inside = qrho < 0.085_264;

    let (mut u, mut v);
    let (mut u2, mut v2) = (0.0, 0.0);
    if inside {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i64;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let xaux = (xsum * xquad - ysum * yquad) / i as f64;
            ysum = (xsum * yquad + ysum * xquad) / i as f64;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -FRAC_2_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = FRAC_2_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0_i64;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i64;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i64;
            nu = (16.0 + 26.0 * qrho).round() as i64;
        }
        let h2 = 2.0 * h;
        let shifted = h > 0.0;
        let mut qlambda = if shifted { h2.powi(kapn as i32) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if shifted && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if shifted {
            u = FRAC_2_SQRT_PI * sx;
            v = FRAC_2_SQRT_PI * sy;
        } else {
            u = FRAC_2_SQRT_PI * rx;
            v = FRAC_2_SQRT_PI * ry;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if z.im < 0.0 {
        if inside {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            if xquad > MAX_EXPONENT {
                return Err(Error::Overflow(format!("w({z}) exceeds the representable range")));
            }
            let w1 = 2.0 * xquad.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if z.re > 0.0 {
            v = -v;
        }
    } else if z.re < 0.0 {
        v = -v;
    }
    Ok(Complex64::new(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfi_of_zero() {
        assert_eq!(erfi_complex(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn erfi_of_one() {
        let v = erfi_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 1.650_425_758_797_542_8).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn faddeeva_on_real_axis_is_gaussian() {
        for &x in &[0.0, 0.5, 2.0, 5.0] {
            let w = faddeeva(Complex64::new(x, 0.0)).unwrap();
            assert!((w.re - (-x * x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn erf_of_real_values() {
        let cases = [(0.5, 0.520_499_877_813_046_5), (2.0, 0.995_322_265_018_952_7), (3.5, 0.999_999_256_901_627_7)];
        for (x, want) in cases {
            let got = erf_complex(Complex64::new(x, 0.0)).unwrap();
            assert!((got.re - want).abs() < 1e-15, "erf({x}) = {got}");
        }
    }

    #[test]
    fn nan_is_an_error() {
        assert!(matches!(erfi_complex(Complex64::new(f64::NAN, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn large_real_argument_overflows() {
        assert!(matches!(erfi_complex(Complex64::new(40.0, 0.0)), Err(Error::Overflow(_))));
    }
}
