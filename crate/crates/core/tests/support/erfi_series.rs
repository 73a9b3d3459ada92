//! Arbitrary-precision reference for erfi(z): the Maclaurin series
//! erfi(z) = 2/√π Σ z^{2k+1} / (k! (2k+1)) summed in fixed-point big-integer
//! arithmetic, so cancellation between large terms costs nothing.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

const FRACTION_BITS: u32 = 192;

fn to_fixed(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exponent == 0 { (fraction, -1074) } else { (fraction | (1u64 << 52), exponent - 1075) };
    let mut v = BigInt::from(mantissa);
    let shift = exp + FRACTION_BITS as i64;
    if shift >= 0 {
        v <<= shift as usize;
    } else {
        v >>= (-shift) as usize;
    }
    if negative {
        -v
    } else {
        v
    }
}

fn to_f64(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits > 900 {
        let shift = bits - 900;
        (v >> shift as usize).to_f64().unwrap() * 2f64.powi(shift as i32 - FRACTION_BITS as i32)
    } else {
        v.to_f64().unwrap() * 2f64.powi(-(FRACTION_BITS as i32))
    }
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRACTION_BITS as usize
}

/// erfi(z) from the series, accurate far beyond f64 precision for |z| ≲ 60.
pub fn erfi_series(z: Complex64) -> Complex64 {
    let (zr, zi) = (to_fixed(z.re), to_fixed(z.im));
    let z2r = mul(&zr, &zr) - mul(&zi, &zi);
    let z2i = BigInt::from(2) * mul(&zr, &zi);
    let (mut tr, mut ti) = (zr.clone(), zi.clone());
    let (mut sr, mut si) = (zr, zi);
    let floor = BigInt::from(1) << 8usize;
    let mut k: u64 = 1;
    let mut small_run = 0;
    loop {
        let nr = mul(&tr, &z2r) - mul(&ti, &z2i);
        let ni = mul(&tr, &z2i) + mul(&ti, &z2r);
        tr = nr / k;
        ti = ni / k;
        let denom = 2 * k + 1;
        sr += &tr / denom;
        si += &ti / denom;
        let magnitude_small = tr.magnitude() < floor.magnitude() && ti.magnitude() < floor.magnitude();
        small_run = if magnitude_small { small_run + 1 } else { 0 };
        if small_run > 4 {
            break;
        }
        k += 1;
    }
    let scale = 2.0 / std::f64::consts::PI.sqrt();
    Complex64::new(to_f64(&sr) * scale, to_f64(&si) * scale)
}
