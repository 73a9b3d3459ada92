//! Bessel functions of integer order: J_n (first kind) and K_n (modified,
//! second kind).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Beyond this argument (plus the order) J_n is evaluated from the Hankel
/// asymptotic expansion instead of backward recurrence.
const HANKEL_CROSSOVER: f64 = 30.0;

/// J_n(x) for x ≥ 0.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("bessel_j requires finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if x > HANKEL_CROSSOVER + (order as f64).powi(2) {
        return Ok(j_hankel(order, x));
    }
    Ok(j_miller(order, x))
}

/// k-th positive zero (k ≥ 1) of J_n.
pub fn bessel_j_zero(order: u32, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("Bessel zeros are numbered from 1".into()));
    }
    // Consecutive zeros are more than π/2 apart for the orders used here,
    // so a step of 0.25 cannot skip a pair.
    let step = 0.25;
    let mut found = 0;
    let mut a = (order as f64).max(step);
    let mut fa = bessel_j(order, a)?;
    loop {
        let b = a + step;
        let fb = bessel_j(order, b)?;
        if fa == 0.0 || fa.signum() != fb.signum() {
            found += 1;
            if found == k {
                let f = |x: f64| bessel_j(order, x).unwrap_or(f64::NAN);
                return crate::numerics::find_root_bracketed(f, a, b, 1e-15);
            }
        }
        a = b;
        fa = fb;
    }
}

/// Miller's backward recurrence normalized with J₀ + 2ΣJ₂ₖ = 1.
fn j_miller(order: u32, x: f64) -> f64 {
    let top = (order as f64).max(x);
    let mut start = (top + 20.0 + (160.0 * top).sqrt()).ceil() as u32;
    start += start % 2;

    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1.0e-30; // J_k, arbitrary scale
    let mut norm = if start.is_multiple_of(2) { 2.0 * j_cur } else { 0.0 };
    let mut result = if start == order { j_cur } else { 0.0 };
    let two_over_x = 2.0 / x;

    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = k - 1;
        if idx == order {
            result = j_cur;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1.0e250 {
            j_cur *= 1.0e-250;
            j_next *= 1.0e-250;
            norm *= 1.0e-250;
            result *= 1.0e-250;
        }
    }
    norm += j_cur;
    result / norm
}

fn j_hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 * p.abs() {
            break;
        }
    }
    let chi = x - (order as f64 * FRAC_PI_2 + FRAC_PI_4);
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Modified Bessel function of the first kind, by power series. Used for the
/// small-argument branch of K.
fn bessel_i(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let mut term = half.powi(order as i32) / factorial(order);
    let mut sum = term;
    for k in 1..200 {
        term *= quarter_sq / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// K_n(x) for x > 0.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("bessel_k requires finite x > 0, got {x}")));
    }
    let (k0, k1) = if x <= 2.0 { k01_series(x) } else { k01_steed(x) };
    if order == 0 {
        return Ok(k0);
    }
    let (mut km, mut k) = (k0, k1);
    for n in 1..order {
        let kp = km + 2.0 * n as f64 / x * k;
        km = k;
        k = kp;
    }
    if !k.is_finite() {
        return Err(Error::Overflow(format!("K_{order}({x})")));
    }
    Ok(k)
}

fn k01_series(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let log_half = half.ln();
    let q = half * half;

    let mut term0 = 1.0;
    let mut harmonic = 0.0;
    let mut sum0 = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        term0 *= q / (kf * kf);
        harmonic += 1.0 / kf;
        sum0 += term0 * harmonic;
        if term0 * harmonic < 1e-18 * sum0.abs() {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * bessel_i(0, x) + sum0;

    // term = q^k / (k! (k+1)!), weight = H_k + H_{k+1} - 2γ
    let mut term1 = 1.0;
    let mut h_k = 0.0;
    let mut sum1 = term1 * (1.0 - 2.0 * EULER_GAMMA);
    for k in 1..100 {
        let kf = k as f64;
        term1 *= q / (kf * (kf + 1.0));
        h_k += 1.0 / kf;
        let weight = 2.0 * h_k + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        sum1 += term1 * weight;
        if (term1 * weight).abs() < 1e-18 * sum1.abs() {
            break;
        }
    }
    let k1 = 1.0 / x + log_half * bessel_i(1, x) - 0.5 * half * sum1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) for K₀ and K₁ at x > 2.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (1/π)∫₀^π cos(nt − x sin t) dt; the trapezoid rule is spectrally
    /// accurate for this periodic integrand.
    fn j_integral(order: u32, x: f64) -> f64 {
        let n = 4000;
        let h = PI / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * (order as f64 * t - x * t.sin()).cos();
        }
        sum * h / PI
    }

    /// ∫₀^∞ exp(−x cosh t) cosh(nt) dt by the trapezoid rule on a truncated
    /// range (double-exponential decay).
    fn k_integral(order: u32, x: f64) -> f64 {
        let h = 1e-3_f64;
        let mut sum = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let v = (-x * t.cosh()).exp() * (order as f64 * t).cosh();
            sum += v;
            if v < 1e-300 || t > 50.0 {
                break;
            }
            t += h;
        }
        sum * h
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j0_first_zero() {
        assert!(bessel_j(0, 2.405).unwrap().abs() < 1e-3);
        assert!(bessel_j(0, 2.404_825_557_695_773).unwrap().abs() < 1e-14);
    }

    #[test]
    fn j_matches_integral_representation() {
        for order in 0..=3 {
            for i in 1..=120 {
                let x = 0.25 * i as f64;
                let got = bessel_j(order, x).unwrap();
                let want = j_integral(order, x);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-2), "J_{order}({x}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn j_branches_agree_at_crossover() {
        for order in 0..=3 {
            let x = HANKEL_CROSSOVER + (order as f64).powi(2);
            let a = j_miller(order, x);
            let b = j_hankel(order, x);
            assert!((a - b).abs() < 1e-13, "order {order}: {a} vs {b}");
        }
    }

    #[test]
    fn j_rejects_negative_argument() {
        assert!(matches!(bessel_j(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn k0_at_one() {
        let k = bessel_k(0, 1.0).unwrap();
        assert!((k - k_integral(0, 1.0)).abs() < 1e-12);
        assert!((k - 0.421_024_438_240_708_3).abs() < 1e-13);
    }

    #[test]
    fn k_matches_integral_representation() {
        for order in 0..=3 {
            for &x in &[0.05, 0.3, 1.0, 1.99, 2.0, 2.01, 3.5, 7.0, 15.0, 40.0] {
                let got = bessel_k(order, x).unwrap();
                let want = k_integral(order, x);
                assert!(((got - want) / want).abs() < 1e-10, "K_{order}({x}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn k_positive_and_decreasing() {
        let grid = [0.5, 1.0, 2.0, 4.0];
        for order in 0..=3 {
            let values: Vec<f64> = grid.iter().map(|&x| bessel_k(order, x).unwrap()).collect();
            assert!(values.iter().all(|&v| v > 0.0));
            assert!(values.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn k_rejects_non_positive() {
        assert!(matches!(bessel_k(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(1, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn known_zeros() {
        assert!((bessel_j_zero(0, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((bessel_j_zero(1, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-13);
        assert!((bessel_j_zero(0, 2).unwrap() - 5.520_078_110_286_311).abs() < 1e-13);
        assert!((bessel_j_zero(2, 1).unwrap() - 5.135_622_301_840_683).abs() < 1e-13);
    }

    #[test]
    fn j_recurrence() {
        for l in 1..=2u32 {
            for i in 0..=199 {
                let x = 0.1 + 19.9 * i as f64 / 199.0;
                let lhs = bessel_j(l - 1, x).unwrap() + bessel_j(l + 1, x).unwrap();
                let rhs = 2.0 * l as f64 / x * bessel_j(l, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "l={l} x={x}");
            }
        }
    }
}
