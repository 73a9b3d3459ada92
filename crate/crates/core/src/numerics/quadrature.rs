use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Hard cap on accepted Simpson panels.
pub const MAX_PANELS: usize = 1_000_000;

const INITIAL_PANELS: usize = 16;

/// Adaptive Simpson quadrature of a complex-valued integrand with absolute
/// error target `tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) || !(a < b) {
        return Err(Error::Domain(format!("integration interval [{a}, {b}] must satisfy a < b")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }

    struct Panel {
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    }

    let total = b - a;
    let step = total / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    let mut fa = f(a);
    for i in 0..INITIAL_PANELS {
        let pa = a + i as f64 * step;
        let pb = if i + 1 == INITIAL_PANELS { b } else { a + (i + 1) as f64 * step };
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole: (pb - pa) / 6.0 * (fa + 4.0 * fm + fb),
            tol: tol / INITIAL_PANELS as f64,
            depth: 0,
        });
        fa = fb;
    }

    let mut sum = Complex64::new(0.0, 0.0);
    let mut accepted = 0usize;
    let mut estimate = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let h = p.b - p.a;
        let left = h / 12.0 * (p.fa + 4.0 * flm + p.fm);
        let right = h / 12.0 * (p.fm + 4.0 * frm + p.fb);
        let diff = left + right - p.whole;
        if !(diff.re.is_finite() && diff.im.is_finite()) {
            return Err(Error::Domain(format!("integrand not finite near x = {m}")));
        }
        let err = diff.norm() / 15.0;
        if err <= p.tol || p.depth >= 60 || m <= p.a || m >= p.b {
            sum += left + right + diff / 15.0;
            estimate += err;
            accepted += 1;
            if accepted > MAX_PANELS {
                return Err(Error::QuadratureNonConvergence { panels: accepted, estimate });
            }
            continue;
        }
        if accepted + stack.len() > MAX_PANELS {
            return Err(Error::QuadratureNonConvergence { panels: accepted + stack.len(), estimate });
        }
        let child_tol = 0.5 * p.tol;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol: child_tol,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol: child_tol,
            depth: p.depth + 1,
        });
    }
    Ok(sum)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Builds an `n`-point Gauss–Legendre rule by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussLegendre { nodes, weights }
}

/// Fixed-order Gauss–Legendre quadrature of a real integrand on [a, b].
pub fn integrate_gauss_legendre<F>(f: F, a: f64, b: f64, rule: &GaussLegendre) -> f64
where
    F: Fn(f64) -> f64,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>() * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_over_half_period() {
        let v = integrate_adaptive(|x| Complex64::new(x.sin(), 0.0), 0.0, PI, 1e-12).unwrap();
        assert!((v.re - 2.0).abs() < 1e-11);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn full_period_phase_integrates_to_zero() {
        let v = integrate_adaptive(|x| Complex64::from_polar(1.0, 2.0 * PI * x), 0.0, 1.0, 1e-12).unwrap();
        assert!(v.norm() < 1e-11);
    }

    #[test]
    fn linear_phase_against_closed_form() {
        let (delta, length) = (0.3_f64, 10.0_f64);
        let v = integrate_adaptive(|x| Complex64::from_polar(1.0, delta * x), 0.0, length, 1e-12).unwrap();
        let theta = delta * length / 2.0;
        let sinc = theta.sin() / theta;
        let want = Complex64::from_polar(length * sinc, theta);
        assert!((v - want).norm() < 1e-10);
    }

    #[test]
    fn thousand_cycles() {
        let length = 1.0;
        let rate = 2.0 * PI * 1000.3;
        let v = integrate_adaptive(|x| Complex64::from_polar(1.0, rate * x), 0.0, length, 1e-10).unwrap();
        let want = (Complex64::from_polar(1.0, rate * length) - 1.0) / Complex64::new(0.0, rate);
        assert!((v - want).norm() < 1e-10, "{v} vs {want}");
    }

    #[test]
    fn panel_cap_is_enforced() {
        let err = integrate_adaptive(|x| Complex64::new((1.0 / x).sin() / x, 0.0), 1e-9, 1.0, 1e-15).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn bad_interval() {
        assert!(integrate_adaptive(|_| Complex64::new(1.0, 0.0), 1.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = gauss_legendre(12);
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let v = integrate_gauss_legendre(|x| x.powi(22), 0.0, 1.0, &rule);
        assert!((v - 1.0 / 23.0).abs() < 1e-15);
    }
}
