use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { max_iterations: 400 }
    }
}

/// Root of `f` in the bracket `[lo, hi]`, narrowed until the bracket is
/// shorter than `tol` (or cannot be split further in f64).
///
/// Regula-falsi steps are taken while they at least halve the bracket;
/// otherwise the next step bisects. Returns the bracket end with the
/// smaller |f|.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    find_root_with(f, lo, hi, tol, RootOptions::default())
}

pub(crate) fn find_root_with<F>(mut f: F, lo: f64, hi: f64, tol: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain(format!("function is NaN at bracket end [{a}, {b}]")));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    let mut bisect_next = false;
    for _ in 0..opts.max_iterations {
        let width = b - a;
        let mid = a + 0.5 * width;
        if width < tol || mid <= a || mid >= b {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mut x = mid;
        if !bisect_next && fa.is_finite() && fb.is_finite() {
            let secant = b - fb * (b - a) / (fb - fa);
            if secant > a && secant < b {
                x = secant;
            }
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {x}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        bisect_next = b - a > 0.5 * width;
    }
    Err(Error::NonConvergence { iterations: opts.max_iterations, lo: a, hi: b })
}
