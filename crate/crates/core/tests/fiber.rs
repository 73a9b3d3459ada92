use std::f64::consts::PI;

use proptest::prelude::*;
use spdc_core::fiber::{count_fiber_modes, fiber_profile_eval, fiber_v_parameter, solve_fiber_mode, FiberGeometry};
use spdc_core::materials::silica;
use spdc_core::numerics::{bessel_j, bessel_k};
use spdc_core::Error;

fn fiber(a: f64) -> FiberGeometry {
    FiberGeometry::new(a, silica()).unwrap()
}

fn silica_index(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    (1.0 + 0.6962 * l2 / (l2 - 0.0684f64.powi(2))
        + 0.4079 * l2 / (l2 - 0.1162f64.powi(2))
        + 0.8975 * l2 / (l2 - 9.8962f64.powi(2)))
    .sqrt()
}

fn direct_v(a: f64, lambda: f64) -> f64 {
    let n1 = silica_index(lambda);
    let n2 = 0.99 * n1;
    2.0 * PI / lambda * a * (n1 * n1 - n2 * n2).sqrt()
}

#[test]
fn v_parameter_against_direct_evaluation() {
    let v = fiber_v_parameter(&fiber(2.613), 0.9).unwrap();
    let want = direct_v(2.613, 0.9);
    assert!((v - want).abs() < 1e-12);
    assert!((v - 3.74).abs() < 0.01);
    assert!(v > 2.405 && v < 3.83);
}

/// X J_{l−1}(X)/J_l(X) + Y K_{l−1}(Y)/K_l(Y), the ratio form with poles.
fn ratio_form(l: u32, x: f64, v: f64) -> f64 {
    let y = (v * v - x * x).sqrt();
    let jm = if l == 0 { -bessel_j(1, x).unwrap() } else { bessel_j(l - 1, x).unwrap() };
    let km = if l == 0 { bessel_k(1, y).unwrap() } else { bessel_k(l - 1, y).unwrap() };
    x * jm / bessel_j(l, x).unwrap() + y * km / bessel_k(l, y).unwrap()
}

/// Roots of the ratio form on a 1e-6 X-scan over (0, V), keeping only
/// crossings where the function is small on both sides (not poles).
fn scan_roots(l: u32, v: f64) -> Vec<f64> {
    let step = 1e-6;
    let n = (v / step) as usize;
    let mut roots = Vec::new();
    let mut px = step;
    let mut pf = ratio_form(l, px, v);
    for i in 2..n {
        let x = i as f64 * step;
        let f = ratio_form(l, x, v);
        if pf.signum() != f.signum() && pf.abs() < 10.0 && f.abs() < 10.0 {
            let (mut a, mut b) = (px, x);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if ratio_form(l, mid, v).signum() == pf.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        px = x;
        pf = f;
    }
    roots
}

#[test]
fn beta_matches_dense_scan_oracle() {
    let (a, lambda) = (2.613, 0.9);
    let v = direct_v(a, lambda);
    let k1 = silica_index(lambda) * 2.0 * PI / lambda;
    for l in 0..=1u32 {
        let roots = scan_roots(l, v);
        assert_eq!(roots.len(), 1, "l={l}");
        let kt = roots[0] / a;
        let want = (k1 * k1 - kt * kt).sqrt();
        let got = solve_fiber_mode(&fiber(a), l as i32, 1, lambda).unwrap().beta;
        assert!(((got - want) / want).abs() < 1e-8, "l={l}: {got} vs {want}");
    }
}

#[test]
fn radial_continuity_at_core_boundary() {
    for l in [0, 1] {
        let mode = solve_fiber_mode(&fiber(2.613), l, 1, 0.9).unwrap();
        let a = mode.a_um;
        let inside = mode.norm * bessel_j(l as u32, mode.kt * a).unwrap();
        let outside = mode.radial(a * (1.0 + 1e-15));
        assert!(((inside - outside) / inside).abs() < 1e-9);
    }
}

#[test]
fn profile_has_unit_norm() {
    for l in [0, -1] {
        let mode = solve_fiber_mode(&fiber(2.613), l, 1, 0.9).unwrap();
        let reach = mode.a_um + 40.0 / mode.gamma;
        let n = 200_000;
        let dr = reach / n as f64;
        let sum: f64 = (0..=n)
            .map(|i| {
                let r = i as f64 * dr;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * r * mode.radial(r).powi(2)
            })
            .sum();
        assert!((2.0 * PI * sum * dr - 1.0).abs() < 1e-6, "l={l}");
    }
}

#[test]
fn fundamental_is_most_confined() {
    let g = fiber(2.613);
    assert!(solve_fiber_mode(&g, 0, 1, 0.9).unwrap().beta > solve_fiber_mode(&g, 1, 1, 0.9).unwrap().beta);
}

#[test]
fn mode_count_follows_v_window() {
    for i in 0..=300 {
        let a = 1.0 + 3.0 * i as f64 / 300.0;
        let g = fiber(a);
        let v = fiber_v_parameter(&g, 0.9).unwrap();
        let count = count_fiber_modes(&g, 0.9).unwrap();
        // Window edges are the first zeros of J₀ and J₁ (2.405 and 3.83 rounded).
        assert_eq!(count == 3, v > 2.404_825_557_695_773 && v < 3.831_705_970_207_512, "a={a} V={v} count={count}");
        if v < 2.4048 {
            assert_eq!(count, 1);
            assert!(matches!(solve_fiber_mode(&g, 1, 1, 0.9), Err(Error::ModeCutoff { .. })));
        }
    }
}

proptest! {
    #[test]
    fn invariants_hold(a in 1.5f64..4.0, lambda in 0.45f64..1.6, l in -1i32..=1, r in 0.0f64..8.0, phi in 0.0f64..6.3) {
        let g = fiber(a);
        let mode = match solve_fiber_mode(&g, l, 1, lambda) {
            Ok(m) => m,
            Err(Error::ModeCutoff { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!(mode.residual() < 1e-9);
        let k0 = 2.0 * PI / lambda;
        prop_assert!(mode.beta > mode.n2 * k0 && mode.beta < mode.n1 * k0);
        let x = mode.kt * a;
        let y = mode.gamma * a;
        let v = fiber_v_parameter(&g, lambda).unwrap();
        prop_assert!(((x * x + y * y) / (v * v) - 1.0).abs() < 1e-12);
        let u0 = fiber_profile_eval(&mode, r, 0.0).norm();
        let u1 = fiber_profile_eval(&mode, r, phi).norm();
        prop_assert!((u0 - u1).abs() <= 1e-14 * u0.max(1e-300));
    }
}
