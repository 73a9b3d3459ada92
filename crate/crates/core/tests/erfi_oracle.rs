mod support;

use num_complex::Complex64;
use proptest::prelude::*;
use spdc_core::numerics::erfi_complex;
use support::erfi_series::erfi_series;

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

#[test]
fn series_oracle_reproduces_known_value() {
    let v = erfi_series(Complex64::new(1.0, 0.0));
    assert!((v.re - 1.650_425_758_797_542_8).abs() < 1e-15);
}

#[test]
fn matches_series_on_a_polar_grid() {
    for i in 0..12 {
        let r = 0.05 + 0.5 * i as f64;
        for j in 0..16 {
            let theta = std::f64::consts::PI * j as f64 / 8.0 + 0.1;
            let z = Complex64::from_polar(r, theta);
            let got = erfi_complex(z).unwrap();
            let want = erfi_series(z);
            assert!(rel_err(got, want) < 1e-10, "z = {z}: {got} vs {want}");
        }
    }
}

#[test]
fn matches_series_on_the_chirp_diagonal() {
    // Chirped-poling arguments lie on the lines arg z = ±π/4 (mod π).
    for i in 0..40 {
        let t = -45.0 + 2.3 * i as f64;
        for phase in [std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4] {
            let z = Complex64::from_polar(t, phase);
            let got = erfi_complex(z).unwrap();
            let want = erfi_series(z);
            assert!(rel_err(got, want) < 1e-10, "z = {z}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn odd_and_conjugate_symmetric(r in 0.0f64..10.0, theta in -std::f64::consts::PI..std::f64::consts::PI) {
        let z = Complex64::from_polar(r, theta);
        let v = erfi_complex(z).unwrap();
        let scale = v.norm().max(1e-300);
        let odd = erfi_complex(-z).unwrap();
        prop_assert!((odd + v).norm() <= 1e-12 * scale);
        let conj = erfi_complex(z.conj()).unwrap();
        prop_assert!((conj - v.conj()).norm() <= 1e-12 * scale);
    }
}
