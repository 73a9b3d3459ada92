use proptest::prelude::*;
use spdc_core::materials::{cladding_index, core_index, ktp, silica, MaterialSpec, PolarizationAxis};

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

#[test]
fn normal_dispersion_on_visible_and_near_infrared() {
    for material in [ktp(), silica()] {
        for pol in [PolarizationAxis::O, PolarizationAxis::E] {
            let n: Vec<f64> = grid(0.4, 1.8, 200).map(|l| core_index(&material, pol, l).unwrap()).collect();
            assert!(n.windows(2).all(|w| w[1] < w[0]), "{} {pol}", material.name);
        }
    }
}

#[test]
fn ktp_z_exceeds_y() {
    let m = ktp();
    for l in grid(0.4, 1.8, 200) {
        assert!(core_index(&m, PolarizationAxis::E, l).unwrap() > core_index(&m, PolarizationAxis::O, l).unwrap());
    }
}

#[test]
fn cladding_ratio_is_flat() {
    let m = ktp();
    for l in grid(0.45, 1.6, 50) {
        let r = cladding_index(&m, PolarizationAxis::O, l).unwrap() / core_index(&m, PolarizationAxis::O, l).unwrap();
        assert!((r - 0.95).abs() < 1e-15);
    }
}

#[test]
fn material_loads_from_toml() {
    let text = r#"
[material]
name = "ktp-copy"
delta = 0.05

[material.axis_models.y]
form = "pole-form"
constant = 3.45018
terms = [{ strength = 0.04341, pole = 0.04597 }, { strength = 16.98825, pole = 39.43799 }]
valid_range = [0.4, 3.5]

[material.axis_models.z]
form = "pole-form"
constant = 4.59423
terms = [{ strength = 0.06206, pole = 0.04763 }, { strength = 110.80672, pole = 86.12171 }]
valid_range = [0.4, 3.5]

[material.d_eff_catalog]
type0 = 16.9
type2 = 3.64
"#;
    let m = MaterialSpec::from_toml_str(text).unwrap();
    let reference = ktp();
    assert_eq!(m.axis_models, reference.axis_models);
    assert_eq!(m.d_eff_catalog, reference.d_eff_catalog);
}

#[test]
fn toml_with_bad_delta_is_rejected() {
    let text = r#"
[material]
name = "bad"
delta = 1.5
isotropic = true
[material.axis_models.y]
form = "oscillator-form"
terms = [{ strength = 0.6962, pole = 0.0684 }]
valid_range = [0.21, 3.7]
[material.d_eff_catalog]
type0 = 1.0
"#;
    assert!(MaterialSpec::from_toml_str(text).is_err());
}

proptest! {
    #[test]
    fn cladding_below_core(lambda in 0.4f64..3.5, e in any::<bool>()) {
        let pol = if e { PolarizationAxis::E } else { PolarizationAxis::O };
        for m in [ktp(), silica()] {
            let n1 = core_index(&m, pol, lambda).unwrap();
            let n2 = cladding_index(&m, pol, lambda).unwrap();
            prop_assert!(n2 < n1 && n1 > 1.0);
        }
    }
}
