use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use spdc_core::biphoton::{FrequencyGrid, Method, SpectralFunction, TwoPhotonState};
use spdc_core::interferometry::{
    band_entanglement_length, build_state, default_tau_window, dip_centre, entanglement_length,
    entanglement_length_from, grid_self_check, hom_coincidence, hom_coincidence_from_channel, hom_r0, hom_visibility,
    mirror_product, peak_polarization_visibility, polarization_coincidence, polarization_visibility, r1_from_channel,
    visibility_vs_length, Interferogram, InterferogramKind, LE_BAND_LEVEL,
};
use spdc_core::materials::ktp;
use spdc_core::planar::PlanarGeometry;
use spdc_core::qpm::{Interaction, PolingProfile, ProcessSpec, PumpSpec};
use spdc_core::units::omega_from_lambda;
use spdc_core::waveguide::{ModeIndex, Waveguide};
use spdc_core::Error;

const LIMITS: (f64, f64) = (0.4, 3.5);

fn slab(h: f64, interaction: Interaction, ms: u32, mi: u32) -> ProcessSpec {
    ProcessSpec {
        waveguide: Waveguide::Planar(PlanarGeometry::new(h, ktp()).unwrap()),
        interaction,
        pump: PumpSpec { lambda_um: 0.532, mode: ModeIndex::Planar { m: 1 } },
        signal_mode: ModeIndex::Planar { m: ms },
        idler_mode: ModeIndex::Planar { m: mi },
    }
}

fn type0_uniform() -> (ProcessSpec, PolingProfile) {
    (slab(1.625, Interaction::Type0, 0, 1), PolingProfile::uniform(7.58808, 25_000.0, 16.9))
}

fn oeo_uniform() -> (ProcessSpec, PolingProfile) {
    (slab(1.617, Interaction::TypeIIOeo, 0, 1), PolingProfile::uniform(19.2840, 25_000.0, 3.64))
}

fn eoo_chirped(length_um: f64) -> (ProcessSpec, PolingProfile) {
    (slab(1.56, Interaction::TypeIIEoo, 0, 1), PolingProfile::chirped(30.0, 70.0, length_um, 3.64))
}

fn state((process, poling): (ProcessSpec, PolingProfile)) -> TwoPhotonState {
    build_state(&process, &poling, LIMITS, 2000, Method::ClosedForm).unwrap()
}

/// State whose two channels hold arbitrary values on a grid straddling
/// degeneracy.
fn synthetic_state(values: impl Fn(f64, f64) -> Complex64) -> TwoPhotonState {
    let (process, poling) = type0_uniform();
    let half = 0.5 * process.omega_p();
    let grid = Arc::new(FrequencyGrid::symmetric(process.omega_p(), &[(half * 0.9, half * 1.1)], 1000).unwrap());
    let mut a = SpectralFunction::compute(&process, &poling, grid.clone(), Method::ClosedForm).unwrap();
    a.values = grid.omega.iter().map(|&w| values(w, half)).collect();
    let mut b = SpectralFunction::compute(&process.swapped(), &poling, grid.clone(), Method::ClosedForm).unwrap();
    b.values = (0..grid.len()).map(|k| a.values[grid.mirror[k]]).collect();
    TwoPhotonState::new(vec![a, b]).unwrap()
}

fn outer_mean(ig: &Interferogram) -> f64 {
    let n = ig.rate.len();
    let edge = n / 20;
    let outer: Vec<f64> = ig.rate[..edge].iter().chain(&ig.rate[n - edge..]).copied().collect();
    outer.iter().sum::<f64>() / outer.len() as f64
}

#[test]
fn r0_of_zero_and_rectangular_spectra() {
    let zero = synthetic_state(|_, _| Complex64::new(0.0, 0.0));
    assert_eq!(hom_r0(&zero.channels[0]).unwrap(), 0.0);
    let flat = synthetic_state(|_, _| Complex64::new(1.0, 0.0));
    let grid = flat.grid();
    let span = grid.omega[grid.len() - 1] - grid.omega[0];
    let r0 = hom_r0(&flat.channels[0]).unwrap();
    assert!((r0 - span).abs() < 1e-12 * span);
}

#[test]
fn r0_converges_under_grid_refinement() {
    let (process, poling) = type0_uniform();
    let s = state((process.clone(), poling));
    let fine_grid = Arc::new(s.grid().refined(10).unwrap());
    let fine = SpectralFunction::compute(&process, &poling, fine_grid, Method::ClosedForm).unwrap();
    let coarse = hom_r0(&s.channels[0]).unwrap();
    let reference = hom_r0(&fine).unwrap();
    assert!((coarse / reference - 1.0).abs() < 1e-6, "{coarse} vs {reference}");
}

#[test]
fn symmetric_degenerate_spectrum_gives_full_dip() {
    let s = synthetic_state(|w, half| Complex64::new((-((w - half) / (0.02 * half)).powi(2)).exp(), 0.0));
    let ig = hom_coincidence(&s, &[-1e-12, 0.0, 1e-12]).unwrap();
    assert!(ig.rate[1].abs() < 1e-6);
    assert!(
        (hom_visibility(&hom_coincidence(&s, &default_tau_window(&s, 2001).unwrap()).unwrap()).unwrap() - 1.0).abs()
            < 1e-6
    );
}

#[test]
fn hom_baseline_is_one_half() {
    for (name, s) in
        [("type0", state(type0_uniform())), ("oeo", state(oeo_uniform())), ("eoo", state(eoo_chirped(25_000.0)))]
    {
        let taus = default_tau_window(&s, 2001).unwrap();
        let ig = hom_coincidence(&s, &taus).unwrap();
        let base = outer_mean(&ig);
        assert!((base - 0.5).abs() < 1e-3, "{name}: baseline {base}");
        assert!(ig.rate.iter().all(|r| (-1e-12..=1.0 + 1e-12).contains(r)), "{name}: rate out of range");
    }
}

#[test]
fn either_channel_gives_the_same_interferogram() {
    for s in [state(type0_uniform()), state(oeo_uniform())] {
        let taus = default_tau_window(&s, 501).unwrap();
        let a = hom_coincidence_from_channel(&s, 0, &taus).unwrap();
        let b = hom_coincidence_from_channel(&s, 1, &taus).unwrap();
        for (x, y) in a.rate.iter().zip(&b.rate) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn type0_dip_is_shifted_from_zero_delay() {
    let s = state(type0_uniform());
    let taus = default_tau_window(&s, 2001).unwrap();
    let ig = hom_coincidence(&s, &taus).unwrap();
    let step = taus[1] - taus[0];
    assert!(dip_centre(&ig).abs() > 10.0 * step, "centre {} s, step {step} s", dip_centre(&ig));
}

#[test]
fn type2_hom_visibility_is_reduced() {
    for s in [state(oeo_uniform()), state(eoo_chirped(25_000.0))] {
        let ig = hom_coincidence(&s, &default_tau_window(&s, 2001).unwrap()).unwrap();
        let v = hom_visibility(&ig).unwrap();
        assert!(v > 0.0 && v < 1.0, "visibility {v}");
    }
}

#[test]
fn hom_visibility_edge_cases() {
    let flat = Interferogram {
        tau: vec![0.0, 1.0],
        rate: vec![0.5, 0.5],
        envelope: vec![0.0; 2],
        kind: InterferogramKind::Hom,
        r0: 1.0,
    };
    assert_eq!(hom_visibility(&flat).unwrap(), 0.0);
    let dip = Interferogram { rate: vec![0.0, 0.5], ..flat.clone() };
    assert_eq!(hom_visibility(&dip).unwrap(), 1.0);
    let zero = Interferogram { rate: vec![0.0, 0.0], ..flat };
    assert!(matches!(hom_visibility(&zero), Err(Error::UndefinedVisibility(_))));
}

#[test]
fn missing_partner_is_rejected() {
    let s = state(type0_uniform());
    let single = TwoPhotonState::new(vec![s.channels[0].clone()]).unwrap();
    assert!(matches!(hom_coincidence(&single, &[0.0]), Err(Error::MissingSwappedChannel)));
}

#[test]
fn polarization_requires_type2() {
    let s = state(type0_uniform());
    assert!(matches!(polarization_coincidence(&s, 45.0, &[0.0]), Err(Error::NotTypeII)));
    assert!(matches!(polarization_visibility(&s, 0.0), Err(Error::NotTypeII)));
}

#[test]
fn polarization_rate_special_angles() {
    let s = state(oeo_uniform());
    let taus = default_tau_window(&s, 401).unwrap();
    let zero = polarization_coincidence(&s, 0.0, &taus).unwrap();
    assert!(zero.rate.iter().all(|&r| (r - 0.25).abs() < 1e-15));
    let diag = polarization_coincidence(&s, 45.0, &taus).unwrap();
    for (k, &t) in taus.iter().enumerate() {
        let r1 = r1_from_channel(&s, 0, t).unwrap() / diag.r0;
        let expected = 0.25 * (1.0 - 0.5 * (1.0 + r1));
        assert!((diag.rate[k] - expected).abs() < 1e-12);
    }
}

#[test]
fn polarization_visibility_peaks_below_one_for_long_device() {
    let s = state(eoo_chirped(25_000.0));
    let taus = default_tau_window(&s, 2001).unwrap();
    let (tau, v) = peak_polarization_visibility(&s, &taus).unwrap();
    assert!(v < 1.0 && v > 1.0 / 3.0, "visibility {v}");
    assert!((polarization_visibility(&s, tau).unwrap() - v).abs() < 1e-12);
    for &t in taus.iter().step_by(50) {
        assert!(polarization_visibility(&s, t).unwrap() <= v + 1e-12);
    }
}

#[test]
fn visibility_degrades_with_length() {
    let process = slab(1.56, Interaction::TypeIIEoo, 0, 1);
    let poling = PolingProfile::uniform(67.7768, 25_000.0, 3.64);
    let curve = visibility_vs_length(&process, &poling, &[2_000.0, 25_000.0], LIMITS, 2000).unwrap();
    assert!(curve.visibility[0] > curve.visibility[1], "{:?}", curve.visibility);
    let single = visibility_vs_length(&process, &poling, &[2_000.0], LIMITS, 2000).unwrap();
    assert_eq!(single.visibility.len(), 1);
    assert_eq!(single.visibility[0], curve.visibility[0]);
}

#[test]
fn grid_density_self_check() {
    let s = state(type0_uniform());
    let taus = default_tau_window(&s, 201).unwrap();
    let change = grid_self_check(&s, &taus).unwrap();
    assert!(change < 1e-4, "relative change {change:e}");
}

#[test]
fn entanglement_length_sentinel_and_scaling() {
    let process = slab(1.625, Interaction::Type0, 0, 0);
    let poling = PolingProfile::uniform(7.5, 25_000.0, 16.9);
    let le = entanglement_length(&process, &process.swapped(), &poling, omega_from_lambda(0.9)).unwrap();
    assert!(le.is_infinite());
    let base = entanglement_length_from(2.0 * PI, 1e-3).value_um();
    let doubled = entanglement_length_from(2.0 * PI, 2e-3).value_um();
    assert!((doubled - 0.5 * base).abs() < 1e-9 * base);
}

#[test]
fn chirped_entanglement_lengths_sit_between_short_and_long_devices() {
    let short = state(eoo_chirped(2_000.0));
    let (_, le) = band_entanglement_length(&short.channels[0], LE_BAND_LEVEL).unwrap();
    let le = le.value_um();
    assert!(le > 2_000.0 && le < 25_000.0, "L_e = {le} µm");
}

#[test]
fn mirror_phase_grows_linearly_with_length() {
    // Linear model Δβ̃(ω) = a + b(ω − ω_p/2)/ω_p with a small asymmetry.
    let (a, b) = (3e-5, 2e-4);
    let product_at = |length: f64| {
        let s = synthetic_state(move |w, half| {
            let d = a + b * (w - half) / (2.0 * half);
            let theta = d * length / (2.0 * PI);
            let sinc = if theta == 0.0 { 1.0 } else { (PI * theta).sin() / (PI * theta) };
            Complex64::from_polar(sinc, 0.5 * d * length)
        });
        mirror_product(&s.channels[0]).unwrap()
    };
    let (p1, p2) = (product_at(100.0), product_at(200.0));
    let mut checked = 0;
    for (x, y) in p1.iter().zip(&p2) {
        if x.im.abs() > 1e-6 * x.norm() {
            let ratio = (y.im / y.norm()) / (x.im / x.norm());
            assert!((ratio - 2.0).abs() < 2e-3, "ratio {ratio}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rates_are_bounded(t in -1.0f64..1.0, theta in 0.0f64..90.0) {
        let s = state(oeo_uniform());
        let taus = default_tau_window(&s, 3).unwrap();
        let tau = t * taus[2];
        let hom = hom_coincidence(&s, &[tau]).unwrap();
        prop_assert!(hom.rate[0] >= -1e-12 && hom.rate[0] <= 1.0 + 1e-12);
        let pol = polarization_coincidence(&s, theta, &[tau]).unwrap();
        prop_assert!(pol.rate[0] >= -1e-12 && pol.rate[0] <= 0.25 + 1e-12);
        let v = polarization_visibility(&s, tau).unwrap();
        prop_assert!(v <= 1.0 + 1e-12);
    }
}
