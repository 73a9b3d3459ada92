//! Overlap amplitudes and biphoton spectral functions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fiber::FiberMode;
use crate::numerics::{
    bessel_j, bessel_k, erfi_complex, gauss_legendre, integrate_adaptive, integrate_gauss_legendre, GaussLegendre,
};
use crate::planar::PlanarMode;
use crate::qpm::{chirp_rate, ModeTriple, PolingProfile, PolingVariant, ProcessSpec};
use crate::units::{lambda_from_omega, omega_from_lambda};
use crate::waveguide::GuidedMode;
use crate::{Error, Result};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Transverse overlap A = ∫ u_p u_s u_i over the cross-section.
pub fn overlap_amplitude(process: &ProcessSpec, omega_s: f64) -> Result<f64> {
    overlap_from_modes(&process.modes_at(omega_s)?)
}

pub fn overlap_from_modes(modes: &ModeTriple) -> Result<f64> {
    match (modes.pump, modes.signal, modes.idler) {
        (GuidedMode::Planar(p), GuidedMode::Planar(s), GuidedMode::Planar(i)) => Ok(planar_overlap([&p, &s, &i])),
        (GuidedMode::Fiber(p), GuidedMode::Fiber(s), GuidedMode::Fiber(i)) => fiber_overlap([&p, &s, &i]),
        _ => Err(Error::Invalid("mixed waveguide kinds in one process".into())),
    }
}

/// Core part in closed form from the exponential expansion of each factor;
/// the cladding tails are single exponentials.
fn planar_overlap(modes: [&PlanarMode; 3]) -> f64 {
    let odd_count = modes.iter().filter(|m| !m.is_even()).count();
    if odd_count % 2 == 1 {
        return 0.0;
    }
    let h = modes[0].h_um;
    // cos(kz) = (e^{jkz} + e^{−jkz})/2, sin(kz) = (e^{jkz} − e^{−jkz})/(2j)
    let mut core = Complex64::new(0.0, 0.0);
    for signs in 0..8u32 {
        let mut kappa = 0.0;
        let mut coeff = Complex64::new(1.0, 0.0);
        for (q, mode) in modes.iter().enumerate() {
            let plus = signs & (1 << q) == 0;
            kappa += if plus { mode.kz } else { -mode.kz };
            coeff *= if mode.is_even() {
                Complex64::new(0.5, 0.0)
            } else if plus {
                Complex64::new(0.0, -0.5)
            } else {
                Complex64::new(0.0, 0.5)
            };
        }
        let integral = if kappa == 0.0 { h } else { 2.0 * (0.5 * kappa * h).sin() / kappa };
        core += coeff * integral;
    }
    let norms: f64 = modes.iter().map(|m| m.norm).product();
    let edge: f64 = modes.iter().map(|m| m.edge_value()).product();
    let decay: f64 = modes.iter().map(|m| m.gamma).sum();
    // Both tails contribute equally once the parity is even.
    let tails = 2.0 * edge / decay;
    norms * (core.re + tails)
}

const CORE_NODES: usize = 32;
const CLADDING_NODES: usize = 16;
const CLADDING_PANELS: usize = 8;
const CLADDING_REACH: f64 = 40.0;

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: std::sync::OnceLock<(GaussLegendre, GaussLegendre)> = std::sync::OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(CORE_NODES), gauss_legendre(CLADDING_NODES)))
}

/// 2π δ(l_p + l_s + l_i) ∫ R_p R_s R_i r dr.
fn fiber_overlap(modes: [&FiberMode; 3]) -> Result<f64> {
    if modes.iter().map(|m| m.l).sum::<i32>() != 0 {
        return Ok(0.0);
    }
    let a = modes[0].a_um;
    let (core_rule, clad_rule) = rules();
    // Cladding amplitude N J_l(X)/K_l(Y), hoisted out of the integrand.
    let mut clad_scale = [0.0; 3];
    for (q, m) in modes.iter().enumerate() {
        let order = m.l.unsigned_abs();
        clad_scale[q] = m.norm * bessel_j(order, m.kt * a)? / bessel_k(order, m.gamma * a)?;
    }
    let core = integrate_gauss_legendre(
        |r| {
            r * modes
                .iter()
                .map(|m| m.norm * bessel_j(m.l.unsigned_abs(), m.kt * r).unwrap_or(f64::NAN))
                .product::<f64>()
        },
        0.0,
        a,
        core_rule,
    );
    let clad_integrand = |r: f64| {
        let mut v = r;
        for (q, m) in modes.iter().enumerate() {
            v *= clad_scale[q] * bessel_k(m.l.unsigned_abs(), m.gamma * r).unwrap_or(0.0);
        }
        v
    };
    let decay: f64 = modes.iter().map(|m| m.gamma).sum();
    let panel = CLADDING_REACH / decay / CLADDING_PANELS as f64;
    let clad: f64 = (0..CLADDING_PANELS)
        .map(|k| {
            let lo = a + k as f64 * panel;
            integrate_gauss_legendre(clad_integrand, lo, lo + panel, clad_rule)
        })
        .sum();
    Ok(2.0 * PI * (core + clad))
}

/// sinc(θ) = sin(πθ)/(πθ).
pub fn sinc(theta: f64) -> f64 {
    if theta == 0.0 {
        1.0
    } else {
        let x = PI * theta;
        x.sin() / x
    }
}

fn uniform_from(overlap: f64, delta_eff: f64, poling: &PolingProfile) -> Complex64 {
    let l = poling.length_um;
    let prefactor = 2.0 * l / PI * poling.d_eff * overlap;
    Complex64::from_polar(prefactor * sinc(delta_eff * l / (2.0 * PI)), 0.5 * delta_eff * l)
}

fn chirped_from(overlap: f64, delta_eff: f64, zeta: f64, poling: &PolingProfile) -> Result<Complex64> {
    let c = (-2.0 * J * zeta).sqrt().inv();
    let g = |x: f64| erfi_complex((delta_eff + zeta * x) * c);
    let bracket = g(poling.length_um)? - g(0.0)?;
    let phase = Complex64::from_polar(1.0, -delta_eff * delta_eff / (2.0 * zeta));
    Ok(poling.d_eff * overlap / (PI.sqrt() * zeta * c) * phase * bracket)
}

fn direct_from(overlap: f64, delta_eff: f64, zeta: f64, poling: &PolingProfile) -> Result<Complex64> {
    let l = poling.length_um;
    let integral =
        integrate_adaptive(|x| Complex64::from_polar(1.0, delta_eff * x + 0.5 * zeta * x * x), 0.0, l, 1e-10 * l)?;
    Ok(2.0 / PI * poling.d_eff * overlap * integral)
}

/// Φ for uniform poling: A′ sinc(Δβ̃L/2π) e^{jΔβ̃L/2}.
pub fn spectral_function_uniform(process: &ProcessSpec, poling: &PolingProfile, omega_s: f64) -> Result<Complex64> {
    if !matches!(poling.variant, PolingVariant::Uniform { .. }) {
        return Err(Error::Invalid("uniform closed form needs uniform poling".into()));
    }
    let modes = process.modes_at(omega_s)?;
    Ok(uniform_from(overlap_from_modes(&modes)?, poling.effective_mismatch(modes.delta_beta()), poling))
}

/// Φ for linearly chirped poling, in terms of erfi.
pub fn spectral_function_chirped(process: &ProcessSpec, poling: &PolingProfile, omega_s: f64) -> Result<Complex64> {
    let zeta = chirp_rate(poling)?;
    let modes = process.modes_at(omega_s)?;
    chirped_from(overlap_from_modes(&modes)?, poling.effective_mismatch(modes.delta_beta()), zeta, poling)
}

/// Φ from adaptive quadrature of the poling integral.
pub fn spectral_function_direct(process: &ProcessSpec, poling: &PolingProfile, omega_s: f64) -> Result<Complex64> {
    let zeta = match poling.variant {
        PolingVariant::Uniform { .. } => 0.0,
        PolingVariant::Chirped { .. } => chirp_rate(poling)?,
    };
    let modes = process.modes_at(omega_s)?;
    direct_from(overlap_from_modes(&modes)?, poling.effective_mismatch(modes.delta_beta()), zeta, poling)
}

/// Closed form matching the poling variant.
pub fn spectral_function(process: &ProcessSpec, poling: &PolingProfile, omega_s: f64) -> Result<Complex64> {
    match poling.variant {
        PolingVariant::Uniform { .. } => spectral_function_uniform(process, poling, omega_s),
        PolingVariant::Chirped { .. } => spectral_function_chirped(process, poling, omega_s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Direct,
}

/// Signal-frequency grid symmetric about ω_p/2 with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub omega: Vec<f64>,
    pub weights: Vec<f64>,
    /// Index of the node at ω_p − ω.
    pub mirror: Vec<usize>,
    pub omega_p: f64,
    /// Bands the grid was built from.
    pub bands: Vec<(f64, f64)>,
}

impl FrequencyGrid {
    /// Builds a grid covering the given ω bands and their mirror images
    /// about ω_p/2, with about `points` nodes in total. The degenerate
    /// frequency itself is never a node.
    pub fn symmetric(omega_p: f64, bands: &[(f64, f64)], points: usize) -> Result<Self> {
        let half = 0.5 * omega_p;
        let mut detuning: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in bands {
            let (a, b) = (a.min(b), a.max(b));
            if !(a > 0.0 && b < omega_p) {
                return Err(Error::Invalid(format!("band [{a}, {b}] rad/s outside (0, ω_p)")));
            }
            let (da, db) = (a - half, b - half);
            if da >= 0.0 {
                detuning.push((da, db));
            } else if db <= 0.0 {
                detuning.push((-db, -da));
            } else {
                detuning.push((0.0, da.abs().max(db)));
            }
        }
        if detuning.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        detuning.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in detuning {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let total: f64 = merged.iter().map(|(a, b)| b - a).sum();
        if !(total > 0.0) {
            return Err(Error::EmptySpectrum);
        }
        let half_points = (points / 2).max(3);
        let mut upper: Vec<(f64, f64)> = Vec::new();
        for (a, b) in merged {
            let n = ((half_points as f64 * (b - a) / total).round() as usize).max(3);
            if a == 0.0 {
                // Nodes at (k + ½)h; the trapezoid cell straddling zero
                // belongs to the pair ±h/2.
                let h = b / (n as f64 - 0.5);
                for k in 0..n {
                    let w = if k + 1 == n { 0.5 * h } else { h };
                    upper.push((half + (k as f64 + 0.5) * h, w));
                }
            } else {
                let h = (b - a) / (n - 1) as f64;
                for k in 0..n {
                    let w = if k == 0 || k + 1 == n { 0.5 * h } else { h };
                    upper.push((half + a + k as f64 * h, w));
                }
            }
        }
        upper.retain(|&(w, _)| w > half && w < omega_p);
        let n = upper.len();
        let mut omega = Vec::with_capacity(2 * n);
        let mut weights = Vec::with_capacity(2 * n);
        for &(w, wt) in upper.iter().rev() {
            omega.push(omega_p - w);
            weights.push(wt);
        }
        for &(w, wt) in &upper {
            omega.push(w);
            weights.push(wt);
        }
        let mirror = (0..2 * n).map(|k| 2 * n - 1 - k).collect();
        let grid = Self { omega, weights, mirror, omega_p, bands: bands.to_vec() };
        if !grid.omega.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Invalid("frequency grid is not strictly increasing".into()));
        }
        Ok(grid)
    }

    /// Grid between two signal wavelengths (µm), symmetrized.
    pub fn from_wavelengths(omega_p: f64, lambda_min_um: f64, lambda_max_um: f64, points: usize) -> Result<Self> {
        Self::symmetric(omega_p, &[(omega_from_lambda(lambda_max_um), omega_from_lambda(lambda_min_um))], points)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Every node has a partner at exactly ω_p − ω.
    pub fn is_symmetric(&self) -> bool {
        self.mirror.len() == self.omega.len()
            && self.weights.len() == self.omega.len()
            && self.mirror.iter().enumerate().all(|(k, &m)| {
                m < self.omega.len()
                    && self.mirror[m] == k
                    && self.weights[m] == self.weights[k]
                    && (self.omega[k] + self.omega[m] - self.omega_p).abs() <= 4.0 * f64::EPSILON * self.omega_p
            })
    }

    /// Same bands with `factor` times as many nodes.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::symmetric(self.omega_p, &self.bands, self.len() * factor)
    }

    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    PeakNormalized,
}

/// Φ(ω_s) sampled on a grid for one process.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    pub process: ProcessSpec,
    pub poling: PolingProfile,
    pub grid: Arc<FrequencyGrid>,
    pub values: Vec<Complex64>,
    pub normalization: Normalization,
}

impl SpectralFunction {
    pub fn compute(
        process: &ProcessSpec,
        poling: &PolingProfile,
        grid: Arc<FrequencyGrid>,
        method: Method,
    ) -> Result<Self> {
        let zeta = match poling.variant {
            PolingVariant::Uniform { .. } => 0.0,
            PolingVariant::Chirped { .. } => chirp_rate(poling)?,
        };
        let values = grid
            .omega
            .par_iter()
            .map(|&w| -> Result<Complex64> {
                // No guided pair at this frequency, so nothing is emitted.
                let modes = match process.modes_at(w) {
                    Err(Error::ModeCutoff { .. }) => return Ok(Complex64::new(0.0, 0.0)),
                    other => other?,
                };
                let overlap = overlap_from_modes(&modes)?;
                let delta_eff = poling.effective_mismatch(modes.delta_beta());
                match (method, poling.variant) {
                    (Method::Direct, _) => direct_from(overlap, delta_eff, zeta, poling),
                    (Method::ClosedForm, PolingVariant::Uniform { .. }) => Ok(uniform_from(overlap, delta_eff, poling)),
                    (Method::ClosedForm, PolingVariant::Chirped { .. }) => {
                        chirped_from(overlap, delta_eff, zeta, poling)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { process: process.clone(), poling: *poling, grid, values, normalization: Normalization::Raw })
    }

    pub fn abs_sq(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Copy scaled so that max |Φ|² = 1.
    pub fn peak_normalized(&self) -> Result<Self> {
        if self.normalization == Normalization::PeakNormalized {
            return Ok(self.clone());
        }
        let peak = self.peak();
        if !(peak > 0.0) {
            return Err(Error::EmptySpectrum);
        }
        let values = self.values.iter().map(|v| v / peak).collect();
        Ok(Self { values, normalization: Normalization::PeakNormalized, ..self.clone() })
    }

    pub fn lambda_um(&self) -> Vec<f64> {
        self.grid.omega.iter().map(|&w| lambda_from_omega(w)).collect()
    }
}

/// Superposition of channels sharing pump and grid.
#[derive(Debug, Clone)]
pub struct TwoPhotonState {
    pub channels: Vec<SpectralFunction>,
}

impl TwoPhotonState {
    pub fn new(channels: Vec<SpectralFunction>) -> Result<Self> {
        let first = channels.first().ok_or(Error::EmptySpectrum)?;
        for c in &channels[1..] {
            if c.grid != first.grid || c.process.pump != first.process.pump {
                return Err(Error::Invalid("channels must share pump and frequency grid".into()));
            }
        }
        Ok(Self { channels })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.channels[0].grid
    }

    /// Index of the channel with signal and idler modes exchanged.
    pub fn partner(&self, index: usize) -> Option<usize> {
        let swapped = self.channels[index].process.swapped();
        self.channels.iter().position(|c| c.process == swapped && c.poling == self.channels[index].poling)
    }
}

/// max_k |Φ_A(ω_p − ω_k) − Φ_B(ω_k)| / max |Φ| over all swapped channel pairs.
pub fn mirror_symmetry_check(state: &TwoPhotonState) -> Result<f64> {
    let grid = state.grid();
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let mut worst = 0.0f64;
    for a in 0..state.channels.len() {
        let b = state.partner(a).ok_or(Error::MissingSwappedChannel)?;
        let (pa, pb) = (&state.channels[a], &state.channels[b]);
        let scale = pa.peak().max(pb.peak());
        if !(scale > 0.0) {
            continue;
        }
        for k in 0..grid.len() {
            let d = (pa.values[grid.mirror[k]] - pb.values[k]).norm() / scale;
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Relative level of |Φ|² (to peak) that bounds the automatic band.
pub const BAND_LEVEL: f64 = 1e-4;
const BAND_SCAN_POINTS: usize = 4000;

/// Window of Δβ̃ (rad/µm) outside which |Φ|² < BAND_LEVEL·peak for a
/// flat overlap: the sinc envelope for uniform poling; for chirped poling
/// the range −ζx, x ∈ [0, L], widened by the Fresnel edge ringing.
fn mismatch_window(poling: &PolingProfile) -> Result<(f64, f64)> {
    let l = poling.length_um;
    let amplitude = BAND_LEVEL.sqrt();
    Ok(match poling.variant {
        PolingVariant::Uniform { .. } => {
            let reach = 2.0 / (l * amplitude);
            (-reach, reach)
        }
        PolingVariant::Chirped { .. } => {
            let zeta = chirp_rate(poling)?;
            let end = -zeta * l;
            let widen = 2.0 / amplitude * (zeta.abs() / (2.0 * PI)).sqrt();
            (end.min(0.0) - widen, end.max(0.0) + widen)
        }
    })
}

/// Signal-frequency bands (upper half only, ω > ω_p/2) where the channel's
/// Δβ̃ lies in the spectral window.
pub fn auto_bands(
    process: &ProcessSpec,
    poling: &PolingProfile,
    lambda_limits_um: (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    let (lo_mis, hi_mis) = mismatch_window(poling)?;
    let omega_p = process.omega_p();
    let half = 0.5 * omega_p;
    let (lambda_min, lambda_max) = lambda_limits_um;
    // Signal and idler must both lie inside the wavelength limits.
    let lo = (half * (1.0 + 1e-12)).max(omega_from_lambda(lambda_max)).max(omega_p - omega_from_lambda(lambda_min));
    let hi = omega_from_lambda(lambda_min).min(omega_p - omega_from_lambda(lambda_max));
    if !(hi > lo) {
        return Err(Error::EmptySpectrum);
    }
    let eval = |w: f64| -> f64 {
        let mut best = f64::NAN;
        for channel in [process.clone(), process.swapped()] {
            if let Ok(m) = channel.modes_at(w) {
                let d = poling.effective_mismatch(m.delta_beta());
                let inside = d >= lo_mis && d <= hi_mis;
                let distance = if inside { 0.0 } else { (d - lo_mis).abs().min((d - hi_mis).abs()) };
                best = if best.is_nan() { distance } else { best.min(distance) };
            }
        }
        best
    };
    let step = (hi - lo) / BAND_SCAN_POINTS as f64;
    let nodes: Vec<f64> = (0..=BAND_SCAN_POINTS).map(|k| lo + step * k as f64).collect();
    let inside: Vec<bool> = nodes.par_iter().map(|&w| eval(w) == 0.0).collect();
    let refine = |mut a: f64, mut b: f64, a_inside: bool| -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if (eval(mid) == 0.0) == a_inside {
                a = mid;
            } else {
                b = mid;
            }
        }
        if a_inside {
            b
        } else {
            a
        }
    };
    let mut bands = Vec::new();
    let mut start: Option<f64> = None;
    for k in 0..nodes.len() {
        match (start, inside[k]) {
            (None, true) => {
                start = Some(if k == 0 { nodes[0] } else { refine(nodes[k - 1], nodes[k], false) });
            }
            (Some(s), false) => {
                bands.push((s, refine(nodes[k - 1], nodes[k], true)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        bands.push((s, *nodes.last().unwrap()));
    }
    // Pad each band by one scan step so edges are not clipped.
    Ok(bands.into_iter().map(|(a, b)| ((a - step).max(lo), (b + step).min(hi))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_zeros() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(1.0).abs() < 1e-15);
        assert!(sinc(-1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_is_symmetric_and_avoids_degeneracy() {
        let wp = 2.0;
        let g = FrequencyGrid::symmetric(wp, &[(0.9, 1.2)], 101).unwrap();
        assert!(g.is_symmetric());
        assert!(g.omega.iter().all(|&w| w != 1.0));
        let total: f64 = g.weights.iter().sum();
        let lo = g.omega[0];
        let hi = *g.omega.last().unwrap();
        assert!((total - (hi - lo)).abs() < 1e-12);
        let disjoint = FrequencyGrid::symmetric(wp, &[(1.3, 1.4)], 100).unwrap();
        assert!(disjoint.is_symmetric());
        assert!((disjoint.weights.iter().sum::<f64>() - 0.2).abs() < 1e-12);
    }
}
