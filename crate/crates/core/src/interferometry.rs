//! Two-photon interference: HOM and polarization coincidences, visibility,
//! entanglement length.
//!
//! All frequency sums run over the shared symmetric grid of the state. With
//! ν = ω_p − 2ω and P(ω) = Φ(ω)Φ*(ω_p − ω), the correlation is
//! R₁(τ) = Σ w P e^{jντ} = 2 Re E(τ), where E sums the upper half only;
//! |2E| is the fringe envelope.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::biphoton::{auto_bands, FrequencyGrid, Method, SpectralFunction, TwoPhotonState};
use crate::qpm::{chirp_rate, PolingProfile, PolingVariant, ProcessSpec};
use crate::{Error, Result};

/// Default number of delay samples.
pub const DEFAULT_TAU_POINTS: usize = 2001;
/// Default half-width of the delay window in units of 1/FWHM (rad/s).
pub const TAU_WINDOW_WIDTHS: f64 = 20.0;
/// Below this |denominator| (rad/µm) the entanglement length is infinite.
pub const LE_DENOMINATOR_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InterferogramKind {
    Hom,
    Polarization { theta1_deg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interferogram {
    /// Delay in seconds.
    pub tau: Vec<f64>,
    /// Coincidence rate normalized by R₀.
    pub rate: Vec<f64>,
    /// Fringe envelope |R₁|/R₀ at each delay.
    pub envelope: Vec<f64>,
    pub kind: InterferogramKind,
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityCurve {
    /// Delay (s) or device length (µm).
    pub parameter: Vec<f64>,
    pub visibility: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "um", rename_all = "lowercase")]
pub enum EntanglementLength {
    Finite(f64),
    Infinite,
}

impl EntanglementLength {
    /// Value in µm; `f64::INFINITY` for the sentinel.
    pub fn value_um(&self) -> f64 {
        match self {
            EntanglementLength::Finite(v) => *v,
            EntanglementLength::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, EntanglementLength::Infinite)
    }
}

/// R₀ = Σ w |Φ|² over the grid.
pub fn hom_r0(phi: &SpectralFunction) -> Result<f64> {
    if phi.grid.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    Ok(phi.grid.trapezoid(&phi.abs_sq()))
}

/// P(ω_k) = Φ(ω_k) Φ*(ω_p − ω_k) at every node.
pub fn mirror_product(phi: &SpectralFunction) -> Result<Vec<Complex64>> {
    let grid = &phi.grid;
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    Ok((0..grid.len()).map(|k| phi.values[k] * phi.values[grid.mirror[k]].conj()).collect())
}

/// Upper-half terms (w P, ν) of the correlation sum for one channel.
#[derive(Debug, Clone)]
struct Correlator {
    terms: Vec<(Complex64, f64)>,
    r0: f64,
}

impl Correlator {
    fn new(phi: &SpectralFunction, sign: f64) -> Result<Self> {
        let grid = &phi.grid;
        let product = mirror_product(phi)?;
        let half = 0.5 * grid.omega_p;
        let terms = (0..grid.len())
            .filter(|&k| grid.omega[k] > half)
            .map(|k| {
                let nu = grid.omega[grid.mirror[k]] - grid.omega[k];
                (grid.weights[k] * product[k], sign * nu)
            })
            .collect();
        Ok(Self { terms, r0: hom_r0(phi)? })
    }

    /// E(τ); R₁ = 2 Re E.
    fn half_sum(&self, tau: f64) -> Complex64 {
        self.terms.iter().map(|&(wp, nu)| wp * Complex64::from_polar(1.0, nu * tau)).sum()
    }

    fn r1(&self, tau: f64) -> f64 {
        2.0 * self.half_sum(tau).re
    }

    /// |P|-weighted mean of ν.
    fn carrier(&self) -> f64 {
        let (num, den) = self.terms.iter().fold((0.0, 0.0), |(n, d), &(wp, nu)| (n + wp.norm() * nu, d + wp.norm()));
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

/// Delay sign of a channel: +1 when its signal travels in the delayed arm,
/// which carries channel 0's signal mode.
fn channel_sign(state: &TwoPhotonState, channel: usize) -> Result<f64> {
    let c = state.channels.get(channel).ok_or_else(|| Error::Invalid(format!("no channel {channel}")))?;
    let reference = &state.channels[0].process;
    Ok(if c.process.signal_mode == reference.signal_mode && c.process.interaction == reference.interaction {
        1.0
    } else {
        -1.0
    })
}

fn correlator(state: &TwoPhotonState, channel: usize) -> Result<Correlator> {
    state.partner(channel).ok_or(Error::MissingSwappedChannel)?;
    if !state.grid().is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let c = Correlator::new(&state.channels[channel], channel_sign(state, channel)?)?;
    if !(c.r0 > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    Ok(c)
}

/// R₁(τ) evaluated with the given channel.
pub fn r1_from_channel(state: &TwoPhotonState, channel: usize, tau: f64) -> Result<f64> {
    Ok(correlator(state, channel)?.r1(tau))
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::Invalid("empty delay grid".into()));
    }
    if taus.iter().any(|t| !t.is_finite()) || taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("delay grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// HOM interferogram R(τ)/R₀ = ½(1 − R₁/R₀), evaluated with `channel`.
pub fn hom_coincidence_from_channel(state: &TwoPhotonState, channel: usize, taus: &[f64]) -> Result<Interferogram> {
    check_taus(taus)?;
    let c = correlator(state, channel)?;
    let (rate, envelope): (Vec<f64>, Vec<f64>) = taus
        .par_iter()
        .map(|&t| {
            let e = c.half_sum(t);
            (0.5 * (1.0 - 2.0 * e.re / c.r0), 2.0 * e.norm() / c.r0)
        })
        .unzip();
    Ok(Interferogram { tau: taus.to_vec(), rate, envelope, kind: InterferogramKind::Hom, r0: c.r0 })
}

pub fn hom_coincidence(state: &TwoPhotonState, taus: &[f64]) -> Result<Interferogram> {
    hom_coincidence_from_channel(state, 0, taus)
}

/// (R_max − R_min)/(R_max + R_min) over the sampled interferogram.
pub fn hom_visibility(interferogram: &Interferogram) -> Result<f64> {
    let (lo, hi) =
        interferogram.rate.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| (l.min(r), h.max(r)));
    if interferogram.rate.is_empty() || !(hi + lo > 0.0) {
        return Err(Error::UndefinedVisibility("interferogram is identically zero".into()));
    }
    Ok((hi - lo) / (hi + lo))
}

fn require_type2(state: &TwoPhotonState) -> Result<()> {
    if state.channels.iter().any(|c| c.process.is_type0()) {
        return Err(Error::NotTypeII);
    }
    Ok(())
}

/// R(θ₁, τ)/R₀ = ¼(1 − ½ sin²(2θ₁)(1 + R₁/R₀)), with θ₂ = 90° − θ₁.
pub fn polarization_coincidence(state: &TwoPhotonState, theta1_deg: f64, taus: &[f64]) -> Result<Interferogram> {
    require_type2(state)?;
    check_taus(taus)?;
    let c = correlator(state, 0)?;
    let s = (2.0 * theta1_deg.to_radians()).sin().powi(2);
    let (rate, envelope): (Vec<f64>, Vec<f64>) = taus
        .par_iter()
        .map(|&t| {
            let e = c.half_sum(t);
            (0.25 * (1.0 - 0.5 * s * (1.0 + 2.0 * e.re / c.r0)), 2.0 * e.norm() / c.r0)
        })
        .unzip();
    Ok(Interferogram {
        tau: taus.to_vec(),
        rate,
        envelope,
        kind: InterferogramKind::Polarization { theta1_deg },
        r0: c.r0,
    })
}

/// Ṽ = (R₀ + Re R₁)/(3R₀ − Re R₁).
pub fn visibility_from_correlation(r0: f64, re_r1: f64) -> Result<f64> {
    let den = 3.0 * r0 - re_r1;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::UndefinedVisibility(format!("3R₀ − Re R₁ = {den}")));
    }
    Ok((r0 + re_r1) / den)
}

pub fn polarization_visibility(state: &TwoPhotonState, tau: f64) -> Result<f64> {
    require_type2(state)?;
    let c = correlator(state, 0)?;
    visibility_from_correlation(c.r0, c.r1(tau))
}

/// Largest polarization visibility over the delay window: envelope argmax
/// on `taus`, then a fine scan over a few carrier periods and a
/// golden-section polish. Returns (τ, Ṽ).
pub fn peak_polarization_visibility(state: &TwoPhotonState, taus: &[f64]) -> Result<(f64, f64)> {
    require_type2(state)?;
    check_taus(taus)?;
    let c = correlator(state, 0)?;
    let envelope: Vec<f64> = taus.par_iter().map(|&t| c.half_sum(t).norm()).collect();
    let best = (0..taus.len()).max_by(|&a, &b| envelope[a].total_cmp(&envelope[b])).unwrap_or(0);
    let step = if taus.len() > 1 { (taus[taus.len() - 1] - taus[0]) / (taus.len() - 1) as f64 } else { 0.0 };
    let carrier = c.carrier().abs();
    let period = if carrier > 0.0 { 2.0 * PI / carrier } else { step };
    let reach = period.max(step);
    let fine_points = 801;
    let fine: Vec<f64> =
        (0..fine_points).map(|k| taus[best] - reach + 2.0 * reach * k as f64 / (fine_points - 1) as f64).collect();
    let values: Vec<f64> = fine.par_iter().map(|&t| c.r1(t)).collect();
    let k = (0..fine.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let lo = fine[k.saturating_sub(1)];
    let hi = fine[(k + 1).min(fine.len() - 1)];
    let tau = golden_max(|t| c.r1(t), lo, hi, 80);
    let tau = if c.r1(tau) >= values[k] { tau } else { fine[k] };
    Ok((tau, visibility_from_correlation(c.r0, c.r1(tau))?))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// FWHM of |Φ|² on the upper half of the grid, in rad/s: span between the
/// outermost half-maximum samples.
pub fn spectral_fwhm(phi: &SpectralFunction) -> Result<f64> {
    let grid = &phi.grid;
    let half = 0.5 * grid.omega_p;
    let upper: Vec<(f64, f64)> =
        (0..grid.len()).filter(|&k| grid.omega[k] > half).map(|k| (grid.omega[k], phi.values[k].norm_sqr())).collect();
    let peak = upper.iter().map(|p| p.1).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let above: Vec<usize> = (0..upper.len()).filter(|&k| upper[k].1 >= 0.5 * peak).collect();
    let (first, last) = (above[0], above[above.len() - 1]);
    let mut width = upper[last].0 - upper[first].0;
    if width == 0.0 {
        // A single sample above half maximum: use the local spacing.
        let prev = upper[first.saturating_sub(1)].0;
        let next = upper[(first + 1).min(upper.len() - 1)].0;
        width = 0.5 * (next - prev);
    }
    Ok(width)
}

/// Default delay grid: centred on the support of the fringe envelope and at
/// least ±20/FWHM wide, with `points` samples.
pub fn default_tau_window(state: &TwoPhotonState, points: usize) -> Result<Vec<f64>> {
    let c = correlator(state, 0)?;
    let fwhm = spectral_fwhm(&state.channels[0])?;
    let min_half = TAU_WINDOW_WIDTHS / fwhm;
    let (support_lo, support_hi) = envelope_support(&c);
    let centre = 0.5 * (support_lo + support_hi);
    let half = min_half.max(0.6 * (support_hi - support_lo));
    let points = points.max(2);
    Ok((0..points).map(|k| centre - half + 2.0 * half * k as f64 / (points - 1) as f64).collect())
}

/// Delay range where |E(τ)| exceeds 1e-3 of its maximum, scanned over the
/// alias-free span ±π/δν of the grid.
fn envelope_support(c: &Correlator) -> (f64, f64) {
    let mut nus: Vec<f64> = c.terms.iter().map(|t| t.1).collect();
    nus.sort_by(f64::total_cmp);
    let span = nus[nus.len() - 1] - nus[0];
    let spacing = nus.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if !(span > 0.0 && spacing > 0.0) {
        return (0.0, 0.0);
    }
    let reach = PI / spacing;
    let n = (8.0 * reach * span / (2.0 * PI)).ceil().clamp(64.0, 40_000.0) as usize;
    let taus: Vec<f64> = (0..=n).map(|k| -reach + 2.0 * reach * k as f64 / n as f64).collect();
    let env: Vec<f64> = taus.par_iter().map(|&t| c.half_sum(t).norm()).collect();
    let peak = env.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return (0.0, 0.0);
    }
    let inside: Vec<usize> = (0..env.len()).filter(|&k| env[k] >= 1e-3 * peak).collect();
    (taus[inside[0]], taus[inside[inside.len() - 1]])
}

/// Centroid of the dip depth |R/R₀ − baseline| over the delay window.
pub fn dip_centre(interferogram: &Interferogram) -> f64 {
    let baseline = match interferogram.kind {
        InterferogramKind::Hom => 0.5,
        InterferogramKind::Polarization { theta1_deg } => {
            0.25 * (1.0 - 0.5 * (2.0 * theta1_deg.to_radians()).sin().powi(2))
        }
    };
    let (num, den) = interferogram
        .tau
        .iter()
        .zip(&interferogram.rate)
        .fold((0.0, 0.0), |(n, d), (&t, &r)| (n + t * (r - baseline).abs(), d + (r - baseline).abs()));
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Largest relative change of the HOM rate when every channel is recomputed
/// on a grid with twice the density.
pub fn grid_self_check(state: &TwoPhotonState, taus: &[f64]) -> Result<f64> {
    let coarse = hom_coincidence(state, taus)?;
    let grid = std::sync::Arc::new(state.grid().refined(2)?);
    let channels = state
        .channels
        .iter()
        .map(|c| SpectralFunction::compute(&c.process, &c.poling, grid.clone(), Method::ClosedForm))
        .collect::<Result<Vec<_>>>()?;
    let fine = hom_coincidence(&TwoPhotonState::new(channels)?, taus)?;
    Ok(coarse.rate.iter().zip(&fine.rate).map(|(a, b)| ((a - b) / b.abs().max(1e-300)).abs()).fold(0.0, f64::max))
}

/// Channel pair and grid for one process on auto bands.
pub fn build_state(
    process: &ProcessSpec,
    poling: &PolingProfile,
    lambda_limits_um: (f64, f64),
    points: usize,
    method: Method,
) -> Result<TwoPhotonState> {
    let swapped = process.swapped();
    let mut bands = auto_bands(process, poling, lambda_limits_um)?;
    bands.extend(auto_bands(&swapped, poling, lambda_limits_um)?);
    let grid = std::sync::Arc::new(FrequencyGrid::symmetric(process.omega_p(), &bands, points)?);
    let mut channels = vec![SpectralFunction::compute(process, poling, grid.clone(), method)?];
    if swapped != *process {
        channels.push(SpectralFunction::compute(&swapped, poling, grid, method)?);
    }
    TwoPhotonState::new(channels)
}

/// Peak polarization visibility for each device length.
pub fn visibility_vs_length(
    process: &ProcessSpec,
    poling: &PolingProfile,
    lengths_um: &[f64],
    lambda_limits_um: (f64, f64),
    grid_points: usize,
) -> Result<VisibilityCurve> {
    if lengths_um.is_empty() {
        return Err(Error::Invalid("no device lengths given".into()));
    }
    let mut visibility = Vec::with_capacity(lengths_um.len());
    for &length in lengths_um {
        let p = poling.with_length(length);
        p.validate()?;
        let state = build_state(process, &p, lambda_limits_um, grid_points, Method::ClosedForm)?;
        let taus = default_tau_window(&state, DEFAULT_TAU_POINTS)?;
        visibility.push(peak_polarization_visibility(&state, &taus)?.1);
    }
    Ok(VisibilityCurve { parameter: lengths_um.to_vec(), visibility })
}

/// Device length at which the phase of Φ(ω)Φ*(ω_p − ω) reaches π:
/// |2π/(Δβ̃_a − Δβ̃_b)| for uniform poling and
/// |4π²(Λ₀⁻¹ − Λ_L⁻¹)/(Δβ̃_a² − Δβ̃_b²)| for chirped poling, with a and b
/// the swapped channels at ω_s.
pub fn entanglement_length(
    a: &ProcessSpec,
    b: &ProcessSpec,
    poling: &PolingProfile,
    omega_s: f64,
) -> Result<EntanglementLength> {
    let da = poling.effective_mismatch(a.modes_at(omega_s)?.delta_beta());
    let db = poling.effective_mismatch(b.modes_at(omega_s)?.delta_beta());
    let (num, den) = match poling.variant {
        PolingVariant::Uniform { .. } => (2.0 * PI, da - db),
        PolingVariant::Chirped { period0_um, period_l_um } => {
            chirp_rate(poling)?;
            (4.0 * PI * PI * (1.0 / period0_um - 1.0 / period_l_um), da * da - db * db)
        }
    };
    Ok(entanglement_length_from(num, den))
}

/// |num/den| with the infinite sentinel for |den| below the floor.
pub fn entanglement_length_from(num: f64, den: f64) -> EntanglementLength {
    if den.abs() < LE_DENOMINATOR_FLOOR {
        EntanglementLength::Infinite
    } else {
        EntanglementLength::Finite((num / den).abs())
    }
}

/// Relative |Φ|² level that delimits the band for the band-wide entanglement
/// length.
pub const LE_BAND_LEVEL: f64 = 0.1;

/// Entanglement length at every upper-half node where |Φ|² exceeds
/// `level` times the peak, as (ω_s, L_e).
pub fn entanglement_length_profile(phi: &SpectralFunction, level: f64) -> Result<Vec<(f64, EntanglementLength)>> {
    let grid = &phi.grid;
    let half = 0.5 * grid.omega_p;
    let peak = phi.peak().powi(2);
    if !(peak > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let partner = phi.process.swapped();
    (0..grid.len())
        .filter(|&k| grid.omega[k] > half && phi.values[k].norm_sqr() > level * peak)
        .map(|k| Ok((grid.omega[k], entanglement_length(&phi.process, &partner, &phi.poling, grid.omega[k])?)))
        .collect()
}

/// Shortest entanglement length over the emission band, with the signal
/// frequency where it occurs.
pub fn band_entanglement_length(phi: &SpectralFunction, level: f64) -> Result<(f64, EntanglementLength)> {
    entanglement_length_profile(phi, level)?
        .into_iter()
        .min_by(|a, b| a.1.value_um().total_cmp(&b.1.value_um()))
        .ok_or(Error::EmptySpectrum)
}

/// |Φ|²-weighted centroid of the upper half of a channel, in rad/s.
pub fn spectral_centroid(phi: &SpectralFunction) -> Result<f64> {
    let grid = &phi.grid;
    let half = 0.5 * grid.omega_p;
    let (num, den) = (0..grid.len()).filter(|&k| grid.omega[k] > half).fold((0.0, 0.0), |(n, d), k| {
        let w = grid.weights[k] * phi.values[k].norm_sqr();
        (n + w * grid.omega[k], d + w)
    });
    if !(den > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_formula_cases() {
        assert_eq!(visibility_from_correlation(2.0, 2.0).unwrap(), 1.0);
        assert!((visibility_from_correlation(2.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(visibility_from_correlation(2.0, -2.0).unwrap(), 0.0);
        assert!(visibility_from_correlation(1.0, 3.0).is_err());
    }

    #[test]
    fn sentinel() {
        assert!(entanglement_length_from(2.0 * PI, 0.0).is_infinite());
        assert!(entanglement_length_from(2.0 * PI, 1e-16).is_infinite());
        assert_eq!(entanglement_length_from(2.0 * PI, -PI).value_um(), 2.0);
    }
}
