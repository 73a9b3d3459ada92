//! Phase mismatch, poling-period curves and inverse design.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::materials::{effective_nonlinearity, InteractionClass, PolarizationAxis};
use crate::numerics::find_root_bracketed;
use crate::units::{lambda_from_omega, omega_from_lambda};
use crate::waveguide::{GuidedMode, ModeIndex, Waveguide};
use crate::{Error, Result};

/// Polarization configuration, written as (above-degenerate,
/// below-degenerate, pump).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interaction {
    #[serde(rename = "type0")]
    Type0,
    #[serde(rename = "type2-oeo")]
    TypeIIOeo,
    #[serde(rename = "type2-eoo")]
    TypeIIEoo,
}

impl Interaction {
    pub fn polarizations(self) -> [PolarizationAxis; 3] {
        use PolarizationAxis::{E, O};
        match self {
            Interaction::Type0 => [E, E, E],
            Interaction::TypeIIOeo => [O, E, O],
            Interaction::TypeIIEoo => [E, O, O],
        }
    }

    pub fn class(self) -> InteractionClass {
        match self {
            Interaction::Type0 => InteractionClass::Type0,
            _ => InteractionClass::TypeII,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Interaction::Type0 => "(e,e,e)",
            Interaction::TypeIIOeo => "(o,e,o)",
            Interaction::TypeIIEoo => "(e,o,o)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub lambda_um: f64,
    pub mode: ModeIndex,
}

/// One down-conversion channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub waveguide: Waveguide,
    pub interaction: Interaction,
    pub pump: PumpSpec,
    pub signal_mode: ModeIndex,
    pub idler_mode: ModeIndex,
}

/// Signal and idler angular frequencies with ω_s + ω_i = ω_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPair {
    pub omega_s: f64,
    pub omega_i: f64,
}

/// Solved pump, signal and idler modes at one signal frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTriple {
    pub pump: GuidedMode,
    pub signal: GuidedMode,
    pub idler: GuidedMode,
}

impl ModeTriple {
    /// Δβ = β_p − (β_s + β_i); the sum is symmetric so relabeling signal
    /// and idler is exact.
    pub fn delta_beta(&self) -> f64 {
        self.pump.beta() - (self.signal.beta() + self.idler.beta())
    }
}

impl ProcessSpec {
    pub fn omega_p(&self) -> f64 {
        omega_from_lambda(self.pump.lambda_um)
    }

    pub fn omega_degenerate(&self) -> f64 {
        0.5 * self.omega_p()
    }

    pub fn pump_polarization(&self) -> PolarizationAxis {
        self.interaction.polarizations()[2]
    }

    /// Signal and idler polarizations at ω_s: the photon above degeneracy
    /// takes the first label of the triple.
    pub fn polarizations_at(&self, omega_s: f64) -> (PolarizationAxis, PolarizationAxis) {
        let [above, below, _] = self.interaction.polarizations();
        if omega_s >= self.omega_degenerate() {
            (above, below)
        } else {
            (below, above)
        }
    }

    /// Same process with signal and idler mode assignments exchanged.
    pub fn swapped(&self) -> Self {
        Self { signal_mode: self.idler_mode, idler_mode: self.signal_mode, ..self.clone() }
    }

    pub fn with_waveguide(&self, waveguide: Waveguide) -> Self {
        Self { waveguide, ..self.clone() }
    }

    /// Signal and idler share polarization on both sides of degeneracy.
    pub fn is_type0(&self) -> bool {
        self.interaction == Interaction::Type0
    }

    pub fn pair(&self, omega_s: f64) -> FrequencyPair {
        FrequencyPair { omega_s, omega_i: self.omega_p() - omega_s }
    }

    pub fn d_eff(&self) -> Result<f64> {
        effective_nonlinearity(self.waveguide.material(), self.interaction.class())
    }

    pub fn modes_at(&self, omega_s: f64) -> Result<ModeTriple> {
        let omega_p = self.omega_p();
        if !(omega_s > 0.0 && omega_s < omega_p) {
            return Err(Error::Domain(format!("signal frequency {omega_s} outside (0, ω_p)")));
        }
        let omega_i = omega_p - omega_s;
        let (pol_s, pol_i) = self.polarizations_at(omega_s);
        let pump = self.waveguide.solve(self.pump.mode, self.pump_polarization(), self.pump.lambda_um)?;
        let signal = self.waveguide.solve(self.signal_mode, pol_s, lambda_from_omega(omega_s))?;
        let idler = self.waveguide.solve(self.idler_mode, pol_i, lambda_from_omega(omega_i))?;
        Ok(ModeTriple { pump, signal, idler })
    }

    pub fn validate(&self) -> Result<()> {
        let planar = matches!(self.waveguide, Waveguide::Planar(_));
        for idx in [self.pump.mode, self.signal_mode, self.idler_mode] {
            if planar != matches!(idx, ModeIndex::Planar { .. }) {
                return Err(Error::Invalid(format!("mode index {idx} does not fit the waveguide kind")));
            }
            if let ModeIndex::Fiber { m: 0, .. } = idx {
                return Err(Error::Invalid("fiber radial index m starts at 1".into()));
            }
        }
        if !(self.pump.lambda_um > 0.0 && self.pump.lambda_um.is_finite()) {
            return Err(Error::Invalid("pump wavelength must be positive".into()));
        }
        self.d_eff()?;
        Ok(())
    }
}

/// Δβ = β_p − β_s − β_i in rad/µm.
pub fn phase_mismatch(process: &ProcessSpec, omega_s: f64) -> Result<f64> {
    Ok(process.modes_at(omega_s)?.delta_beta())
}

/// Λ₀ = 2π/Δβ in µm.
pub fn required_period(process: &ProcessSpec, omega_s: f64) -> Result<f64> {
    period_from_mismatch(phase_mismatch(process, omega_s)?)
}

pub fn period_from_mismatch(delta_beta: f64) -> Result<f64> {
    if !(delta_beta > 0.0) {
        return Err(Error::NonPositiveMismatch { delta_beta });
    }
    Ok(2.0 * PI / delta_beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum PolingVariant {
    Uniform { period_um: f64 },
    Chirped { period0_um: f64, period_l_um: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolingProfile {
    pub variant: PolingVariant,
    pub length_um: f64,
    pub kappa: u32,
    /// |d_eff| in pm/V.
    pub d_eff: f64,
}

impl PolingProfile {
    pub fn uniform(period_um: f64, length_um: f64, d_eff: f64) -> Self {
        Self { variant: PolingVariant::Uniform { period_um }, length_um, kappa: 1, d_eff }
    }

    pub fn chirped(period0_um: f64, period_l_um: f64, length_um: f64, d_eff: f64) -> Self {
        Self { variant: PolingVariant::Chirped { period0_um, period_l_um }, length_um, kappa: 1, d_eff }
    }

    /// Poling period at x = 0.
    pub fn period0_um(&self) -> f64 {
        match self.variant {
            PolingVariant::Uniform { period_um } => period_um,
            PolingVariant::Chirped { period0_um, .. } => period0_um,
        }
    }

    pub fn with_length(&self, length_um: f64) -> Self {
        Self { length_um, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa != 1 {
            return Err(Error::Invalid(format!("kappa must be 1, got {}", self.kappa)));
        }
        if !(self.length_um > 0.0 && self.length_um.is_finite()) {
            return Err(Error::Invalid("poling length must be positive".into()));
        }
        if !(self.d_eff > 0.0) {
            return Err(Error::Invalid("d_eff must be positive".into()));
        }
        let ok = match self.variant {
            PolingVariant::Uniform { period_um } => period_um > 0.0 && period_um.is_finite(),
            PolingVariant::Chirped { period0_um, period_l_um } => {
                period0_um > 0.0 && period_l_um > 0.0 && period0_um.is_finite() && period_l_um.is_finite()
            }
        };
        if !ok {
            return Err(Error::Invalid("poling periods must be positive".into()));
        }
        Ok(())
    }

    /// Δβ̃ = Δβ − 2πκ/Λ₀.
    pub fn effective_mismatch(&self, delta_beta: f64) -> f64 {
        delta_beta - 2.0 * PI * self.kappa as f64 / self.period0_um()
    }
}

/// Δβ and Δβ̃ at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMismatch {
    pub delta_beta: f64,
    pub delta_beta_eff: f64,
}

impl PhaseMismatch {
    pub fn new(delta_beta: f64, poling: &PolingProfile) -> Self {
        Self { delta_beta, delta_beta_eff: poling.effective_mismatch(delta_beta) }
    }
}

/// ζ = 2π(1/Λ₀ − 1/Λ_L)/L in rad/µm².
pub fn chirp_rate(poling: &PolingProfile) -> Result<f64> {
    match poling.variant {
        PolingVariant::Uniform { .. } => Err(Error::UniformDegenerate("uniform poling has no chirp".into())),
        PolingVariant::Chirped { period0_um, period_l_um } => {
            let zeta = 2.0 * PI * (1.0 / period0_um - 1.0 / period_l_um) / poling.length_um;
            if zeta == 0.0 {
                Err(Error::UniformDegenerate(format!("Λ_L = Λ₀ = {period0_um} µm")))
            } else {
                Ok(zeta)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intersection {
    pub lambda_s_um: f64,
    pub period_um: f64,
}

/// Default number of samples along λ_s for curve searches.
pub const DEFAULT_CURVE_POINTS: usize = 2000;

/// Required-period curve of `process` sampled at the given wavelengths;
/// NaN where a mode is cut off or Δβ ≤ 0.
pub fn period_curve(process: &ProcessSpec, lambdas_um: &[f64]) -> Vec<f64> {
    lambdas_um.par_iter().map(|&l| required_period(process, omega_from_lambda(l)).unwrap_or(f64::NAN)).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn check_range(range: (f64, f64), points: usize) -> Result<()> {
    if !(range.0 > 0.0 && range.1 > range.0 && range.1.is_finite()) {
        return Err(Error::Invalid(format!("bad wavelength range [{}, {}]", range.0, range.1)));
    }
    if points < 3 {
        return Err(Error::Invalid("at least 3 grid points are required".into()));
    }
    Ok(())
}

/// Nondegenerate crossings of the required-period curves of two processes.
pub fn find_intersection(
    proc_a: &ProcessSpec,
    proc_b: &ProcessSpec,
    lambda_s_range: (f64, f64),
    points: usize,
) -> Result<Intersection> {
    if proc_a == proc_b {
        return Err(Error::IdenticalProcesses);
    }
    let found = find_all_intersections(proc_a, proc_b, lambda_s_range, points)?;
    match found.len() {
        0 => Err(Error::NoIntersection { lo: lambda_s_range.0, hi: lambda_s_range.1 }),
        1 => Ok(found[0]),
        _ => Err(Error::MultipleIntersections(found)),
    }
}

/// All nondegenerate crossings, sorted by wavelength.
pub fn find_all_intersections(
    proc_a: &ProcessSpec,
    proc_b: &ProcessSpec,
    lambda_s_range: (f64, f64),
    points: usize,
) -> Result<Vec<Intersection>> {
    check_range(lambda_s_range, points)?;
    let lambdas = linspace(lambda_s_range.0, lambda_s_range.1, points);
    let curve_a = period_curve(proc_a, &lambdas);
    let curve_b = period_curve(proc_b, &lambdas);
    let degenerate = 2.0 * proc_a.pump.lambda_um;
    let gap = |l: f64| -> f64 {
        let w = omega_from_lambda(l);
        match (required_period(proc_a, w), required_period(proc_b, w)) {
            (Ok(a), Ok(b)) => a - b,
            _ => f64::NAN,
        }
    };

    let mut out = Vec::new();
    for i in 0..points - 1 {
        let (l0, l1) = (lambdas[i], lambdas[i + 1]);
        if l0 <= degenerate && degenerate <= l1 {
            continue;
        }
        let d0 = curve_a[i] - curve_b[i];
        let d1 = curve_a[i + 1] - curve_b[i + 1];
        if !(d0.is_finite() && d1.is_finite()) {
            continue;
        }
        let root = if d0 == 0.0 {
            l0
        } else if d1 == 0.0 {
            // Picked up as the left end of the next cell.
            continue;
        } else if d0.signum() != d1.signum() {
            find_root_bracketed(gap, l0, l1, 1e-14)?
        } else {
            continue;
        };
        let w = omega_from_lambda(root);
        let pa = required_period(proc_a, w)?;
        let pb = required_period(proc_b, w)?;
        if ((pa - pb) / pa).abs() >= 1e-8 {
            continue;
        }
        out.push(Intersection { lambda_s_um: root, period_um: 0.5 * (pa + pb) });
    }
    Ok(out)
}

/// Result of a tangency search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tangency {
    /// Slab thickness h or fiber radius a, in µm.
    pub geom_value: f64,
    /// Wavelength band (µm) where the relative curve gap stays below the
    /// threshold.
    pub band: (f64, f64),
    /// Largest relative gap inside the band.
    pub max_gap: f64,
    /// Signal wavelength where the curves touch.
    pub touch_lambda_um: f64,
}

/// Relative-gap threshold defining coincidence of the two curves.
pub const TANGENCY_THRESHOLD: f64 = 1e-3;
/// Wavelength samples per geometry evaluation.
pub const TANGENCY_GRID_POINTS: usize = 500;
const GEOMETRY_SCAN_POINTS: usize = 41;

struct GapProbe {
    /// Signed extremal gap; crosses zero at tangency.
    value: f64,
    /// Wavelength of that extremum.
    lambda_um: f64,
}

/// Relative gap (Λ_A − Λ_B)/Λ_A at one wavelength.
fn relative_gap(a: &ProcessSpec, b: &ProcessSpec, lambda_um: f64) -> f64 {
    let w = omega_from_lambda(lambda_um);
    match (required_period(a, w), required_period(b, w)) {
        (Ok(pa), Ok(pb)) => (pa - pb) / pa,
        _ => f64::NAN,
    }
}

/// For symmetric (Type-0) pairs the gap is odd about degeneracy, so the
/// quantity that touches zero is its slope there. Otherwise it is the
/// local extremum of the gap closest to zero.
fn probe_gap(a: &ProcessSpec, b: &ProcessSpec, lambdas: &[f64]) -> Option<GapProbe> {
    if a.is_type0() {
        let omega_deg = a.omega_degenerate();
        let offset = 1e-3;
        let lambda = lambda_from_omega(omega_deg * (1.0 + offset));
        let g = relative_gap(a, b, lambda);
        return g.is_finite().then_some(GapProbe { value: g / offset, lambda_um: 2.0 * a.pump.lambda_um });
    }
    let gaps: Vec<f64> = lambdas.par_iter().map(|&l| relative_gap(a, b, l)).collect();
    let degenerate = 2.0 * a.pump.lambda_um;
    let mut best: Option<(usize, f64)> = None;
    for i in 1..lambdas.len() - 1 {
        let (g0, g1, g2) = (gaps[i - 1], gaps[i], gaps[i + 1]);
        if !(g0.is_finite() && g1.is_finite() && g2.is_finite()) {
            continue;
        }
        if lambdas[i - 1] <= degenerate && degenerate <= lambdas[i + 1] {
            continue;
        }
        let extremum = (g1 - g0) * (g2 - g1) <= 0.0;
        if extremum && best.is_none_or(|(_, v)| g1.abs() < v.abs()) {
            best = Some((i, g1));
        }
    }
    let (i, _) = best?;
    // Refine the extremum by golden-section search on the signed gap.
    let sign = if gaps[i] > gaps[i - 1] { -1.0 } else { 1.0 };
    let f = |l: f64| sign * relative_gap(a, b, l);
    let (mut lo, mut hi) = (lambdas[i - 1], lambdas[i + 1]);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let lambda = 0.5 * (lo + hi);
    let value = relative_gap(a, b, lambda);
    value.is_finite().then_some(GapProbe { value, lambda_um: lambda })
}

/// Geometry (h or a) at which the curves of `template` and its
/// signal/idler-swapped partner become tangent.
pub fn find_tangency_geometry(
    template: &ProcessSpec,
    geom_param_range: (f64, f64),
    lambda_s_range: (f64, f64),
) -> Result<Tangency> {
    check_range(lambda_s_range, TANGENCY_GRID_POINTS)?;
    let (g_lo, g_hi) = geom_param_range;
    if !(g_lo > 0.0 && g_hi > g_lo && g_hi.is_finite()) {
        return Err(Error::Invalid(format!("bad geometry range [{g_lo}, {g_hi}]")));
    }
    let lambdas = linspace(lambda_s_range.0, lambda_s_range.1, TANGENCY_GRID_POINTS);
    let pair_at = |g: f64| -> Result<(ProcessSpec, ProcessSpec)> {
        let a = template.with_waveguide(template.waveguide.with_size(g)?);
        let b = a.swapped();
        Ok((a, b))
    };
    let energy = |g: f64| -> f64 {
        match pair_at(g) {
            Ok((a, b)) => probe_gap(&a, &b, &lambdas).map(|p| p.value).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };

    let scan = linspace(g_lo, g_hi, GEOMETRY_SCAN_POINTS);
    let values: Vec<f64> = scan.iter().map(|&g| energy(g)).collect();
    let mut candidates = Vec::new();
    for i in 0..scan.len() - 1 {
        let (e0, e1) = (values[i], values[i + 1]);
        if !(e0.is_finite() && e1.is_finite()) || e0.signum() == e1.signum() {
            continue;
        }
        let Ok(g) = find_root_bracketed(energy, scan[i], scan[i + 1], 1e-9) else {
            continue;
        };
        let (a, b) = pair_at(g)?;
        let Some(probe) = probe_gap(&a, &b, &lambdas) else {
            continue;
        };
        let scale = if a.is_type0() { 1e-6 } else { TANGENCY_THRESHOLD };
        if probe.value.abs() < scale {
            candidates.push((g, probe, a, b));
        }
    }
    let (g, probe, a, b) = candidates
        .into_iter()
        .min_by(|x, y| x.1.value.abs().total_cmp(&y.1.value.abs()))
        .ok_or(Error::NoTangency { lo: g_lo, hi: g_hi })?;

    let gaps: Vec<f64> = lambdas.par_iter().map(|&l| relative_gap(&a, &b, l)).collect();
    let centre = lambdas
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - probe.lambda_um).abs().total_cmp(&(y.1 - probe.lambda_um).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let inside = |i: usize| gaps[i].is_finite() && gaps[i].abs() < TANGENCY_THRESHOLD;
    if !inside(centre) {
        return Err(Error::NoTangency { lo: g_lo, hi: g_hi });
    }
    let (mut lo, mut hi) = (centre, centre);
    while lo > 0 && inside(lo - 1) {
        lo -= 1;
    }
    while hi + 1 < lambdas.len() && inside(hi + 1) {
        hi += 1;
    }
    let max_gap = gaps[lo..=hi].iter().fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(Tangency { geom_value: g, band: (lambdas[lo], lambdas[hi]), max_gap, touch_lambda_um: probe.lambda_um })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_definition() {
        assert!((period_from_mismatch(2.0 * PI).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(period_from_mismatch(0.0), Err(Error::NonPositiveMismatch { .. })));
        assert!(matches!(period_from_mismatch(-1.0), Err(Error::NonPositiveMismatch { .. })));
    }

    #[test]
    fn chirp_rate_cases() {
        let p = PolingProfile::chirped(6.87, 6.95, 25_000.0, 16.9);
        let want = 2.0 * PI * (1.0 / 6.87 - 1.0 / 6.95) / 25_000.0;
        assert_eq!(chirp_rate(&p).unwrap(), want);
        assert!(want > 0.0);
        let flat = PolingProfile::chirped(7.0, 7.0, 25_000.0, 16.9);
        assert!(matches!(chirp_rate(&flat), Err(Error::UniformDegenerate(_))));
        assert!(matches!(chirp_rate(&PolingProfile::uniform(7.0, 1.0, 1.0)), Err(Error::UniformDegenerate(_))));
        assert!(chirp_rate(&PolingProfile::chirped(7.0, 6.0, 1.0, 1.0)).unwrap() < 0.0);
    }
}
