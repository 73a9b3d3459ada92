//! Task runners: compose the physics modules and collect output tables.

use std::sync::Arc;

use spdc_core::biphoton::{auto_bands, mirror_symmetry_check, FrequencyGrid, Method, SpectralFunction, TwoPhotonState};
use spdc_core::interferometry::{
    band_entanglement_length, default_tau_window, dip_centre, entanglement_length_profile, grid_self_check,
    hom_coincidence, hom_visibility, peak_polarization_visibility, polarization_coincidence, spectral_fwhm,
    visibility_from_correlation, visibility_vs_length, DEFAULT_TAU_POINTS, LE_BAND_LEVEL,
};
use spdc_core::qpm::{
    find_intersection, find_tangency_geometry, period_curve, Intersection, PolingProfile, ProcessSpec,
    DEFAULT_CURVE_POINTS, TANGENCY_GRID_POINTS,
};
use spdc_core::units::{lambda_from_omega, omega_from_lambda, FS, MM};

use crate::error::{invalid, CliError, CliResult};
use crate::output::{Report, Table, Value};
use crate::scenario::{PeriodValue, Scenario, Task};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_THETA1_DEG: f64 = 45.0;
/// Relative |Φ|² level every channel must exceed inside the common band.
pub const COMMON_BAND_LEVEL: f64 = 0.1;
/// Half-width (µm) of the neighbourhood of degeneracy left out of the
/// common-band count.
pub const DEGENERACY_EXCLUSION_UM: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub task: Option<Task>,
    pub grid_points: Option<usize>,
    pub tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { task: None, grid_points: None, tolerance: DEFAULT_TOLERANCE }
    }
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    task: Task,
    points: usize,
    tolerance: f64,
    checks: Table,
}

impl Ctx<'_> {
    fn check(&mut self, name: &str, value: f64) {
        let passed = value <= self.tolerance;
        self.checks.push(vec![name.into(), value.into(), self.tolerance.into(), passed.into()]);
    }

    fn first_failure(&self) -> Option<String> {
        self.checks
            .rows
            .iter()
            .find(|r| r[3] == Value::from(false))
            .map(|r| format!("{} = {} exceeds tolerance {}", r[0].render(), r[1].render(), r[2].render()))
    }
}

/// Validates the options against the scenario, then runs the task.
pub fn run(scenario: &Scenario, options: &RunOptions) -> CliResult<Report> {
    if !(options.tolerance > 0.0 && options.tolerance.is_finite()) {
        return Err(invalid(format!("tolerance must be positive, got {}", options.tolerance)));
    }
    if options.grid_points.is_some_and(|n| n < 16) {
        return Err(invalid("grid points must be at least 16"));
    }
    let task = options.task.unwrap_or(scenario.raw.task);
    scenario.check_task(task)?;

    let mut ctx = Ctx {
        scenario,
        task,
        points: options.grid_points.unwrap_or(scenario.raw.grid.points),
        tolerance: options.tolerance,
        checks: Table::new("checks", &["check", "value", "bound", "passed"]),
    };
    let mut resolved = scenario.raw.clone();
    resolved.task = task;
    resolved.grid.points = ctx.points;

    let poling = resolve_poling(scenario)?;
    if let (Some(profile), Some(raw)) = (poling, resolved.poling.as_mut()) {
        raw.period0_um = PeriodValue::Value(profile.period0_um());
    }

    let mut tables = match task {
        Task::Design => design(&mut ctx)?,
        Task::Tangency => tangency(&mut ctx)?,
        Task::Spectrum | Task::DoublyEntangled | Task::Hom | Task::Polarization | Task::EntanglementLength => {
            let profile = poling.ok_or_else(|| invalid("missing [poling]"))?;
            spectral_tasks(&mut ctx, &profile)?
        }
        Task::VisibilityVsLength => {
            let profile = poling.ok_or_else(|| invalid("missing [poling]"))?;
            length_sweep(&mut ctx, &profile)?
        }
    };
    if let Some(msg) = ctx.first_failure() {
        return Err(CliError::Check(msg));
    }
    tables.push(ctx.checks);
    Ok(Report { scenario: resolved, tables })
}

/// Poling profile with a design period resolved through the intersection.
pub fn resolve_poling(scenario: &Scenario) -> CliResult<Option<PolingProfile>> {
    Ok(match scenario.poling {
        Some(p) if p.from_design => {
            let x = design_intersection(scenario)?;
            Some(PolingProfile::uniform(x.period_um, p.profile.length_um, p.profile.d_eff))
        }
        Some(p) => Some(p.profile),
        None => None,
    })
}

fn curve_points(s: &Scenario) -> usize {
    s.raw.design.as_ref().and_then(|d| d.curve_points).unwrap_or(DEFAULT_CURVE_POINTS)
}

fn design_intersection(s: &Scenario) -> CliResult<Intersection> {
    let range = s.design_range().ok_or_else(|| invalid("missing [design] section"))?;
    let a = &s.channels[0];
    Ok(find_intersection(a, &a.swapped(), range, curve_points(s))?)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn max_residual(process: &ProcessSpec, omega_s: f64) -> CliResult<f64> {
    let m = process.modes_at(omega_s)?;
    Ok(m.pump.residual().max(m.signal.residual()).max(m.idler.residual()))
}

fn curves_table(process: &ProcessSpec, lambdas: &[f64]) -> Table {
    let a = period_curve(process, lambdas);
    let b = period_curve(&process.swapped(), lambdas);
    let mut t = Table::new("period-curves", &["lambda_s_um", "period_condition1_um", "period_condition2_um"]);
    for ((&l, &pa), &pb) in lambdas.iter().zip(&a).zip(&b) {
        t.push(vec![l.into(), pa.into(), pb.into()]);
    }
    t
}

fn design(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let s = ctx.scenario;
    let (lo, hi) = s.design_range().ok_or_else(|| invalid("missing [design] section"))?;
    let a = &s.channels[0];
    let x = design_intersection(s)?;
    let w = omega_from_lambda(x.lambda_s_um);
    let residual = max_residual(a, w)?.max(max_residual(&a.swapped(), w)?);
    ctx.check("mode_residual_at_intersection", residual);

    let mut summary = Table::new("design", &["lambda_s_um", "lambda_i_um", "period0_um", "max_mode_residual"]);
    let lambda_i = lambda_from_omega(a.omega_p() - w);
    summary.push(vec![x.lambda_s_um.into(), lambda_i.into(), x.period_um.into(), residual.into()]);
    Ok(vec![curves_table(a, &linspace(lo, hi, curve_points(s))), summary])
}

fn tangency(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let s = ctx.scenario;
    let t = s.raw.tangency.as_ref().ok_or_else(|| invalid("missing [tangency] section"))?;
    let geometry = (t.geometry_range_um[0], t.geometry_range_um[1]);
    let lambdas = (t.lambda_range_um[0], t.lambda_range_um[1]);
    let found = find_tangency_geometry(&s.channels[0], geometry, lambdas)?;

    let waveguide = s.waveguide.with_size(found.geom_value)?;
    let process = s.channels[0].with_waveguide(waveguide);
    let w = omega_from_lambda(found.touch_lambda_um);
    let residual = max_residual(&process, w)?.max(max_residual(&process.swapped(), w)?);
    ctx.check("mode_residual_at_tangency", residual);

    let mut summary = Table::new(
        "tangency",
        &["geometry_um", "band_lo_um", "band_hi_um", "max_relative_gap", "touch_lambda_um", "max_mode_residual"],
    );
    summary.push(vec![
        found.geom_value.into(),
        found.band.0.into(),
        found.band.1.into(),
        found.max_gap.into(),
        found.touch_lambda_um.into(),
        residual.into(),
    ]);
    let curves = curves_table(&process, &linspace(lambdas.0, lambdas.1, TANGENCY_GRID_POINTS));
    Ok(vec![curves, summary])
}

/// Channels used by a spectral task, each followed by its swapped partner
/// when that is not already listed.
fn task_channels(s: &Scenario, task: Task) -> Vec<ProcessSpec> {
    let listed: &[ProcessSpec] = match task {
        Task::Hom | Task::Polarization | Task::EntanglementLength => &s.channels[..1],
        _ => &s.channels,
    };
    let mut out: Vec<ProcessSpec> = Vec::new();
    for c in listed {
        for p in [c.clone(), c.swapped()] {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Channels of `task` (with swapped partners) on a shared symmetric grid of
/// about `points` nodes.
pub fn scenario_state(
    scenario: &Scenario,
    profile: &PolingProfile,
    task: Task,
    points: usize,
) -> CliResult<TwoPhotonState> {
    let channels = task_channels(scenario, task);
    let limits = scenario.lambda_limits();
    let mut bands = Vec::new();
    for c in &channels {
        bands.extend(auto_bands(c, profile, limits)?);
    }
    let grid = Arc::new(FrequencyGrid::symmetric(channels[0].omega_p(), &bands, points)?);
    let spectra = channels
        .iter()
        .map(|c| SpectralFunction::compute(c, profile, grid.clone(), Method::ClosedForm))
        .collect::<spdc_core::Result<Vec<_>>>()?;
    Ok(TwoPhotonState::new(spectra)?)
}

fn global_peak_sq(state: &TwoPhotonState) -> f64 {
    state.channels.iter().map(|c| c.peak()).fold(0.0, f64::max).powi(2)
}

fn spectrum_tables(state: &TwoPhotonState) -> CliResult<(Table, Table)> {
    let peak = global_peak_sq(state);
    if !(peak > 0.0) {
        return Err(spdc_core::Error::EmptySpectrum.into());
    }
    let grid = state.grid();
    let mut table = Table::new(
        "spectrum",
        &[
            "channel",
            "signal_mode",
            "idler_mode",
            "interaction",
            "lambda_s_um",
            "omega_s_rad_per_s",
            "re_phi",
            "im_phi",
            "abs_phi_sq_normalized",
        ],
    );
    let mut summary = Table::new(
        "spectrum-summary",
        &[
            "channel",
            "signal_mode",
            "idler_mode",
            "interaction",
            "peak_lambda_s_um",
            "peak_abs_phi_sq_normalized",
            "fwhm_rad_per_s",
        ],
    );
    for (index, phi) in state.channels.iter().enumerate() {
        let p = &phi.process;
        let (sm, im, it) = (p.signal_mode.to_string(), p.idler_mode.to_string(), p.interaction.label());
        let mut best = (0usize, 0.0f64);
        for k in 0..grid.len() {
            let v = phi.values[k];
            let rel = v.norm_sqr() / peak;
            if rel > best.1 {
                best = (k, rel);
            }
            table.push(vec![
                index.into(),
                sm.as_str().into(),
                im.as_str().into(),
                it.into(),
                lambda_from_omega(grid.omega[k]).into(),
                grid.omega[k].into(),
                v.re.into(),
                v.im.into(),
                rel.into(),
            ]);
        }
        let fwhm = spectral_fwhm(phi).unwrap_or(f64::NAN);
        summary.push(vec![
            index.into(),
            sm.as_str().into(),
            im.as_str().into(),
            it.into(),
            lambda_from_omega(grid.omega[best.0]).into(),
            best.1.into(),
            fwhm.into(),
        ]);
    }
    Ok((table, summary))
}

fn peak_residual_check(ctx: &mut Ctx, state: &TwoPhotonState) -> CliResult<()> {
    let mut worst = 0.0f64;
    for phi in &state.channels {
        let k = (0..phi.values.len())
            .max_by(|&a, &b| phi.values[a].norm_sqr().total_cmp(&phi.values[b].norm_sqr()))
            .unwrap_or(0);
        worst = worst.max(max_residual(&phi.process, phi.grid.omega[k])?);
    }
    ctx.check("mode_residual_at_peaks", worst);
    Ok(())
}

fn spectral_tasks(ctx: &mut Ctx, profile: &PolingProfile) -> CliResult<Vec<Table>> {
    let state = scenario_state(ctx.scenario, profile, ctx.task, ctx.points)?;
    ctx.check("mirror_symmetry", mirror_symmetry_check(&state)?);
    peak_residual_check(ctx, &state)?;
    let (spectrum, summary) = spectrum_tables(&state)?;
    let mut tables = vec![spectrum, summary];
    match ctx.task {
        Task::Hom => tables.extend(hom(ctx, &state)?),
        Task::Polarization => tables.extend(polarization(ctx, &state)?),
        Task::EntanglementLength => tables.extend(entanglement(ctx, &state, profile)?),
        Task::DoublyEntangled => tables.extend(common_band(&state)?),
        _ => {}
    }
    Ok(tables)
}

fn tau_points(s: &Scenario) -> usize {
    s.raw.interference.as_ref().and_then(|i| i.tau_points).unwrap_or(DEFAULT_TAU_POINTS)
}

fn interferogram_table(ig: &spdc_core::interferometry::Interferogram) -> Table {
    let mut t = Table::new("interferogram", &["tau_fs", "R_normalized", "envelope"]);
    for ((&tau, &r), &e) in ig.tau.iter().zip(&ig.rate).zip(&ig.envelope) {
        t.push(vec![(tau / FS).into(), r.into(), e.into()]);
    }
    t
}

fn outer_mean(rate: &[f64]) -> f64 {
    let edge = (rate.len() / 20).max(1);
    let outer: Vec<f64> = rate[..edge].iter().chain(&rate[rate.len() - edge..]).copied().collect();
    outer.iter().sum::<f64>() / outer.len() as f64
}

fn hom(ctx: &mut Ctx, state: &TwoPhotonState) -> CliResult<Vec<Table>> {
    let taus = default_tau_window(state, tau_points(ctx.scenario))?;
    let ig = hom_coincidence(state, &taus)?;
    let visibility = hom_visibility(&ig)?;
    let self_check = grid_self_check(state, &taus)?;
    let mut summary = Table::new(
        "hom-summary",
        &[
            "r0",
            "visibility",
            "dip_centre_fs",
            "baseline",
            "min_R_normalized",
            "grid_self_check",
            "tau_min_fs",
            "tau_max_fs",
        ],
    );
    let min_rate = ig.rate.iter().copied().fold(f64::INFINITY, f64::min);
    summary.push(vec![
        ig.r0.into(),
        visibility.into(),
        (dip_centre(&ig) / FS).into(),
        outer_mean(&ig.rate).into(),
        min_rate.into(),
        self_check.into(),
        (taus[0] / FS).into(),
        (taus[taus.len() - 1] / FS).into(),
    ]);
    Ok(vec![interferogram_table(&ig), summary])
}

fn polarization(ctx: &mut Ctx, state: &TwoPhotonState) -> CliResult<Vec<Table>> {
    let theta = ctx.scenario.raw.interference.as_ref().and_then(|i| i.theta1_deg).unwrap_or(DEFAULT_THETA1_DEG);
    let taus = default_tau_window(state, tau_points(ctx.scenario))?;
    let ig = polarization_coincidence(state, theta, &taus)?;
    // Re R₁/R₀ recovered from the HOM form of the same correlator.
    let hom = hom_coincidence(state, &taus)?;
    let mut vis = Table::new("visibility", &["tau_fs", "visibility"]);
    for (&t, &r) in taus.iter().zip(&hom.rate) {
        vis.push(vec![(t / FS).into(), visibility_from_correlation(1.0, 1.0 - 2.0 * r)?.into()]);
    }
    let (tau_peak, v_peak) = peak_polarization_visibility(state, &taus)?;
    let mut summary = Table::new("polarization-summary", &["theta1_deg", "peak_tau_fs", "peak_visibility", "r0"]);
    summary.push(vec![theta.into(), (tau_peak / FS).into(), v_peak.into(), ig.r0.into()]);
    Ok(vec![interferogram_table(&ig), vis, summary])
}

fn entanglement(ctx: &mut Ctx, state: &TwoPhotonState, profile: &PolingProfile) -> CliResult<Vec<Table>> {
    let level = ctx.scenario.raw.entanglement.as_ref().and_then(|e| e.level).unwrap_or(LE_BAND_LEVEL);
    let phi = &state.channels[0];
    let mut table = Table::new("entanglement-length-profile", &["lambda_s_um", "omega_s_rad_per_s", "L_e_um"]);
    for (w, le) in entanglement_length_profile(phi, level)? {
        table.push(vec![lambda_from_omega(w).into(), w.into(), le.value_um().into()]);
    }
    let (w, le) = band_entanglement_length(phi, level)?;
    let mut summary = Table::new(
        "entanglement-length",
        &["lambda_s_um", "L_e_um", "L_e_mm", "device_length_um", "device_over_L_e", "level"],
    );
    let l = profile.length_um;
    summary.push(vec![
        lambda_from_omega(w).into(),
        le.value_um().into(),
        (le.value_um() / MM).into(),
        l.into(),
        (l / le.value_um()).into(),
        level.into(),
    ]);
    Ok(vec![table, summary])
}

fn common_band(state: &TwoPhotonState) -> CliResult<Vec<Table>> {
    let grid = state.grid();
    let peak = global_peak_sq(state);
    let degenerate_um = lambda_from_omega(0.5 * grid.omega_p);
    let mut band = Table::new("common-band", &["lambda_s_um", "omega_s_rad_per_s", "min_abs_phi_sq_normalized"]);
    let floor: Vec<f64> = (0..grid.len())
        .map(|k| state.channels.iter().map(|c| c.values[k].norm_sqr() / peak).fold(f64::INFINITY, f64::min))
        .collect();
    let inside: Vec<bool> = floor.iter().map(|&m| m > COMMON_BAND_LEVEL).collect();
    for (k, &m) in floor.iter().enumerate().filter(|(k, _)| inside[*k]) {
        band.push(vec![lambda_from_omega(grid.omega[k]).into(), grid.omega[k].into(), m.into()]);
    }
    let mut segments = Table::new(
        "common-band-segments",
        &["segment", "lambda_lo_um", "lambda_hi_um", "nodes", "nodes_away_from_degeneracy", "degenerate_lambda_um"],
    );
    let mut k = 0;
    let mut index = 0usize;
    while k < grid.len() {
        if !inside[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < grid.len() && inside[k] {
            k += 1;
        }
        let lambdas: Vec<f64> = (start..k).map(|j| lambda_from_omega(grid.omega[j])).collect();
        let away = lambdas.iter().filter(|&&l| (l - degenerate_um).abs() > DEGENERACY_EXCLUSION_UM).count();
        let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        segments.push(vec![
            index.into(),
            lo.into(),
            hi.into(),
            lambdas.len().into(),
            away.into(),
            degenerate_um.into(),
        ]);
        index += 1;
    }
    Ok(vec![band, segments])
}

fn length_sweep(ctx: &mut Ctx, profile: &PolingProfile) -> CliResult<Vec<Table>> {
    let s = ctx.scenario;
    let lengths = &s.raw.lengths.as_ref().ok_or_else(|| invalid("missing [lengths] section"))?.values_um;
    let curve = visibility_vs_length(&s.channels[0], profile, lengths, s.lambda_limits(), ctx.points)?;
    let mut t = Table::new("visibility-vs-length", &["L_um", "L_mm", "peak_visibility"]);
    for (&l, &v) in curve.parameter.iter().zip(&curve.visibility) {
        t.push(vec![l.into(), (l / MM).into(), v.into()]);
    }
    Ok(vec![t])
}
