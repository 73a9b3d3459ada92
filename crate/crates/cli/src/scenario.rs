//! Scenario files: TOML schema, validation and resolution into core types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spdc_core::fiber::FiberGeometry;
use spdc_core::materials::{MaterialSpec, PolarizationAxis};
use spdc_core::planar::PlanarGeometry;
use spdc_core::qpm::{Interaction, PolingProfile, ProcessSpec, PumpSpec};
use spdc_core::waveguide::{ModeIndex, Waveguide};

use crate::bundled;
use crate::error::{invalid, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Design,
    Tangency,
    Spectrum,
    Hom,
    Polarization,
    VisibilityVsLength,
    EntanglementLength,
    DoublyEntangled,
}

impl Task {
    pub fn label(self) -> &'static str {
        match self {
            Task::Design => "design",
            Task::Tangency => "tangency",
            Task::Spectrum => "spectrum",
            Task::Hom => "hom",
            Task::Polarization => "polarization",
            Task::VisibilityVsLength => "visibility-vs-length",
            Task::EntanglementLength => "entanglement-length",
            Task::DoublyEntangled => "doubly-entangled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveguideKind {
    Planar,
    Fiber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawWaveguide {
    pub kind: WaveguideKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Built-in material name or path to a material TOML file.
    pub material: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<i32>,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pol: Option<PolarizationAxis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPump {
    pub lambda_um: f64,
    pub mode: RawMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<PolarizationAxis>,
}

/// Signal and idler of one channel; polarizations refer to the signal
/// above the degenerate frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub signal: RawMode,
    pub idler: RawMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PeriodValue {
    Value(f64),
    /// `"design"`: take the period from the intersection design.
    Keyword(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolingKind {
    Uniform,
    Chirped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPoling {
    pub variant: PolingKind,
    pub period0_um: PeriodValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_l_um: Option<f64>,
    #[serde(rename = "L_um")]
    pub l_um: f64,
    #[serde(default = "one")]
    pub kappa: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    #[serde(default = "default_lambda_min")]
    pub lambda_s_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_s_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_lambda_min() -> f64 {
    0.4
}

fn default_lambda_max() -> f64 {
    3.5
}

fn default_points() -> usize {
    2000
}

impl Default for RawGrid {
    fn default() -> Self {
        Self { lambda_s_min: default_lambda_min(), lambda_s_max: default_lambda_max(), points: default_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub lambda_range_um: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangencySection {
    pub geometry_range_um: [f64; 2],
    pub lambda_range_um: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthsSection {
    pub values_um: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntanglementSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

/// Scenario file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub task: Task,
    pub interaction: Interaction,
    pub waveguide: RawWaveguide,
    pub pump: RawPump,
    pub channels: Vec<RawChannel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poling: Option<RawPoling>,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangency: Option<TangencySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interference: Option<InterferenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<LengthsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entanglement: Option<EntanglementSection>,
}

/// Poling with the period possibly left to the intersection design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolingSpec {
    pub profile: PolingProfile,
    pub from_design: bool,
}

/// Validated scenario with core types resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub raw: RawScenario,
    pub waveguide: Waveguide,
    pub channels: Vec<ProcessSpec>,
    pub poling: Option<PolingSpec>,
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

fn range(name: &str, r: [f64; 2]) -> CliResult<(f64, f64)> {
    positive(name, r[0])?;
    positive(name, r[1])?;
    if r[0] >= r[1] {
        return Err(invalid(format!("{name} must be increasing, got [{}, {}]", r[0], r[1])));
    }
    Ok((r[0], r[1]))
}

fn mode_index(kind: WaveguideKind, mode: &RawMode, what: &str) -> CliResult<ModeIndex> {
    match (kind, mode.l) {
        (WaveguideKind::Planar, None) => Ok(ModeIndex::Planar { m: mode.m }),
        (WaveguideKind::Planar, Some(_)) => Err(invalid(format!("{what}: slab modes take only m"))),
        (WaveguideKind::Fiber, Some(l)) if mode.m >= 1 => Ok(ModeIndex::Fiber { l, m: mode.m }),
        (WaveguideKind::Fiber, Some(_)) => Err(invalid(format!("{what}: fiber radial index m starts at 1"))),
        (WaveguideKind::Fiber, None) => Err(invalid(format!("{what}: fiber modes need l and m"))),
    }
}

/// Interaction whose (above, below, pump) labels match the channel.
fn channel_interaction(
    default: Interaction,
    signal: Option<PolarizationAxis>,
    idler: Option<PolarizationAxis>,
    pump: Option<PolarizationAxis>,
    index: usize,
) -> CliResult<Interaction> {
    let fits = |it: Interaction| {
        let [above, below, p] = it.polarizations();
        signal.is_none_or(|s| s == above) && idler.is_none_or(|i| i == below) && pump.is_none_or(|q| q == p)
    };
    if fits(default) {
        return Ok(default);
    }
    if default.class() == spdc_core::materials::InteractionClass::TypeII {
        for it in [Interaction::TypeIIOeo, Interaction::TypeIIEoo] {
            if fits(it) {
                return Ok(it);
            }
        }
    }
    Err(invalid(format!("channel {index}: polarizations do not fit interaction {}", default.label())))
}

impl Scenario {
    pub fn parse(text: &str, base_dir: Option<&Path>) -> CliResult<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        Self::from_raw(raw, base_dir)
    }

    /// Loads a bundled scenario by name, or a scenario file by path.
    pub fn load(name_or_path: &str) -> CliResult<Self> {
        if let Some(text) = bundled::source(name_or_path) {
            return Self::parse(text, None);
        }
        let path = PathBuf::from(name_or_path);
        let text =
            std::fs::read_to_string(&path).map_err(|e| invalid(format!("cannot read scenario {name_or_path}: {e}")))?;
        Self::parse(&text, path.parent())
    }

    pub fn from_raw(raw: RawScenario, base_dir: Option<&Path>) -> CliResult<Self> {
        if raw.name.trim().is_empty() {
            return Err(invalid("name must not be empty"));
        }
        if !raw.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(invalid("name may contain only letters, digits, '-' and '_'"));
        }
        let material = resolve_material(&raw.waveguide, base_dir)?;
        let waveguide = match raw.waveguide.kind {
            WaveguideKind::Planar => {
                if raw.waveguide.a_um.is_some() {
                    return Err(invalid("planar waveguide takes h_um, not a_um"));
                }
                let h =
                    positive("waveguide.h_um", raw.waveguide.h_um.ok_or_else(|| invalid("waveguide.h_um missing"))?)?;
                Waveguide::Planar(PlanarGeometry::new(h, material).map_err(|e| invalid(e.to_string()))?)
            }
            WaveguideKind::Fiber => {
                if raw.waveguide.h_um.is_some() {
                    return Err(invalid("fiber takes a_um, not h_um"));
                }
                let a =
                    positive("waveguide.a_um", raw.waveguide.a_um.ok_or_else(|| invalid("waveguide.a_um missing"))?)?;
                Waveguide::Fiber(FiberGeometry::new(a, material).map_err(|e| invalid(e.to_string()))?)
            }
        };
        let kind = raw.waveguide.kind;
        positive("pump.lambda_um", raw.pump.lambda_um)?;
        let pump = PumpSpec { lambda_um: raw.pump.lambda_um, mode: mode_index(kind, &raw.pump.mode, "pump")? };
        if raw.channels.is_empty() {
            return Err(invalid("at least one channel is required"));
        }
        let mut channels = Vec::with_capacity(raw.channels.len());
        for (k, c) in raw.channels.iter().enumerate() {
            let interaction =
                channel_interaction(raw.interaction, c.signal.pol, c.idler.pol, raw.pump.polarization, k)?;
            let process = ProcessSpec {
                waveguide: waveguide.clone(),
                interaction,
                pump,
                signal_mode: mode_index(kind, &c.signal, &format!("channel {k} signal"))?,
                idler_mode: mode_index(kind, &c.idler, &format!("channel {k} idler"))?,
            };
            process.validate().map_err(|e| invalid(e.to_string()))?;
            channels.push(process);
        }
        if raw.pump.polarization.is_some_and(|p| p != channels[0].pump_polarization()) {
            return Err(invalid("pump.polarization does not match the interaction"));
        }

        let poling = match &raw.poling {
            None => None,
            Some(p) => Some(resolve_poling(p, &channels[0], raw.design.is_some())?),
        };

        let g = raw.grid;
        positive("grid.lambda_s_min", g.lambda_s_min)?;
        positive("grid.lambda_s_max", g.lambda_s_max)?;
        if g.lambda_s_min >= g.lambda_s_max {
            return Err(invalid("grid.lambda_s_min must be below grid.lambda_s_max"));
        }
        if g.points < 16 {
            return Err(invalid("grid.points must be at least 16"));
        }

        let scenario = Self { raw, waveguide, channels, poling };
        scenario.check_task(scenario.raw.task)?;
        Ok(scenario)
    }

    /// Checks that the sections needed by `task` are present and valid.
    pub fn check_task(&self, task: Task) -> CliResult<()> {
        let raw = &self.raw;
        let needs_poling = !matches!(task, Task::Design | Task::Tangency);
        if needs_poling && self.poling.is_none() {
            return Err(invalid(format!("task {} needs a [poling] section", task.label())));
        }
        if self.poling.is_some_and(|p| p.from_design) && raw.design.is_none() {
            return Err(invalid("period0_um = \"design\" needs a [design] section"));
        }
        if let Some(d) = &raw.design {
            range("design.lambda_range_um", d.lambda_range_um)?;
            if d.curve_points.is_some_and(|n| n < 16) {
                return Err(invalid("design.curve_points must be at least 16"));
            }
        }
        if let Some(i) = &raw.interference {
            if i.tau_points.is_some_and(|n| n < 3) {
                return Err(invalid("interference.tau_points must be at least 3"));
            }
            if i.theta1_deg.is_some_and(|t| !t.is_finite()) {
                return Err(invalid("interference.theta1_deg must be finite"));
            }
        }
        match task {
            Task::Design => {
                raw.design.as_ref().ok_or_else(|| invalid("task design needs a [design] section"))?;
            }
            Task::Tangency => {
                let t = raw.tangency.as_ref().ok_or_else(|| invalid("task tangency needs a [tangency] section"))?;
                range("tangency.geometry_range_um", t.geometry_range_um)?;
                range("tangency.lambda_range_um", t.lambda_range_um)?;
            }
            Task::Polarization => {
                if self.channels.iter().any(|c| c.is_type0()) {
                    return Err(invalid("polarization analysis needs a Type-II interaction"));
                }
            }
            Task::VisibilityVsLength => {
                if self.channels.iter().any(|c| c.is_type0()) {
                    return Err(invalid("visibility-vs-length needs a Type-II interaction"));
                }
                let l = raw.lengths.as_ref().ok_or_else(|| invalid("task visibility-vs-length needs [lengths]"))?;
                if l.values_um.is_empty() {
                    return Err(invalid("lengths.values_um is empty"));
                }
                for &v in &l.values_um {
                    positive("lengths.values_um", v)?;
                }
            }
            Task::EntanglementLength => {
                if let Some(level) = raw.entanglement.as_ref().and_then(|e| e.level) {
                    if !(level > 0.0 && level < 1.0) {
                        return Err(invalid("entanglement.level must lie in (0, 1)"));
                    }
                }
            }
            Task::Spectrum | Task::Hom | Task::DoublyEntangled => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.raw.name
    }

    pub fn lambda_limits(&self) -> (f64, f64) {
        (self.raw.grid.lambda_s_min, self.raw.grid.lambda_s_max)
    }

    pub fn design_range(&self) -> Option<(f64, f64)> {
        self.raw.design.as_ref().map(|d| (d.lambda_range_um[0], d.lambda_range_um[1]))
    }
}

fn resolve_material(w: &RawWaveguide, base_dir: Option<&Path>) -> CliResult<MaterialSpec> {
    let material = match MaterialSpec::builtin(&w.material) {
        Some(m) => m,
        None => {
            let path = match base_dir {
                Some(dir) => dir.join(&w.material),
                None => PathBuf::from(&w.material),
            };
            let text =
                std::fs::read_to_string(&path).map_err(|_| invalid(format!("unknown material {:?}", w.material)))?;
            MaterialSpec::from_toml_str(&text).map_err(|e| invalid(e.to_string()))?
        }
    };
    let material = match w.delta {
        Some(d) => material.with_delta(d),
        None => material,
    };
    material.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(material)
}

fn resolve_poling(p: &RawPoling, channel: &ProcessSpec, has_design: bool) -> CliResult<PolingSpec> {
    if p.kappa != 1 {
        return Err(invalid(format!("poling.kappa must be 1, got {}", p.kappa)));
    }
    positive("poling.L_um", p.l_um)?;
    let d_eff = channel.d_eff().map_err(|e| invalid(e.to_string()))?;
    let (period0, from_design) = match &p.period0_um {
        PeriodValue::Value(v) => (positive("poling.period0_um", *v)?, false),
        PeriodValue::Keyword(k) if k == "design" => {
            if !has_design {
                return Err(invalid("period0_um = \"design\" needs a [design] section"));
            }
            (1.0, true)
        }
        PeriodValue::Keyword(k) => return Err(invalid(format!("poling.period0_um: unknown keyword {k:?}"))),
    };
    let profile = match p.variant {
        PolingKind::Uniform => {
            if p.period_l_um.is_some() {
                return Err(invalid("uniform poling takes no period_l_um"));
            }
            PolingProfile::uniform(period0, p.l_um, d_eff)
        }
        PolingKind::Chirped => {
            if from_design {
                return Err(invalid("chirped poling needs explicit periods"));
            }
            let pl =
                positive("poling.period_l_um", p.period_l_um.ok_or_else(|| invalid("poling.period_l_um missing"))?)?;
            if pl == period0 {
                return Err(invalid("chirped poling needs period_l_um different from period0_um"));
            }
            PolingProfile::chirped(period0, pl, p.l_um, d_eff)
        }
    };
    profile.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(PolingSpec { profile, from_design })
}
