//! Refractive-index dispersion and the effective-nonlinearity catalog.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Functional form of a Sellmeier model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SellmeierForm {
    /// n² = A + Σ Bᵢ / (λ² − Cᵢ), with Cᵢ in µm².
    PoleForm,
    /// n² = 1 + Σ Bᵢ λ² / (λ² − λᵢ²), with resonance wavelengths λᵢ in µm.
    OscillatorForm,
}

/// One Sellmeier term: strength and pole position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierTerm {
    pub strength: f64,
    pub pole: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    pub form: SellmeierForm,
    /// Additive constant A of the pole form; ignored by the oscillator form.
    #[serde(default)]
    pub constant: f64,
    pub terms: Vec<SellmeierTerm>,
    /// Valid wavelength interval in µm.
    pub valid_range: [f64; 2],
}

impl SellmeierModel {
    pub fn pole_form(constant: f64, terms: &[(f64, f64)], valid_range: [f64; 2]) -> Self {
        Self {
            form: SellmeierForm::PoleForm,
            constant,
            terms: terms.iter().map(|&(strength, pole)| SellmeierTerm { strength, pole }).collect(),
            valid_range,
        }
    }

    pub fn oscillator_form(terms: &[(f64, f64)], valid_range: [f64; 2]) -> Self {
        Self {
            form: SellmeierForm::OscillatorForm,
            constant: 0.0,
            terms: terms.iter().map(|&(strength, pole)| SellmeierTerm { strength, pole }).collect(),
            valid_range,
        }
    }

    /// n²(λ) without range checking.
    fn n_squared_unchecked(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        match self.form {
            SellmeierForm::PoleForm => {
                self.constant + self.terms.iter().map(|t| t.strength / (l2 - t.pole)).sum::<f64>()
            }
            SellmeierForm::OscillatorForm => {
                1.0 + self.terms.iter().map(|t| t.strength * l2 / (l2 - t.pole * t.pole)).sum::<f64>()
            }
        }
    }

    pub fn contains(&self, lambda_um: f64) -> bool {
        lambda_um >= self.valid_range[0] && lambda_um <= self.valid_range[1]
    }

    /// Refractive index at `lambda_um`.
    pub fn index(&self, lambda_um: f64, model: &str) -> Result<f64> {
        if !lambda_um.is_finite() || !self.contains(lambda_um) {
            return Err(Error::OutOfRange {
                model: model.to_string(),
                lambda_um,
                lo: self.valid_range[0],
                hi: self.valid_range[1],
            });
        }
        let n2 = self.n_squared_unchecked(lambda_um);
        if !(n2 > 1.0) || !n2.is_finite() {
            return Err(Error::Domain(format!("{model}: n² = {n2} at λ = {lambda_um} µm")));
        }
        Ok(n2.sqrt())
    }

    fn validate(&self, name: &str) -> Result<()> {
        let [lo, hi] = self.valid_range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Invalid(format!("{name}: bad valid_range [{lo}, {hi}]")));
        }
        if self.terms.is_empty() {
            return Err(Error::Invalid(format!("{name}: Sellmeier model has no terms")));
        }
        for t in &self.terms {
            if !(t.strength.is_finite() && t.pole.is_finite()) {
                return Err(Error::Invalid(format!("{name}: non-finite Sellmeier coefficient")));
            }
            let pole_lambda = match self.form {
                SellmeierForm::PoleForm => t.pole.max(0.0).sqrt(),
                SellmeierForm::OscillatorForm => t.pole.abs(),
            };
            if pole_lambda >= lo && pole_lambda <= hi {
                return Err(Error::Invalid(format!("{name}: pole at {pole_lambda} µm inside valid range")));
            }
        }
        Ok(())
    }
}

/// Principal crystal axis carrying the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrystalAxis {
    Y,
    Z,
}

/// Polarization label: o is TE along y, e is TM along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationAxis {
    O,
    E,
}

impl PolarizationAxis {
    pub fn axis(self) -> CrystalAxis {
        match self {
            PolarizationAxis::O => CrystalAxis::Y,
            PolarizationAxis::E => CrystalAxis::Z,
        }
    }

    pub fn is_tm(self) -> bool {
        self == PolarizationAxis::E
    }
}

impl fmt::Display for PolarizationAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarizationAxis::O => "o",
            PolarizationAxis::E => "e",
        })
    }
}

/// Nonlinear interaction class keyed in the d_eff catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InteractionClass {
    #[serde(rename = "type0")]
    Type0,
    #[serde(rename = "type2")]
    TypeII,
}

impl fmt::Display for InteractionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionClass::Type0 => "type0",
            InteractionClass::TypeII => "type2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// Sellmeier model per axis. A single `y` entry with `isotropic = true`
    /// serves both axes.
    pub axis_models: BTreeMap<CrystalAxis, SellmeierModel>,
    #[serde(default)]
    pub isotropic: bool,
    /// Fractional index step Δ with n₂ = (1 − Δ) n₁.
    pub delta: f64,
    /// |d_eff| in pm/V.
    pub d_eff_catalog: BTreeMap<InteractionClass, f64>,
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta < 1.0) {
            return Err(Error::Invalid(format!("{}: delta must lie in [0, 1), got {}", self.name, self.delta)));
        }
        for axis in [CrystalAxis::Y, CrystalAxis::Z] {
            if self.isotropic && axis == CrystalAxis::Z {
                continue;
            }
            let model = self
                .axis_models
                .get(&axis)
                .ok_or_else(|| Error::Invalid(format!("{}: no Sellmeier model for axis {axis:?}", self.name)))?;
            model.validate(&self.name)?;
        }
        for (class, &d) in &self.d_eff_catalog {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Invalid(format!("{}: d_eff for {class} must be positive", self.name)));
            }
        }
        Ok(())
    }

    /// Same material with a different index step.
    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..self.clone() }
    }

    pub fn model(&self, pol: PolarizationAxis) -> &SellmeierModel {
        let axis = if self.isotropic { CrystalAxis::Y } else { pol.axis() };
        &self.axis_models[&axis]
    }

    /// Wavelength interval on which every axis model is valid.
    pub fn valid_range(&self) -> [f64; 2] {
        self.axis_models.values().fold([f64::NEG_INFINITY, f64::INFINITY], |acc, m| {
            [acc[0].max(m.valid_range[0]), acc[1].min(m.valid_range[1])]
        })
    }

    /// Parses a material from TOML text with a top-level `[material]` table.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wrapper {
            material: MaterialSpec,
        }
        let w: Wrapper = toml::from_str(text).map_err(|e| Error::Invalid(format!("material file: {e}")))?;
        w.material.validate()?;
        Ok(w.material)
    }

    /// Looks up a bundled material by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ktp" => Some(ktp()),
            "silica" | "fused-silica" | "fused_silica" => Some(silica()),
            _ => None,
        }
    }
}

/// KTP with Δ = 0.05.
pub fn ktp() -> MaterialSpec {
    let range = [0.4, 3.5];
    let mut axis_models = BTreeMap::new();
    axis_models
        .insert(CrystalAxis::Y, SellmeierModel::pole_form(3.45018, &[(0.04341, 0.04597), (16.98825, 39.43799)], range));
    axis_models.insert(
        CrystalAxis::Z,
        SellmeierModel::pole_form(4.59423, &[(0.06206, 0.04763), (110.80672, 86.12171)], range),
    );
    let mut d_eff_catalog = BTreeMap::new();
    d_eff_catalog.insert(InteractionClass::Type0, 16.9);
    d_eff_catalog.insert(InteractionClass::TypeII, 3.64);
    MaterialSpec { name: "ktp".into(), axis_models, isotropic: false, delta: 0.05, d_eff_catalog }
}

/// Fused silica with Δ = 0.01.
pub fn silica() -> MaterialSpec {
    let model = SellmeierModel::oscillator_form(&[(0.6962, 0.0684), (0.4079, 0.1162), (0.8975, 9.8962)], [0.21, 3.7]);
    let mut axis_models = BTreeMap::new();
    axis_models.insert(CrystalAxis::Y, model);
    let mut d_eff_catalog = BTreeMap::new();
    d_eff_catalog.insert(InteractionClass::Type0, 1.0);
    MaterialSpec { name: "silica".into(), axis_models, isotropic: true, delta: 0.01, d_eff_catalog }
}

/// Core index n₁.
pub fn core_index(material: &MaterialSpec, axis: PolarizationAxis, lambda_um: f64) -> Result<f64> {
    let label = format!("{}/{axis}", material.name);
    material.model(axis).index(lambda_um, &label)
}

/// Cladding index n₂ = (1 − Δ) n₁.
pub fn cladding_index(material: &MaterialSpec, axis: PolarizationAxis, lambda_um: f64) -> Result<f64> {
    Ok((1.0 - material.delta) * core_index(material, axis, lambda_um)?)
}

/// |d_eff| in pm/V.
pub fn effective_nonlinearity(material: &MaterialSpec, interaction: InteractionClass) -> Result<f64> {
    material.d_eff_catalog.get(&interaction).copied().ok_or_else(|| Error::UnknownInteraction {
        material: material.name.clone(),
        interaction: interaction.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ktp_z_at_532() {
        let n = core_index(&ktp(), PolarizationAxis::E, 0.532).unwrap();
        let l2: f64 = 0.532 * 0.532;
        let direct = (4.59423 + 0.06206 / (l2 - 0.04763) + 110.80672 / (l2 - 86.12171)).sqrt();
        assert_eq!(n, direct);
        assert!((n - 1.8887).abs() < 1e-4);
    }

    #[test]
    fn silica_at_one_micron() {
        let n = core_index(&silica(), PolarizationAxis::O, 1.0).unwrap();
        assert!((n - 1.4504).abs() < 1e-4);
        assert_eq!(n, core_index(&silica(), PolarizationAxis::E, 1.0).unwrap());
    }

    #[test]
    fn cladding_rule() {
        let m = ktp();
        let n1 = core_index(&m, PolarizationAxis::E, 0.532).unwrap();
        let n2 = cladding_index(&m, PolarizationAxis::E, 0.532).unwrap();
        assert_eq!(n2, 0.95 * n1);
        assert!((n2 - 1.7943).abs() < 1e-4);
        let flat = m.with_delta(0.0);
        assert_eq!(
            cladding_index(&flat, PolarizationAxis::O, 0.8).unwrap(),
            core_index(&flat, PolarizationAxis::O, 0.8).unwrap()
        );
    }

    #[test]
    fn d_eff_catalog() {
        assert_eq!(effective_nonlinearity(&ktp(), InteractionClass::Type0).unwrap(), 16.9);
        assert_eq!(effective_nonlinearity(&ktp(), InteractionClass::TypeII).unwrap(), 3.64);
        assert_eq!(effective_nonlinearity(&silica(), InteractionClass::Type0).unwrap(), 1.0);
        assert!(matches!(
            effective_nonlinearity(&silica(), InteractionClass::TypeII),
            Err(Error::UnknownInteraction { .. })
        ));
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(core_index(&ktp(), PolarizationAxis::O, 0.3), Err(Error::OutOfRange { .. })));
        assert!(matches!(core_index(&silica(), PolarizationAxis::O, 4.0), Err(Error::OutOfRange { .. })));
        assert!(core_index(&ktp(), PolarizationAxis::O, f64::NAN).is_err());
    }

    #[test]
    fn builtins_validate() {
        ktp().validate().unwrap();
        silica().validate().unwrap();
    }
}
