//! Run configuration: sectioned TOML with hard errors on unknown keys.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ddfv_core::bounds::BoundConfig;
use ddfv_core::model::StatisticsFunction;
use ddfv_core::newton::NewtonConfig;
use ddfv_core::scenarios::{LbicParams, PscParams, PscSpecies};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("bad --set override `{0}`: expected key.path=value")]
    BadOverride(String),
    #[error("--set path `{0}` does not address a table")]
    OverridePath(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Psc,
    Lbic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesChoice {
    Two,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsChoice {
    Boltzmann,
    FermiDiracHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    #[serde(default = "d_species")]
    pub species: SpeciesChoice,
    #[serde(default = "d_statistics")]
    pub statistics: StatisticsChoice,
    /// Applied voltage target.
    #[serde(default)]
    pub voltage: f64,
    /// Generation amplitude target (G0).
    #[serde(default = "d_one")]
    pub generation: f64,
    #[serde(default = "d_one")]
    pub lambda: f64,
    /// Spacing of the layered 1-D grid.
    #[serde(default = "d_spacing")]
    pub spacing: f64,
    /// |C| in the doped regions.
    #[serde(default = "d_ten")]
    pub contact_doping: f64,
    /// C_a of the three-species absorber.
    #[serde(default = "d_ion_doping")]
    pub ion_doping: f64,
    #[serde(default = "d_ten")]
    pub ion_saturation: f64,
    /// Total ion mass; omitted = |absorber| * C_a.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ion_mass: Option<f64>,
    #[serde(default = "d_one")]
    pub r0_rad: f64,
    #[serde(default = "d_beam_center")]
    pub beam_center: [f64; 2],
    #[serde(default = "d_beam_sigma")]
    pub beam_sigma: f64,
}

fn d_species() -> SpeciesChoice {
    SpeciesChoice::Two
}
fn d_statistics() -> StatisticsChoice {
    StatisticsChoice::FermiDiracHalf
}
fn d_one() -> f64 {
    1.0
}
fn d_ten() -> f64 {
    10.0
}
fn d_spacing() -> f64 {
    1.26e-2
}
fn d_ion_doping() -> f64 {
    7.5
}
fn d_beam_center() -> [f64; 2] {
    [4.0, 2.0]
}
fn d_beam_sigma() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iter: usize,
    pub atol: f64,
    pub rtol: f64,
    pub damping_init: f64,
    pub damping_growth: f64,
    pub damping_min: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = NewtonConfig::default();
        SolverSection {
            max_iter: d.max_iter,
            atol: d.atol,
            rtol: d.rtol,
            damping_init: d.damping_init,
            damping_growth: d.damping_growth,
            damping_min: d.damping_min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub p: f64,
    pub k_structural: f64,
    pub k_q: f64,
    pub k_r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0_bound: Option<f64>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        let d = BoundConfig::default();
        BoundsSection { p: d.p, k_structural: d.k_structural, k_q: d.k_q, k_r: d.k_r, r0_bound: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

impl RunConfig {
    pub fn from_str_with_overrides(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut value: toml::Value = text.parse()?;
        for ov in overrides {
            apply_override(&mut value, ov)?;
        }
        Ok(value.try_into()?)
    }

    pub fn load(path: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_str_with_overrides(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization")
    }

    pub fn newton_config(&self) -> NewtonConfig {
        NewtonConfig {
            max_iter: self.solver.max_iter,
            atol: self.solver.atol,
            rtol: self.solver.rtol,
            damping_init: self.solver.damping_init,
            damping_growth: self.solver.damping_growth,
            damping_min: self.solver.damping_min,
        }
    }

    pub fn bound_config(&self) -> BoundConfig {
        BoundConfig {
            p: self.bounds.p,
            k_structural: self.bounds.k_structural,
            k_q: self.bounds.k_q,
            k_r: self.bounds.k_r,
            r0_bound: self.bounds.r0_bound,
        }
    }

    pub fn statistics(&self) -> StatisticsFunction {
        match self.scenario.statistics {
            StatisticsChoice::Boltzmann => StatisticsFunction::Boltzmann,
            StatisticsChoice::FermiDiracHalf => StatisticsFunction::FermiDiracHalf,
        }
    }

    pub fn psc_params(&self) -> PscParams {
        let s = &self.scenario;
        PscParams {
            spacing: s.spacing,
            lambda: s.lambda,
            contact_doping: s.contact_doping,
            ion_doping: s.ion_doping,
            ion_saturation: s.ion_saturation,
            ion_mass: s.ion_mass,
            r0_rad: s.r0_rad,
            statistics: self.statistics(),
        }
    }

    pub fn psc_species(&self) -> PscSpecies {
        match self.scenario.species {
            SpeciesChoice::Two => PscSpecies::Two,
            SpeciesChoice::Three => PscSpecies::Three,
        }
    }

    pub fn lbic_params(&self) -> LbicParams {
        let s = &self.scenario;
        LbicParams {
            lambda: s.lambda,
            doping: s.contact_doping,
            beam_amplitude: s.generation,
            beam_sigma: s.beam_sigma,
            applied_voltage: s.voltage,
            r0_rad: s.r0_rad,
            statistics: self.statistics(),
        }
    }
}

fn apply_override(root: &mut toml::Value, spec: &str) -> Result<(), ConfigError> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| ConfigError::BadOverride(spec.into()))?;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::BadOverride(spec.into()));
    }
    // parse the value as TOML, falling back to a bare string
    let value: toml::Value = format!("v = {raw}")
        .parse::<toml::Value>()
        .ok()
        .and_then(|t| t.get("v").cloned())
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let mut node = root;
    for key in &parts[..parts.len() - 1] {
        node = node
            .as_table_mut()
            .ok_or_else(|| ConfigError::OverridePath(path.into()))?
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| ConfigError::OverridePath(path.into()))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
