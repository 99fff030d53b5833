//! Three-layer perovskite solar cell in one dimension.
//!
//! Domain [0, 7] split into the electron transport layer [0, 1] (C = +10),
//! the perovskite absorber [1, 5] (intrinsic, or C = -7.5 with ions) and the
//! hole transport layer [5, 7] (C = -10). Photogeneration decays
//! exponentially from the absorber's left edge and is confined to it. The
//! three-species variant adds an anion-vacancy species with Blakemore
//! statistics (S_a = 10) restricted to the absorber, with total mass
//! M_a = |absorber| * C_a enforcing global charge neutrality.

use super::{contact_neutrality, ScenarioError};
use crate::mesh::{build_interval_mesh, BoundaryLayout, Layer};
use crate::model::{
    validate_assumptions, GenerationProfile, RecombinationModel, SpeciesConfig, SrhParams,
    StatisticsFunction, SupportBox,
};
use crate::scenario::{ContactData, DeviceScenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PscSpecies {
    Two,
    Three,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PscParams {
    /// Target grid spacing (the default reproduces 558 nodes).
    pub spacing: f64,
    pub lambda: f64,
    /// |C| in the transport layers.
    pub contact_doping: f64,
    /// C_a: the absorber doping is -C_a in the three-species variant.
    pub ion_doping: f64,
    pub ion_saturation: f64,
    /// Total ion mass; defaults to |absorber| * C_a.
    pub ion_mass: Option<f64>,
    pub r0_rad: f64,
    /// Carrier statistics (both species).
    pub statistics: StatisticsFunction,
}

impl Default for PscParams {
    fn default() -> Self {
        PscParams {
            spacing: 1.26e-2,
            lambda: 1.0,
            contact_doping: 10.0,
            ion_doping: 7.5,
            ion_saturation: 10.0,
            ion_mass: None,
            r0_rad: 1.0,
            statistics: StatisticsFunction::FermiDiracHalf,
        }
    }
}

const ABSORBER: (f64, f64) = (1.0, 5.0);

pub fn psc_scenario(
    species: PscSpecies,
    v_bar: f64,
    g0: f64,
) -> Result<DeviceScenario, ScenarioError> {
    psc_scenario_with(species, v_bar, g0, &PscParams::default())
}

pub fn psc_scenario_with(
    species: PscSpecies,
    v_bar: f64,
    g0: f64,
    params: &PscParams,
) -> Result<DeviceScenario, ScenarioError> {
    let absorber_doping = match species {
        PscSpecies::Two => 0.0,
        PscSpecies::Three => -params.ion_doping,
    };
    let layers = [
        Layer::new("etl", 0.0, ABSORBER.0, params.contact_doping),
        Layer::new("pvk", ABSORBER.0, ABSORBER.1, absorber_doping),
        Layer::new("htl", ABSORBER.1, 7.0, -params.contact_doping),
    ];
    let mesh = build_interval_mesh(&layers, params.spacing, BoundaryLayout::ContactsAtEnds)?;

    let stats = params.statistics;
    let species_cfg = match species {
        PscSpecies::Two => SpeciesConfig::electrons_holes_only(),
        PscSpecies::Three => SpeciesConfig {
            z_a: 1,
            ion_mass: params
                .ion_mass
                .unwrap_or((ABSORBER.1 - ABSORBER.0) * params.ion_doping),
            ion_regions: vec![mesh.region_index("pvk")?],
            stats_a: StatisticsFunction::Blakemore { saturation: params.ion_saturation },
        },
    };

    // the simplified rate r = r0 + (n_n + n_p)^{-1}
    let recombination = RecombinationModel::with_srh(
        params.r0_rad,
        SrhParams { tau_n: 1.0, tau_p: 1.0, n_n_ref: 0.0, n_p_ref: 0.0 },
    );

    let generation = GenerationProfile::ExponentialDecay {
        amplitude: g0,
        direction: [1.0, 0.0],
        origin: [ABSORBER.0, 0.0],
        support: SupportBox::interval(ABSORBER.0, ABSORBER.1),
    };

    let contacts = vec![
        ContactData {
            psi_builtin: contact_neutrality(&stats, &stats, params.contact_doping)?,
            voltage_factor: 0.0,
        },
        ContactData {
            psi_builtin: contact_neutrality(&stats, &stats, -params.contact_doping)?,
            voltage_factor: 1.0,
        },
    ];

    let scenario = DeviceScenario {
        name: match species {
            PscSpecies::Two => "psc_two_species".into(),
            PscSpecies::Three => "psc_three_species".into(),
        },
        mesh,
        lambda: params.lambda,
        doping: layers.iter().map(|l| l.doping).collect(),
        stats_n: stats,
        stats_p: stats,
        recombination,
        generation,
        species: species_cfg,
        contacts,
        applied_voltage: v_bar,
    };

    let report = validate_assumptions(&scenario);
    if !report.passed() {
        return Err(ScenarioError::Validation(report));
    }
    Ok(scenario)
}
