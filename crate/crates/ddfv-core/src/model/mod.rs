//! Physical model pieces: carrier statistics, recombination, generation,
//! species configuration and validation of the structural hypotheses that the
//! solver and the a-priori bounds rely on.

mod gauss;
mod generation;
mod recombination;
mod statistics;

pub use generation::{GenerationProfile, SupportBox};
pub use recombination::{RecombinationModel, SrhParams};
pub use statistics::{StatisticsError, StatisticsFunction, BOLTZMANN_ETA_MAX, DENSITY_CLAMP};

use crate::scenario::DeviceScenario;

/// Charged-species setup. Electrons and holes are always present with
/// z_n = -1 and z_p = +1; an ionic species is enabled by `z_a != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesConfig {
    pub z_a: i32,
    /// Total ion mass M_a (integral of the ion density over the ion region).
    pub ion_mass: f64,
    /// Region indices in which the ion species lives.
    pub ion_regions: Vec<usize>,
    pub stats_a: StatisticsFunction,
}

impl SpeciesConfig {
    /// Electron/hole-only model (z_a = 0).
    pub fn electrons_holes_only() -> Self {
        SpeciesConfig {
            z_a: 0,
            ion_mass: 0.0,
            ion_regions: Vec::new(),
            stats_a: StatisticsFunction::Boltzmann,
        }
    }
}

pub const Z_N: f64 = -1.0;
pub const Z_P: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Pass,
    Warn(String),
    Fail(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !matches!(c.status, CheckStatus::Fail(_)))
    }

    pub fn failures(&self) -> Vec<&ValidationCheck> {
        self.checks.iter().filter(|c| matches!(c.status, CheckStatus::Fail(_))).collect()
    }

    fn push(&mut self, name: &'static str, status: CheckStatus) {
        self.checks.push(ValidationCheck { name, status });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            match &c.status {
                CheckStatus::Pass => writeln!(f, "pass {}", c.name)?,
                CheckStatus::Warn(msg) => writeln!(f, "warn {}: {}", c.name, msg)?,
                CheckStatus::Fail(msg) => writeln!(f, "FAIL {}: {}", c.name, msg)?,
            }
        }
        Ok(())
    }
}

/// Structural checks on a scenario: ion mass compatibility, nonnegative
/// generation at the cell centers, finite Dirichlet data and a nonempty
/// Dirichlet boundary. Never aborts; failures come back as a report.
pub fn validate_assumptions(scenario: &DeviceScenario) -> ValidationReport {
    let mut report = ValidationReport::default();

    if scenario.ions_active() {
        let measure = scenario.ion_region_measure();
        let mass = scenario.species.ion_mass;
        let status = match scenario.species.stats_a.saturation() {
            Some(sat) => {
                let cap = measure * sat;
                if mass > 0.0 && mass < cap {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail(format!(
                        "need 0 < M_a < |ion region| * S_a; got M_a = {mass}, bound = {cap}"
                    ))
                }
            }
            None => {
                if mass > 0.0 {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail(format!("need M_a > 0; got {mass}"))
                }
            }
        };
        report.push("mass_compatibility", status);

        // The F <= exp hypothesis fails for saturating statistics with S_a > 1
        // near eta = 0; there it is advisory (the saturation bound replaces it).
        let mut worst: Option<(f64, f64, f64)> = None;
        let mut eta = -20.0;
        while eta <= 20.0 {
            if let (Ok(v), true) = (scenario.species.stats_a.eval(eta), eta < 700.0) {
                let e = eta.exp();
                if v > e * (1.0 + 1e-12) && worst.map(|w| v / e > w.2).unwrap_or(true) {
                    worst = Some((eta, v, v / e));
                }
            }
            eta += 0.25;
        }
        report.push(
            "ion_statistics_sandwich",
            match worst {
                None => CheckStatus::Pass,
                Some((eta, v, _)) => CheckStatus::Warn(format!(
                    "F_a({eta}) = {v} exceeds exp(eta); saturation bound applies instead"
                )),
            },
        );
    }

    let bad_g = scenario.mesh.cells.iter().find(|c| {
        let g = scenario.generation.eval(c.center);
        g.is_nan() || g < 0.0
    });
    report.push(
        "generation_nonnegative",
        match bad_g {
            None => CheckStatus::Pass,
            Some(c) => CheckStatus::Fail(format!("G < 0 or non-finite at {:?}", c.center)),
        },
    );

    let mut finite = true;
    for tag in 0..scenario.contacts.len() {
        let d = scenario.dirichlet_values(tag);
        finite &= d.psi.is_finite() && d.v_n.is_finite() && d.v_p.is_finite();
    }
    report.push(
        "dirichlet_data_finite",
        if finite {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail("non-finite Dirichlet value".into())
        },
    );

    let total: f64 =
        (0..scenario.mesh.dirichlet_names.len()).map(|t| scenario.mesh.dirichlet_measure(t)).sum();
    report.push(
        "dirichlet_measure_positive",
        if total > 0.0 && scenario.contacts.len() == scenario.mesh.dirichlet_names.len() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!("|Gamma^D| = {total}"))
        },
    );

    report
}
