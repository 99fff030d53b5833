//! Parameter sweep driver with continuation reuse across rows.

use super::current::{contact_current, CurrentMethod};
use super::lbic::{lbic_scenario, LbicParams};
use super::psc::{psc_scenario_with, PscParams, PscSpecies};
use super::ScenarioError;
use crate::bounds::{certificate, verify_solution_bounds, BoundConfig, BoundInputs, LinfNorms};
use crate::fvm::DiscreteSystem;
use crate::newton::{continuation_solve, newton_solve, standard_ladder, NewtonConfig};
use crate::scenario::DeviceScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Lambda,
    DopingMagnitude,
    Generation,
    Voltage,
}

/// A scenario family that can be rebuilt with one swept parameter.
#[derive(Debug, Clone)]
pub enum ScenarioFamily {
    Psc { species: PscSpecies, params: PscParams, voltage: f64, generation: f64 },
    Lbic { beam_center: [f64; 2], params: LbicParams },
}

impl ScenarioFamily {
    pub fn build(
        &self,
        over: Option<(SweepParameter, f64)>,
    ) -> Result<DeviceScenario, ScenarioError> {
        match self {
            ScenarioFamily::Psc { species, params, voltage, generation } => {
                let mut params = params.clone();
                let mut v = *voltage;
                let mut g = *generation;
                if let Some((p, x)) = over {
                    match p {
                        SweepParameter::Lambda => params.lambda = x,
                        SweepParameter::DopingMagnitude => params.contact_doping = x,
                        SweepParameter::Generation => g = x,
                        SweepParameter::Voltage => v = x,
                    }
                }
                psc_scenario_with(*species, v, g, &params)
            }
            ScenarioFamily::Lbic { beam_center, params } => {
                let mut params = params.clone();
                if let Some((p, x)) = over {
                    match p {
                        SweepParameter::Lambda => params.lambda = x,
                        SweepParameter::DopingMagnitude => params.doping = x,
                        SweepParameter::Generation => params.beam_amplitude = x,
                        SweepParameter::Voltage => params.applied_voltage = x,
                    }
                }
                lbic_scenario(*beam_center, &params)
            }
        }
    }

    fn targets(&self, over: Option<(SweepParameter, f64)>) -> (f64, f64) {
        match self {
            ScenarioFamily::Psc { voltage, generation, .. } => {
                let mut v = *voltage;
                let mut g = *generation;
                if let Some((p, x)) = over {
                    match p {
                        SweepParameter::Generation => g = x,
                        SweepParameter::Voltage => v = x,
                        _ => {}
                    }
                }
                (v, g)
            }
            ScenarioFamily::Lbic { params, .. } => {
                let mut v = params.applied_voltage;
                let mut g = params.beam_amplitude;
                if let Some((p, x)) = over {
                    match p {
                        SweepParameter::Generation => g = x,
                        SweepParameter::Voltage => v = x,
                        _ => {}
                    }
                }
                (v, g)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub norms: LinfNorms,
    /// Boundary-flux-sum currents at the two contacts.
    pub current_d1: f64,
    pub current_d2: f64,
    pub bounds_hard_ok: bool,
    pub bounds_certificate_ok: bool,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<(f64, String)>,
}

/// Solve the family at each parameter value (sorted input assumed), reusing
/// the previous row's state as a warm start and falling back to the full
/// continuation ladder when the warm start fails.
pub fn parameter_sweep(
    family: &ScenarioFamily,
    parameter: SweepParameter,
    values: &[f64],
    cfg: &NewtonConfig,
    bounds_cfg: &BoundConfig,
) -> SweepResult {
    let mut out = SweepResult::default();
    let mut prev_state: Option<crate::fvm::StateVector> = None;

    for &value in values {
        let row = (|| -> Result<SweepRow, String> {
            let scenario = family.build(Some((parameter, value))).map_err(|e| e.to_string())?;
            let sys = DiscreteSystem::new(&scenario).map_err(|e| e.to_string())?;

            let warm = prev_state
                .as_ref()
                .and_then(|u| newton_solve(&sys, u, cfg).ok());
            let (state, iterations) = match warm {
                Some(rep) => (rep.state, rep.iterations.len()),
                None => {
                    let (v, g) = family.targets(Some((parameter, value)));
                    let ladder = standard_ladder(v, g);
                    let reports = continuation_solve(&scenario, &ladder, cfg)
                        .map_err(|e| e.to_string())?;
                    match reports.last() {
                        Some(last) => {
                            let iters = reports.iter().map(|r| r.iterations.len()).sum();
                            (last.state.clone(), iters)
                        }
                        None => (
                            crate::newton::equilibrium_state(&scenario)
                                .map_err(|e| e.to_string())?,
                            0,
                        ),
                    }
                }
            };

            let norms = crate::bounds::linf_norms(&sys, &state).map_err(|e| e.to_string())?;
            let i1 = contact_current(&sys, &state, 0, CurrentMethod::BoundaryFluxSum)
                .map_err(|e| e.to_string())?
                .value;
            let i2 = contact_current(&sys, &state, 1, CurrentMethod::BoundaryFluxSum)
                .map_err(|e| e.to_string())?
                .value;
            let inputs = BoundInputs::from_scenario(&scenario, bounds_cfg)
                .map_err(|e| e.to_string())?;
            let cert = certificate(&scenario, &inputs).map_err(|e| e.to_string())?;
            let verdict =
                verify_solution_bounds(&sys, &state, &cert).map_err(|e| e.to_string())?;

            prev_state = Some(state);
            Ok(SweepRow {
                value,
                norms,
                current_d1: i1,
                current_d2: i2,
                bounds_hard_ok: verdict.hard_ok(),
                bounds_certificate_ok: verdict.certificate_ok(),
                newton_iterations: iterations,
            })
        })();
        match row {
            Ok(r) => out.rows.push(r),
            Err(msg) => out.failures.push((value, msg)),
        }
    }
    out
}
