//! Canned device setups, the contact-current postprocessor and sweep drivers.

mod current;
mod lbic;
mod psc;
mod sweep;

pub use current::{
    contact_current, contact_current_with_lift, discrete_current_bound, harmonic_lift,
    ContactCurrent, CurrentError, CurrentMethod,
};
pub use lbic::{lbic_scan, lbic_scenario, lbic_x_lines, lbic_y_lines, LbicParams, LbicPoint, LbicSignal};
pub use psc::{psc_scenario, psc_scenario_with, PscParams, PscSpecies};
pub use sweep::{parameter_sweep, ScenarioFamily, SweepParameter, SweepResult, SweepRow};

use thiserror::Error;

use crate::mesh::MeshError;
use crate::model::{StatisticsError, StatisticsFunction, ValidationReport};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("mesh construction failed: {0}")]
    Mesh(#[from] MeshError),
    #[error("scenario validation failed:\n{0}")]
    Validation(ValidationReport),
    #[error("statistics evaluation failed: {0}")]
    Statistics(#[from] StatisticsError),
    #[error("no charge-neutral potential for doping {doping}")]
    Neutrality { doping: f64 },
    #[error("beam center {center:?} lies outside the closed domain")]
    BeamOutsideDomain { center: [f64; 2] },
}

/// Built-in potential at an ohmic contact: the root of
/// `F_p(-psi) - F_n(psi) + c = 0` (local charge neutrality; the ionic species
/// does not reach the contacts in the bundled setups).
pub(crate) fn contact_neutrality(
    stats_n: &StatisticsFunction,
    stats_p: &StatisticsFunction,
    doping: f64,
) -> Result<f64, ScenarioError> {
    let net = |psi: f64| -> Option<f64> {
        Some(stats_p.eval(-psi).ok()? - stats_n.eval(psi).ok()? + doping)
    };
    // net is strictly decreasing in psi; bracket the root by doubling
    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        match net(lo) {
            Some(v) if v > 0.0 => break,
            Some(_) => lo *= 2.0,
            None => return Err(ScenarioError::Neutrality { doping }),
        }
        if lo < -1e6 {
            return Err(ScenarioError::Neutrality { doping });
        }
    }
    for _ in 0..200 {
        match net(hi) {
            Some(v) if v < 0.0 => break,
            Some(_) => hi *= 2.0,
            None => return Err(ScenarioError::Neutrality { doping }),
        }
        if hi > 1e6 {
            return Err(ScenarioError::Neutrality { doping });
        }
    }
    let mut psi = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = net(psi).ok_or(ScenarioError::Neutrality { doping })?;
        if v > 0.0 {
            lo = psi;
        } else {
            hi = psi;
        }
        let next = 0.5 * (lo + hi);
        if (next - psi).abs() <= 1e-15 * (1.0 + psi.abs()) {
            return Ok(next);
        }
        psi = next;
    }
    Ok(psi)
}
