//! Two-dimensional laser-beam-induced-current setup.
//!
//! A p-doped rectangle (2,6) x (1,3) embedded in an n-doped domain
//! (0,8) x (0,4), contacts on the x = 0 and x = 8 edges, homogeneous Neumann
//! elsewhere, and a Gaussian laser beam of width sigma = 0.5. Scanning the
//! beam along the mesh and recording the outward current at the right contact
//! yields the LBIC signal.

use rayon::prelude::*;

use super::current::{
    contact_current_with_lift, discrete_current_bound, harmonic_lift,
};
use super::ScenarioError;
use crate::fvm::DiscreteSystem;
use crate::mesh::{build_rect_mesh_from_lines, BoundaryLayout, FvMesh, RectRegion};
use crate::model::{
    validate_assumptions, GenerationProfile, RecombinationModel, SpeciesConfig, SrhParams,
    StatisticsFunction,
};
use crate::newton::{continuation_solve, standard_ladder, NewtonConfig};
use crate::scenario::{ContactData, DeviceScenario};

/// Canonical 53-line x layout: uniform spacing 2/13 with the junction edges
/// x = 2 and x = 6 on nodes.
pub fn lbic_x_lines() -> Vec<f64> {
    (0..53).map(|i| 8.0 * i as f64 / 52.0).collect()
}

/// Canonical 23-line y layout: spacing 0.2 between the junction edges y = 1
/// and y = 3, 0.174 outside, and 0.13 at the outer boundaries. Together with
/// the x layout this gives 1219 nodes and control volumes between 5.0e-3
/// (the corners) and 3.08e-2.
pub fn lbic_y_lines() -> Vec<f64> {
    vec![
        0.0, 0.13, 0.304, 0.478, 0.652, 0.826, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6,
        2.8, 3.0, 3.174, 3.348, 3.522, 3.696, 3.87, 4.0,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbicParams {
    pub lambda: f64,
    /// Doping magnitude: C = +doping in the n region, -doping in the p region.
    pub doping: f64,
    /// Beam amplitude G0.
    pub beam_amplitude: f64,
    pub beam_sigma: f64,
    /// Bias across the contacts; the signal is recorded at short circuit.
    pub applied_voltage: f64,
    pub r0_rad: f64,
    pub statistics: StatisticsFunction,
}

impl Default for LbicParams {
    fn default() -> Self {
        LbicParams {
            lambda: 1.0,
            doping: 10.0,
            beam_amplitude: 1.0,
            beam_sigma: 0.5,
            applied_voltage: 0.0,
            r0_rad: 0.0,
            statistics: StatisticsFunction::FermiDiracHalf,
        }
    }
}

pub fn lbic_mesh() -> Result<FvMesh, crate::mesh::MeshError> {
    let outer = RectRegion::new("n", [0.0, 0.0], [8.0, 4.0], 0.0);
    let inner = [RectRegion::new("p", [2.0, 1.0], [6.0, 3.0], 0.0)];
    build_rect_mesh_from_lines(
        &outer,
        &inner,
        &lbic_x_lines(),
        &lbic_y_lines(),
        BoundaryLayout::ContactsAtEnds,
    )
}

pub fn lbic_scenario(
    beam_center: [f64; 2],
    params: &LbicParams,
) -> Result<DeviceScenario, ScenarioError> {
    if !(0.0..=8.0).contains(&beam_center[0]) || !(0.0..=4.0).contains(&beam_center[1]) {
        return Err(ScenarioError::BeamOutsideDomain { center: beam_center });
    }
    let mesh = lbic_mesh()?;
    let stats = params.statistics;
    let psi0 = super::contact_neutrality(&stats, &stats, params.doping)?;

    let scenario = DeviceScenario {
        name: "lbic".into(),
        mesh,
        lambda: params.lambda,
        doping: vec![params.doping, -params.doping],
        stats_n: stats,
        stats_p: stats,
        recombination: RecombinationModel::with_srh(
            params.r0_rad,
            SrhParams { tau_n: 1.0, tau_p: 1.0, n_n_ref: 0.0, n_p_ref: 0.0 },
        ),
        generation: GenerationProfile::GaussianBeam {
            amplitude: params.beam_amplitude,
            center: beam_center,
            sigma: params.beam_sigma,
        },
        species: SpeciesConfig::electrons_holes_only(),
        contacts: vec![
            ContactData { psi_builtin: psi0, voltage_factor: 0.0 },
            ContactData { psi_builtin: psi0, voltage_factor: 1.0 },
        ],
        applied_voltage: params.applied_voltage,
    };

    let report = validate_assumptions(&scenario);
    if !report.passed() {
        return Err(ScenarioError::Validation(report));
    }
    Ok(scenario)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbicPoint {
    pub x0: f64,
    pub y0: f64,
    /// Outward current at the right contact.
    pub current: f64,
    /// Discrete Cauchy-Schwarz bound on |current|.
    pub current_bound: f64,
}

#[derive(Debug, Clone)]
pub struct LbicSignal {
    pub points: Vec<LbicPoint>,
    /// Failed positions with their error messages; never silently dropped.
    pub failures: Vec<([f64; 2], String)>,
}

/// Solve one beam position per entry and record the right-contact current.
/// Positions are independent jobs; the output order follows the input order
/// regardless of the thread count.
pub fn lbic_scan(
    positions: &[[f64; 2]],
    params: &LbicParams,
    cfg: &NewtonConfig,
    threads: usize,
) -> LbicSignal {
    let lift = {
        // the harmonic test field only depends on the mesh; share it
        let scenario = match lbic_scenario([4.0, 2.0], params) {
            Ok(s) => s,
            Err(e) => {
                return LbicSignal {
                    points: Vec::new(),
                    failures: positions.iter().map(|&p| (p, e.to_string())).collect(),
                }
            }
        };
        let sys = match DiscreteSystem::new(&scenario) {
            Ok(s) => s,
            Err(e) => {
                return LbicSignal {
                    points: Vec::new(),
                    failures: positions.iter().map(|&p| (p, e.to_string())).collect(),
                }
            }
        };
        match harmonic_lift(&sys, 1) {
            Ok(l) => l,
            Err(e) => {
                return LbicSignal {
                    points: Vec::new(),
                    failures: positions.iter().map(|&p| (p, e.to_string())).collect(),
                }
            }
        }
    };

    // the equilibrium state does not depend on the beam position
    let equilibrium = match lbic_scenario([4.0, 2.0], params)
        .map_err(|e| e.to_string())
        .and_then(|s| crate::newton::equilibrium_state(&s).map_err(|e| e.to_string()))
    {
        Ok(u) => u,
        Err(e) => {
            return LbicSignal {
                points: Vec::new(),
                failures: positions.iter().map(|&p| (p, e.clone())).collect(),
            }
        }
    };

    let solve_one = |&pos: &[f64; 2]| -> Result<LbicPoint, String> {
        let scenario = lbic_scenario(pos, params).map_err(|e| e.to_string())?;
        let sys = DiscreteSystem::new(&scenario).map_err(|e| e.to_string())?;
        // direct solve at the target, ladder as the deterministic fallback
        let state = match crate::newton::newton_solve(&sys, &equilibrium, cfg) {
            Ok(rep) => rep.state,
            Err(_) => {
                let ladder = standard_ladder(params.applied_voltage, params.beam_amplitude);
                let reports =
                    continuation_solve(&scenario, &ladder, cfg).map_err(|e| e.to_string())?;
                match reports.last() {
                    Some(r) => r.state.clone(),
                    None => equilibrium.clone(),
                }
            }
        };
        // measurement orientation: the signal is the current collected into
        // the right contact, the negative of the outward current functional
        let outward =
            contact_current_with_lift(&sys, &state, 1, &lift).map_err(|e| e.to_string())?;
        let bound = discrete_current_bound(&sys, &state, &lift).map_err(|e| e.to_string())?;
        Ok(LbicPoint { x0: pos[0], y0: pos[1], current: -outward, current_bound: bound })
    };

    let results: Vec<Result<LbicPoint, String>> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| positions.par_iter().map(solve_one).collect())
    } else {
        positions.iter().map(solve_one).collect()
    };

    let mut signal = LbicSignal { points: Vec::new(), failures: Vec::new() };
    for (pos, res) in positions.iter().zip(results) {
        match res {
            Ok(p) => signal.points.push(p),
            Err(msg) => signal.failures.push((*pos, msg)),
        }
    }
    signal
}
