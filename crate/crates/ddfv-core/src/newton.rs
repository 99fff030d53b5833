//! Damped Newton solver with parameter continuation.
//!
//! Damping follows an accept/reject rule: each solve starts at the initial
//! factor, a step is accepted only if the damped iterate has valid densities
//! and does not raise the residual max-norm, the factor doubles on acceptance
//! (capped at 1) and halves on rejection down to a floor. Warm starts come
//! from a continuation ladder over applied voltage and generation amplitude,
//! with the base rung initialized from the equilibrium constrained-Poisson
//! solve at zero quasi-Fermi potentials.

use std::time::Instant;

use thiserror::Error;

use crate::fvm::{
    solve_constrained_poisson, DiscreteSystem, FvmError, PoissonError, PoissonSource, StateVector,
};
use crate::linalg::{factor, LinSolveError};
use crate::model::{validate_assumptions, ValidationReport};
use crate::scenario::DeviceScenario;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub max_iter: usize,
    /// Convergence: ||r||_inf <= atol + rtol * ||r(u0)||_inf.
    pub atol: f64,
    pub rtol: f64,
    pub damping_init: f64,
    pub damping_growth: f64,
    pub damping_min: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iter: 50,
            atol: 1e-11,
            rtol: 0.0,
            damping_init: 0.1,
            damping_growth: 2.0,
            damping_min: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Residual max-norm after the accepted step.
    pub residual_norm: f64,
    /// Damping factor of the accepted step.
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: Vec<IterationRecord>,
    pub initial_residual_norm: f64,
    pub residual_norm: f64,
    pub state: StateVector,
    pub wall_time_s: f64,
}

#[derive(Debug, Error)]
pub enum NewtonError {
    #[error("no convergence within the iteration budget (residual {})", .report.residual_norm)]
    MaxIterations { report: Box<SolveReport> },
    #[error("singular linear solve: {0}")]
    SingularLinearSolve(#[from] LinSolveError),
    #[error("could not recover a density-valid iterate at cell {cell}")]
    DensityRangeUnrecoverable { cell: usize },
    #[error("scenario validation failed:\n{0}")]
    ValidationFailed(ValidationReport),
    #[error("initial state rejected: {0}")]
    InvalidInitialState(FvmError),
    #[error("assembly failed: {0}")]
    Assembly(FvmError),
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Damped Newton iteration on the coupled system.
pub fn newton_solve(
    sys: &DiscreteSystem,
    u0: &StateVector,
    cfg: &NewtonConfig,
) -> Result<SolveReport, NewtonError> {
    assert!(cfg.atol > 0.0 || cfg.rtol > 0.0, "need a positive tolerance");
    assert!(cfg.damping_init > 0.0 && cfg.damping_init <= 1.0);
    assert!(cfg.damping_min > 0.0 && cfg.damping_growth >= 1.0);
    let report = validate_assumptions(sys.scenario);
    if !report.passed() {
        return Err(NewtonError::ValidationFailed(report));
    }
    let start = Instant::now();

    let mut x = sys.pack(u0);
    let mut r = sys
        .assemble_residual(&sys.unpack(&x))
        .map_err(NewtonError::InvalidInitialState)?;
    let norm0 = inf_norm(&r);
    let target = cfg.atol + cfg.rtol * norm0;
    let mut norm = norm0;
    let mut damping = cfg.damping_init;
    let mut history = Vec::new();
    let bordered = sys.scenario.ions_active();

    for _ in 0..cfg.max_iter {
        if norm <= target {
            return Ok(SolveReport {
                converged: true,
                iterations: history,
                initial_residual_norm: norm0,
                residual_norm: norm,
                state: sys.unpack(&x),
                wall_time_s: start.elapsed().as_secs_f64(),
            });
        }

        let (_, jac) = sys.assemble_system(&sys.unpack(&x)).map_err(NewtonError::Assembly)?;
        let fac = factor(&jac, bordered)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = fac.solve(&rhs)?;

        let mut alpha = damping;
        let mut accepted = false;
        let mut last_invalid_cell = None;
        while alpha >= cfg.damping_min {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + alpha * si).collect();
            match sys.assemble_residual(&sys.unpack(&trial)) {
                Ok(rt) => {
                    let nt = inf_norm(&rt);
                    if nt <= norm {
                        x = trial;
                        r = rt;
                        norm = nt;
                        history.push(IterationRecord { residual_norm: norm, damping: alpha });
                        damping = (alpha * cfg.damping_growth).min(1.0);
                        accepted = true;
                        break;
                    }
                    last_invalid_cell = None;
                }
                Err(FvmError::InvalidDensity { cell, .. }) => last_invalid_cell = Some(cell),
                Err(e) => return Err(NewtonError::Assembly(e)),
            }
            alpha *= 0.5;
        }
        if !accepted {
            if let Some(cell) = last_invalid_cell {
                return Err(NewtonError::DensityRangeUnrecoverable { cell });
            }
            break; // stagnation: report as non-convergence below
        }
    }

    let report = SolveReport {
        converged: norm <= target,
        iterations: history,
        initial_residual_norm: norm0,
        residual_norm: norm,
        state: sys.unpack(&x),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    if report.converged {
        Ok(report)
    } else {
        Err(NewtonError::MaxIterations { report: Box::new(report) })
    }
}

#[derive(Debug, Error)]
pub enum EquilibriumError {
    #[error("equilibrium Poisson solve failed: {0}")]
    Poisson(#[from] PoissonError),
    #[error("system setup failed: {0}")]
    Fvm(#[from] FvmError),
    #[error("scenario validation failed:\n{0}")]
    ValidationFailed(ValidationReport),
}

/// Equilibrium state at zero bias and zero generation: v_n = v_p = 0, psi from
/// the constrained Poisson solve with state-equation densities (and v_a from
/// the mass constraint). This is an exact discrete solution of the coupled
/// system at V = 0, G0 = 0, and the warm start for continuation.
pub fn equilibrium_state(scenario: &DeviceScenario) -> Result<StateVector, EquilibriumError> {
    let report = validate_assumptions(scenario);
    if !report.passed() {
        return Err(EquilibriumError::ValidationFailed(report));
    }
    let mut eq = scenario.clone();
    eq.applied_voltage = 0.0;
    let sys = DiscreteSystem::new(&eq)?;
    let sol = solve_constrained_poisson(&sys, PoissonSource::Equilibrium, 1.0)?;
    Ok(StateVector {
        psi: sol.psi,
        v_n: vec![0.0; scenario.mesh.n_cells()],
        v_p: vec![0.0; scenario.mesh.n_cells()],
        v_a: sol.v_a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuationParameter {
    Voltage,
    Generation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung {
    pub parameter: ContinuationParameter,
    pub value: f64,
}

/// Voltage first (uniform steps), then generation (decade steps from 1e-2).
pub fn standard_ladder(v_target: f64, g0_target: f64) -> Vec<Rung> {
    let mut ladder = Vec::new();
    if v_target != 0.0 {
        let steps = 9;
        for k in 1..=steps {
            ladder.push(Rung {
                parameter: ContinuationParameter::Voltage,
                value: v_target * k as f64 / steps as f64,
            });
        }
    }
    if g0_target > 0.0 {
        let mut g = 1e-2;
        while g < g0_target * (1.0 - 1e-12) {
            ladder.push(Rung { parameter: ContinuationParameter::Generation, value: g });
            g *= 10.0;
        }
        ladder.push(Rung { parameter: ContinuationParameter::Generation, value: g0_target });
    }
    ladder
}

#[derive(Debug, Error)]
#[error("continuation failed at rung {rung} ({parameter:?} = {value}): {source}")]
pub struct ContinuationError {
    pub rung: usize,
    pub parameter: ContinuationParameter,
    pub value: f64,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
    /// Reports of the rungs that did converge.
    pub completed: Vec<SolveReport>,
}

/// Solve along a parameter ladder, warm-starting each rung from the previous
/// converged state. The base state is the equilibrium solve.
pub fn continuation_solve(
    scenario: &DeviceScenario,
    ladder: &[Rung],
    cfg: &NewtonConfig,
) -> Result<Vec<SolveReport>, ContinuationError> {
    if ladder.is_empty() {
        return Ok(Vec::new());
    }
    let fail = |rung: usize,
                r: Rung,
                completed: Vec<SolveReport>,
                e: Box<dyn std::error::Error + Send + Sync>| ContinuationError {
        rung,
        parameter: r.parameter,
        value: r.value,
        source: e,
        completed,
    };

    let mut current = scenario.clone();
    current.applied_voltage = 0.0;
    current.generation.set_amplitude(0.0);
    let mut u = match equilibrium_state(&current) {
        Ok(u) => u,
        Err(e) => return Err(fail(0, ladder[0], Vec::new(), Box::new(e))),
    };

    let mut reports = Vec::with_capacity(ladder.len());
    for (i, rung) in ladder.iter().enumerate() {
        match rung.parameter {
            ContinuationParameter::Voltage => current.applied_voltage = rung.value,
            ContinuationParameter::Generation => current.generation.set_amplitude(rung.value),
        }
        let sys = match DiscreteSystem::new(&current) {
            Ok(s) => s,
            Err(e) => return Err(fail(i, *rung, reports, Box::new(e))),
        };
        match newton_solve(&sys, &u, cfg) {
            Ok(rep) => {
                u = rep.state.clone();
                reports.push(rep);
            }
            Err(e) => return Err(fail(i, *rung, reports, Box::new(e))),
        }
    }
    Ok(reports)
}
