//! Mass-constrained nonlinear Poisson solve.
//!
//! Solves `-lambda^2 div grad psi = sigma (f + z_a F_a(v_a - z_a psi) 1_ion)`
//! with `psi = sigma psi^D` on the Dirichlet parts and the global constraint
//! `int_ion F_a(v_a - z_a psi) = M_a`. The discrete residual is the gradient
//! of a strictly convex functional (the field part is quadratic plus convex
//! cell terms, the constraint row is the v_a-derivative of the same
//! functional), so damped Newton with a residual-decrease line search
//! converges from any starting point.
//!
//! The carrier source is either a frozen density pair or, for the equilibrium
//! initialization, the state equation at zero quasi-Fermi potentials
//! (`n_n = F_n(psi)`, `n_p = F_p(-psi)`), which keeps the problem convex since
//! both statistics are increasing.

use thiserror::Error;

use super::system::DiscreteSystem;
use crate::linalg::{factor, LinSolveError, TripletList};
use crate::model::{StatisticsError, Z_N, Z_P};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoissonError {
    #[error("constrained Poisson solve did not converge (residual {residual_norm} after {iterations} iterations)")]
    NonConvergence { iterations: usize, residual_norm: f64 },
    #[error("linear solve failed: {0}")]
    Linear(#[from] LinSolveError),
    #[error("statistics evaluation failed: {0}")]
    Statistics(#[from] StatisticsError),
    #[error("sigma must lie in [0, 1], got {0}")]
    BadSigma(f64),
    #[error("frozen density arrays do not match the mesh")]
    Dimension,
    #[error("mass compatibility violated: M_a = {mass}, ion capacity = {capacity}")]
    MassIncompatible { mass: f64, capacity: f64 },
}

/// Carrier source seen by the Poisson equation.
#[derive(Debug, Clone, Copy)]
pub enum PoissonSource<'s> {
    /// Frozen density fields (n_n, n_p).
    Frozen { n_n: &'s [f64], n_p: &'s [f64] },
    /// Self-consistent densities at zero quasi-Fermi potentials.
    Equilibrium,
}

#[derive(Debug, Clone)]
pub struct PoissonSolution {
    pub psi: Vec<f64>,
    pub v_a: Option<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

pub fn solve_constrained_poisson(
    sys: &DiscreteSystem,
    source: PoissonSource,
    sigma: f64,
) -> Result<PoissonSolution, PoissonError> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(PoissonError::BadSigma(sigma));
    }
    let scn = sys.scenario;
    let mesh = &scn.mesh;
    let n = mesh.n_cells();
    if let PoissonSource::Frozen { n_n, n_p } = source {
        if n_n.len() != n || n_p.len() != n {
            return Err(PoissonError::Dimension);
        }
    }
    let ions = scn.ions_active();
    if ions {
        let capacity = scn
            .species
            .stats_a
            .saturation()
            .map(|s| s * sys.ion_measure())
            .unwrap_or(f64::INFINITY);
        let mass = scn.species.ion_mass;
        if mass.is_nan() || mass <= 0.0 || mass >= capacity {
            return Err(PoissonError::MassIncompatible { mass, capacity });
        }
    }
    let n_unknowns = n + usize::from(ions);
    let z_a = scn.species.z_a as f64;
    let lambda2 = scn.lambda * scn.lambda;

    // residual = gradient of the convex functional
    let residual = |x: &[f64]| -> Result<Vec<f64>, StatisticsError> {
        let mut r = vec![0.0; n_unknowns];
        let v_a = if ions { x[n] } else { 0.0 };
        let mut mass = 0.0;
        for k in 0..n {
            let vol = mesh.cells[k].volume;
            if let Some(tag) = sys.dirichlet_tag(k) {
                r[k] = x[k] - sigma * scn.dirichlet_values(tag).psi;
            } else {
                let mut f_k = sys.scenario.doping_of_cell(k);
                match source {
                    PoissonSource::Frozen { n_n, n_p } => f_k += n_p[k] - n_n[k],
                    PoissonSource::Equilibrium => {
                        f_k += scn.stats_p.eval(-Z_P * x[k])? - scn.stats_n.eval(-Z_N * x[k])?;
                    }
                }
                if sys.is_ion_cell(k) {
                    f_k += z_a * scn.species.stats_a.eval(v_a - z_a * x[k])?;
                }
                r[k] -= sigma * vol * f_k;
            }
            if ions && sys.is_ion_cell(k) {
                mass += vol * scn.species.stats_a.eval(v_a - z_a * x[k])?;
            }
        }
        for f in &mesh.faces {
            let (k, l) = f.cells;
            let w = lambda2 * f.transmissibility * (x[k] - x[l]);
            if sys.dirichlet_tag(k).is_none() {
                r[k] += w;
            }
            if sys.dirichlet_tag(l).is_none() {
                r[l] -= w;
            }
        }
        if ions {
            r[n] = (mass - scn.species.ion_mass) / sys.ion_measure();
        }
        Ok(r)
    };

    let jacobian = |x: &[f64]| -> Result<TripletList, StatisticsError> {
        let mut tr = TripletList::new(n_unknowns);
        let v_a = if ions { x[n] } else { 0.0 };
        for k in 0..n {
            let vol = mesh.cells[k].volume;
            let ion_deriv = if sys.is_ion_cell(k) {
                scn.species.stats_a.derivative(v_a - z_a * x[k])?
            } else {
                0.0
            };
            if sys.dirichlet_tag(k).is_some() {
                tr.push(k, k, 1.0);
            } else {
                let mut diag = 0.0;
                if let PoissonSource::Equilibrium = source {
                    diag += scn.stats_p.derivative(-Z_P * x[k])?
                        + scn.stats_n.derivative(-Z_N * x[k])?;
                }
                if sys.is_ion_cell(k) {
                    diag += z_a * z_a * ion_deriv;
                    tr.push(k, n, -sigma * vol * z_a * ion_deriv);
                }
                tr.push(k, k, sigma * vol * diag);
            }
            if ions && sys.is_ion_cell(k) {
                tr.push(n, k, -vol * z_a * ion_deriv / sys.ion_measure());
                tr.push(n, n, vol * ion_deriv / sys.ion_measure());
            }
        }
        for f in &mesh.faces {
            let (k, l) = f.cells;
            let w = lambda2 * f.transmissibility;
            if sys.dirichlet_tag(k).is_none() {
                tr.push(k, k, w);
                tr.push(k, l, -w);
            }
            if sys.dirichlet_tag(l).is_none() {
                tr.push(l, l, w);
                tr.push(l, k, -w);
            }
        }
        Ok(tr)
    };

    // start from the flat potential; v_a from the unshielded mass constraint
    let mut x = vec![0.0; n_unknowns];
    if ions {
        x[n] = scn
            .species
            .stats_a
            .inverse(scn.species.ion_mass / sys.ion_measure())
            .map_err(PoissonError::Statistics)?;
    }

    let mut r = residual(&x)?;
    let norm0 = inf_norm(&r).max(1.0);
    let tol = 1e-10 * norm0;
    let mass_tol = 1e-12 * if ions { scn.species.ion_mass } else { 1.0 };
    let max_iter = 200;

    for it in 0..max_iter {
        let norm = inf_norm(&r);
        let mass_ok =
            !ions || (r[n] * sys.ion_measure()).abs() <= mass_tol;
        if norm <= tol && mass_ok {
            return Ok(PoissonSolution {
                psi: x[..n].to_vec(),
                v_a: ions.then(|| x[n]),
                iterations: it,
                residual_norm: norm,
            });
        }

        let tr = jacobian(&x)?;
        let fac = factor(&tr.to_csr(), ions)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = fac.solve(&rhs)?;

        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha >= 1e-12 {
            let trial: Vec<f64> =
                x.iter().zip(&step).map(|(xi, si)| xi + alpha * si).collect();
            match residual(&trial) {
                Ok(rt) if inf_norm(&rt) < norm || norm <= tol => {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !accepted {
            return Err(PoissonError::NonConvergence { iterations: it, residual_norm: norm });
        }
    }
    let norm = inf_norm(&r);
    Err(PoissonError::NonConvergence { iterations: max_iter, residual_norm: norm })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}
