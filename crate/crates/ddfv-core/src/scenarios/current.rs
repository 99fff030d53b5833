//! Outward contact current, evaluated two independent ways.
//!
//! `BoundaryFluxSum` balances each contact cell: the particle flux leaving
//! through the boundary equals the cell's volume source minus the interior
//! face fluxes, and the current weights the species by their charge numbers.
//!
//! `VolumeTestFunction` contracts the per-face charge flux with a discrete
//! harmonic test field u (1 on the contact, 0 on the other Dirichlet parts):
//! `I = -sum_f (j_p - j_n)_f (u_K - u_L)`. On a converged state the two agree
//! up to the nonlinear-solve residual, and the Cauchy-Schwarz bound
//! `|I| <= ||j||_T ||grad u||_T` gives a computable current bound.

use thiserror::Error;

use crate::fvm::{species_edge_flux, CellSpecies, DiscreteSystem, FvmError, StateVector};
use crate::linalg::{factor, LinSolveError, TripletList};
use crate::model::{Z_N, Z_P};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentMethod {
    BoundaryFluxSum,
    VolumeTestFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactCurrent {
    pub contact: usize,
    pub value: f64,
    pub method: CurrentMethod,
}

#[derive(Debug, Error)]
pub enum CurrentError {
    #[error("contact {0} is not ohmic (its closure meets another Dirichlet part)")]
    NotOhmic(usize),
    #[error("unknown contact tag {0}")]
    UnknownContact(usize),
    #[error("harmonic lift solve failed: {0}")]
    Linear(#[from] LinSolveError),
    #[error("assembly failed: {0}")]
    Fvm(#[from] FvmError),
}

/// Discrete harmonic test field: 1 on the given contact's cells, 0 on other
/// Dirichlet cells, discretely harmonic inside.
pub fn harmonic_lift(sys: &DiscreteSystem, contact: usize) -> Result<Vec<f64>, CurrentError> {
    let mesh = &sys.scenario.mesh;
    if contact >= sys.scenario.contacts.len() {
        return Err(CurrentError::UnknownContact(contact));
    }
    let n = mesh.n_cells();
    let mut tr = TripletList::new(n);
    let mut rhs = vec![0.0; n];
    for k in 0..n {
        if let Some(t) = sys.dirichlet_tag(k) {
            tr.push(k, k, 1.0);
            rhs[k] = if t == contact { 1.0 } else { 0.0 };
        }
    }
    for f in &mesh.faces {
        let (k, l) = f.cells;
        let t = f.transmissibility;
        if sys.dirichlet_tag(k).is_none() {
            tr.push(k, k, t);
            tr.push(k, l, -t);
        }
        if sys.dirichlet_tag(l).is_none() {
            tr.push(l, l, t);
            tr.push(l, k, -t);
        }
    }
    let fac = factor(&tr.to_csr(), false)?;
    Ok(fac.solve(&rhs)?)
}

/// Per-face charge flux j_p - j_n (electron and hole particle fluxes weighted
/// by their charges), aligned with `mesh.faces`.
fn face_charge_fluxes(sys: &DiscreteSystem, state: &StateVector) -> Result<Vec<f64>, FvmError> {
    let t = sys.density_table(state)?;
    let mesh = &sys.scenario.mesh;
    let mut fluxes = Vec::with_capacity(mesh.faces.len());
    for f in &mesh.faces {
        let (k, l) = f.cells;
        let cn = |k: usize| CellSpecies {
            psi: state.psi[k],
            v: state.v_n[k],
            n: t.n_n[k],
            dn: t.dn_n[k],
            mu_ex: t.mu_n[k],
        };
        let cp = |k: usize| CellSpecies {
            psi: state.psi[k],
            v: state.v_p[k],
            n: t.n_p[k],
            dn: t.dn_p[k],
            mu_ex: t.mu_p[k],
        };
        let jn = species_edge_flux(Z_N, &cn(k), &cn(l), f.transmissibility).value;
        let jp = species_edge_flux(Z_P, &cp(k), &cp(l), f.transmissibility).value;
        fluxes.push(Z_N * jn + Z_P * jp);
    }
    Ok(fluxes)
}

pub fn contact_current(
    sys: &DiscreteSystem,
    state: &StateVector,
    contact: usize,
    method: CurrentMethod,
) -> Result<ContactCurrent, CurrentError> {
    if contact >= sys.scenario.contacts.len() {
        return Err(CurrentError::UnknownContact(contact));
    }
    if !sys.scenario.contact_is_ohmic(contact) {
        return Err(CurrentError::NotOhmic(contact));
    }
    let value = match method {
        CurrentMethod::BoundaryFluxSum => {
            let b = sys.flux_balance(state)?;
            let mut total = 0.0;
            for k in 0..sys.n_cells() {
                if sys.dirichlet_tag(k) == Some(contact) {
                    let out_n = b.source[k] - b.div_n[k];
                    let out_p = b.source[k] - b.div_p[k];
                    total += Z_N * out_n + Z_P * out_p;
                }
            }
            total
        }
        CurrentMethod::VolumeTestFunction => {
            let lift = harmonic_lift(sys, contact)?;
            contact_current_with_lift(sys, state, contact, &lift)?
        }
    };
    Ok(ContactCurrent { contact, value, method })
}

/// Volume-test-function current with a precomputed lift (shared across scans).
pub fn contact_current_with_lift(
    sys: &DiscreteSystem,
    state: &StateVector,
    contact: usize,
    lift: &[f64],
) -> Result<f64, CurrentError> {
    if contact >= sys.scenario.contacts.len() {
        return Err(CurrentError::UnknownContact(contact));
    }
    if !sys.scenario.contact_is_ohmic(contact) {
        return Err(CurrentError::NotOhmic(contact));
    }
    let fluxes = face_charge_fluxes(sys, state)?;
    let mut total = 0.0;
    for (f, j) in sys.scenario.mesh.faces.iter().zip(&fluxes) {
        total -= j * (lift[f.cells.0] - lift[f.cells.1]);
    }
    Ok(total)
}

/// Discrete Cauchy-Schwarz bound `||j||_T ||grad u||_T` on the volume-form
/// current with the given test field.
pub fn discrete_current_bound(
    sys: &DiscreteSystem,
    state: &StateVector,
    lift: &[f64],
) -> Result<f64, CurrentError> {
    let fluxes = face_charge_fluxes(sys, state)?;
    let mut j2 = 0.0;
    let mut g2 = 0.0;
    for (f, j) in sys.scenario.mesh.faces.iter().zip(&fluxes) {
        let du = lift[f.cells.0] - lift[f.cells.1];
        j2 += j * j / f.transmissibility;
        g2 += f.transmissibility * du * du;
    }
    Ok(j2.sqrt() * g2.sqrt())
}
