//! Discrete residual and Jacobian of the coupled stationary system.
//!
//! Unknown layout: `[psi_0, v_n_0, v_p_0, psi_1, ...]`, followed by one global
//! `v_a` when the ionic species is active. Rows mirror the unknowns:
//!
//! * Poisson row:     `lambda^2 sum_f T_f (psi_K - psi_L)
//!                      - vol_K (n_p - n_n + z_a n_a 1_ion + C)`
//! * continuity rows: `sum_f j_KL - vol_K (G - R)` per species
//! * mass row:        `(sum_ion vol F_a(v_a - z_a psi) - M_a) / |ion region|`
//!
//! Nodes on a Dirichlet part carry identity rows `u - u^D` instead. The mass
//! row is scaled by the ion-region measure so its magnitude is comparable to
//! the per-cell rows.

use thiserror::Error;

use super::flux::{species_edge_flux, CellSpecies};
use super::state::StateVector;
use crate::linalg::{SparseMatrix, TripletList};
use crate::model::{StatisticsError, Z_N, Z_P};
use crate::scenario::DeviceScenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FvmError {
    #[error("invalid {species} density at cell {cell}: {source}")]
    InvalidDensity { cell: usize, species: &'static str, source: StatisticsError },
    #[error("state dimension does not match the mesh")]
    Dimension,
    #[error("state must carry v_a exactly when the scenario has ions")]
    IonMismatch,
    #[error("scenario has no Dirichlet contact data for tag {0}")]
    MissingContact(usize),
}

/// Per-cell densities, statistics derivatives and excess potentials.
#[derive(Debug, Clone)]
pub struct DensityTable {
    pub n_n: Vec<f64>,
    pub dn_n: Vec<f64>,
    pub mu_n: Vec<f64>,
    pub n_p: Vec<f64>,
    pub dn_p: Vec<f64>,
    pub mu_p: Vec<f64>,
    /// Ion density and derivative; zero outside the ion region.
    pub n_a: Vec<f64>,
    pub dn_a: Vec<f64>,
}

/// Per-cell flux divergences and sources, used by the current postprocessor.
#[derive(Debug, Clone)]
pub struct FluxBalance {
    /// sum over faces of the electron particle flux out of each cell
    pub div_n: Vec<f64>,
    /// same for holes
    pub div_p: Vec<f64>,
    /// vol * (G - R) per cell
    pub source: Vec<f64>,
}

pub struct DiscreteSystem<'a> {
    pub scenario: &'a DeviceScenario,
    doping: Vec<f64>,
    generation: Vec<f64>,
    dirichlet: Vec<Option<usize>>,
    ion_cell: Vec<bool>,
    ion_measure: f64,
}

impl<'a> DiscreteSystem<'a> {
    pub fn new(scenario: &'a DeviceScenario) -> Result<Self, FvmError> {
        let mesh = &scenario.mesh;
        let n = mesh.n_cells();
        let mut dirichlet = vec![None; n];
        for f in &mesh.boundary_faces {
            if let crate::mesh::BoundaryKind::Dirichlet(t) = f.kind {
                if t >= scenario.contacts.len() {
                    return Err(FvmError::MissingContact(t));
                }
                dirichlet[f.cell] = Some(t);
            }
        }
        let ion_cell: Vec<bool> = (0..n).map(|k| scenario.is_ion_cell(k)).collect();
        let ion_measure = scenario.ion_region_measure();
        Ok(DiscreteSystem {
            scenario,
            doping: (0..n).map(|k| scenario.doping_of_cell(k)).collect(),
            generation: mesh.cells.iter().map(|c| scenario.generation.eval(c.center)).collect(),
            dirichlet,
            ion_cell,
            ion_measure,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.scenario.mesh.n_cells()
    }

    pub fn n_unknowns(&self) -> usize {
        3 * self.n_cells() + usize::from(self.scenario.ions_active())
    }

    pub fn dirichlet_tag(&self, cell: usize) -> Option<usize> {
        self.dirichlet[cell]
    }

    pub fn generation_at(&self, cell: usize) -> f64 {
        self.generation[cell]
    }

    pub fn is_ion_cell(&self, cell: usize) -> bool {
        self.ion_cell[cell]
    }

    pub fn ion_measure(&self) -> f64 {
        self.ion_measure
    }

    pub fn pack(&self, u: &StateVector) -> Vec<f64> {
        let n = self.n_cells();
        let mut x = Vec::with_capacity(self.n_unknowns());
        for k in 0..n {
            x.push(u.psi[k]);
            x.push(u.v_n[k]);
            x.push(u.v_p[k]);
        }
        if let Some(v_a) = u.v_a {
            x.push(v_a);
        }
        x
    }

    pub fn unpack(&self, x: &[f64]) -> StateVector {
        let n = self.n_cells();
        let mut u = StateVector {
            psi: Vec::with_capacity(n),
            v_n: Vec::with_capacity(n),
            v_p: Vec::with_capacity(n),
            v_a: None,
        };
        for k in 0..n {
            u.psi.push(x[3 * k]);
            u.v_n.push(x[3 * k + 1]);
            u.v_p.push(x[3 * k + 2]);
        }
        if self.scenario.ions_active() {
            u.v_a = Some(x[3 * n]);
        }
        u
    }

    fn check_shape(&self, u: &StateVector) -> Result<(), FvmError> {
        let n = self.n_cells();
        if u.psi.len() != n || u.v_n.len() != n || u.v_p.len() != n {
            return Err(FvmError::Dimension);
        }
        if u.v_a.is_some() != self.scenario.ions_active() {
            return Err(FvmError::IonMismatch);
        }
        Ok(())
    }

    /// Evaluate all cell densities; fails with the cell index on the first
    /// range violation. Success doubles as the density-validity check.
    pub fn density_table(&self, u: &StateVector) -> Result<DensityTable, FvmError> {
        self.check_shape(u)?;
        let scn = self.scenario;
        let n = self.n_cells();
        let mut t = DensityTable {
            n_n: vec![0.0; n],
            dn_n: vec![0.0; n],
            mu_n: vec![0.0; n],
            n_p: vec![0.0; n],
            dn_p: vec![0.0; n],
            mu_p: vec![0.0; n],
            n_a: vec![0.0; n],
            dn_a: vec![0.0; n],
        };
        for k in 0..n {
            let eta_n = u.v_n[k] - Z_N * u.psi[k];
            let eta_p = u.v_p[k] - Z_P * u.psi[k];
            let bad = |species, source| FvmError::InvalidDensity { cell: k, species, source };
            t.n_n[k] = scn.stats_n.eval(eta_n).map_err(|e| bad("electron", e))?;
            t.dn_n[k] = scn.stats_n.derivative(eta_n).map_err(|e| bad("electron", e))?;
            t.n_p[k] = scn.stats_p.eval(eta_p).map_err(|e| bad("hole", e))?;
            t.dn_p[k] = scn.stats_p.derivative(eta_p).map_err(|e| bad("hole", e))?;
            if t.n_n[k] <= 0.0 || !t.n_n[k].is_finite() {
                return Err(bad("electron", StatisticsError::NonFinite));
            }
            if t.n_p[k] <= 0.0 || !t.n_p[k].is_finite() {
                return Err(bad("hole", StatisticsError::NonFinite));
            }
            t.mu_n[k] = scn.stats_n.excess_potential(t.n_n[k], eta_n);
            t.mu_p[k] = scn.stats_p.excess_potential(t.n_p[k], eta_p);
            if self.ion_cell[k] {
                let z_a = scn.species.z_a as f64;
                let eta_a = u.v_a.unwrap() - z_a * u.psi[k];
                t.n_a[k] = scn.species.stats_a.eval(eta_a).map_err(|e| bad("ion", e))?;
                t.dn_a[k] = scn.species.stats_a.derivative(eta_a).map_err(|e| bad("ion", e))?;
                if t.n_a[k] <= 0.0 || !t.n_a[k].is_finite() {
                    return Err(bad("ion", StatisticsError::NonFinite));
                }
            }
        }
        Ok(t)
    }

    pub fn assemble_residual(&self, u: &StateVector) -> Result<Vec<f64>, FvmError> {
        let t = self.density_table(u)?;
        Ok(self.assemble_inner(u, &t, None))
    }

    pub fn assemble_system(&self, u: &StateVector) -> Result<(Vec<f64>, SparseMatrix), FvmError> {
        let t = self.density_table(u)?;
        let mut trip = TripletList::new(self.n_unknowns());
        let r = self.assemble_inner(u, &t, Some(&mut trip));
        Ok((r, trip.to_csr()))
    }

    /// Per-cell face-flux sums and volume sources for a given state.
    pub fn flux_balance(&self, u: &StateVector) -> Result<FluxBalance, FvmError> {
        let t = self.density_table(u)?;
        let n = self.n_cells();
        let mut b = FluxBalance { div_n: vec![0.0; n], div_p: vec![0.0; n], source: vec![0.0; n] };
        for k in 0..n {
            let vol = self.scenario.mesh.cells[k].volume;
            let s = (u.v_n[k] - Z_N * u.psi[k]) + (u.v_p[k] - Z_P * u.psi[k]);
            let r = self.scenario.recombination.recombination_at(t.n_n[k], t.n_p[k], s);
            b.source[k] = vol * (self.generation[k] - r);
        }
        for f in &self.scenario.mesh.faces {
            let (k, l) = f.cells;
            let jn = species_edge_flux(
                Z_N,
                &self.cell_species_n(u, &t, k),
                &self.cell_species_n(u, &t, l),
                f.transmissibility,
            );
            let jp = species_edge_flux(
                Z_P,
                &self.cell_species_p(u, &t, k),
                &self.cell_species_p(u, &t, l),
                f.transmissibility,
            );
            b.div_n[k] += jn.value;
            b.div_n[l] -= jn.value;
            b.div_p[k] += jp.value;
            b.div_p[l] -= jp.value;
        }
        Ok(b)
    }

    fn cell_species_n(&self, u: &StateVector, t: &DensityTable, k: usize) -> CellSpecies {
        CellSpecies { psi: u.psi[k], v: u.v_n[k], n: t.n_n[k], dn: t.dn_n[k], mu_ex: t.mu_n[k] }
    }

    fn cell_species_p(&self, u: &StateVector, t: &DensityTable, k: usize) -> CellSpecies {
        CellSpecies { psi: u.psi[k], v: u.v_p[k], n: t.n_p[k], dn: t.dn_p[k], mu_ex: t.mu_p[k] }
    }

    fn assemble_inner(
        &self,
        u: &StateVector,
        t: &DensityTable,
        mut jac: Option<&mut TripletList>,
    ) -> Vec<f64> {
        let scn = self.scenario;
        let mesh = &scn.mesh;
        let n = self.n_cells();
        let lambda2 = scn.lambda * scn.lambda;
        let z_a = scn.species.z_a as f64;
        let ions = scn.ions_active();
        let i_psi = |k: usize| 3 * k;
        let i_vn = |k: usize| 3 * k + 1;
        let i_vp = |k: usize| 3 * k + 2;
        let i_va = 3 * n;

        let mut r = vec![0.0; self.n_unknowns()];

        // cell terms
        for k in 0..n {
            let vol = mesh.cells[k].volume;
            if let Some(tag) = self.dirichlet[k] {
                let d = scn.dirichlet_values(tag);
                r[i_psi(k)] = u.psi[k] - d.psi;
                r[i_vn(k)] = u.v_n[k] - d.v_n;
                r[i_vp(k)] = u.v_p[k] - d.v_p;
                if let Some(tr) = jac.as_deref_mut() {
                    tr.push(i_psi(k), i_psi(k), 1.0);
                    tr.push(i_vn(k), i_vn(k), 1.0);
                    tr.push(i_vp(k), i_vp(k), 1.0);
                }
            } else {
                // Poisson source
                let mut rhs = t.n_p[k] - t.n_n[k] + self.doping[k];
                if self.ion_cell[k] {
                    rhs += z_a * t.n_a[k];
                }
                r[i_psi(k)] -= vol * rhs;

                // continuity sources; s = eta_n + eta_p drives the R exponent
                let s = (u.v_n[k] - Z_N * u.psi[k]) + (u.v_p[k] - Z_P * u.psi[k]);
                let (rec, d_rec_eta_n, d_rec_eta_p) = scn
                    .recombination
                    .recombination_with_derivatives(t.n_n[k], t.dn_n[k], t.n_p[k], t.dn_p[k], s);
                let g = self.generation[k];
                r[i_vn(k)] -= vol * (g - rec);
                r[i_vp(k)] -= vol * (g - rec);

                if let Some(tr) = jac.as_deref_mut() {
                    // Poisson row: -vol d(rhs)/du
                    let mut d_psi = vol * (t.dn_p[k] + t.dn_n[k]);
                    if self.ion_cell[k] {
                        d_psi += vol * z_a * z_a * t.dn_a[k];
                        tr.push(i_psi(k), i_va, -vol * z_a * t.dn_a[k]);
                    }
                    tr.push(i_psi(k), i_psi(k), d_psi);
                    tr.push(i_psi(k), i_vn(k), vol * t.dn_n[k]);
                    tr.push(i_psi(k), i_vp(k), -vol * t.dn_p[k]);

                    // continuity rows: +vol dR/du; d eta_n/d psi = 1, d eta_p/d psi = -1
                    let d_rec_psi = d_rec_eta_n - d_rec_eta_p;
                    for row in [i_vn(k), i_vp(k)] {
                        tr.push(row, i_psi(k), vol * d_rec_psi);
                        tr.push(row, i_vn(k), vol * d_rec_eta_n);
                        tr.push(row, i_vp(k), vol * d_rec_eta_p);
                    }
                }
            }
        }

        // mass-constraint row
        if ions {
            let mut mass = 0.0;
            for k in 0..n {
                if self.ion_cell[k] {
                    let vol = mesh.cells[k].volume;
                    mass += vol * t.n_a[k];
                    if let Some(tr) = jac.as_deref_mut() {
                        tr.push(i_va, i_psi(k), -vol * z_a * t.dn_a[k] / self.ion_measure);
                    }
                }
            }
            r[i_va] = (mass - scn.species.ion_mass) / self.ion_measure;
            if let Some(tr) = jac.as_deref_mut() {
                let d_va: f64 = (0..n)
                    .filter(|&k| self.ion_cell[k])
                    .map(|k| mesh.cells[k].volume * t.dn_a[k])
                    .sum();
                tr.push(i_va, i_va, d_va / self.ion_measure);
            }
        }

        // face terms
        for f in &mesh.faces {
            let (k, l) = f.cells;
            let dir_k = self.dirichlet[k].is_some();
            let dir_l = self.dirichlet[l].is_some();

            // Poisson stiffness
            let dpsi = u.psi[k] - u.psi[l];
            let w = lambda2 * f.transmissibility;
            if !dir_k {
                r[i_psi(k)] += w * dpsi;
                if let Some(tr) = jac.as_deref_mut() {
                    tr.push(i_psi(k), i_psi(k), w);
                    tr.push(i_psi(k), i_psi(l), -w);
                }
            }
            if !dir_l {
                r[i_psi(l)] -= w * dpsi;
                if let Some(tr) = jac.as_deref_mut() {
                    tr.push(i_psi(l), i_psi(l), w);
                    tr.push(i_psi(l), i_psi(k), -w);
                }
            }

            // species fluxes
            for species in 0..2usize {
                let electrons = species == 0;
                let z = if electrons { Z_N } else { Z_P };
                let (ck, cl) = if electrons {
                    (self.cell_species_n(u, t, k), self.cell_species_n(u, t, l))
                } else {
                    (self.cell_species_p(u, t, k), self.cell_species_p(u, t, l))
                };
                let (row_k, row_l) = if electrons {
                    (i_vn(k), i_vn(l))
                } else {
                    (i_vp(k), i_vp(l))
                };
                let flux = species_edge_flux(z, &ck, &cl, f.transmissibility);
                if !dir_k {
                    r[row_k] += flux.value;
                    if let Some(tr) = jac.as_deref_mut() {
                        tr.push(row_k, i_psi(k), flux.d_psi_k);
                        tr.push(row_k, row_k, flux.d_v_k);
                        tr.push(row_k, i_psi(l), flux.d_psi_l);
                        tr.push(row_k, row_l, flux.d_v_l);
                    }
                }
                if !dir_l {
                    r[row_l] -= flux.value;
                    if let Some(tr) = jac.as_deref_mut() {
                        tr.push(row_l, i_psi(k), -flux.d_psi_k);
                        tr.push(row_l, row_k, -flux.d_v_k);
                        tr.push(row_l, i_psi(l), -flux.d_psi_l);
                        tr.push(row_l, row_l, -flux.d_v_l);
                    }
                }
            }
        }

        r
    }
}
