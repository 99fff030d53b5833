//! Device scenario: mesh, physics and boundary data for one simulation setup.

use crate::mesh::{BoundaryKind, FvMesh};
use crate::model::{
    GenerationProfile, RecombinationModel, SpeciesConfig, StatisticsError, StatisticsFunction,
};

/// Dirichlet data at one contact for the current applied voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletValues {
    pub psi: f64,
    pub v_n: f64,
    pub v_p: f64,
}

/// Per-contact boundary description. The applied voltage enters through
/// `voltage_factor`: psi^D = psi_builtin + factor * V, v_n^D = -factor * V,
/// v_p^D = factor * V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactData {
    /// Equilibrium (built-in) electric potential at the contact.
    pub psi_builtin: f64,
    /// Fraction of the applied voltage carried by this contact.
    pub voltage_factor: f64,
}

#[derive(Debug, Clone)]
pub struct DeviceScenario {
    pub name: String,
    pub mesh: FvMesh,
    /// Rescaled Debye length in the Poisson operator.
    pub lambda: f64,
    /// Doping value per region index.
    pub doping: Vec<f64>,
    pub stats_n: StatisticsFunction,
    pub stats_p: StatisticsFunction,
    pub recombination: RecombinationModel,
    pub generation: GenerationProfile,
    pub species: SpeciesConfig,
    /// One entry per Dirichlet tag of the mesh.
    pub contacts: Vec<ContactData>,
    pub applied_voltage: f64,
}

impl DeviceScenario {
    pub fn ions_active(&self) -> bool {
        self.species.z_a != 0
    }

    pub fn dirichlet_values(&self, tag: usize) -> DirichletValues {
        let c = &self.contacts[tag];
        let v = c.voltage_factor * self.applied_voltage;
        DirichletValues { psi: c.psi_builtin + v, v_n: -v, v_p: v }
    }

    pub fn doping_of_cell(&self, cell: usize) -> f64 {
        self.doping[self.mesh.cells[cell].region]
    }

    pub fn is_ion_cell(&self, cell: usize) -> bool {
        self.species.z_a != 0
            && self.species.ion_regions.contains(&self.mesh.cells[cell].region)
    }

    /// Measure of the ion region on this mesh.
    pub fn ion_region_measure(&self) -> f64 {
        self.mesh
            .cells
            .iter()
            .enumerate()
            .filter(|(i, _)| self.is_ion_cell(*i))
            .map(|(_, c)| c.volume)
            .sum()
    }

    /// Boundary carrier densities at a contact (for N^D).
    pub fn boundary_densities(&self, tag: usize) -> Result<(f64, f64), StatisticsError> {
        let d = self.dirichlet_values(tag);
        let n_n = self.stats_n.eval(d.v_n + d.psi)?;
        let n_p = self.stats_p.eval(d.v_p - d.psi)?;
        Ok((n_n, n_p))
    }

    /// max over contacts of the boundary densities.
    pub fn dirichlet_density_bound(&self) -> Result<f64, StatisticsError> {
        let mut nd: f64 = 0.0;
        for tag in 0..self.contacts.len() {
            let (n_n, n_p) = self.boundary_densities(tag)?;
            nd = nd.max(n_n).max(n_p);
        }
        Ok(nd)
    }

    /// Dirichlet tag pinning a cell, if its node lies on a contact.
    pub fn dirichlet_tag_of_cell(&self, cell: usize) -> Option<usize> {
        self.mesh.dirichlet_tag_of_cell(cell)
    }

    /// Ohmic-contact condition: the contact is a Dirichlet part whose closure
    /// does not meet any other Dirichlet part (no shared boundary nodes and a
    /// positive gap between face centers).
    pub fn contact_is_ohmic(&self, tag: usize) -> bool {
        let mine: Vec<&_> = self
            .mesh
            .boundary_faces
            .iter()
            .filter(|f| f.kind == BoundaryKind::Dirichlet(tag))
            .collect();
        if mine.is_empty() {
            return false;
        }
        for other in self.mesh.boundary_faces.iter() {
            match other.kind {
                BoundaryKind::Dirichlet(t) if t != tag => {
                    for f in &mine {
                        let dx = f.center[0] - other.center[0];
                        let dy = f.center[1] - other.center[1];
                        let gap = (dx * dx + dy * dy).sqrt();
                        if gap <= 0.5 * (f.area + other.area) {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }
}
