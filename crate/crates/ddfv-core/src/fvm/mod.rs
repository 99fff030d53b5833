//! Finite-volume discretization of the coupled stationary system.

pub mod flux;
mod poisson;
mod state;
mod system;

pub use flux::{bernoulli, bernoulli_derivative, species_edge_flux, CellSpecies, EdgeFlux};
pub use poisson::{solve_constrained_poisson, PoissonError, PoissonSolution, PoissonSource};
pub use state::StateVector;
pub use system::{DensityTable, DiscreteSystem, FluxBalance, FvmError};
