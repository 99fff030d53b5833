//! Stationary drift-diffusion device simulator on finite-volume meshes.
//!
//! Solves the coupled continuity/Poisson system for electrons, holes and an
//! optional immobile ionic species in quasi-Fermi-potential variables, with
//! general monotone carrier statistics (Boltzmann, Fermi-Dirac 1/2, Blakemore),
//! photogeneration, a damped Newton solver with parameter continuation, and
//! runtime verification of explicit a-priori solution bounds.

// banded factorization and assembly kernels index in LAPACK style
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod fvm;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod newton;
pub mod scenario;
pub mod scenarios;

pub use mesh::FvMesh;
pub use model::{GenerationProfile, RecombinationModel, StatisticsFunction};
pub use scenario::DeviceScenario;
