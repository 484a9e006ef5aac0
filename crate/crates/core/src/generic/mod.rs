//! Coupling of the quantum gradient flow to macroscopic variables: GENERIC systems,
//! isothermal damped Hamiltonian systems, and structural checks.

mod checks;
mod damped;
pub mod model;
pub mod scenarios;
mod slack;
mod state;
mod structure;
mod system;

pub use checks::{
    field_parts, jacobi_check, macro_structure, nic_check, onsager_symmetry, poisson_antisymmetry,
    random_cotangent, state_basis, NicReport,
};
pub use damped::DampedSystem;
pub use model::{CouplingMap, MacroCoupling, MacroDamped, MacroGeneric, ScalarFn, VectorFn};
pub use slack::{with_slack, SlackGeneric};
pub use state::CoupledState;
pub use structure::{DampedStructure, GenericStructure, PoissonStructure};
pub use system::{GenericSystem, InvariantReport};
