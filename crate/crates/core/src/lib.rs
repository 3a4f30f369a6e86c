//! Driven emitter chains coupled to a (possibly chiral) waveguide, with the
//! field in an n-photon Fock state.

pub mod entanglement;
pub mod error;
pub mod hierarchy;
pub mod integrator;
pub mod liouvillian;
pub mod observables;
pub mod pulse;
pub mod qubit_algebra;
pub mod scenario;

pub use error::{Error, Result};
