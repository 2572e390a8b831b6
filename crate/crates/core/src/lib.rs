//! Hund-Mulliken simulator for a linear four-dot, four-electron device that
//! hosts two singlet-triplet qubits.

pub mod couplings;
pub mod device;
pub mod error;
pub mod fermion;
pub mod integrals;
pub mod manybody;
pub mod orbitals;
pub mod quadrature;
pub mod special;
pub mod spin_effective;
pub mod sweep;

pub use error::{Error, Result};
