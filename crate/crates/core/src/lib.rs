//! Skin-effect diagnostics for the non-Hermitian Kitaev chain.
//!
//! The crate builds the Bogoliubov-de Gennes matrix of an open or periodic
//! chain with asymmetric hopping, p-wave pairing and an optional period-3
//! potential, then answers one question in several independent ways: do the
//! bulk eigenstates pile up at the boundaries?
//!
//! * [`symmetry`] checks whether the matrix commutes with a reflection combined
//!   with an internal Pauli factor, which rules the skin effect out.
//! * [`spectra`] diagonalizes the chain and measures where the states sit.
//! * [`nonbloch`] solves for the generalized Brillouin zone and the Zak phase.
//! * [`boundary`] evaluates the determinant condition of the open chain.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod model;
pub mod nonbloch;
pub mod output;
pub mod spectra;
pub mod symmetry;

pub use error::{Error, ErrorClass, Result};
pub use matrix::ComplexMatrix;
pub use model::{Boundary, ModelSpec};
