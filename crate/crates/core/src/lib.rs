//! Valence-bond-solid spin-1 chains with general open boundaries: reduced
//! states, block entropy and two-spin entanglement.

pub mod block;
pub mod boundary;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod report;
pub mod two_site;

pub use boundary::{BoundaryConfig, Distance, Sign};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix};
