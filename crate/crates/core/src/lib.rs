//! Curvature of left-invariant metrics on Lie groups given by structure
//! constants, nilsolitons and their Einstein solvable extensions, and a
//! discrete solver for the modified Helmholtz decomposition on graphs.

pub mod beta;
pub mod curvature;
pub mod error;
pub mod extension;
pub mod helmholtz;
pub mod lie;
pub mod linalg;
pub mod metric;
pub mod rational;
pub mod soliton;

pub use error::{Error, Result};
pub use lie::{LieAlgebra, StructureTensor};
pub use metric::MetricTensor;
