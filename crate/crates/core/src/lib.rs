//! Evans-function computations for travelling-wave stability via Riccati
//! flows on projective spaces and the Grassmannian Gr(2,3).

pub mod engine;
pub mod error;
pub mod fkpp;
pub mod ks;
pub mod numerics;
pub mod projective;
pub mod spectrum;

pub use error::{Error, Result};
pub use numerics::{c64, CMatrix, EigenPairs, Trajectory, C64};
