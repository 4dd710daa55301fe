//! Error type shared by every module of the crate.

use crate::numerics::C64;
use thiserror::Error;

/// Failures surfaced by the numerical and model layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading polynomial coefficient is zero")]
    Degree,
    #[error("step size underflow at z = {z}")]
    Stiffness { z: f64 },
    #[error("non-finite field value at z = {z}")]
    Blowup { z: f64, y: Vec<C64> },
    #[error("step limit of {limit} reached at z = {z}")]
    StepLimit { z: f64, limit: usize },
    #[error("basis vectors are parallel")]
    RankDeficient,
    #[error("chart {chart} is unavailable for this point")]
    ChartUnavailable { chart: usize },
    #[error("model error: {0}")]
    Model(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("lambda = {lambda} is within {distance:e} of a branch point")]
    BranchPoint { lambda: C64, distance: f64 },
    #[error("invalid contour: {0}")]
    Contour(String),
    #[error("Evans function vanishes on the contour at lambda = {lambda} (|E| = {modulus:e})")]
    ZeroOnContour { lambda: C64, modulus: f64 },
    #[error("refinement depth exceeded on segment {segment} near lambda = {lambda}")]
    Refinement { segment: usize, lambda: C64 },
    #[error("lambda = {lambda} lies within the hyperbolicity tolerance of a dispersion curve")]
    Boundary { lambda: C64 },
    #[error("invalid parameters: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
