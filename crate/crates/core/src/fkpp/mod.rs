//! Fisher–KPP fronts `u_t = δ u_xx + u(1 − u)`: wave construction, the
//! linearised first-order system, Riccati flows on ℂP¹, Evans functions and
//! the real crossing counter.

mod crossing;
mod evans;
mod wave;

pub use crossing::{fkpp_crossing_count, CrossingCount};
pub use evans::{fkpp_evans, fkpp_evans_eta, fkpp_evans_tau, FkppEvans, FkppEvansDiagnostics};
pub use wave::{fkpp_wave, FkppWave, WaveProfile, SHOOTING_EPSILON};

use crate::error::{Error, Result};
use crate::numerics::{c64, CMatrix, C64};
use crate::spectrum::{End, SpectralProblem};
use serde::{Deserialize, Serialize};

/// Branch points closer than this to `c² + 4δ(λ ∓ 1) = 0` are flagged.
pub const BRANCH_FLAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkppParams {
    pub delta: f64,
    pub c: f64,
}

impl FkppParams {
    pub fn new(delta: f64, c: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("wave speed c must be positive, got {c}")));
        }
        Ok(FkppParams { delta, c })
    }

    /// `c² ≥ 4δ`: the front is monotone.
    pub fn monotone(&self) -> bool {
        self.c * self.c >= 4.0 * self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiccatiChart {
    Eta,
    Tau,
}

fn end_shift(end: End) -> f64 {
    match end {
        End::Plus => -1.0,
        End::Minus => 1.0,
    }
}

/// Linearised matrix for a given wave value `û`.
pub fn fkpp_matrix_at(params: &FkppParams, u: f64, lambda: C64) -> CMatrix {
    let d = params.delta;
    CMatrix::from_rows(&[
        [c64(0.0, 0.0), c64(1.0, 0.0)],
        [(lambda - 1.0 + 2.0 * u) / d, c64(-params.c / d, 0.0)],
    ])
}

/// `A(z; λ)` along the wave; outside the profile span `û` is clamped to its end states.
pub fn fkpp_matrix(params: &FkppParams, wave: &FkppWave, z: f64, lambda: C64) -> CMatrix {
    fkpp_matrix_at(params, wave.u(z), lambda)
}

pub fn fkpp_asymptotic(params: &FkppParams, lambda: C64, end: End) -> CMatrix {
    let u = match end {
        End::Plus => 0.0,
        End::Minus => 1.0,
    };
    fkpp_matrix_at(params, u, lambda)
}

/// Spatial eigenvalues `(μ^u, μ^s)` from the closed form; `μ^u` takes the principal root.
pub fn fkpp_spatial_eigs(params: &FkppParams, lambda: C64, end: End) -> (C64, C64) {
    let (c, d) = (params.c, params.delta);
    let root = (c * c + 4.0 * d * (lambda + end_shift(end))).sqrt();
    ((-c + root) / (2.0 * d), (-c - root) / (2.0 * d))
}

/// Distance of `c² + 4δ(λ ∓ 1)` from zero; small values signal a branch point.
pub fn fkpp_branch_discriminant(params: &FkppParams, lambda: C64, end: End) -> f64 {
    let (c, d) = (params.c, params.delta);
    (c * c + 4.0 * d * (lambda + end_shift(end))).norm()
}

/// Branch points `±1 − c²/(4δ)`, plus end first.
pub fn fkpp_branch_points(params: &FkppParams) -> [C64; 2] {
    let b = params.c * params.c / (4.0 * params.delta);
    [c64(1.0 - b, 0.0), c64(-1.0 - b, 0.0)]
}

/// Riccati right-hand side in the η (`q/p`) or τ (`p/q`) chart.
pub fn fkpp_riccati_rhs(chart: RiccatiChart, value: C64, u: f64, lambda: C64, params: &FkppParams) -> C64 {
    let (c, d) = (params.c, params.delta);
    let a = (lambda - 1.0 + 2.0 * u) / d;
    match chart {
        RiccatiChart::Eta => a - (c / d) * value - value * value,
        RiccatiChart::Tau => 1.0 + (c / d) * value - a * value * value,
    }
}

/// The two dispersion points `−δk² ± 1 + ick`.
pub fn fkpp_dispersion(params: &FkppParams, k: f64) -> [C64; 2] {
    let base = c64(-params.delta * k * k, params.c * k);
    [base + 1.0, base - 1.0]
}

/// Right endpoints of the absolute-spectrum rays `(1 − c²/4δ, −1 − c²/4δ)`.
pub fn fkpp_absolute_spectrum(params: &FkppParams) -> (f64, f64) {
    let b = params.c * params.c / (4.0 * params.delta);
    (1.0 - b, -1.0 - b)
}

/// Rightmost edge of the continuous spectrum in an exponentially weighted space.
pub fn fkpp_weighted_edge(params: &FkppParams, nu: f64) -> (f64, bool) {
    let edge = 1.0 + params.c * nu + params.delta * nu * nu;
    (edge, edge < 1.0 && params.c * params.c > 4.0 * params.delta)
}

/// Weights `ν` for which the edge lies strictly left of the unweighted edge, when they exist.
pub fn fkpp_weight_interval(params: &FkppParams) -> Option<(f64, f64)> {
    let (c, d) = (params.c, params.delta);
    let disc = c * c - 4.0 * d;
    if disc <= 0.0 {
        return None;
    }
    Some(((-c - disc.sqrt()) / (2.0 * d), (-c + disc.sqrt()) / (2.0 * d)))
}

/// F-KPP front together with its linearisation.
#[derive(Debug, Clone)]
pub struct Fkpp {
    pub params: FkppParams,
    pub wave: FkppWave,
}

impl Fkpp {
    pub fn new(params: FkppParams, tail_tol: f64) -> Result<Self> {
        let wave = fkpp_wave(&params, tail_tol)?;
        Ok(Fkpp { params, wave })
    }
}

impl SpectralProblem for Fkpp {
    fn name(&self) -> &str {
        "fkpp"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn matrix(&self, z: f64, lambda: C64) -> CMatrix {
        fkpp_matrix(&self.params, &self.wave, z, lambda)
    }

    fn asymptotic(&self, lambda: C64, end: End) -> CMatrix {
        fkpp_asymptotic(&self.params, lambda, end)
    }

    fn unstable_dim(&self) -> usize {
        1
    }

    fn lambda_degree(&self) -> usize {
        1
    }

    fn reference_point(&self) -> C64 {
        c64(2.0 + self.params.c * self.params.c / self.params.delta, 0.0)
    }
}
