use super::{ks_asymptotic, ks_matrix, KsParams};
use crate::engine::{attraction_span, EvansFunction, EvansOptions, EvansValue};
use crate::error::{Error, Result};
use crate::numerics::{c64, eigen_decompose, CMatrix, EigenPairs, C64};
use crate::projective::{plucker_from_basis, track, ChartPoint, Space};
use crate::spectrum::{branch_points, End, SpectralProblem};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_10;

/// Two largest real parts at `−L` closer than this make the unstable plane ambiguous.
pub const LABEL_GAP_TOL: f64 = 1e-10;

/// Open set of λ where the Evans function is not evaluated: a rectangle
/// `re_min < Re λ < re_max`, `|Im λ| < im_max`, intersected with the annulus
/// `r_min < |λ| < r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionZone {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for ExclusionZone {
    fn default() -> Self {
        ExclusionZone { re_min: 0.0, re_max: 0.3, im_max: 4.0, r_min: 0.01, r_max: 4.0 }
    }
}

impl ExclusionZone {
    pub fn contains(&self, lambda: C64) -> bool {
        let r = lambda.norm();
        let slack = 1e-12;
        lambda.re > self.re_min + slack
            && lambda.re < self.re_max - slack
            && lambda.im.abs() < self.im_max - slack
            && r > self.r_min * (1.0 + 1e-9)
            && r < self.r_max * (1.0 - 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEvansDiagnostics {
    /// Unstable plane at `z = 0` in Plücker coordinates `[K₁₂ : K₁₃ : K₂₃]`.
    pub unstable: ChartPoint,
    /// Stable line at `z = 0` in `[p : q : r]`.
    pub stable: ChartPoint,
    pub z_span: (f64, f64),
    /// `(η₃, η₄)` when `q ≠ 0`.
    pub eta: Option<[C64; 2]>,
    /// `(κ₅, κ₆)` when `K₁₂ ≠ 0`.
    pub kappa: Option<[C64; 2]>,
    /// Spatial eigenvalues of the frozen matrices at both starting points.
    pub left_eigs: Vec<C64>,
    pub right_eigs: Vec<C64>,
}

/// Default truncation `L = 14 (δ/c) ln 10`, so that `e^{−cL/δ} = 1e-14`.
pub fn ks_truncation(params: &KsParams) -> f64 {
    14.0 * params.delta / params.c * LN_10
}

fn split_gap(e: &EigenPairs) -> f64 {
    e.values[1].re - e.values[2].re
}

/// `E₁₂q(λ) = η₄^s − κ₆^u − η₃^s κ₅^u` at `z = 0`, assembled from homogeneous
/// representatives so that any resident chart pair may be used.
pub fn ks_evans_e12q(
    params: &KsParams,
    lambda: C64,
    l: f64,
    opts: &EvansOptions,
) -> Result<(C64, KsEvansDiagnostics)> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("non-finite spectral parameter {lambda}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Parameter(format!("truncation must be positive, got {l}")));
    }
    let matrix = |z: f64| ks_matrix(params, lambda, z);
    let gap_left = split_gap(&eigen_decompose(&matrix(-l)));
    let gap_right = split_gap(&eigen_decompose(&matrix(l)));
    if gap_left < LABEL_GAP_TOL && !opts.at_branch_ok {
        return Err(Error::BranchPoint { lambda, distance: gap_left.max(0.0) });
    }
    let gap_mid = split_gap(&eigen_decompose(&matrix(0.0)));
    let reach = |g: f64| {
        let g = if gap_mid > 0.0 { g.min(gap_mid) } else { g };
        attraction_span(g, opts.attraction_efolds).min(l)
    };
    let z_left = -reach(gap_left);
    let z_right = reach(gap_right);

    let left = eigen_decompose(&matrix(z_left));
    let right = eigen_decompose(&matrix(z_right));
    if split_gap(&left) < LABEL_GAP_TOL && !opts.at_branch_ok {
        return Err(Error::BranchPoint { lambda, distance: split_gap(&left).max(0.0) });
    }
    let v = |e: &EigenPairs, i: usize| -> [C64; 3] { [e.vectors[i][0], e.vectors[i][1], e.vectors[i][2]] };
    let plane = plucker_from_basis(&v(&left, 0), &v(&left, 1))?;
    let start_u = ChartPoint::prefer_chart(Space::Gr23, 1, &plane.k)?;
    let start_s = ChartPoint::prefer_chart(Space::CP2, 2, &v(&right, 2))?;
    let ode = opts.ode_options();
    let unstable = track(|z| matrix(z).additive_compound(), start_u, z_left, 0.0, &ode)?;
    let stable = track(matrix, start_s, z_right, 0.0, &ode)?;
    let k = unstable.homogeneous();
    let s = stable.homogeneous();
    let det = s[0] * k[2] - s[1] * k[1] + s[2] * k[0];
    let value = det / (k[0] * s[1]);
    let zero = c64(0.0, 0.0);
    let diag = KsEvansDiagnostics {
        eta: (s[1] != zero).then(|| [s[0] / s[1], s[2] / s[1]]),
        kappa: (k[0] != zero).then(|| [-k[2] / k[0], k[1] / k[0]]),
        z_span: (z_left, z_right),
        left_eigs: left.values,
        right_eigs: right.values,
        unstable,
        stable,
    };
    Ok((value, diag))
}

/// Keller–Segel front with its Evans-function settings.
#[derive(Debug, Clone)]
pub struct Ks {
    pub params: KsParams,
    pub options: EvansOptions,
    /// Truncation of the real line to `[−L, L]`.
    pub truncation: f64,
    pub exclusion: Option<ExclusionZone>,
    branch: Vec<C64>,
}

impl Ks {
    pub fn new(params: KsParams) -> Self {
        let mut ks = Ks {
            params,
            options: EvansOptions::default(),
            truncation: ks_truncation(&params),
            exclusion: Some(ExclusionZone::default()),
            branch: Vec::new(),
        };
        let mut b = branch_points(&ks, End::Minus);
        b.extend(branch_points(&ks, End::Plus));
        ks.branch = b;
        ks
    }

    pub fn with_options(mut self, options: EvansOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_exclusion(mut self, exclusion: Option<ExclusionZone>) -> Self {
        self.exclusion = exclusion;
        self
    }

    pub fn with_truncation(mut self, l: f64) -> Self {
        self.truncation = l;
        self
    }

    pub fn evaluate_with_diagnostics(&self, lambda: C64) -> Result<(C64, KsEvansDiagnostics)> {
        if let Some(zone) = self.exclusion {
            if zone.contains(lambda) {
                return Err(Error::Domain(format!("lambda = {lambda} lies in the excluded absolute-spectrum zone")));
            }
        }
        ks_evans_e12q(&self.params, lambda, self.truncation, &self.options)
    }
}

impl SpectralProblem for Ks {
    fn name(&self) -> &str {
        "ks"
    }

    fn dimension(&self) -> usize {
        3
    }

    fn matrix(&self, z: f64, lambda: C64) -> CMatrix {
        ks_matrix(&self.params, lambda, z)
    }

    fn asymptotic(&self, lambda: C64, end: End) -> CMatrix {
        ks_asymptotic(&self.params, lambda, end)
    }

    fn unstable_dim(&self) -> usize {
        2
    }

    fn lambda_degree(&self) -> usize {
        2
    }

    fn reference_point(&self) -> C64 {
        let p = &self.params;
        c64(10.0 + p.c * p.c / p.delta + p.c * p.c / p.alpha, 0.0)
    }
}

impl EvansFunction for Ks {
    fn name(&self) -> &str {
        "E_12q"
    }

    fn evaluate(&self, lambda: C64) -> Result<EvansValue> {
        let (value, diag) = self.evaluate_with_diagnostics(lambda)?;
        let scale = 1.0 + diag.left_eigs.iter().chain(&diag.right_eigs).fold(0.0f64, |m, x| m.max(x.norm()));
        Ok(EvansValue::assemble(value, &diag.unstable, &diag.stable, &[1, 2], scale))
    }

    fn branch_points(&self) -> Vec<C64> {
        self.branch.clone()
    }
}
