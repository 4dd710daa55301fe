use super::{
    fkpp_branch_discriminant, fkpp_branch_points, fkpp_matrix_at, Fkpp, FkppParams, FkppWave, BRANCH_FLAG_TOL,
};
use crate::engine::{attraction_span, EvansFunction, EvansOptions, EvansValue};
use crate::error::{Error, Result};
use crate::numerics::{c64, C64};
use crate::projective::{track, ChartPoint, Space};
use crate::spectrum::End;
use serde::{Deserialize, Serialize};

/// Objects at the matching point together with integration bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkppEvansDiagnostics {
    pub unstable: ChartPoint,
    pub stable: ChartPoint,
    /// Left and right starting points of the two integrations.
    pub z_span: (f64, f64),
    pub eta_u: C64,
    pub eta_s: C64,
}

/// Frozen spatial eigenvalues at wave value `u`, principal root first.
fn frozen_eigs(params: &FkppParams, u: f64, lambda: C64) -> (C64, C64) {
    let (c, d) = (params.c, params.delta);
    let root = (c * c + 4.0 * d * (lambda - 1.0 + 2.0 * u)).sqrt();
    ((-c + root) / (2.0 * d), (-c - root) / (2.0 * d))
}

/// `E_η(λ) = η^s(0) − η^u(0)` assembled from homogeneous representatives.
pub fn fkpp_evans_eta(
    params: &FkppParams,
    wave: &FkppWave,
    lambda: C64,
    opts: &EvansOptions,
) -> Result<(C64, FkppEvansDiagnostics)> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("non-finite spectral parameter {lambda}")));
    }
    for end in [End::Plus, End::Minus] {
        let disc = fkpp_branch_discriminant(params, lambda, end);
        if disc < BRANCH_FLAG_TOL && !opts.at_branch_ok {
            return Err(Error::BranchPoint { lambda, distance: disc / (4.0 * params.delta) });
        }
    }
    let d = params.delta;
    // slowest attraction occurs where û = 0
    let gap = (params.c * params.c + 4.0 * d * (lambda - 1.0)).sqrt().re / d;
    let reach = attraction_span(gap, opts.attraction_efolds);
    let z_left = -wave.l_minus().min(reach);
    let z_right = wave.l_plus().min(reach);

    let matrix = |z: f64| fkpp_matrix_at(params, wave.u(z), lambda);
    let (mu_u, _) = frozen_eigs(params, wave.u(z_left), lambda);
    let (_, mu_s) = frozen_eigs(params, wave.u(z_right), lambda);
    let one = c64(1.0, 0.0);
    let start_u = ChartPoint::prefer_chart(Space::CP1, 1, &[one, mu_u])?;
    let start_s = ChartPoint::prefer_chart(Space::CP1, 1, &[one, mu_s])?;
    let ode = opts.ode_options();
    let unstable = track(matrix, start_u, z_left, 0.0, &ode)?;
    let stable = track(matrix, start_s, z_right, 0.0, &ode)?;
    let u = unstable.homogeneous();
    let s = stable.homogeneous();
    let value = (u[0] * s[1] - u[1] * s[0]) / (u[0] * s[0]);
    let diag = FkppEvansDiagnostics {
        z_span: (z_left, z_right),
        eta_u: u[1] / u[0],
        eta_s: s[1] / s[0],
        unstable,
        stable,
    };
    Ok((value, diag))
}

/// `E_τ = τ^u(0) − τ^s(0) = E_η / (η^u η^s)`.
pub fn fkpp_evans_tau(params: &FkppParams, wave: &FkppWave, lambda: C64, opts: &EvansOptions) -> Result<C64> {
    let (e, diag) = fkpp_evans_eta(params, wave, lambda, opts)?;
    Ok(e / (diag.eta_u * diag.eta_s))
}

/// Evans function evaluator for the F-KPP front.
#[derive(Debug, Clone)]
pub struct FkppEvans {
    pub problem: Fkpp,
    pub options: EvansOptions,
}

impl FkppEvans {
    pub fn new(problem: Fkpp, options: EvansOptions) -> Self {
        FkppEvans { problem, options }
    }
}

/// Convenience wrapper returning only the value.
pub fn fkpp_evans(problem: &Fkpp, lambda: C64, opts: &EvansOptions) -> Result<C64> {
    fkpp_evans_eta(&problem.params, &problem.wave, lambda, opts).map(|(e, _)| e)
}

impl EvansFunction for FkppEvans {
    fn name(&self) -> &str {
        "E_eta"
    }

    fn evaluate(&self, lambda: C64) -> Result<EvansValue> {
        let p = &self.problem;
        let (value, diag) = fkpp_evans_eta(&p.params, &p.wave, lambda, &self.options)?;
        let (mu_u, mu_s) = super::fkpp_spatial_eigs(&p.params, lambda, End::Plus);
        let scale = 1.0 + mu_u.norm().max(mu_s.norm());
        Ok(EvansValue::assemble(value, &diag.unstable, &diag.stable, &[1, 1], scale))
    }

    fn branch_points(&self) -> Vec<C64> {
        fkpp_branch_points(&self.problem.params).to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(c: f64) -> Fkpp {
        Fkpp::new(FkppParams::new(1.0, c).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn bounded_away_from_zero_right_of_spectrum() {
        let p = problem(2.4);
        let e = fkpp_evans(&p, c64(2.0, 0.0), &EvansOptions::default()).unwrap();
        assert!(e.norm() > 0.5, "E(2) = {e}");
        assert!(e.im.abs() < 1e-10);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = problem(2.4);
        let o = EvansOptions::default();
        let a = fkpp_evans(&p, c64(1.0, 1.0), &o).unwrap();
        let b = fkpp_evans(&p, c64(1.0, -1.0), &o).unwrap();
        assert!((a - b.conj()).norm() < 1e-8 * a.norm());
    }

    #[test]
    fn branch_point_is_rejected_unless_allowed() {
        let p = problem(2.4);
        let lb = fkpp_branch_points(&p.params)[0];
        let r = fkpp_evans(&p, lb, &EvansOptions::default());
        assert!(matches!(r, Err(Error::BranchPoint { .. })));
        let o = EvansOptions { at_branch_ok: true, ..Default::default() };
        assert!(fkpp_evans(&p, lb, &o).is_ok());
    }

    #[test]
    fn tau_chart_relation() {
        let p = problem(3.0);
        let o = EvansOptions::default();
        let lam = c64(0.7, 2.0);
        let (e, d) = fkpp_evans_eta(&p.params, &p.wave, lam, &o).unwrap();
        let t = fkpp_evans_tau(&p.params, &p.wave, lam, &o).unwrap();
        let direct = 1.0 / d.eta_u - 1.0 / d.eta_s;
        assert!((t - direct).norm() < 1e-10 * (1.0 + t.norm()));
        assert!((e - (d.eta_s - d.eta_u)).norm() < 1e-10 * (1.0 + e.norm()));
    }
}
