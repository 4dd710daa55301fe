use super::{fkpp_matrix_at, fkpp_riccati_rhs, fkpp_spatial_eigs, FkppParams, FkppWave, RiccatiChart};
use crate::error::{Error, Result};
use crate::numerics::{c64, OdeOptions, Stepper, C64};
use crate::projective::chart_rhs;
use crate::spectrum::End;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TANGENCY_TOL: f64 = 1e-10;

/// Crossings of the real unstable line through the stable eigenline at +∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingCount {
    pub lambda: f64,
    pub n: usize,
    /// Positions of the detected crossings.
    pub crossings: Vec<f64>,
    /// Set when a crossing is (numerically) tangential.
    pub degenerate: bool,
}

fn angle_mod_pi(p: f64, q: f64) -> f64 {
    q.atan2(p).rem_euclid(PI)
}

/// Counts how often the real line `ℓ(z)` launched from `μ₋^u(λ)` crosses the
/// eigenline of `μ₊^s(λ)` on `RP¹`, tracking the lifted angle so that passes
/// through `ℓ = ∞` are handled by switching between the η and τ charts.
pub fn fkpp_crossing_count(params: &FkppParams, wave: &FkppWave, lambda: f64, opts: &OdeOptions) -> Result<CrossingCount> {
    if !params.monotone() {
        return Err(Error::Domain(format!(
            "crossing count needs c >= 2 sqrt(delta); got c = {}, delta = {}",
            params.c, params.delta
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("crossing count needs real lambda >= 0, got {lambda}")));
    }
    let lam = c64(lambda, 0.0);
    let (mu_minus_u, _) = fkpp_spatial_eigs(params, lam, End::Minus);
    let (_, mu_plus_s) = fkpp_spatial_eigs(params, lam, End::Plus);
    let target = angle_mod_pi(1.0, mu_plus_s.re);
    let (z0, z1) = (-wave.l_minus(), wave.l_plus());

    let mut z = z0;
    let mut chart = 1usize;
    let mut a = [mu_minus_u, c64(0.0, 0.0)];
    let mut phi = angle_mod_pi(1.0, a[0].re);
    // lifted angle measured from the target line
    let mut lifted = phi - target;
    if lifted > PI / 2.0 {
        lifted -= PI;
    }
    let mut count = CrossingCount { lambda, n: 0, crossings: Vec::new(), degenerate: false };
    let mut hint = f64::INFINITY;
    let ode = OdeOptions { max_step: 0.5, ..*opts };
    while z < z1 {
        let ch = chart;
        let rhs = |s: f64, y: &[C64; 2]| chart_rhs(&fkpp_matrix_at(params, wave.u(s), lam), ch, y);
        let mut st = Stepper::new(rhs, z, a, z1, ode)?.with_initial_step(hint);
        loop {
            let done = st.step()?;
            let (p, q) = if chart == 1 { (1.0, st.y[0].re) } else { (st.y[0].re, 1.0) };
            let next = angle_mod_pi(p, q);
            let mut delta = next - phi;
            if delta > PI / 2.0 {
                delta -= PI;
            } else if delta < -PI / 2.0 {
                delta += PI;
            }
            let before = (lifted / PI).floor();
            lifted += delta;
            let after = (lifted / PI).floor();
            if before != after {
                // locate by linear interpolation in angle
                let frac = ((before.max(after)) * PI - (lifted - delta)) / delta;
                let zc = st.z - (1.0 - frac.clamp(0.0, 1.0)) * (st.z - z);
                let slope = fkpp_riccati_rhs(RiccatiChart::Eta, mu_plus_s, wave.u(zc), lam, params);
                if slope.norm() < TANGENCY_TOL {
                    count.degenerate = true;
                }
                count.n += (after - before).abs() as usize;
                count.crossings.push(zc);
            }
            phi = next;
            z = st.z;
            a = st.y;
            if done {
                return Ok(count);
            }
            if a[0].norm() > 1.0 {
                // swap η ↔ τ
                a[0] = 1.0 / a[0];
                chart = 3 - chart;
                hint = st.step_size();
                break;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fkpp::fkpp_wave;

    #[test]
    fn no_crossings_for_monotone_front() {
        let params = FkppParams::new(1.0, 3.0).unwrap();
        let wave = fkpp_wave(&params, 1e-10).unwrap();
        for lam in [0.0, 1.0, 25.0] {
            let c = fkpp_crossing_count(&params, &wave, lam, &OdeOptions::default()).unwrap();
            assert_eq!(c.n, 0, "lambda = {lam}");
            assert!(!c.degenerate);
        }
    }

    #[test]
    fn preconditions() {
        let params = FkppParams::new(1.0, 1.8).unwrap();
        let wave = fkpp_wave(&params, 1e-10).unwrap();
        assert!(fkpp_crossing_count(&params, &wave, 0.0, &OdeOptions::default()).is_err());
        let params = FkppParams::new(1.0, 3.0).unwrap();
        let wave = fkpp_wave(&params, 1e-10).unwrap();
        assert!(fkpp_crossing_count(&params, &wave, -1.0, &OdeOptions::default()).is_err());
    }
}
