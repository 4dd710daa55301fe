//! Keller–Segel fronts without cell diffusion of the nutrient: closed-form
//! wave, the 3×3 linearisation, dispersion relations, Riccati flows on ℂP²
//! and Gr(2,3), and the Evans function `E₁₂q`.

mod evans;

pub use evans::{ks_evans_e12q, ks_truncation, ExclusionZone, Ks, KsEvansDiagnostics, LABEL_GAP_TOL};

use crate::error::{Error, Result};
use crate::numerics::{c64, CMatrix, C64};
use crate::projective::chart_rhs;
use crate::spectrum::End;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub delta: f64,
}

impl KsParams {
    pub fn new(alpha: f64, beta: f64, c: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("c", c), ("delta", delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if delta >= beta {
            return Err(Error::Parameter(format!("need delta < beta, got delta = {delta}, beta = {beta}")));
        }
        Ok(KsParams { alpha, beta, c, delta })
    }

    /// `(α, β, c, δ) = (1, 2, 2, 1)`.
    pub fn preset() -> Self {
        KsParams { alpha: 1.0, beta: 2.0, c: 2.0, delta: 1.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.delta / (self.beta - self.delta)
    }

    pub fn sigma(&self) -> f64 {
        self.alpha * (self.beta - self.delta) / (self.c * self.c)
    }

    /// Limit of `w̄/ū` as `z → −∞`.
    pub fn ratio_minus(&self) -> f64 {
        1.0 / self.sigma()
    }
}

/// Wave quantities at one point; `ratio = w̄/ū` stays accurate where both underflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsWaveEval {
    pub u: f64,
    pub w: f64,
    pub du: f64,
    pub dw: f64,
    pub ddu: f64,
    pub ratio: f64,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Closed-form front with `u_r = 1`, `z* = 0`.
pub fn ks_wave_eval(params: &KsParams, z: f64) -> KsWaveEval {
    let KsParams { alpha, beta, c, delta } = *params;
    let t = -c * z / delta;
    let sp = softplus(params.sigma().ln() + t);
    let ln_u = -params.gamma() * sp;
    let ratio = (t - sp).exp();
    let u = ln_u.exp();
    let w = (t + beta / delta * ln_u).exp();
    let dw = w * (-c / delta + alpha * beta / (c * delta) * ratio);
    KsWaveEval { u, w, du: alpha / c * w, dw, ddu: alpha / c * dw, ratio }
}

/// `(𝒜, ℬ, 𝒞)` at `z`.
pub fn ks_coefficients(params: &KsParams, lambda: C64, z: f64) -> (C64, C64, C64) {
    let r = ks_wave_eval(params, z).ratio;
    coefficients_from_ratio(params, lambda, r)
}

fn coefficients_from_ratio(params: &KsParams, lambda: C64, r: f64) -> (C64, C64, C64) {
    let KsParams { alpha, beta, c, delta } = *params;
    // u'/u, w'/u, u''/u
    let p = alpha / c * r;
    let q = r * (-c / delta + alpha * beta / (c * delta) * r);
    let s = alpha / c * q;
    let a2 = beta * r / (c * c * delta);
    let a1 = beta * q / (c * delta) - 2.0 * beta * r * p / (c * delta);
    let a0 = 2.0 * beta * r * p * p / delta - beta * r * s / delta - beta * p * q / delta;
    let b1 = alpha * beta * r / (c * c * delta) + 1.0 / delta;
    let b0 = alpha * beta * q / (c * delta) - 2.0 * alpha * beta * r * p / (c * delta) + beta * s / delta
        - beta * p * p / delta;
    let cc = -c / delta + alpha * beta * r / (c * delta) + beta * p / delta;
    (lambda * lambda * a2 + lambda * a1 + a0, lambda * b1 + b0, c64(cc, 0.0))
}

/// Closed-form limits `(𝒜±, ℬ±, 𝒞±)`.
pub fn ks_asymptotic_coefficients(params: &KsParams, lambda: C64, end: End) -> (C64, C64, C64) {
    let KsParams { alpha, beta, c, delta } = *params;
    match end {
        End::Plus => (c64(0.0, 0.0), lambda / delta, c64(-c / delta, 0.0)),
        End::Minus => {
            let bd = beta - delta;
            let a = lambda * lambda * (beta / (alpha * delta * bd)) - lambda * (beta * c * c / (alpha * delta * bd * bd));
            let b = lambda * ((2.0 * beta - delta) / (delta * bd)) - c * c * beta / (delta * bd * bd);
            (a, b, c64(c * (beta + delta) / (delta * bd), 0.0))
        }
    }
}

fn assemble(params: &KsParams, lambda: C64, (a, b, cc): (C64, C64, C64)) -> CMatrix {
    let zero = c64(0.0, 0.0);
    CMatrix::from_rows(&[
        [lambda / params.c, c64(params.alpha / params.c, 0.0), zero],
        [zero, zero, c64(1.0, 0.0)],
        [a, b, cc],
    ])
}

pub fn ks_matrix(params: &KsParams, lambda: C64, z: f64) -> CMatrix {
    assemble(params, lambda, ks_coefficients(params, lambda, z))
}

pub fn ks_asymptotic(params: &KsParams, lambda: C64, end: End) -> CMatrix {
    assemble(params, lambda, ks_asymptotic_coefficients(params, lambda, end))
}

/// `λ±(k)` with the discriminant `Δ`.
pub fn ks_lambda_pm(params: &KsParams, k: f64) -> (C64, C64) {
    let KsParams { beta, c, delta, .. } = *params;
    let bd = beta - delta;
    let delta_disc = c64(
        delta * delta * bd * bd * k.powi(4) + beta * c * c * (4.0 * delta - 5.0 * beta) * k * k,
        2.0 * beta * c * delta * bd * k.powi(3) - 4.0 * beta * c.powi(3) * k,
    );
    let root = delta_disc.sqrt();
    let base = c64(-delta * bd * k * k, c * (beta - 2.0 * delta) * k);
    ((base + root) / (2.0 * bd), (base - root) / (2.0 * bd))
}

/// Left side of the implicit dispersion relation of `𝔸₋` at `(λ, k)`.
pub fn ks_dispersion_minus_residual(params: &KsParams, lambda: C64, k: f64) -> C64 {
    let KsParams { beta, c, delta, .. } = *params;
    let bd = beta - delta;
    let i = c64(0.0, 1.0);
    -lambda * lambda / (c * delta) + (-k * k / c + i * k * (1.0 / delta - 1.0 / bd)) * lambda
        - c * k * k * (beta + delta) / (delta * bd)
        + i * ((delta * k.powi(3) * bd * bd - beta * c * c * k) / (delta * bd * bd))
}

/// `[−δk² + ick, ick, λ₊(k), λ₋(k)]`: the two `𝔸₊` branches then the two `𝔸₋` branches.
pub fn ks_dispersion(params: &KsParams, k: f64) -> [C64; 4] {
    let (lp, lm) = ks_lambda_pm(params, k);
    [c64(-params.delta * k * k, params.c * k), c64(0.0, params.c * k), lp, lm]
}

/// Riccati flow in the `q ≠ 0` chart of ℂP², coordinates `(η₃, η₄) = (p/q, r/q)`.
pub fn ks_riccati_cp2_rhs(coords: [C64; 2], z: f64, lambda: C64, params: &KsParams) -> [C64; 2] {
    let (a, b, cc) = ks_coefficients(params, lambda, z);
    let [e3, e4] = coords;
    [lambda / params.c * e3 + params.alpha / params.c - e3 * e4, a * e3 + b + cc * e4 - e4 * e4]
}

/// Riccati flow in the `K₁₂ ≠ 0` chart of Gr(2,3), `κ₅ = −K₂₃/K₁₂`, `κ₆ = K₁₃/K₁₂`.
pub fn ks_riccati_gr23_rhs(coords: [C64; 2], z: f64, lambda: C64, params: &KsParams) -> [C64; 2] {
    let (a, b, cc) = ks_coefficients(params, lambda, z);
    let [k5, k6] = coords;
    let lc = lambda / params.c;
    [a + (cc - lc) * k5 - k5 * k6, b - params.alpha / params.c * k5 + cc * k6 - k6 * k6]
}

/// Riccati flow of lines in any chart `1..=3` of ℂP² (coordinates in chart order).
pub fn ks_riccati_cp2_chart_rhs(chart: usize, coords: [C64; 2], z: f64, lambda: C64, params: &KsParams) -> [C64; 2] {
    chart_rhs(&ks_matrix(params, lambda, z), chart, &coords)
}

/// Riccati flow of planes in any Plücker chart `1..=3` of Gr(2,3).
pub fn ks_riccati_gr23_chart_rhs(chart: usize, coords: [C64; 2], z: f64, lambda: C64, params: &KsParams) -> [C64; 2] {
    chart_rhs(&ks_matrix(params, lambda, z).additive_compound(), chart, &coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eigen_decompose;

    fn p() -> KsParams {
        KsParams::preset()
    }

    #[test]
    fn parameters() {
        assert!(KsParams::new(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(KsParams::new(1.0, 2.0, 0.0, 1.0).is_err());
        let q = KsParams::new(1.0, 2.0, 2.0, 1.0).unwrap();
        assert_eq!((q.gamma(), q.sigma()), (1.0, 0.25));
    }

    #[test]
    fn wave_values() {
        let w = ks_wave_eval(&p(), 0.0);
        assert!((w.u - 0.8).abs() < 1e-15 && (w.w - 0.64).abs() < 1e-15);
        assert!((w.du - 0.32).abs() < 1e-15);
        let far = ks_wave_eval(&p(), 60.0);
        assert!((far.u - 1.0).abs() < 1e-15 && far.w < 1e-40 && far.dw.abs() < 1e-40);
        let left = ks_wave_eval(&p(), -400.0);
        assert!(left.u == 0.0 && (left.ratio - 4.0).abs() < 1e-12);
        let deep = ks_wave_eval(&p(), -1e6);
        assert!(deep.ratio.is_finite() && deep.u.is_finite());
    }

    #[test]
    fn coefficient_limits() {
        let lam = c64(0.7, -1.3);
        let (a, b, cc) = ks_coefficients(&p(), lam, 60.0);
        let (ap, bp, cp) = ks_asymptotic_coefficients(&p(), lam, End::Plus);
        assert!((a - ap).norm() < 1e-12 && (b - bp).norm() < 1e-12 && (cc - cp).norm() < 1e-12);
        let (a, b, cc) = ks_coefficients(&p(), lam, -50.0);
        let (am, bm, cm) = ks_asymptotic_coefficients(&p(), lam, End::Minus);
        assert!((a - am).norm() < 1e-8 && (b - bm).norm() < 1e-8 && (cc - cm).norm() < 1e-8);
        assert_eq!(cm, c64(6.0, 0.0));
    }

    #[test]
    fn coefficient_structure_in_lambda() {
        let z = 0.3;
        let (a0, b0, _) = ks_coefficients(&p(), c64(0.0, 0.0), z);
        let (a1, b1, _) = ks_coefficients(&p(), c64(1.0, 0.0), z);
        let (a2, b2, _) = ks_coefficients(&p(), c64(2.0, 0.0), z);
        let (a3, _, _) = ks_coefficients(&p(), c64(3.0, 0.0), z);
        // third difference of a quadratic and second difference of a linear function vanish
        assert!((a3 - 3.0 * a2 + 3.0 * a1 - a0).norm() < 1e-12);
        assert!((b2 - 2.0 * b1 + b0).norm() < 1e-12);
        let r = ks_wave_eval(&p(), z);
        let expect = p().beta * r.w / (p().c * p().c * p().delta * r.u);
        assert!(((a2 - 2.0 * a1 + a0) / 2.0 - expect).norm() < 1e-12);
    }

    #[test]
    fn matrix_rows_and_limits() {
        let lam = c64(1.5, 2.0);
        for z in [-3.0, 0.0, 4.0] {
            let m = ks_matrix(&p(), lam, z);
            assert_eq!(m.data[0][..3], [lam / 2.0, c64(0.5, 0.0), c64(0.0, 0.0)]);
        }
        let far = ks_matrix(&p(), lam, 50.0);
        assert!(far.sub(&ks_asymptotic(&p(), lam, End::Plus)).norm() < 1e-8);
        let e = eigen_decompose(&ks_asymptotic(&p(), lam, End::Plus)).values;
        let root = (c64(4.0, 0.0) + 4.0 * lam).sqrt();
        let expect = [lam / 2.0, (-2.0 + root) / 2.0, (-2.0 - root) / 2.0];
        for x in expect {
            assert!(e.iter().any(|v| (v - x).norm() < 1e-10));
        }
    }

    #[test]
    fn dispersion() {
        assert!(ks_dispersion(&p(), 0.0).iter().all(|l| l.norm() < 1e-15));
        for k in [-7.3, -0.4, 0.9, 3.0] {
            let d = ks_dispersion(&p(), k);
            let ik = c64(0.0, k);
            assert!(ks_asymptotic(&p(), d[0], End::Plus).shift(ik).det().norm() < 1e-10);
            assert!(ks_asymptotic(&p(), d[1], End::Plus).shift(ik).det().norm() < 1e-10);
            assert_eq!(d[1].re, 0.0);
            for lam in [d[2], d[3]] {
                assert!(ks_dispersion_minus_residual(&p(), lam, k).norm() < 1e-10 * (1.0 + lam.norm_sqr()));
                let det = ks_asymptotic(&p(), lam, End::Minus).shift(ik).det();
                assert!(det.norm() < 1e-9 * (1.0 + lam.norm_sqr()));
            }
        }
    }

    #[test]
    fn riccati_charts_agree_with_generic_form() {
        let lam = c64(0.4, 1.1);
        let q = p();
        let eta = [c64(0.3, -0.2), c64(-1.1, 0.5)];
        let z = -0.7;
        let direct = ks_riccati_cp2_rhs(eta, z, lam, &q);
        let generic = ks_riccati_cp2_chart_rhs(2, eta, z, lam, &q);
        assert!((direct[0] - generic[0]).norm() < 1e-13 && (direct[1] - generic[1]).norm() < 1e-13);
        let kappa = [c64(0.8, 0.1), c64(-0.3, 0.9)];
        let d = ks_riccati_gr23_rhs(kappa, z, lam, &q);
        // chart 1 of Gr(2,3) holds (κ₆, −κ₅)
        let g = ks_riccati_gr23_chart_rhs(1, [kappa[1], -kappa[0]], z, lam, &q);
        assert!((d[1] - g[0]).norm() < 1e-13 && (d[0] + g[1]).norm() < 1e-13);
        let zero = ks_riccati_cp2_rhs([c64(0.0, 0.0); 2], 0.0, c64(0.0, 0.0), &q);
        let (_, b, _) = ks_coefficients(&q, c64(0.0, 0.0), 0.0);
        assert_eq!(zero, [c64(0.5, 0.0), b]);
    }
}
