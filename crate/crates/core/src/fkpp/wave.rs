use super::FkppParams;
use crate::error::{Error, Result};
use crate::numerics::{c64, integrate_until, OdeOptions, Trajectory, C64};

/// Offset of the shooting start from the saddle along its unstable direction.
pub const SHOOTING_EPSILON: f64 = 1e-8;

/// Densely interpolable front on `[−l_minus, l_plus]` with `(u, u')` state.
///
/// Left of the shooting start the profile follows the linear unstable
/// manifold of the saddle; outside the span it is clamped to the end states.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub trajectory: Trajectory<2>,
    /// Translation applied so that `u(0) = 1/2`.
    pub shift: f64,
    pub l_minus: f64,
    pub l_plus: f64,
    pub left_state: [f64; 2],
    pub right_state: [f64; 2],
    /// Unstable rate and (scaled) eigenvector of the left saddle.
    tail_rate: f64,
    tail_vector: [f64; 2],
    z_start: f64,
}

impl WaveProfile {
    /// `(u, u')` at `z`.
    pub fn state(&self, z: f64) -> [f64; 2] {
        if z < -self.l_minus {
            return self.left_state;
        }
        if z > self.l_plus {
            return self.right_state;
        }
        if z < self.z_start {
            let e = (self.tail_rate * (z - self.z_start)).exp();
            return [
                self.left_state[0] + self.tail_vector[0] * e,
                self.left_state[1] + self.tail_vector[1] * e,
            ];
        }
        let y = self.trajectory.eval(z + self.shift);
        [y[0].re, y[1].re]
    }

    /// `(u', u'')` at `z` from the interpolant (zero outside the span).
    pub fn derivative(&self, z: f64) -> [f64; 2] {
        if z < -self.l_minus || z > self.l_plus {
            return [0.0, 0.0];
        }
        if z < self.z_start {
            let e = (self.tail_rate * (z - self.z_start)).exp();
            return [
                self.tail_rate * self.tail_vector[0] * e,
                self.tail_rate * self.tail_vector[1] * e,
            ];
        }
        let (_, dy) = self.trajectory.eval_with_derivative(z + self.shift);
        [dy[0].re, dy[1].re]
    }

    /// Start of the integrated part of the profile, in shifted coordinates.
    pub fn shooting_start(&self) -> f64 {
        self.z_start
    }
}

/// Travelling front connecting `(1,0)` to `(0,0)`.
#[derive(Debug, Clone)]
pub struct FkppWave {
    pub params: FkppParams,
    pub profile: WaveProfile,
    /// `u(0)` after normalisation.
    pub normalization: f64,
    pub tail_tol: f64,
    /// `(|u(−L₋) − 1|, |u(L₊)|)`.
    pub tail_deviation: (f64, f64),
}

impl FkppWave {
    pub fn u(&self, z: f64) -> f64 {
        self.profile.state(z)[0]
    }

    pub fn v(&self, z: f64) -> f64 {
        self.profile.state(z)[1]
    }

    pub fn l_minus(&self) -> f64 {
        self.profile.l_minus
    }

    pub fn l_plus(&self) -> f64 {
        self.profile.l_plus
    }
}

fn z_budget(params: &FkppParams) -> f64 {
    // the slowest decay rate at the right end is at least c/(2δ) for c² ≤ 4δ
    let rate = if params.monotone() {
        (params.c - (params.c * params.c - 4.0 * params.delta).sqrt()) / (2.0 * params.delta)
    } else {
        params.c / (2.0 * params.delta)
    };
    (400.0f64).max(60.0 / rate.max(1e-6)).min(1e5)
}

/// Shoots along the unstable manifold of `(1,0)` until `|u|, |u'| < tail_tol`
/// and translates so that `u(0) = 1/2`.
pub fn fkpp_wave(params: &FkppParams, tail_tol: f64) -> Result<FkppWave> {
    if !(tail_tol > 0.0 && tail_tol < 0.5) {
        return Err(Error::Parameter(format!("tail tolerance must lie in (0, 1/2), got {tail_tol}")));
    }
    let (c, d) = (params.c, params.delta);
    // saddle at (1,0): Jacobian [[0,1],[1/δ, −c/δ]]
    let mu = (-c + (c * c + 4.0 * d).sqrt()) / (2.0 * d);
    let norm = (1.0 + mu * mu).sqrt();
    let xi = [-1.0 / norm, -mu / norm];
    let y0 = [c64(1.0 + SHOOTING_EPSILON * xi[0], 0.0), c64(SHOOTING_EPSILON * xi[1], 0.0)];
    let field = move |_: f64, y: &[C64; 2]| [y[1], -(c * y[1] + y[0] * (1.0 - y[0])) / d];
    let budget = z_budget(params);
    let opts = OdeOptions { rel_tol: 1e-12, abs_tol: 1e-15, max_step: 0.25, ..Default::default() };
    let (traj, reached) = integrate_until(field, y0, 0.0, budget, &opts, |_, y| {
        y[0].norm() < tail_tol && y[1].norm() < tail_tol
    })?;
    if !reached {
        return Err(Error::Domain(format!("wave tail did not reach {tail_tol:e} within z-budget {budget}")));
    }
    if params.monotone() {
        if let Some(i) = traj.y.iter().skip(1).position(|y| y[1].re >= 0.0) {
            return Err(Error::Model(format!(
                "shooting produced a non-monotone front for c >= 2 sqrt(delta) at node {}",
                i + 1
            )));
        }
    }
    // first crossing of u = 1/2
    let idx = traj
        .y
        .iter()
        .position(|y| y[0].re <= 0.5)
        .ok_or_else(|| Error::Model("front never reaches u = 1/2".into()))?;
    let (mut lo, mut hi) = (traj.z[idx - 1], traj.z[idx]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if traj.eval(mid)[0].re > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    let shift = 0.5 * (lo + hi);
    let z_start = -shift;
    let z_end = traj.last().0 - shift;
    // extend left along the linear unstable manifold until the deviation meets tail_tol
    let amp = SHOOTING_EPSILON * xi[0].abs();
    let extra = if amp > tail_tol { (amp / tail_tol).ln() / mu } else { 0.0 };
    let l_minus = -(z_start - extra);
    let profile = WaveProfile {
        trajectory: traj,
        shift,
        l_minus,
        l_plus: z_end,
        left_state: [1.0, 0.0],
        right_state: [0.0, 0.0],
        tail_rate: mu,
        tail_vector: [SHOOTING_EPSILON * xi[0], SHOOTING_EPSILON * xi[1]],
        z_start,
    };
    let left = profile.state(-l_minus);
    let right = profile.state(z_end);
    let normalization = profile.state(0.0)[0];
    Ok(FkppWave {
        params: *params,
        profile,
        normalization,
        tail_tol,
        tail_deviation: ((left[0] - 1.0).abs(), right[0].abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_front_is_normalised() {
        let params = FkppParams::new(1.0, 3.0).unwrap();
        let w = fkpp_wave(&params, 1e-10).unwrap();
        assert!((w.u(0.0) - 0.5).abs() < 1e-12);
        assert!(w.tail_deviation.0 <= 1e-10 * 1.01 && w.tail_deviation.1 <= 1e-10);
        let n = 2000;
        for i in 1..n {
            let z = -w.l_minus() + (w.l_minus() + w.l_plus()) * i as f64 / n as f64;
            assert!(w.v(z) < 0.0, "v >= 0 at z = {z}");
        }
    }

    #[test]
    fn oscillating_front() {
        let params = FkppParams::new(1.0, 1.0).unwrap();
        let w = fkpp_wave(&params, 1e-10).unwrap();
        let n = 4000;
        let negative = (0..n).any(|i| w.u(w.l_plus() * i as f64 / n as f64) < 0.0);
        assert!(negative);
    }

    #[test]
    fn left_tail_is_continuous() {
        let params = FkppParams::new(1.0, 2.4).unwrap();
        let w = fkpp_wave(&params, 1e-10).unwrap();
        let z0 = w.profile.shooting_start();
        let a = w.profile.state(z0 - 1e-9);
        let b = w.profile.state(z0 + 1e-9);
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }
}
