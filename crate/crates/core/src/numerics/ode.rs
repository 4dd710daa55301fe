use super::C64;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64::new(0.0, 0.0);

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MIN_STEP_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Keep every accepted node; otherwise only the end points are stored.
    pub record: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-10, abs_tol: 1e-12, max_step: f64::INFINITY, max_steps: 2_000_000, record: true }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        OdeOptions { rel_tol, abs_tol, ..Default::default() }
    }
}

/// Accepted integration nodes with cubic Hermite dense output.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub z: Vec<f64>,
    pub y: Vec<[C64; N]>,
    pub dy: Vec<[C64; N]>,
    pub direction: Direction,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn first(&self) -> (f64, [C64; N]) {
        (self.z[0], self.y[0])
    }

    pub fn last(&self) -> (f64, [C64; N]) {
        let k = self.z.len() - 1;
        (self.z[k], self.y[k])
    }

    pub fn z_range(&self) -> (f64, f64) {
        let (a, b) = (self.z[0], *self.z.last().unwrap());
        (a.min(b), a.max(b))
    }

    fn interval(&self, z: f64) -> usize {
        let n = self.z.len();
        if n < 2 {
            return 0;
        }
        let forward = self.direction == Direction::Forward;
        // first index whose node lies past z in the direction of integration
        let idx = self.z.partition_point(|&zi| if forward { zi <= z } else { zi >= z });
        idx.clamp(1, n - 1) - 1
    }

    /// Hermite interpolant and its derivative at `z` (extrapolates from the end intervals).
    pub fn eval_with_derivative(&self, z: f64) -> ([C64; N], [C64; N]) {
        if self.z.len() == 1 {
            return (self.y[0], self.dy[0]);
        }
        let i = self.interval(z);
        let (z0, z1) = (self.z[i], self.z[i + 1]);
        let h = z1 - z0;
        let t = (z - z0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let mut y = [ZERO; N];
        let mut dy = [ZERO; N];
        for k in 0..N {
            let (a, b, da, db) = (self.y[i][k], self.y[i + 1][k], self.dy[i][k], self.dy[i + 1][k]);
            y[k] = h00 * a + h10 * h * da + h01 * b + h11 * h * db;
            dy[k] = d00 * a + d10 * da + d01 * b + d11 * db;
        }
        (y, dy)
    }

    pub fn eval(&self, z: f64) -> [C64; N] {
        self.eval_with_derivative(z).0
    }
}

/// Single-step driver for adaptive Dormand–Prince integration.
///
/// Exposed so that callers (chart tracking in particular) can inspect the
/// state after every accepted step.
pub struct Stepper<F, const N: usize>
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    f: F,
    pub z: f64,
    pub y: [C64; N],
    pub dy: [C64; N],
    z_end: f64,
    h: f64,
    sign: f64,
    span: f64,
    opts: OdeOptions,
    pub steps: usize,
    pub rejected: usize,
}

fn finite<const N: usize>(v: &[C64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn axpy<const N: usize>(y: &[C64; N], h: f64, terms: &[(f64, &[C64; N])]) -> [C64; N] {
    let mut out = *y;
    for &(a, k) in terms {
        if a == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += h * a * k[i];
        }
    }
    out
}

impl<F, const N: usize> Stepper<F, N>
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    pub fn new(mut f: F, z0: f64, y0: [C64; N], z_end: f64, opts: OdeOptions) -> Result<Self> {
        if !finite(&y0) {
            return Err(Error::Blowup { z: z0, y: y0.to_vec() });
        }
        let dy = f(z0, &y0);
        if !finite(&dy) {
            return Err(Error::Blowup { z: z0, y: y0.to_vec() });
        }
        let span = (z_end - z0).abs();
        let sign = if z_end >= z0 { 1.0 } else { -1.0 };
        let mut s = Stepper { f, z: z0, y: y0, dy, z_end, h: 0.0, sign, span, opts, steps: 0, rejected: 0 };
        s.h = s.initial_step();
        Ok(s)
    }

    /// Restricts the first trial step (used after restarting in a new chart).
    pub fn with_initial_step(mut self, h: f64) -> Self {
        if h > 0.0 && h.is_finite() {
            self.h = self.h.min(h);
        }
        self
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn done(&self) -> bool {
        (self.z_end - self.z) * self.sign <= 0.0
    }

    fn weight(&self, a: C64, b: C64) -> f64 {
        self.opts.abs_tol + self.opts.rel_tol * a.norm().max(b.norm())
    }

    fn initial_step(&mut self) -> f64 {
        if self.span == 0.0 {
            return 0.0;
        }
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sc = self.weight(self.y[i], self.y[i]);
            d0 += (self.y[i].norm() / sc).powi(2);
            d1 += (self.dy[i].norm() / sc).powi(2);
        }
        d0 = (d0 / N as f64).sqrt();
        d1 = (d1 / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.span).min(self.opts.max_step);
        let y1 = axpy(&self.y, self.sign * h0, &[(1.0, &self.dy)]);
        let f1 = (self.f)(self.z + self.sign * h0, &y1);
        let mut d2 = 0.0;
        if finite(&f1) {
            for i in 0..N {
                let sc = self.weight(self.y[i], self.y[i]);
                d2 += ((f1[i] - self.dy[i]).norm() / sc).powi(2);
            }
            d2 = (d2 / N as f64).sqrt() / h0;
        } else {
            return h0 * 1e-3;
        }
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(self.span).min(self.opts.max_step)
    }

    /// Performs one accepted step; returns `true` once the end point is reached.
    pub fn step(&mut self) -> Result<bool> {
        if self.done() {
            return Ok(true);
        }
        let min_step = MIN_STEP_FRACTION * self.span.max(f64::MIN_POSITIVE);
        let mut blew_up = false;
        loop {
            if self.steps + self.rejected >= self.opts.max_steps {
                return Err(Error::StepLimit { z: self.z, limit: self.opts.max_steps });
            }
            let remaining = (self.z_end - self.z).abs();
            let mut h = self.h.min(self.opts.max_step);
            let last = h >= remaining * (1.0 - 1e-14);
            if last {
                h = remaining;
            }
            let hs = self.sign * h;
            let z = self.z;
            let y = self.y;
            let k1 = self.dy;
            let f = &mut self.f;
            let k2 = f(z + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(z + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(z + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(z + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(
                z + hs,
                &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let z_new = if last { self.z_end } else { z + hs };
            let k7 = f(z_new, &y_new);
            let ok = finite(&y_new) && finite(&k7) && [k2, k3, k4, k5, k6].iter().all(finite);
            let err = if ok {
                let mut acc = 0.0;
                for i in 0..N {
                    let e = hs
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sc = self.weight(y[i], y_new[i]);
                    acc += (e.norm() / sc).powi(2);
                }
                (acc / N as f64).sqrt()
            } else {
                blew_up = true;
                f64::INFINITY
            };
            if err <= 1.0 {
                self.z = z_new;
                self.y = y_new;
                self.dy = k7;
                self.steps += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                self.h = h * fac;
                if blew_up {
                    self.h = self.h.min(h);
                }
                return Ok(last);
            }
            self.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            self.h = h * fac;
            if self.h < min_step {
                return Err(if blew_up {
                    Error::Blowup { z: self.z, y: self.y.to_vec() }
                } else {
                    Error::Stiffness { z: self.z }
                });
            }
        }
    }
}

/// Integrates `y' = f(z, y)` from `z_from` to `z_to` (either direction).
pub fn integrate<F, const N: usize>(
    f: F,
    y0: [C64; N],
    z_from: f64,
    z_to: f64,
    opts: &OdeOptions,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    integrate_until(f, y0, z_from, z_to, opts, |_, _| false).map(|(t, _)| t)
}

/// As [`integrate`], stopping after the first accepted step where `stop` holds.
/// The flag reports whether the predicate fired.
pub fn integrate_until<F, S, const N: usize>(
    f: F,
    y0: [C64; N],
    z_from: f64,
    z_to: f64,
    opts: &OdeOptions,
    mut stop: S,
) -> Result<(Trajectory<N>, bool)>
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
    S: FnMut(f64, &[C64; N]) -> bool,
{
    if z_from == z_to {
        return Err(Error::Domain("integration span is empty".into()));
    }
    let mut st = Stepper::new(f, z_from, y0, z_to, *opts)?;
    let direction = if z_to > z_from { Direction::Forward } else { Direction::Backward };
    let mut traj = Trajectory {
        z: vec![z_from],
        y: vec![y0],
        dy: vec![st.dy],
        direction,
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        steps: 0,
        rejected: 0,
    };
    let mut stopped = false;
    loop {
        let finished = st.step()?;
        let hit = stop(st.z, &st.y);
        if opts.record || finished || hit {
            traj.z.push(st.z);
            traj.y.push(st.y);
            traj.dy.push(st.dy);
        }
        if hit {
            stopped = true;
            break;
        }
        if finished {
            break;
        }
    }
    traj.steps = st.steps;
    traj.rejected = st.rejected;
    Ok((traj, stopped))
}
