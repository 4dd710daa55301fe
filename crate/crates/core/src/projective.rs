//! Affine charts on ℂP¹, ℂP² and Gr(2,3) (through its Plücker image in ℂP²),
//! and tracking of the Riccati flow induced by a linear system with automatic
//! chart switching.

use crate::error::{Error, Result};
use crate::numerics::{max_abs, vec_norm, CMatrix, OdeOptions, Stepper, C64};
use serde::{Deserialize, Serialize};

/// Affine coordinate magnitude that triggers a chart switch.
pub const SWITCH_THRESHOLD: f64 = 10.0;
const CHART_EPS: f64 = 1e-14;
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    CP1,
    CP2,
    Gr23,
}

impl Space {
    /// Length of a homogeneous representative.
    pub fn homogeneous_dim(self) -> usize {
        match self {
            Space::CP1 => 2,
            Space::CP2 | Space::Gr23 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartSwitch {
    pub z: f64,
    pub from: usize,
    pub to: usize,
}

/// A point of a projective space in one affine chart.
///
/// `chart` is the 1-based index of the homogeneous coordinate set to one;
/// `coords` holds the remaining coordinates in index order. For ℂP¹ only
/// `coords[0]` is meaningful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub space: Space,
    pub chart: usize,
    pub coords: [C64; 2],
    pub switch_log: Vec<ChartSwitch>,
}

/// Homogeneous Plücker triple `[K12 : K13 : K23]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PluckerLine {
    pub k: [C64; 3],
}

pub fn plucker_from_basis(v: &[C64; 3], w: &[C64; 3]) -> Result<PluckerLine> {
    let k = [
        v[0] * w[1] - v[1] * w[0],
        v[0] * w[2] - v[2] * w[0],
        v[1] * w[2] - v[2] * w[1],
    ];
    if max_abs(&k) < CHART_EPS * vec_norm(v) * vec_norm(w) || max_abs(&k) == 0.0 {
        return Err(Error::RankDeficient);
    }
    Ok(PluckerLine { k })
}

/// Affine coordinates of a homogeneous point in chart `chart` (1-based).
pub fn to_chart(h: &[C64], chart: usize) -> Result<Vec<C64>> {
    if chart == 0 || chart > h.len() {
        return Err(Error::ChartUnavailable { chart });
    }
    let pivot = h[chart - 1];
    if pivot.norm() < CHART_EPS * max_abs(h) || pivot.norm() == 0.0 {
        return Err(Error::ChartUnavailable { chart });
    }
    Ok(h.iter()
        .enumerate()
        .filter(|&(i, _)| i != chart - 1)
        .map(|(_, &x)| x / pivot)
        .collect())
}

/// Homogeneous representative with a one in slot `chart`.
pub fn from_chart(chart: usize, coords: &[C64], dim: usize) -> Vec<C64> {
    let mut h = Vec::with_capacity(dim);
    let mut it = coords.iter();
    for i in 0..dim {
        if i == chart - 1 {
            h.push(ONE);
        } else {
            h.push(*it.next().unwrap_or(&ZERO));
        }
    }
    h
}

/// Chart of the largest-magnitude coordinate, lowest index on ties.
pub fn best_chart(h: &[C64]) -> usize {
    let mut best = 0;
    for i in 1..h.len() {
        if h[i].norm() > h[best].norm() {
            best = i;
        }
    }
    best + 1
}

impl ChartPoint {
    pub fn in_chart(space: Space, chart: usize, h: &[C64]) -> Result<Self> {
        assert_eq!(h.len(), space.homogeneous_dim());
        let a = to_chart(h, chart)?;
        let mut coords = [ZERO; 2];
        coords[..a.len()].copy_from_slice(&a);
        Ok(ChartPoint { space, chart, coords, switch_log: Vec::new() })
    }

    pub fn from_homogeneous(space: Space, h: &[C64]) -> Result<Self> {
        if max_abs(h) == 0.0 || !h.iter().all(|x| x.is_finite()) {
            return Err(Error::RankDeficient);
        }
        Self::in_chart(space, best_chart(h), h)
    }

    /// Prefers `chart` when its coordinates stay within the switch threshold.
    pub fn prefer_chart(space: Space, chart: usize, h: &[C64]) -> Result<Self> {
        match Self::in_chart(space, chart, h) {
            Ok(p) if max_abs(&p.coords) <= SWITCH_THRESHOLD => Ok(p),
            _ => Self::from_homogeneous(space, h),
        }
    }

    pub fn homogeneous(&self) -> Vec<C64> {
        let d = self.space.homogeneous_dim();
        from_chart(self.chart, &self.coords[..d - 1], d)
    }

    pub fn affine(&self) -> &[C64] {
        &self.coords[..self.space.homogeneous_dim() - 1]
    }

    /// Coordinates of the same point in another chart.
    pub fn coords_in(&self, chart: usize) -> Result<Vec<C64>> {
        to_chart(&self.homogeneous(), chart)
    }

    pub fn switches(&self) -> usize {
        self.switch_log.len()
    }
}

/// Re-expresses the point in its best chart, logging the change.
pub fn switch_chart(state: &ChartPoint, z: f64) -> ChartPoint {
    let h = state.homogeneous();
    let target = best_chart(&h);
    if target == state.chart {
        return state.clone();
    }
    let mut next = ChartPoint::in_chart(state.space, target, &h).expect("best chart is nonzero");
    next.switch_log = state.switch_log.clone();
    next.switch_log.push(ChartSwitch { z, from: state.chart, to: target });
    next
}

/// Riccati right-hand side in chart `chart` for the linear flow `h' = M h`.
///
/// With `ã` the homogeneous lift of the affine point, `a_j' = (Mã)_j − a_j (Mã)_k`.
pub fn chart_rhs(m: &CMatrix, chart: usize, a: &[C64; 2]) -> [C64; 2] {
    let n = m.n;
    let k = chart - 1;
    let mut lift = [ZERO; 3];
    let mut idx = 0;
    for (i, slot) in lift.iter_mut().enumerate().take(n) {
        if i == k {
            *slot = ONE;
        } else {
            *slot = a[idx];
            idx += 1;
        }
    }
    let mut w = [ZERO; 3];
    for (i, wi) in w.iter_mut().enumerate().take(n) {
        *wi = (0..n).map(|j| m.data[i][j] * lift[j]).sum();
    }
    let mut out = [ZERO; 2];
    let mut idx = 0;
    for i in 0..n {
        if i != k {
            out[idx] = w[i] - lift[i] * w[k];
            idx += 1;
        }
    }
    out
}

/// Integrates the projectivised flow of `h' = M(z) h` from `z_from` to `z_to`,
/// switching to the best chart whenever a coordinate exceeds the threshold.
pub fn track<M>(matrix: M, start: ChartPoint, z_from: f64, z_to: f64, opts: &OdeOptions) -> Result<ChartPoint>
where
    M: Fn(f64) -> CMatrix,
{
    let mut point = switch_chart(&start, z_from);
    if z_from == z_to {
        return Ok(point);
    }
    let mut z = z_from;
    let mut hint = f64::INFINITY;
    let mut budget = opts.max_steps;
    loop {
        let chart = point.chart;
        let rhs = |s: f64, a: &[C64; 2]| chart_rhs(&matrix(s), chart, a);
        let o = OdeOptions { max_steps: budget, ..*opts };
        let mut st = Stepper::new(rhs, z, point.coords, z_to, o)?.with_initial_step(hint);
        let mut restarted = false;
        loop {
            match st.step() {
                Ok(done) => {
                    point.coords = st.y;
                    z = st.z;
                    if max_abs(point.affine()) > SWITCH_THRESHOLD {
                        let next = switch_chart(&point, z);
                        if next.chart != point.chart {
                            point = next;
                            hint = st.step_size();
                            restarted = true;
                        }
                    }
                    if done {
                        return Ok(point);
                    }
                    if restarted {
                        break;
                    }
                }
                Err(e @ (Error::Blowup { .. } | Error::Stiffness { .. })) => {
                    point.coords = st.y;
                    z = st.z;
                    let next = switch_chart(&point, z);
                    if next.chart == point.chart {
                        return Err(e);
                    }
                    point = next;
                    hint = st.step_size().max(1e-6 * (z_to - z_from).abs());
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        budget = budget.saturating_sub(st.steps + st.rejected);
        if budget == 0 {
            return Err(Error::StepLimit { z, limit: opts.max_steps });
        }
    }
}
