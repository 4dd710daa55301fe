//! Spectral-plane classification for linearised travelling-wave problems:
//! signatures of the asymptotic matrices, continuous-spectrum membership,
//! region maps, exponential weights and absolute-spectrum scans.

use crate::error::{Error, Result};
use crate::numerics::{c64, eigen_decompose, polynomial_roots_general, CMatrix, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Default threshold below which a real part counts as zero.
pub const HYPERBOLICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    Minus,
    Plus,
}

/// One linearised travelling-wave eigenvalue problem `Y' = A(z; λ) Y`.
pub trait SpectralProblem: Sync {
    fn name(&self) -> &str;
    fn dimension(&self) -> usize;
    fn matrix(&self, z: f64, lambda: C64) -> CMatrix;
    /// Limits of [`SpectralProblem::matrix`] as `z → ±∞`.
    fn asymptotic(&self, lambda: C64, end: End) -> CMatrix;
    /// Unstable dimension at −∞ for λ in the rightmost region.
    fn unstable_dim(&self) -> usize;
    /// Highest power of λ in the asymptotic matrix entries.
    fn lambda_degree(&self) -> usize;
    /// A point known to lie in the rightmost region Ω₁.
    fn reference_point(&self) -> C64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

pub fn signature(a: &CMatrix, tol: f64) -> Signature {
    shifted_signature(a, 0.0, tol)
}

/// Counts signs of `Re μ − ν`.
fn shifted_signature(a: &CMatrix, nu: f64, tol: f64) -> Signature {
    let values = eigen_decompose(a).values;
    let mut s = Signature { n_plus: 0, n_minus: 0, n_zero: 0 };
    for mu in values {
        let r = mu.re - nu;
        if r.abs() < tol {
            s.n_zero += 1;
        } else if r > 0.0 {
            s.n_plus += 1;
        } else {
            s.n_minus += 1;
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Connected component of the complement of the continuous spectrum; Ω₁ is the rightmost.
    Omega(usize),
    /// A component not connected to Ω₁ whose index is assigned by [`region_map`].
    Unresolved,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub region: Region,
    pub minus: Signature,
    pub plus: Signature,
}

/// Signatures of `A₋(λ)` and `A₊(λ)`; fails with `Boundary` on a dispersion curve.
pub fn signatures(problem: &dyn SpectralProblem, lambda: C64, tol: f64) -> Result<(Signature, Signature)> {
    weighted_signature(problem, lambda, 0.0, tol)
}

/// Signatures with real parts measured relative to the weight `ν`.
pub fn weighted_signature(
    problem: &dyn SpectralProblem,
    lambda: C64,
    nu: f64,
    tol: f64,
) -> Result<(Signature, Signature)> {
    let m = shifted_signature(&problem.asymptotic(lambda, End::Minus), nu, tol);
    let p = shifted_signature(&problem.asymptotic(lambda, End::Plus), nu, tol);
    if m.n_zero > 0 || p.n_zero > 0 {
        return Err(Error::Boundary { lambda });
    }
    Ok((m, p))
}

fn far_right(problem: &dyn SpectralProblem, lambda: C64) -> f64 {
    let r = problem.reference_point();
    r.re.max(lambda.re) + 1.0 + 2.0 * lambda.im.abs()
}

/// Is `λ` joined to the far right of the plane by a horizontal ray that never meets σ_c?
fn ray_connected(problem: &dyn SpectralProblem, lambda: C64, sig: (Signature, Signature), tol: f64) -> bool {
    let x1 = far_right(problem, lambda);
    let n = 400;
    for i in 1..=n {
        let t = i as f64 / n as f64;
        // denser sampling near λ
        let x = lambda.re + (x1 - lambda.re) * t * t;
        match signatures(problem, c64(x, lambda.im), tol) {
            Ok(s) if s == sig => {}
            _ => return false,
        }
    }
    true
}

/// Labels `λ`: continuous spectrum when the asymptotic signatures differ,
/// Ω₁ when it is ray-connected to the far right, otherwise unresolved.
pub fn classify(problem: &dyn SpectralProblem, lambda: C64, tol: f64) -> Result<RegionLabel> {
    let (minus, plus) = signatures(problem, lambda, tol)?;
    let region = if minus != plus {
        Region::Continuous
    } else if ray_connected(problem, lambda, (minus, plus), tol) {
        Region::Omega(1)
    } else {
        Region::Unresolved
    };
    Ok(RegionLabel { region, minus, plus })
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Window { re_min, re_max, im_min, im_max }
    }

    fn node(&self, i: usize, j: usize, n_re: usize, n_im: usize) -> C64 {
        let x = self.re_min + (self.re_max - self.re_min) * i as f64 / (n_re - 1).max(1) as f64;
        let y = self.im_min + (self.im_max - self.im_min) * j as f64 / (n_im - 1).max(1) as f64;
        c64(x, y)
    }
}

/// One grid point of a region map; `region` is `None` on a dispersion curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub lambda: C64,
    pub region: Option<Region>,
    pub minus: Option<Signature>,
    pub plus: Option<Signature>,
}

/// Labels a grid by flood fill: 4-connected cells with equal, matching
/// signatures form a component. The component holding a ray-connected cell is
/// Ω₁; the others are numbered 2, 3, … in row-major discovery order.
pub fn region_map(problem: &dyn SpectralProblem, window: Window, grid: (usize, usize), tol: f64) -> Vec<RegionSample> {
    let (n_re, n_im) = (grid.0.max(2), grid.1.max(2));
    let cells: Vec<(C64, Option<(Signature, Signature)>)> = (0..n_re * n_im)
        .into_par_iter()
        .map(|k| {
            let (j, i) = (k / n_re, k % n_re);
            let lam = window.node(i, j, n_re, n_im);
            (lam, signatures(problem, lam, tol).ok())
        })
        .collect();
    let mut comp: Vec<Option<usize>> = vec![None; cells.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..cells.len() {
        let Some(sig) = cells[start].1 else { continue };
        if sig.0 != sig.1 || comp[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        comp[start] = Some(id);
        while let Some(k) = queue.pop_front() {
            members.push(k);
            let (j, i) = (k / n_re, k % n_re);
            let mut nbrs = Vec::with_capacity(4);
            if i > 0 {
                nbrs.push(k - 1);
            }
            if i + 1 < n_re {
                nbrs.push(k + 1);
            }
            if j > 0 {
                nbrs.push(k - n_re);
            }
            if j + 1 < n_im {
                nbrs.push(k + n_re);
            }
            for nb in nbrs {
                if comp[nb].is_none() && cells[nb].1 == Some(sig) {
                    comp[nb] = Some(id);
                    queue.push_back(nb);
                }
            }
        }
        components.push(members);
    }
    // Ω₁: any component with a cell on the right edge that is ray-connected
    let mut index = vec![0usize; components.len()];
    let mut omega1 = None;
    for (id, members) in components.iter().enumerate() {
        let edge = members.iter().copied().filter(|&k| k % n_re == n_re - 1).find(|&k| {
            let (lam, sig) = (cells[k].0, cells[k].1.unwrap());
            ray_connected(problem, lam, sig, tol)
        });
        if edge.is_some() {
            omega1 = Some(id);
            break;
        }
    }
    let mut next = 2;
    for (id, idx) in index.iter_mut().enumerate() {
        if Some(id) == omega1 {
            *idx = 1;
        } else {
            *idx = next;
            next += 1;
        }
    }
    cells
        .iter()
        .enumerate()
        .map(|(k, &(lambda, sig))| {
            let region = match (sig, comp[k]) {
                (None, _) => None,
                (Some((m, p)), _) if m != p => Some(Region::Continuous),
                (Some(_), Some(id)) => Some(Region::Omega(index[id])),
                (Some(_), None) => Some(Region::Unresolved),
            };
            RegionSample { lambda, region, minus: sig.map(|s| s.0), plus: sig.map(|s| s.1) }
        })
        .collect()
}

/// Coefficients (descending) of `λ ↦ p(λ)` recovered by interpolation at roots of unity.
fn interpolate_in_lambda<F: Fn(C64) -> C64>(f: F, degree: usize, radius: f64) -> Vec<C64> {
    let m = degree + 1;
    let samples: Vec<C64> = (0..m)
        .map(|j| f(C64::from_polar(radius, 2.0 * PI * j as f64 / m as f64)))
        .collect();
    let mut asc = vec![c64(0.0, 0.0); m];
    for (k, a) in asc.iter_mut().enumerate() {
        let mut s = c64(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            s += v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64);
        }
        *a = s / (m as f64 * radius.powi(k as i32));
    }
    let scale = asc.iter().enumerate().fold(0.0f64, |acc, (k, a)| acc.max(a.norm() * radius.powi(k as i32)));
    while asc.len() > 1 && asc.last().unwrap().norm() * radius.powi(asc.len() as i32 - 1) <= 1e-11 * scale {
        asc.pop();
    }
    asc.reverse();
    asc
}

/// All λ for which `A_end(λ)` has the spatial eigenvalue `μ`.
pub fn dispersion_roots(problem: &dyn SpectralProblem, end: End, mu: C64) -> Vec<C64> {
    let n = problem.dimension();
    let degree = n * problem.lambda_degree();
    let coeffs = interpolate_in_lambda(|lam| problem.asymptotic(lam, end).shift(mu).det(), degree, 1.0);
    if coeffs.len() < 2 {
        return Vec::new();
    }
    polynomial_roots_general(&coeffs).unwrap_or_default()
}

/// Weighted dispersion curves: λ with a spatial eigenvalue `ν + ik` at either end.
pub fn weighted_dispersion(problem: &dyn SpectralProblem, nu: f64, k: f64) -> Vec<(End, C64)> {
    let mut out = Vec::new();
    for end in [End::Minus, End::Plus] {
        for lam in dispersion_roots(problem, end, c64(nu, k)) {
            out.push((end, lam));
        }
    }
    out
}

/// Outcome of scanning one weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVerdict {
    pub nu: f64,
    /// Largest real part found on the weighted dispersion curves.
    pub max_re: f64,
    pub witness: C64,
    pub witness_k: f64,
    /// True when every sampled curve point lies in the open left half-plane.
    pub admissible: bool,
}

/// Samples `k` uniformly in `k_range` and reports the rightmost weighted dispersion point.
pub fn weighted_scan(problem: &dyn SpectralProblem, nu: f64, k_range: (f64, f64), samples: usize) -> WeightVerdict {
    let mut best = WeightVerdict { nu, max_re: f64::NEG_INFINITY, witness: c64(f64::NAN, f64::NAN), witness_k: f64::NAN, admissible: true };
    let samples = samples.max(2);
    for i in 0..samples {
        let k = k_range.0 + (k_range.1 - k_range.0) * i as f64 / (samples - 1) as f64;
        for (_, lam) in weighted_dispersion(problem, nu, k) {
            if lam.re > best.max_re {
                best.max_re = lam.re;
                best.witness = lam;
                best.witness_k = k;
            }
        }
    }
    best.admissible = best.max_re < 0.0;
    best
}

/// Real parts of the pair straddling the Morse split, ordered by imaginary part.
///
/// The returned gap `Re μ_hi − Re μ_lo` changes sign continuously across the
/// absolute spectrum and jumps where the imaginary parts swap.
fn signed_gap(problem: &dyn SpectralProblem, lambda: C64, end: End) -> f64 {
    let k = problem.unstable_dim();
    let v = eigen_decompose(&problem.asymptotic(lambda, end)).values;
    let (a, b) = (v[k - 1], v[k]);
    if a.im >= b.im {
        a.re - b.re
    } else {
        b.re - a.re
    }
}

/// A refined absolute-spectrum point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsolutePoint {
    pub lambda: C64,
    pub end: End,
    /// Residual real-part gap at the refined point.
    pub gap: f64,
}

const JUMP_RATIO: f64 = 1e-3;

/// Bisects a sign change of the signed gap on `[a, b]`; `None` for jumps.
fn refine_edge(problem: &dyn SpectralProblem, end: End, a: C64, b: C64, tol: f64) -> Option<AbsolutePoint> {
    let (mut ga, gb) = (signed_gap(problem, a, end), signed_gap(problem, b, end));
    if !(ga.is_finite() && gb.is_finite()) || (ga >= 0.0) == (gb >= 0.0) {
        return None;
    }
    let reference = ga.abs().max(gb.abs());
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        if (hi - lo).norm() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = signed_gap(problem, mid, end);
        if (gm >= 0.0) == (ga >= 0.0) {
            lo = mid;
            ga = gm;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let gap = signed_gap(problem, mid, end);
    if gap.abs() <= JUMP_RATIO * reference + 1e-12 {
        Some(AbsolutePoint { lambda: mid, end, gap })
    } else {
        None
    }
}

/// Absolute-spectrum points on the segment `[a, b]` sampled at `n` nodes.
pub fn absolute_spectrum_on_segment(
    problem: &dyn SpectralProblem,
    a: C64,
    b: C64,
    n: usize,
    tol: f64,
) -> Vec<AbsolutePoint> {
    let n = n.max(2);
    let mut out = Vec::new();
    for end in [End::Minus, End::Plus] {
        for i in 0..n - 1 {
            let p = a + (b - a) * (i as f64 / (n - 1) as f64);
            let q = a + (b - a) * ((i + 1) as f64 / (n - 1) as f64);
            if let Some(pt) = refine_edge(problem, end, p, q, tol) {
                out.push(pt);
            }
        }
    }
    out
}

/// Grid scan for the absolute spectrum of both ends.
///
/// Every grid edge with a continuous sign change of the signed gap is refined
/// by bisection. Where an accepted edge neighbours a rejected parallel edge,
/// the curve ends in between; that endpoint is located by bisecting on the
/// offset of the parallel edge.
pub fn absolute_spectrum_scan(
    problem: &dyn SpectralProblem,
    window: Window,
    grid: (usize, usize),
    tol: f64,
) -> Vec<AbsolutePoint> {
    let (n_re, n_im) = (grid.0.max(2), grid.1.max(2));
    let dx = (window.re_max - window.re_min) / (n_re - 1) as f64;
    let dy = (window.im_max - window.im_min) / (n_im - 1) as f64;
    let node = |i: usize, j: usize| window.node(i, j, n_re, n_im);
    let mut edges: Vec<(End, bool, usize, usize)> = Vec::new();
    for end in [End::Minus, End::Plus] {
        for j in 0..n_im {
            for i in 0..n_re {
                if i + 1 < n_re {
                    edges.push((end, true, i, j));
                }
                if j + 1 < n_im {
                    edges.push((end, false, i, j));
                }
            }
        }
    }
    let found: Vec<Option<AbsolutePoint>> = edges
        .par_iter()
        .map(|&(end, horizontal, i, j)| {
            let a = node(i, j);
            let b = if horizontal { node(i + 1, j) } else { node(i, j + 1) };
            refine_edge(problem, end, a, b, tol)
        })
        .collect();
    let accepted: std::collections::HashMap<(End, bool, usize, usize), AbsolutePoint> = edges
        .iter()
        .zip(&found)
        .filter_map(|(e, f)| f.map(|p| (*e, p)))
        .collect();
    let mut out: Vec<AbsolutePoint> = found.iter().flatten().copied().collect();
    // endpoint refinement between accepted and rejected parallel edges
    let mut extra = Vec::new();
    for &(end, horizontal, i, j) in accepted.keys() {
        let neighbours: Vec<(isize, isize)> = if horizontal { vec![(0, 1), (0, -1)] } else { vec![(1, 0), (-1, 0)] };
        for (di, dj) in neighbours {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if ni < 0 || nj < 0 || ni as usize >= n_re || nj as usize >= n_im {
                continue;
            }
            let key = (end, horizontal, ni as usize, nj as usize);
            if !edge_exists(key, n_re, n_im) {
                continue;
            }
            if accepted.contains_key(&key) {
                continue;
            }
            let base = node(i, j);
            let offset = c64(di as f64 * dx, dj as f64 * dy);
            let along = if horizontal { c64(dx, 0.0) } else { c64(0.0, dy) };
            let (mut good, mut bad) = (0.0f64, 1.0f64);
            let mut last = None;
            for _ in 0..60 {
                if (bad - good) * offset.norm() <= tol {
                    break;
                }
                let t = 0.5 * (good + bad);
                let a = base + offset * t;
                match refine_edge(problem, end, a, a + along, tol) {
                    Some(p) => {
                        good = t;
                        last = Some(p);
                    }
                    None => bad = t,
                }
            }
            if let Some(p) = last {
                extra.push(p);
            }
        }
    }
    out.extend(extra);
    out.sort_by(|a, b| {
        (a.end as u8, a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.end as u8, b.lambda.re, b.lambda.im))
            .unwrap()
    });
    out
}

fn edge_exists(key: (End, bool, usize, usize), n_re: usize, n_im: usize) -> bool {
    let (_, horizontal, i, j) = key;
    if horizontal {
        i + 1 < n_re && j < n_im
    } else {
        i < n_re && j + 1 < n_im
    }
}

/// Discriminant of a monic polynomial of degree 2 or 3 given by descending coefficients.
fn discriminant(p: &[C64]) -> C64 {
    match p.len() {
        3 => p[1] * p[1] - 4.0 * p[0] * p[2],
        4 => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c - 27.0 * a * a * d * d
        }
        _ => c64(0.0, 0.0),
    }
}

/// Branch points of the split pair at `end`: λ where `μ_k = μ_{k+1}`, `k` the unstable dimension.
pub fn branch_points(problem: &dyn SpectralProblem, end: End) -> Vec<C64> {
    let n = problem.dimension();
    let degree = n * (n - 1) * problem.lambda_degree();
    let disc = |lam: C64| discriminant(&problem.asymptotic(lam, end).char_poly());
    let coeffs = interpolate_in_lambda(disc, degree, 1.0);
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let k = problem.unstable_dim();
    let mut out = Vec::new();
    for mut lam in polynomial_roots_general(&coeffs).unwrap_or_default() {
        // Newton polish on the discriminant itself
        for _ in 0..20 {
            let h = 1e-6 * (1.0 + lam.norm());
            let f = disc(lam);
            let df = (disc(lam + h) - disc(lam - h)) / (2.0 * h);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            lam -= step;
            if step.norm() < 1e-14 * (1.0 + lam.norm()) {
                break;
            }
        }
        let v = eigen_decompose(&problem.asymptotic(lam, end)).values;
        let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        let coincide = |a: C64, b: C64| (a - b).norm() <= 1e-5 * scale;
        if coincide(v[k - 1], v[k]) {
            out.push(lam);
        }
    }
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    out.dedup_by(|a, b| (*a - *b).norm() < 1e-8);
    out
}
