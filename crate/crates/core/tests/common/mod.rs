#![allow(dead_code)]

use evans_core::fkpp::Fkpp;
use evans_core::ks::KsParams;
use evans_core::numerics::{eigen_decompose, integrate, vec_norm, CMatrix, OdeOptions, C64};
use evans_core::projective::{plucker_from_basis, track, ChartPoint, Space};
use evans_core::spectrum::SpectralProblem;
use evans_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_lambda(rng: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> C64 {
    C64::new(rng.gen_range(re.0..re.1), rng.gen_range(im.0..im.1))
}

/// Sine of the angle between two complex lines.
pub fn line_distance(u: &[C64], v: &[C64]) -> f64 {
    let (nu, nv) = (vec_norm(u), vec_norm(v));
    let mut s = 0.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            s += (u[i] * v[j] - u[j] * v[i]).norm_sqr();
        }
    }
    s.sqrt() / (nu * nv)
}

fn normalized<const N: usize>(y: [C64; N]) -> [C64; N] {
    let n = vec_norm(&y);
    y.map(|x| x / n)
}

fn linear_field<const N: usize>(m: impl Fn(f64) -> CMatrix) -> impl Fn(f64, &[C64; N]) -> [C64; N] {
    move |z, y| {
        let v = m(z).mul_vec(y);
        std::array::from_fn(|i| v[i])
    }
}

fn oracle_options() -> OdeOptions {
    OdeOptions { rel_tol: 1e-11, abs_tol: 1e-13, record: false, ..Default::default() }
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

fn first<const N: usize>(v: &[C64]) -> [C64; N] {
    std::array::from_fn(|i| v[i])
}

/// Largest distance between chart-tracked lines and normalised linear
/// solutions at `n + 1` checkpoints, for the unstable (forward) and stable
/// (backward) directions of the F-KPP system over the whole profile span.
pub fn fkpp_riccati_vs_linear(problem: &Fkpp, lambda: C64, n: usize) -> Result<f64> {
    let (a, b) = (-problem.wave.l_minus(), problem.wave.l_plus());
    let m = |z: f64| problem.matrix(z, lambda);
    let opts = oracle_options();
    let mut worst = 0.0f64;
    let z = grid(a, b, n);

    let v0: [C64; 2] = first(&eigen_decompose(&m(a)).vectors[0]);
    let mut y = v0;
    let mut point = ChartPoint::from_homogeneous(Space::CP1, &v0)?;
    for w in z.windows(2) {
        y = normalized(integrate(linear_field(m), y, w[0], w[1], &opts)?.last().1);
        point = track(m, point, w[0], w[1], &opts)?;
        worst = worst.max(line_distance(&point.homogeneous(), &y));
    }

    let s0: [C64; 2] = first(&eigen_decompose(&m(b)).vectors[1]);
    let mut y = s0;
    let mut point = ChartPoint::from_homogeneous(Space::CP1, &s0)?;
    for w in z.windows(2).rev() {
        y = normalized(integrate(linear_field(m), y, w[1], w[0], &opts)?.last().1);
        point = track(m, point, w[1], w[0], &opts)?;
        worst = worst.max(line_distance(&point.homogeneous(), &y));
    }
    Ok(worst)
}

fn orthonormalize(v: [C64; 3], w: [C64; 3]) -> ([C64; 3], [C64; 3]) {
    let v = normalized(v);
    let dot: C64 = (0..3).map(|i| v[i].conj() * w[i]).sum();
    let w = normalized(std::array::from_fn(|i| w[i] - dot * v[i]));
    (v, w)
}

/// K-S counterpart: the stable line in ℂP² (backward from `L`) and the
/// unstable plane in Gr(2,3) (forward from `−L`), the latter compared through
/// Plücker coordinates of an orthonormalised solution pair.
pub fn ks_riccati_vs_linear(params: &KsParams, lambda: C64, l: f64, n: usize) -> Result<f64> {
    let m = |z: f64| evans_core::ks::ks_matrix(params, lambda, z);
    let compound = |z: f64| m(z).additive_compound();
    let opts = oracle_options();
    let z = grid(-l, l, n);
    let mut worst = 0.0f64;

    let left = eigen_decompose(&m(-l));
    let (mut v, mut w): ([C64; 3], [C64; 3]) = (first(&left.vectors[0]), first(&left.vectors[1]));
    let start = plucker_from_basis(&v, &w)?;
    let mut plane = ChartPoint::from_homogeneous(Space::Gr23, &start.k)?;
    for seg in z.windows(2) {
        let v1 = integrate(linear_field(m), v, seg[0], seg[1], &opts)?.last().1;
        let w1 = integrate(linear_field(m), w, seg[0], seg[1], &opts)?.last().1;
        (v, w) = orthonormalize(v1, w1);
        plane = track(compound, plane, seg[0], seg[1], &opts)?;
        let k = plucker_from_basis(&v, &w)?.k;
        worst = worst.max(line_distance(&plane.homogeneous(), &k));
    }

    let s0: [C64; 3] = first(&eigen_decompose(&m(l)).vectors[2]);
    let mut y = s0;
    let mut line = ChartPoint::from_homogeneous(Space::CP2, &s0)?;
    for seg in z.windows(2).rev() {
        y = normalized(integrate(linear_field(m), y, seg[1], seg[0], &opts)?.last().1);
        line = track(m, line, seg[1], seg[0], &opts)?;
        worst = worst.max(line_distance(&line.homogeneous(), &y));
    }
    Ok(worst)
}
