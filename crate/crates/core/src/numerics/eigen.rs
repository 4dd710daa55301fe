use super::{polynomial_roots, vec_norm, CMatrix, C64};
use serde::{Deserialize, Serialize};

/// Eigenvalues sorted by descending real part with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPairs {
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
    pub defect_flag: bool,
}

const DEFECT_GAP: f64 = 1e-8;

/// Descending real part, ties broken by descending imaginary part.
pub(crate) fn sort_spectrum(values: &mut [C64]) {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    let tie = 1e-13 * scale;
    // insertion sort keeps the comparison with a tie window well defined for n <= 4
    for i in 1..values.len() {
        let mut j = i;
        while j > 0 && before(values[j], values[j - 1], tie) {
            values.swap(j, j - 1);
            j -= 1;
        }
    }
}

fn before(a: C64, b: C64, tie: f64) -> bool {
    if (a.re - b.re).abs() <= tie {
        a.im > b.im
    } else {
        a.re > b.re
    }
}

fn normalise(mut v: Vec<C64>) -> Vec<C64> {
    let norm = vec_norm(&v);
    if norm == 0.0 {
        return v;
    }
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    let phase = lead.conj() / lead.norm();
    for x in v.iter_mut() {
        *x = *x * phase / norm;
    }
    v
}

fn cross(a: &[C64], b: &[C64]) -> Vec<C64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// A vector annihilated (bilinearly) by a single nonzero row.
fn null_of_row(r: &[C64], skip: usize) -> Vec<C64> {
    let n = r.len();
    let k = (0..n)
        .max_by(|&a, &b| r[a].norm().partial_cmp(&r[b].norm()).unwrap())
        .unwrap();
    let mut free: Vec<usize> = (0..n).filter(|&j| j != k).collect();
    let j = free.remove(skip.min(free.len() - 1));
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[j] = r[k];
    v[k] = -r[j];
    v
}

/// Null vector of `b = A - μI`; `occurrence` picks among independent choices
/// when the eigenvalue is repeated and the kernel has dimension above one.
fn null_vector(b: &CMatrix, occurrence: usize, scale: f64) -> Vec<C64> {
    let n = b.n;
    let eps = 1e-10 * scale.max(1e-300);
    match n {
        2 => {
            let c1 = vec![b[(0, 1)], -b[(0, 0)]];
            let c2 = vec![b[(1, 1)], -b[(1, 0)]];
            let best = if vec_norm(&c1) >= vec_norm(&c2) { c1 } else { c2 };
            if vec_norm(&best) > eps {
                best
            } else {
                let mut e = vec![C64::new(0.0, 0.0); 2];
                e[occurrence.min(1)] = C64::new(1.0, 0.0);
                e
            }
        }
        3 => {
            let rows = [b.row(0), b.row(1), b.row(2)];
            let cands = [cross(rows[0], rows[1]), cross(rows[0], rows[2]), cross(rows[1], rows[2])];
            let best = cands
                .iter()
                .max_by(|a, b| vec_norm(a).partial_cmp(&vec_norm(b)).unwrap())
                .unwrap()
                .clone();
            let row_scale = rows.iter().fold(0.0f64, |m, r| m.max(vec_norm(r)));
            if vec_norm(&best) > eps * row_scale.max(eps) {
                return best;
            }
            // rank at most one
            let r = rows
                .iter()
                .max_by(|a, b| vec_norm(a).partial_cmp(&vec_norm(b)).unwrap())
                .unwrap();
            if vec_norm(r) > eps {
                null_of_row(r, occurrence)
            } else {
                let mut e = vec![C64::new(0.0, 0.0); 3];
                e[occurrence.min(2)] = C64::new(1.0, 0.0);
                e
            }
        }
        _ => panic!("eigen_decompose supports n in {{2, 3}}"),
    }
}

/// Eigen-decomposition of a 2×2 or 3×3 complex matrix via its characteristic polynomial.
pub fn eigen_decompose(a: &CMatrix) -> EigenPairs {
    assert!(a.n == 2 || a.n == 3, "eigen_decompose supports n in {{2, 3}}");
    let mut values = polynomial_roots(&a.char_poly()).expect("monic polynomial");
    sort_spectrum(&mut values);
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let mut defect_flag = false;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if (values[i] - values[j]).norm() < DEFECT_GAP * radius.max(f64::MIN_POSITIVE) {
                defect_flag = true;
            }
        }
    }
    if radius == 0.0 {
        defect_flag = true;
    }
    let scale = a.norm().max(radius);
    let mut vectors = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let occurrence = (0..i)
            .filter(|&j| (values[j] - values[i]).norm() < DEFECT_GAP * scale.max(1e-300))
            .count();
        let b = a.shift(values[i]);
        vectors.push(normalise(null_vector(&b, occurrence, scale)));
    }
    EigenPairs { values, vectors, defect_flag }
}
