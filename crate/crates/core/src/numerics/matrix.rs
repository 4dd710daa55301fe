use super::C64;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Dense complex matrix of dimension 2, 3 or 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub n: usize,
    pub data: [[C64; 4]; 4],
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=4).contains(&n), "matrix dimension {n} unsupported");
        CMatrix { n, data: [[ZERO; 4]; 4] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "row {i} has wrong length");
            m.data[i][..n].copy_from_slice(r);
        }
        m
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.as_ref().iter().enumerate() {
                m.data[i][j] = C64::new(x, 0.0);
            }
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i][i] = v;
        }
        m
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i][..self.n]
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.data[i][j] * v[j]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i][j] = (0..self.n).map(|k| self.data[i][k] * other.data[k][j]).sum();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i][j] *= s;
            }
        }
        m
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i][j] -= other.data[i][j];
            }
        }
        m
    }

    /// `self - s I`
    pub fn shift(&self, s: C64) -> CMatrix {
        let mut m = *self;
        for i in 0..self.n {
            m.data[i][i] -= s;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.data[i][i]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.data[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.data[i][j].is_finite()))
    }

    pub fn det(&self) -> C64 {
        let a = &self.data;
        match self.n {
            1 => a[0][0],
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            3 => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
            _ => {
                let mut total = ZERO;
                for j in 0..4 {
                    let mut minor = CMatrix::zeros(3);
                    for r in 1..4 {
                        let mut cc = 0;
                        for c in 0..4 {
                            if c != j {
                                minor.data[r - 1][cc] = a[r][c];
                                cc += 1;
                            }
                        }
                    }
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    total += sign * a[0][j] * minor.det();
                }
                total
            }
        }
    }

    /// Coefficients of det(μI − A) in descending powers of μ (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Vec<C64> {
        let n = self.n;
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        let mut m = CMatrix::zeros(n);
        let mut prev_c = C64::new(1.0, 0.0);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{k-1} I
            m = self.matmul(&m).shift(-prev_c);
            let am = self.matmul(&m);
            let ck = -am.trace() / k as f64;
            coeffs.push(ck);
            prev_c = ck;
        }
        coeffs
    }

    /// Second additive compound of a 3×3 matrix in the basis (e1∧e2, e1∧e3, e2∧e3).
    pub fn additive_compound(&self) -> CMatrix {
        assert_eq!(self.n, 3, "additive compound implemented for 3x3 only");
        let m = &self.data;
        CMatrix::from_rows(&[
            [m[0][0] + m[1][1], m[1][2], -m[0][2]],
            [m[2][1], m[0][0] + m[2][2], m[0][1]],
            [-m[2][0], m[1][0], m[1][1] + m[2][2]],
        ])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i][j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, poly_eval};

    #[test]
    fn det_and_char_poly_agree() {
        let a = CMatrix::from_rows(&[
            [c64(1.0, 2.0), c64(0.5, 0.0), c64(-1.0, 0.3)],
            [c64(0.0, 1.0), c64(2.0, 0.0), c64(0.7, -0.2)],
            [c64(3.0, 0.0), c64(-1.0, 1.0), c64(0.1, 0.0)],
        ]);
        let p = a.char_poly();
        for mu in [c64(0.3, -0.2), c64(-1.0, 4.0), c64(2.0, 0.0)] {
            let d = CMatrix::identity(3).scale(mu).sub(&a).det();
            assert!((poly_eval(&p, mu) - d).norm() < 1e-12 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn compound_matches_wedge_derivative() {
        let a = CMatrix::from_rows(&[
            [c64(0.4, 0.1), c64(1.0, 0.0), c64(0.0, -1.0)],
            [c64(2.0, 0.0), c64(-0.3, 0.0), c64(1.5, 0.5)],
            [c64(-1.0, 0.2), c64(0.6, 0.0), c64(0.9, 0.0)],
        ]);
        let v = [c64(1.0, 0.0), c64(0.2, 1.0), c64(-0.5, 0.0)];
        let w = [c64(0.0, 1.0), c64(1.0, 0.0), c64(0.3, -0.4)];
        let wedge = |v: &[C64], w: &[C64]| {
            [v[0] * w[1] - v[1] * w[0], v[0] * w[2] - v[2] * w[0], v[1] * w[2] - v[2] * w[1]]
        };
        let av = a.mul_vec(&v);
        let aw = a.mul_vec(&w);
        let lhs: Vec<C64> = wedge(&av, &w).iter().zip(wedge(&v, &aw)).map(|(x, y)| x + y).collect();
        let rhs = a.additive_compound().mul_vec(&wedge(&v, &w));
        for (x, y) in lhs.iter().zip(rhs) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn four_by_four_det() {
        let a = CMatrix::diag(&[c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0), c64(0.0, 1.0)]);
        assert!((a.det() - c64(0.0, 6.0)).norm() < 1e-15);
    }
}
