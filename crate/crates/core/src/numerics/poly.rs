use super::C64;
use crate::error::{Error, Result};

/// Evaluates a polynomial given by descending coefficients (Horner).
pub fn poly_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn poly_eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in coeffs {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton steps that are only kept while they reduce the residual.
fn polish(coeffs: &[C64], mut z: C64, steps: usize) -> C64 {
    let mut res = poly_eval(coeffs, z).norm();
    for _ in 0..steps {
        let (p, dp) = poly_eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 || res == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let cres = poly_eval(coeffs, cand).norm();
        if cres.is_finite() && cres < res {
            z = cand;
            res = cres;
        } else {
            break;
        }
    }
    z
}

fn quadratic(a: C64, b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [C64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

fn cubic(a: C64, b: C64, c: C64, d: C64) -> [C64; 3] {
    let b = b / a;
    let c = c / a;
    let d = d / a;
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3a = -q / 2.0 + s;
    let u3b = -q / 2.0 - s;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut roots = [C64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        // p = q = 0: triple root
        roots = [-shift; 3];
        return roots;
    }
    let u = u3.cbrt();
    let mut w = C64::new(1.0, 0.0);
    for r in roots.iter_mut() {
        let uk = u * w;
        *r = uk - p / (3.0 * uk) - shift;
        w *= omega;
    }
    roots
}

/// Roots of a polynomial of degree at most three, coefficients in descending order.
///
/// Closed forms are used, followed by guarded Newton polishing.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    if coeffs.is_empty() {
        return Ok(Vec::new());
    }
    if coeffs[0].norm() == 0.0 {
        return Err(Error::Degree);
    }
    let degree = coeffs.len() - 1;
    let raw: Vec<C64> = match degree {
        0 => Vec::new(),
        1 => vec![-coeffs[1] / coeffs[0]],
        2 => quadratic(coeffs[0], coeffs[1], coeffs[2]).to_vec(),
        3 => cubic(coeffs[0], coeffs[1], coeffs[2], coeffs[3]).to_vec(),
        _ => return polynomial_roots_general(coeffs),
    };
    Ok(raw.into_iter().map(|z| polish(coeffs, z, 3)).collect())
}

/// Roots of a polynomial of any degree by Aberth–Ehrlich simultaneous iteration.
pub fn polynomial_roots_general(coeffs: &[C64]) -> Result<Vec<C64>> {
    if coeffs.is_empty() {
        return Ok(Vec::new());
    }
    if coeffs[0].norm() == 0.0 {
        return Err(Error::Degree);
    }
    let n = coeffs.len() - 1;
    if n <= 3 {
        return polynomial_roots(coeffs);
    }
    let lead = coeffs[0];
    let monic: Vec<C64> = coeffs.iter().map(|&a| a / lead).collect();
    // Cauchy-type radius bound for the initial circle
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, a| m.max(a.norm()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            C64::from_polar(0.5 * radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = poly_eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    sum += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    Ok(z.into_iter().map(|r| polish(&monic, r, 3)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn sorted_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v
    }

    fn assert_residual(coeffs: &[C64], roots: &[C64]) {
        let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.norm()));
        for r in roots {
            assert!(poly_eval(coeffs, *r).norm() <= 1e-12 * scale, "residual at {r}");
        }
    }

    #[test]
    fn quadratic_unit_roots() {
        let p = [c64(1.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)];
        let r = sorted_re(polynomial_roots(&p).unwrap());
        assert!((r[0] + 1.0).norm() < 1e-15 && (r[1] - 1.0).norm() < 1e-15);
        assert_residual(&p, &r);
    }

    #[test]
    fn cubic_integer_roots() {
        let p = [c64(1.0, 0.0), c64(-6.0, 0.0), c64(11.0, 0.0), c64(-6.0, 0.0)];
        let r = sorted_re(polynomial_roots(&p).unwrap());
        for (k, z) in r.iter().enumerate() {
            assert!((z - (k as f64 + 1.0)).norm() < 1e-12);
        }
        assert_residual(&p, &r);
    }

    #[test]
    fn ks_plus_matrix_char_poly() {
        // (mu - 1/2)(mu^2 + 2 mu - 1)
        let p = [c64(1.0, 0.0), c64(1.5, 0.0), c64(-2.0, 0.0), c64(0.5, 0.0)];
        let r = sorted_re(polynomial_roots(&p).unwrap());
        let s2 = 2f64.sqrt();
        let want = [-1.0 - s2, 0.5, s2 - 1.0];
        let mut want = want.to_vec();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (z, w) in r.iter().zip(want) {
            assert!((z - w).norm() < 1e-12);
        }
        assert_residual(&p, &r);
    }

    #[test]
    fn leading_zero_is_rejected() {
        let p = [c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)];
        assert_eq!(polynomial_roots(&p), Err(Error::Degree));
    }

    #[test]
    fn triple_and_double_roots() {
        // (z - 2)^3
        let p = [c64(1.0, 0.0), c64(-6.0, 0.0), c64(12.0, 0.0), c64(-8.0, 0.0)];
        let r = polynomial_roots(&p).unwrap();
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!((z - 2.0).norm() < 1e-4);
        }
        assert_residual(&p, &r);
        // z^2 (z + 1)
        let p = [c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
        assert_residual(&p, &polynomial_roots(&p).unwrap());
    }

    #[test]
    fn general_degree_five() {
        let want = [c64(1.0, 1.0), c64(1.0, -1.0), c64(-2.0, 0.0), c64(0.5, 0.0), c64(3.0, 2.0)];
        let mut coeffs = vec![c64(1.0, 0.0)];
        for w in want {
            let mut next = vec![c64(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i] += a;
                next[i + 1] -= a * w;
            }
            coeffs = next;
        }
        let roots = polynomial_roots_general(&coeffs).unwrap();
        for w in want {
            let best = roots.iter().map(|r| (r - w).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-10);
        }
    }
}
