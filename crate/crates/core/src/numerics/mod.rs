//! Complex arithmetic, low-degree root finding, small eigenproblems and an
//! adaptive Dormand–Prince integrator.

mod eigen;
mod matrix;
mod ode;
mod poly;

pub use eigen::{eigen_decompose, EigenPairs};
pub use matrix::CMatrix;
pub use ode::{integrate, integrate_until, Direction, OdeOptions, Stepper, Trajectory};
pub use poly::{poly_eval, polynomial_roots, polynomial_roots_general};

pub use num_complex::Complex64 as C64;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest modulus in a complex vector.
pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}
