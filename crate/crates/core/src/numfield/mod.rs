//! Scalars, dense and sparse matrix containers, reference generators for the
//! classical structured families, and displacement-rank checks.
//!
//! Everything here is deliberately plain: these types are the oracles the
//! structured representations elsewhere in the crate are checked against.

mod dense;
mod generate;
mod rank;
mod sparse;

pub use dense::DenseMatrix;
pub use generate::{
    displacement_residual, gen_cauchy, gen_fourier, gen_lowrank, gen_shift, gen_vandermonde,
    root_of_unity,
};
pub use rank::{numeric_rank, DEFAULT_RANK_TOL};
pub use sparse::SparseMatrix;

use crate::error::{Error, Result};

/// Complex double; real data carries a zero imaginary part.
pub type Scalar = num_complex::Complex64;

pub const ZERO: Scalar = Scalar::new(0.0, 0.0);
pub const ONE: Scalar = Scalar::new(1.0, 0.0);

#[inline]
pub fn real(re: f64) -> Scalar {
    Scalar::new(re, 0.0)
}

#[inline]
pub fn is_finite(z: Scalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn check_finite(values: &[Scalar], what: &'static str) -> Result<()> {
    if values.iter().all(|&z| is_finite(z)) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub(crate) fn require_power_of_two(n: usize) -> Result<()> {
    if is_power_of_two(n) {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

/// `log2(n)` for a power of two.
pub fn log2(n: usize) -> usize {
    debug_assert!(is_power_of_two(n));
    n.trailing_zeros() as usize
}

/// Unit basis vector `e_j` of length `n`.
pub fn basis(n: usize, j: usize) -> Vec<Scalar> {
    let mut v = vec![ZERO; n];
    v[j] = ONE;
    v
}

/// Squared Euclidean norm.
pub fn norm_sqr(v: &[Scalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Frobenius distance `||A - B||_F`.
pub fn frobenius_distance(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Frobenius distance divided by `max(1, ||A||_F)`.
pub fn relative_frobenius_distance(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    Ok(frobenius_distance(a, b)? / a.frobenius_norm().max(1.0))
}

/// Largest entrywise modulus difference between two vectors, scaled by
/// `max(1, max |a_i|)`.
pub fn relative_max_error(a: &[Scalar], b: &[Scalar]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}
