use std::f64::consts::PI;

use super::{require_power_of_two, DenseMatrix, Scalar, SparseMatrix, ONE};
use crate::error::{Error, Result};

/// `omega_n^k` with `omega_n = exp(-2 pi i / n)`. Quarter turns are exact.
pub fn root_of_unity(n: usize, k: usize) -> Scalar {
    let k = k % n;
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            0 => ONE,
            1 => Scalar::new(0.0, -1.0),
            2 => Scalar::new(-1.0, 0.0),
            _ => Scalar::new(0.0, 1.0),
        };
    }
    let theta = -2.0 * PI * k as f64 / n as f64;
    Scalar::new(theta.cos(), theta.sin())
}

/// The DFT matrix `F[i,j] = omega_n^(ij)`.
pub fn gen_fourier(n: usize) -> Result<DenseMatrix> {
    require_power_of_two(n)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        root_of_unity(n, i * j % n)
    }))
}

/// `V[i,j] = a[i]^j` with `0^0 = 1`.
pub fn gen_vandermonde(a: &[Scalar], n: usize) -> Result<DenseMatrix> {
    for i in 0..a.len() {
        if a[..i].contains(&a[i]) {
            return Err(Error::InvalidArgument(format!(
                "vandermonde nodes must be distinct (a[{i}] repeats)"
            )));
        }
    }
    let mut v = DenseMatrix::zeros(a.len(), n);
    for (i, &ai) in a.iter().enumerate() {
        let mut p = ONE;
        for j in 0..n {
            v[(i, j)] = p;
            p *= ai;
        }
    }
    DenseMatrix::new(a.len(), n, v.data().to_vec())
}

/// `C[i,j] = 1 / (s[i] - t[j])`.
pub fn gen_cauchy(s: &[Scalar], t: &[Scalar]) -> Result<DenseMatrix> {
    let distinct = |v: &[Scalar]| (0..v.len()).all(|i| !v[..i].contains(&v[i]));
    if !distinct(s) || !distinct(t) {
        return Err(Error::InvalidArgument(
            "cauchy nodes must be distinct within s and within t".into(),
        ));
    }
    if let Some(x) = s.iter().find(|x| t.contains(x)) {
        return Err(Error::InvalidArgument(format!(
            "cauchy nodes overlap at {x}"
        )));
    }
    let c = DenseMatrix::from_fn(s.len(), t.len(), |i, j| (s[i] - t[j]).inv());
    DenseMatrix::new(s.len(), t.len(), c.data().to_vec())
}

/// The shift matrix: `Z[i,j] = 1` iff `i = j - 1`.
pub fn gen_shift(n: usize) -> SparseMatrix {
    SparseMatrix::new(n, n, (1..n).map(|j| (j - 1, j, ONE)).collect())
        .expect("superdiagonal entries are in range and distinct")
}

/// The low-rank product `L R`.
pub fn gen_lowrank(l: &DenseMatrix, r: &DenseMatrix) -> Result<DenseMatrix> {
    if l.cols() == 0 && r.rows() == 0 {
        return Ok(DenseMatrix::zeros(l.rows(), r.cols()));
    }
    l.matmul(r)
}

/// The displacement residual `L W - W R`.
pub fn displacement_residual(
    w: &DenseMatrix,
    l: &DenseMatrix,
    r: &DenseMatrix,
) -> Result<DenseMatrix> {
    let n = w.rows();
    for m in [w, l, r] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "displacement operands must all be {n}x{n}, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    l.matmul(w)?.sub(&w.matmul(r)?)
}
