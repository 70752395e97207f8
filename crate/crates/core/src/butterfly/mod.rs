//! Butterfly matrices and the kaleidoscope hierarchy.
//!
//! A butterfly matrix of size `n` is the product `B_n B_{n/2} ... B_2` of
//! factor matrices, stored in that order and applied right to left. A BB*
//! stage is `B1 B2*`; a K-matrix of width `w` and expansion `e` is the
//! upper-left `n x n` corner of a product of `w` BB* stages of size `ne`.

mod factor;
mod kmatrix;

pub use factor::{Diag, FactorMatrix, Orientation};
pub use kmatrix::{random_kmatrix, AppliedFactor, KMatrix, Side, Stage};

use crate::error::{expect_len, Error, Result};
use crate::numfield::{basis, log2, require_power_of_two, root_of_unity, DenseMatrix, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyMatrix {
    n: usize,
    factors: Vec<FactorMatrix>,
}

impl ButterflyMatrix {
    /// `factors[i]` must have block size `n / 2^i`.
    pub fn new(n: usize, factors: Vec<FactorMatrix>) -> Result<Self> {
        require_power_of_two(n)?;
        expect_len(log2(n), factors.len())?;
        for (i, f) in factors.iter().enumerate() {
            if f.n() != n || f.block() != n >> i {
                return Err(Error::InvalidArgument(format!(
                    "factor {i} has size {} and block {}, expected {n} and {}",
                    f.n(),
                    f.block(),
                    n >> i
                )));
            }
        }
        Ok(ButterflyMatrix { n, factors })
    }

    pub fn identity(n: usize) -> Self {
        assert!(crate::numfield::is_power_of_two(n));
        let factors = (0..log2(n))
            .map(|i| FactorMatrix::identity(n, n >> i))
            .collect();
        ButterflyMatrix { n, factors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `[B_n, B_{n/2}, ..., B_2]`.
    pub fn factors(&self) -> &[FactorMatrix] {
        &self.factors
    }

    pub fn factors_mut(&mut self) -> &mut [FactorMatrix] {
        &mut self.factors
    }

    /// The factor with block size `block`.
    pub fn factor_mut(&mut self, block: usize) -> &mut FactorMatrix {
        let i = log2(self.n) - log2(block);
        &mut self.factors[i]
    }

    /// `B x`: the block-size-2 factor goes first.
    pub fn mvm(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        expect_len(self.n, x.len())?;
        let mut y = x.to_vec();
        for f in self.factors.iter().rev() {
            f.apply(&mut y, Orientation::Plain);
        }
        crate::numfield::check_finite(&y, "butterfly_mvm")?;
        Ok(y)
    }

    /// The factors of `B*` in application order: each factor's conjugate
    /// transpose, coarsest block first.
    pub fn adjoint_factors(&self) -> Vec<FactorMatrix> {
        self.factors.iter().map(FactorMatrix::adjoint).collect()
    }

    /// `B* x`.
    pub fn adjoint_mvm(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        expect_len(self.n, x.len())?;
        let mut y = x.to_vec();
        for f in &self.factors {
            f.apply(&mut y, Orientation::Adjoint);
        }
        crate::numfield::check_finite(&y, "butterfly adjoint mvm")?;
        Ok(y)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let columns = (0..self.n)
            .map(|j| self.mvm(&basis(self.n, j)))
            .collect::<Result<Vec<_>>>()?;
        DenseMatrix::from_columns(self.n, &columns)
    }

    /// Places `self` block-diagonally inside a size-`size` butterfly at
    /// `offset`. Factors coarser than `self` become identity.
    pub fn embed(&self, size: usize, offset: usize) -> ButterflyMatrix {
        let mut out = ButterflyMatrix::identity(size);
        let skip = log2(size) - log2(self.n);
        for (i, f) in self.factors.iter().enumerate() {
            out.factors[skip + i] = f.embed(size, offset);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == ButterflyMatrix::identity(self.n)
    }
}

/// The butterfly `B` with `F_n = B P`, where `P` is the bit-reversal
/// permutation: factor `B_k` holds `[[1, w^j], [1, -w^j]]` with
/// `w = omega_k`.
pub fn fft_butterfly(n: usize) -> Result<ButterflyMatrix> {
    require_power_of_two(n)?;
    let factors = (0..log2(n))
        .map(|i| {
            let k = n >> i;
            let mut f = FactorMatrix::identity(n, k);
            for b in 0..n / k {
                for j in 0..k / 2 {
                    let w = root_of_unity(k, j);
                    f.set_switch(b, j, [crate::numfield::ONE, w, crate::numfield::ONE, -w]);
                }
            }
            f
        })
        .collect();
    ButterflyMatrix::new(n, factors)
}
