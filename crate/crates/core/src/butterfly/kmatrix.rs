use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ButterflyMatrix, FactorMatrix, Orientation};
use crate::error::{expect_len, Error, Result};
use crate::numfield::{
    basis, check_finite, is_power_of_two, log2, require_power_of_two, DenseMatrix, Scalar, ZERO,
};

/// One BB* stage, `left * right^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub left: ButterflyMatrix,
    pub right: ButterflyMatrix,
}

impl Stage {
    pub fn new(left: ButterflyMatrix, right: ButterflyMatrix) -> Result<Self> {
        if left.n() != right.n() {
            return Err(Error::ShapeMismatch(format!(
                "stage butterflies of sizes {} and {}",
                left.n(),
                right.n()
            )));
        }
        Ok(Stage { left, right })
    }

    pub fn identity(size: usize) -> Self {
        Stage {
            left: ButterflyMatrix::identity(size),
            right: ButterflyMatrix::identity(size),
        }
    }

    /// A stage acting as `b` alone (`right` is the identity).
    pub fn from_left(b: ButterflyMatrix) -> Self {
        let n = b.n();
        Stage {
            left: b,
            right: ButterflyMatrix::identity(n),
        }
    }

    /// A stage acting as `b*` alone (`left` is the identity).
    pub fn from_right(b: ButterflyMatrix) -> Self {
        let n = b.n();
        Stage {
            left: ButterflyMatrix::identity(n),
            right: b,
        }
    }

    pub fn size(&self) -> usize {
        self.left.n()
    }

    /// In-place `left * right^* * x`.
    pub fn apply(&self, x: &mut [Scalar]) {
        for f in self.right.factors() {
            f.apply(x, Orientation::Adjoint);
        }
        for f in self.left.factors().iter().rev() {
            f.apply(x, Orientation::Plain);
        }
    }

    pub fn embed(&self, size: usize, offset: usize) -> Stage {
        Stage {
            left: self.left.embed(size, offset),
            right: self.right.embed(size, offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A factor in the order a K-matrix applies it to a vector.
#[derive(Debug, Clone, Copy)]
pub struct AppliedFactor<'a> {
    pub stage: usize,
    pub side: Side,
    /// Index within the butterfly's stored factor list.
    pub index: usize,
    pub factor: &'a FactorMatrix,
    pub orientation: Orientation,
}

/// A member of `(BB*)^w_e`: `S E S^T` with `E = M_w ... M_1` of size `ne`.
/// `stages[0]` is `M_1`, the first stage applied.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    n: usize,
    e: usize,
    stages: Vec<Stage>,
}

impl KMatrix {
    pub fn new(n: usize, e: usize, stages: Vec<Stage>) -> Result<Self> {
        require_power_of_two(n)?;
        require_power_of_two(e)?;
        if stages.is_empty() {
            return Err(Error::InvalidArgument("width must be at least 1".into()));
        }
        if let Some(s) = stages.iter().find(|s| s.size() != n * e) {
            return Err(Error::ShapeMismatch(format!(
                "stage of size {} in a K-matrix with ne = {}",
                s.size(),
                n * e
            )));
        }
        Ok(KMatrix { n, e, stages })
    }

    pub fn identity(n: usize, e: usize, w: usize) -> Result<Self> {
        require_power_of_two(n)?;
        require_power_of_two(e)?;
        KMatrix::new(n, e, (0..w).map(|_| Stage::identity(n * e)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn expansion(&self) -> usize {
        self.e
    }

    pub fn width(&self) -> usize {
        self.stages.len()
    }

    /// `ne`, the size of the embedded product.
    pub fn inner_size(&self) -> usize {
        self.n * self.e
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stages_mut(&mut self) -> &mut [Stage] {
        &mut self.stages
    }

    pub fn into_stages(self) -> Vec<Stage> {
        self.stages
    }

    /// `4 w ne log2(ne)`.
    pub fn param_count(&self) -> usize {
        let ne = self.inner_size();
        4 * self.width() * ne * log2(ne)
    }

    /// Every factor in application order.
    pub fn applied_factors(&self) -> Vec<AppliedFactor<'_>> {
        let mut out = Vec::with_capacity(2 * self.width() * log2(self.inner_size()));
        for (s, stage) in self.stages.iter().enumerate() {
            for (i, f) in stage.right.factors().iter().enumerate() {
                out.push(AppliedFactor {
                    stage: s,
                    side: Side::Right,
                    index: i,
                    factor: f,
                    orientation: Orientation::Adjoint,
                });
            }
            for (i, f) in stage.left.factors().iter().enumerate().rev() {
                out.push(AppliedFactor {
                    stage: s,
                    side: Side::Left,
                    index: i,
                    factor: f,
                    orientation: Orientation::Plain,
                });
            }
        }
        out
    }

    /// Offset of a factor's coefficients in the flat parameter vector.
    /// Parameters run stage by stage, left butterfly before right, factors
    /// in stored order.
    pub fn param_offset(&self, stage: usize, side: Side, index: usize) -> usize {
        let ne = self.inner_size();
        let per_butterfly = log2(ne) * 2 * ne;
        let side_off = match side {
            Side::Left => 0,
            Side::Right => per_butterfly,
        };
        stage * 2 * per_butterfly + side_off + index * 2 * ne
    }

    pub fn params(&self) -> Vec<Scalar> {
        let mut p = Vec::with_capacity(self.param_count());
        for stage in &self.stages {
            for b in [&stage.left, &stage.right] {
                for f in b.factors() {
                    p.extend_from_slice(f.coeffs());
                }
            }
        }
        p
    }

    pub fn set_params(&mut self, p: &[Scalar]) -> Result<()> {
        expect_len(self.param_count(), p.len())?;
        check_finite(p, "parameter update")?;
        let mut rest = p;
        for stage in &mut self.stages {
            for b in [&mut stage.left, &mut stage.right] {
                for f in b.factors_mut() {
                    let c = f.coeffs_mut();
                    let (head, tail) = rest.split_at(c.len());
                    c.copy_from_slice(head);
                    rest = tail;
                }
            }
        }
        Ok(())
    }

    /// `S E S^T x`: zero-pad to `ne`, apply the stages, truncate to `n`.
    pub fn mvm(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.mvm_counted(x)?.0)
    }

    /// [`KMatrix::mvm`] with the number of multiply-adds performed, which is
    /// exactly `4 w ne log2(ne)`.
    pub fn mvm_counted(&self, x: &[Scalar]) -> Result<(Vec<Scalar>, usize)> {
        expect_len(self.n, x.len())?;
        let ne = self.inner_size();
        let mut v = x.to_vec();
        v.resize(ne, ZERO);
        let mut ops = 0;
        for stage in &self.stages {
            stage.apply(&mut v);
            ops += 2 * log2(ne) * 2 * ne;
        }
        v.truncate(self.n);
        check_finite(&v, "kmatrix_mvm")?;
        Ok((v, ops))
    }

    /// The full `ne x ne` product `E`, applied to `x`.
    pub fn inner_mvm(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        expect_len(self.inner_size(), x.len())?;
        let mut v = x.to_vec();
        for stage in &self.stages {
            stage.apply(&mut v);
        }
        check_finite(&v, "kmatrix inner mvm")?;
        Ok(v)
    }

    pub fn densify(&self) -> Result<DenseMatrix> {
        let columns = (0..self.n)
            .map(|j| self.mvm(&basis(self.n, j)))
            .collect::<Result<Vec<_>>>()?;
        DenseMatrix::from_columns(self.n, &columns)
    }

    /// The same matrix one level up the hierarchy.
    pub fn with_identity_stage(mut self) -> KMatrix {
        self.stages.push(Stage::identity(self.inner_size()));
        self
    }

    /// Re-expresses the same `n x n` matrix at a larger expansion by placing
    /// every stage in the upper-left corner of a larger identity.
    pub fn expand(&self, e: usize) -> Result<KMatrix> {
        require_power_of_two(e)?;
        if e < self.e {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink expansion {} to {e}",
                self.e
            )));
        }
        let size = self.n * e;
        KMatrix::new(
            self.n,
            e,
            self.stages.iter().map(|s| s.embed(size, 0)).collect(),
        )
    }
}

/// A K-matrix whose coefficients are drawn uniformly from `[-σ, σ]` in both
/// real and imaginary parts, `σ = (ne)^(-1/2)`. Deterministic in `seed`.
pub fn random_kmatrix(n: usize, w: usize, e: usize, seed: u64) -> Result<KMatrix> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    if !is_power_of_two(e) {
        return Err(Error::NotPowerOfTwo(e));
    }
    if w == 0 {
        return Err(Error::InvalidArgument("width must be at least 1".into()));
    }
    let mut k = KMatrix::identity(n, e, w)?;
    let sigma = 1.0 / ((n * e) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<Scalar> = (0..k.param_count())
        .map(|_| Scalar::new(rng.gen_range(-sigma..=sigma), rng.gen_range(-sigma..=sigma)))
        .collect();
    k.set_params(&params)?;
    Ok(k)
}
