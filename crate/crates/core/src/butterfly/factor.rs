use crate::error::{expect_len, Error, Result};
use crate::numfield::{require_power_of_two, DenseMatrix, Scalar, ONE, ZERO};

/// Which of the four diagonals of a butterfly factor `[[D1, D2], [D3, D4]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diag {
    D1 = 0,
    D2 = 1,
    D3 = 2,
    D4 = 3,
}

/// How a factor is applied: as stored, transposed, conjugated entrywise, or
/// conjugate-transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Plain,
    Transpose,
    Conjugate,
    Adjoint,
}

/// A butterfly factor matrix `B_k^(n)`: `n/k` diagonal blocks, each a
/// butterfly factor `[[D1, D2], [D3, D4]]` of diagonal `k/2 x k/2` pieces.
///
/// Coefficients are stored block by block in ascending order, each block as
/// `D1, D2, D3, D4` (`k/2` entries each), for `2n` coefficients in total.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrix {
    n: usize,
    block: usize,
    coeffs: Vec<Scalar>,
}

impl FactorMatrix {
    pub fn new(n: usize, block: usize, coeffs: Vec<Scalar>) -> Result<Self> {
        require_power_of_two(n)?;
        require_power_of_two(block)?;
        if block < 2 || block > n {
            return Err(Error::InvalidArgument(format!(
                "block size {block} must lie in 2..={n}"
            )));
        }
        expect_len(2 * n, coeffs.len())?;
        crate::numfield::check_finite(&coeffs, "butterfly factor")?;
        Ok(FactorMatrix { n, block, coeffs })
    }

    pub fn identity(n: usize, block: usize) -> Self {
        let mut f = FactorMatrix {
            n,
            block,
            coeffs: vec![ZERO; 2 * n],
        };
        for b in 0..n / block {
            for j in 0..block / 2 {
                f.set(b, Diag::D1, j, ONE);
                f.set(b, Diag::D4, j, ONE);
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Scalar] {
        &mut self.coeffs
    }

    #[inline]
    fn index(&self, block: usize, diag: Diag, j: usize) -> usize {
        let h = self.block / 2;
        debug_assert!(j < h && block < self.n / self.block);
        block * 2 * self.block + diag as usize * h + j
    }

    pub fn get(&self, block: usize, diag: Diag, j: usize) -> Scalar {
        self.coeffs[self.index(block, diag, j)]
    }

    pub fn set(&mut self, block: usize, diag: Diag, j: usize, v: Scalar) {
        let i = self.index(block, diag, j);
        self.coeffs[i] = v;
    }

    /// Sets the 2x2 switch pairing positions `block*k + j` and `block*k + j + k/2`.
    pub fn set_switch(&mut self, block: usize, j: usize, m: [Scalar; 4]) {
        self.set(block, Diag::D1, j, m[0]);
        self.set(block, Diag::D2, j, m[1]);
        self.set(block, Diag::D3, j, m[2]);
        self.set(block, Diag::D4, j, m[3]);
    }

    /// In-place product with `x`; costs `2n` multiply-adds.
    pub fn apply(&self, x: &mut [Scalar], orientation: Orientation) {
        assert_eq!(x.len(), self.n);
        let k = self.block;
        let h = k / 2;
        for (b, chunk) in self.coeffs.chunks_exact(2 * k).enumerate() {
            let (d1, rest) = chunk.split_at(h);
            let (d2, rest) = rest.split_at(h);
            let (d3, d4) = rest.split_at(h);
            let off = b * k;
            for j in 0..h {
                let (top, bot) = (x[off + j], x[off + j + h]);
                let (a, bb, c, d) = match orientation {
                    Orientation::Plain => (d1[j], d2[j], d3[j], d4[j]),
                    Orientation::Transpose => (d1[j], d3[j], d2[j], d4[j]),
                    Orientation::Conjugate => {
                        (d1[j].conj(), d2[j].conj(), d3[j].conj(), d4[j].conj())
                    }
                    Orientation::Adjoint => {
                        (d1[j].conj(), d3[j].conj(), d2[j].conj(), d4[j].conj())
                    }
                };
                x[off + j] = a * top + bb * bot;
                x[off + j + h] = c * top + d * bot;
            }
        }
    }

    /// The conjugate transpose, which is again a factor matrix of the same
    /// block size: `(D1, D2, D3, D4) -> (D1*, D3*, D2*, D4*)`.
    pub fn adjoint(&self) -> FactorMatrix {
        let k = self.block;
        let h = k / 2;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for chunk in self.coeffs.chunks_exact(2 * k) {
            for d in [0, 2, 1, 3] {
                coeffs.extend(chunk[d * h..(d + 1) * h].iter().map(|z| z.conj()));
            }
        }
        FactorMatrix {
            n: self.n,
            block: self.block,
            coeffs,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        let k = self.block;
        let h = k / 2;
        for b in 0..self.n / k {
            for j in 0..h {
                let (t, u) = (b * k + j, b * k + j + h);
                m[(t, t)] = self.get(b, Diag::D1, j);
                m[(t, u)] = self.get(b, Diag::D2, j);
                m[(u, t)] = self.get(b, Diag::D3, j);
                m[(u, u)] = self.get(b, Diag::D4, j);
            }
        }
        m
    }

    /// Copy of `self` placed block-diagonally inside a size-`size` factor
    /// matrix at `offset`; the remaining blocks are identity.
    pub fn embed(&self, size: usize, offset: usize) -> FactorMatrix {
        assert!(offset % self.n == 0 && offset + self.n <= size);
        let mut out = FactorMatrix::identity(size, self.block);
        let start = offset / self.block * 2 * self.block;
        out.coeffs[start..start + self.coeffs.len()].copy_from_slice(&self.coeffs);
        out
    }
}
