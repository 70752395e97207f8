use super::{check_finite, DenseMatrix, Scalar, ONE, ZERO};
use crate::error::{expect_len, Error, Result};

/// Coordinate-list matrix. Triples are kept sorted by `(row, col)`, so each
/// row is summed in ascending column order just like [`DenseMatrix::mvm`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    triples: Vec<(usize, usize, Scalar)>,
}

impl SparseMatrix {
    /// Explicit zeros are dropped; duplicates and out-of-range indices are errors.
    pub fn new(rows: usize, cols: usize, triples: Vec<(usize, usize, Scalar)>) -> Result<Self> {
        let mut triples: Vec<_> = triples.into_iter().filter(|t| t.2 != ZERO).collect();
        for &(row, col, _) in &triples {
            if row >= rows || col >= cols {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
        }
        check_finite(
            &triples.iter().map(|t| t.2).collect::<Vec<_>>(),
            "sparse construction",
        )?;
        triples.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = triples
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        Ok(SparseMatrix {
            rows,
            cols,
            triples,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            triples: (0..n).map(|i| (i, i, ONE)).collect(),
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut triples = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != ZERO {
                    triples.push((i, j, m[(i, j)]));
                }
            }
        }
        SparseMatrix {
            rows: m.rows(),
            cols: m.cols(),
            triples,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[(usize, usize, Scalar)] {
        &self.triples
    }

    /// One multiply-add per stored triple.
    pub fn mvm(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        expect_len(self.cols, x.len())?;
        let mut y = vec![ZERO; self.rows];
        for &(r, c, v) in &self.triples {
            y[r] += v * x[c];
        }
        check_finite(&y, "sparse_mvm")?;
        Ok(y)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.triples {
            m[(r, c)] = v;
        }
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut triples: Vec<_> = self.triples.iter().map(|&(r, c, v)| (c, r, v)).collect();
        triples.sort_by_key(|&(r, c, _)| (r, c));
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            triples,
        }
    }
}
