use crate::butterfly::{ButterflyMatrix, Diag};
use crate::error::{expect_len, Error, Result};
use crate::numfield::{require_power_of_two, DenseMatrix, Scalar, SparseMatrix, ONE, ZERO};

/// A square matrix with at most one nonzero per column, stored column-wise
/// as `(row, value)`.
///
/// It is a horizontal step matrix when, for neighbouring nonzero columns
/// `j1 < j2` with rows `i1, i2`, `0 <= i2 - i1 <= j2 - j1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatrix {
    n: usize,
    cols: Vec<Option<(usize, Scalar)>>,
}

impl StepMatrix {
    /// Zero values are treated as empty columns. The step condition is not
    /// checked here; see [`StepMatrix::validate`].
    pub fn new(n: usize, cols: Vec<Option<(usize, Scalar)>>) -> Result<Self> {
        expect_len(n, cols.len())?;
        let mut cols = cols;
        for (j, c) in cols.iter_mut().enumerate() {
            if let Some((row, v)) = *c {
                if row >= n {
                    return Err(Error::IndexOutOfRange {
                        row,
                        col: j,
                        rows: n,
                        cols: n,
                    });
                }
                if v == ZERO {
                    *c = None;
                }
            }
        }
        Ok(StepMatrix { n, cols })
    }

    pub fn from_sparse(s: &SparseMatrix) -> Result<Self> {
        if s.rows() != s.cols() {
            return Err(Error::NonSquare {
                rows: s.rows(),
                cols: s.cols(),
            });
        }
        let mut cols = vec![None; s.cols()];
        for &(r, c, v) in s.triples() {
            if cols[c].replace((r, v)).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "column {c} holds more than one nonzero"
                )));
            }
        }
        StepMatrix::new(s.cols(), cols)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Option<(usize, Scalar)>] {
        &self.cols
    }

    /// Checks the step condition on each pair of neighbouring nonzero columns.
    pub fn validate(&self) -> Result<()> {
        let mut prev: Option<(usize, usize)> = None;
        for (j, c) in self.cols.iter().enumerate() {
            let Some((i, _)) = *c else { continue };
            if let Some((pj, pi)) = prev {
                if i < pi || i - pi > j - pj {
                    return Err(Error::StepViolation { left: pj, right: j });
                }
            }
            prev = Some((j, i));
        }
        Ok(())
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let triples = self
            .cols
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.map(|(i, v)| (i, j, v)))
            .collect();
        SparseMatrix::new(self.n, self.n, triples).expect("one entry per column, in range")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.to_sparse().to_dense()
    }
}

/// Free-function form of [`StepMatrix::validate`].
pub fn validate_step(h: &StepMatrix) -> Result<()> {
    h.validate()
}

/// Writes a horizontal step matrix as a butterfly matrix.
///
/// The size-`m` subproblem at `offset` must leave, at its local output
/// position `p`, the sum of `H[i, j] x_j` over its columns `j` with
/// `i mod m = p`. Columns from the left half are handed to the left child
/// with target `i mod m/2`, those from the right half to the right child;
/// the block-size-`m` factor then steers child position `r` to output `r`
/// or `r + m/2`. Within a half the rows of nonzero columns span fewer than
/// `m/2` values, so no child position is asked to reach two different
/// outputs; a violation is reported as [`Error::RoutingConflict`]. The
/// values themselves sit in the block-size-2 factor.
pub fn step_to_butterfly(h: &StepMatrix) -> Result<ButterflyMatrix> {
    h.validate()?;
    let n = h.n();
    require_power_of_two(n)?;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "butterfly decompositions need size at least 2".into(),
        ));
    }
    let mut b = ButterflyMatrix::identity(n);
    let cols: Vec<(usize, usize, Scalar)> = h
        .columns()
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.map(|(i, v)| (j, i, v)))
        .collect();
    place(&mut b, 0, n, &cols)?;
    Ok(b)
}

fn place(
    b: &mut ButterflyMatrix,
    offset: usize,
    m: usize,
    cols: &[(usize, usize, Scalar)],
) -> Result<()> {
    let h = m / 2;
    let block = offset / m;
    let factor = b.factor_mut(m);
    if m == 2 {
        factor.set_switch(block, 0, [ZERO; 4]);
        for &(j, t, v) in cols {
            let diag = match (j - offset, t) {
                (0, 0) => Diag::D1,
                (0, _) => Diag::D3,
                (_, 0) => Diag::D2,
                _ => Diag::D4,
            };
            factor.set(block, diag, 0, v);
        }
        return Ok(());
    }
    let mut demand: [Vec<Option<usize>>; 2] = [vec![None; h], vec![None; h]];
    let mut children: [Vec<(usize, usize, Scalar)>; 2] = [Vec::new(), Vec::new()];
    for &(j, t, v) in cols {
        let half = usize::from(j - offset >= h);
        let r = t % h;
        match demand[half][r] {
            Some(prev) if prev != t => {
                return Err(Error::RoutingConflict {
                    block: m,
                    position: offset + half * h + r,
                })
            }
            Some(_) => {}
            None => {
                demand[half][r] = Some(t);
                let to_top = t < h;
                let (near, far) = match (half, to_top) {
                    (0, true) => (Diag::D1, Diag::D3),
                    (0, false) => (Diag::D3, Diag::D1),
                    (_, true) => (Diag::D2, Diag::D4),
                    (_, false) => (Diag::D4, Diag::D2),
                };
                factor.set(block, near, r, ONE);
                factor.set(block, far, r, ZERO);
            }
        }
        children[half].push((j, r, v));
    }
    let [top, bottom] = children;
    place(b, offset, h, &top)?;
    place(b, offset + h, h, &bottom)
}
