use super::permutation::{route_permutation, Permutation};
use super::step::{step_to_butterfly, StepMatrix};
use crate::butterfly::{ButterflyMatrix, Diag, FactorMatrix, KMatrix, Stage};
use crate::circuit::Circuit;
use crate::compile::compile_to_sparse_product;
use crate::error::{Error, Result};
use crate::numfield::{require_power_of_two, Scalar, SparseMatrix, ONE, ZERO};

/// `S = P1 H P2 V P3` with `H` and `V^T` horizontal step matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct StepForm {
    pub p1: Permutation,
    pub h: StepMatrix,
    pub p2: Permutation,
    /// `V^T`, stored as the step matrix it is.
    pub v_transpose: StepMatrix,
    pub p3: Permutation,
}

impl StepForm {
    pub fn v(&self) -> SparseMatrix {
        self.v_transpose.to_sparse().transpose()
    }

    pub fn to_sparse_factors(&self) -> [SparseMatrix; 5] {
        [
            self.p1.to_sparse(),
            self.h.to_sparse(),
            self.p2.to_sparse(),
            self.v(),
            self.p3.to_sparse(),
        ]
    }
}

fn square_power_of_two(s: &SparseMatrix) -> Result<usize> {
    if s.rows() != s.cols() {
        return Err(Error::NonSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    require_power_of_two(s.rows())?;
    Ok(s.rows())
}

fn dense_rank(sorted_keys: impl Iterator<Item = usize>, n: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    for k in sorted_keys {
        if rank[k] == usize::MAX {
            rank[k] = next;
            next += 1;
        }
    }
    rank
}

/// Splits an `n x n` matrix with at most `n` nonzeros into step form.
///
/// Nonzeros taken in row-major order become the columns of `H`, placed at
/// the dense rank of their row. Taken in column-major order they become the
/// rows of `V`, with a one at the dense rank of their column. `P3` compacts
/// columns, `P2` reorders column-major positions into row-major ones and
/// `P1` spreads the compacted rows back out.
pub fn sparse_to_step_form(s: &SparseMatrix) -> Result<StepForm> {
    if s.rows() != s.cols() {
        return Err(Error::NonSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let n = s.rows();
    if s.nnz() > n {
        return Err(Error::TooManyTriples {
            triples: s.nnz(),
            limit: n,
        });
    }
    let row_major = s.triples();
    let row_rank = dense_rank(row_major.iter().map(|t| t.0), n);
    let mut col_major: Vec<usize> = (0..row_major.len()).collect();
    col_major.sort_by_key(|&t| (row_major[t].1, row_major[t].0));
    let col_rank = dense_rank(col_major.iter().map(|&t| row_major[t].1), n);

    let mut h_cols = vec![None; n];
    for (t, &(r, _, v)) in row_major.iter().enumerate() {
        h_cols[t] = Some((row_rank[r], v));
    }
    let mut vt_cols = vec![None; n];
    for (u, &t) in col_major.iter().enumerate() {
        vt_cols[u] = Some((col_rank[row_major[t].1], ONE));
    }

    let mut rows: Vec<usize> = row_major.iter().map(|t| t.0).collect();
    rows.dedup();
    let mut cols: Vec<usize> = col_major.iter().map(|&t| row_major[t].1).collect();
    cols.dedup();

    let p1 = Permutation::complete(
        n,
        &rows.iter().map(|&r| (row_rank[r], r)).collect::<Vec<_>>(),
    )?;
    let p2 = Permutation::complete(
        n,
        &col_major.iter().copied().enumerate().collect::<Vec<_>>(),
    )?;
    let p3 = Permutation::complete(
        n,
        &cols.iter().map(|&c| (c, col_rank[c])).collect::<Vec<_>>(),
    )?;
    Ok(StepForm {
        p1,
        h: StepMatrix::new(n, h_cols)?,
        p2,
        v_transpose: StepMatrix::new(n, vt_cols)?,
        p3,
    })
}

fn single_stage(k: KMatrix) -> Stage {
    k.into_stages().pop().expect("routing yields one stage")
}

/// An `n`-sparse matrix as a width-5 K-matrix at expansion 1:
/// `(BB*)(B)(BB*)(B*)(BB*)`.
pub fn nsparse_to_kmatrix(s: &SparseMatrix) -> Result<KMatrix> {
    let n = square_power_of_two(s)?;
    let form = sparse_to_step_form(s)?;
    let h = step_to_butterfly(&form.h)?;
    let vt = step_to_butterfly(&form.v_transpose)?;
    // V = (V^T)^T = B_vt^*, the butterfly being real.
    let stages = vec![
        single_stage(route_permutation(&form.p3)?),
        Stage::from_right(vt),
        single_stage(route_permutation(&form.p2)?),
        Stage::from_left(h),
        single_stage(route_permutation(&form.p1)?),
    ];
    KMatrix::new(n, 1, stages)
}

/// Any sparse `n x n` matrix as a K-matrix at expansion 4.
///
/// The nonzeros are cut, in row-major order, into `k = ceil(s/n)` chunks of
/// at most `n`, each decomposed by [`nsparse_to_kmatrix`]. The sum runs in a
/// `4n` space split into four tracks `(x, spare, work, acc)`. For each chunk
/// the first stage also copies track 0 into the work track (its coarsest
/// `B2*` factor), the chunk's stages act on the work track only, and its last
/// stage adds the work track into the accumulator (the block-`2n` factor of
/// its `B1`). The final chunk accumulates into the work track instead and
/// moves the total to track 0 with the coarsest factor. Width is `5k`.
pub fn sparse_to_kmatrix(s: &SparseMatrix) -> Result<KMatrix> {
    let n = square_power_of_two(s)?;
    let size = 4 * n;
    let mut chunks: Vec<SparseMatrix> = s
        .triples()
        .chunks(n)
        .map(|c| SparseMatrix::new(n, n, c.to_vec()))
        .collect::<Result<_>>()?;
    if chunks.is_empty() {
        chunks.push(SparseMatrix::new(n, n, vec![])?);
    }
    let last_chunk = chunks.len() - 1;
    let mut stages = Vec::new();
    for (c, chunk) in chunks.iter().enumerate() {
        let sub = nsparse_to_kmatrix(chunk)?;
        let mut lifted: Vec<Stage> = sub
            .stages()
            .iter()
            .map(|st| st.embed(size, 2 * n))
            .collect();

        // copy x into the work track: applied as the adjoint of the stored factor
        let mut copy = FactorMatrix::identity(size, size);
        for p in 0..n {
            copy.set_switch(0, p, [ONE, ZERO, ONE, ZERO]);
        }
        lifted[0].right.factors_mut()[0] = copy.adjoint();

        let last = lifted.last_mut().expect("five stages per chunk");
        let accumulate = last.left.factor_mut(2 * n);
        for p in 0..n {
            let m = if c == last_chunk {
                [ONE, ONE, ZERO, ZERO]
            } else {
                [ZERO, ZERO, ONE, ONE]
            };
            accumulate.set_switch(1, p, m);
        }
        if c == last_chunk {
            let finish = last.left.factor_mut(size);
            for p in 0..n {
                finish.set_switch(0, p, [ZERO, ONE, ONE, ZERO]);
            }
        }
        stages.extend(lifted);
    }
    KMatrix::new(n, 4, stages)
}

/// `diag(I_n, 0)` on the `ne` space, as a BB* stage.
fn projector_stage(n: usize, size: usize) -> Stage {
    let mut b = ButterflyMatrix::identity(size);
    if size >= 2 {
        let f = b.factor_mut(2);
        for block in 0..size / 2 {
            let keep = |p: usize| if p < n { ONE } else { ZERO };
            f.set(block, Diag::D1, 0, keep(2 * block));
            f.set(block, Diag::D4, 0, keep(2 * block + 1));
        }
    }
    Stage::from_left(b)
}

/// `K1 K2`, as `S E1 (S^T S) E2 S^T`: both at the larger expansion, with the
/// projector `S^T S` as one extra stage. Width is `w1 + w2 + 1`.
pub fn kmatrix_product(k1: &KMatrix, k2: &KMatrix) -> Result<KMatrix> {
    if k1.n() != k2.n() {
        return Err(Error::ShapeMismatch(format!(
            "K-matrix product of sizes {} and {}",
            k1.n(),
            k2.n()
        )));
    }
    let e = k1.expansion().max(k2.expansion());
    let (a, b) = (k1.expand(e)?, k2.expand(e)?);
    let n = k1.n();
    let mut stages = b.into_stages();
    stages.push(projector_stage(n, n * e));
    stages.extend(a.into_stages());
    KMatrix::new(n, e, stages)
}

/// The matrix of a square linear circuit as a K-matrix.
///
/// The circuit is compiled into `d` sparse factors of size `s'`; each is
/// lifted by [`sparse_to_kmatrix`] and the results are chained with
/// [`kmatrix_product`]. The output selector becomes a routed permutation
/// when its rows are distinct (otherwise a sparse gather). The result is
/// re-read at logical size `n` with expansion `4s'/n`.
pub fn circuit_to_kmatrix(c: &Circuit) -> Result<KMatrix> {
    if !c.is_linear() {
        return Err(Error::NonLinearCircuit);
    }
    let n = c.n_inputs();
    if c.n_outputs() != n {
        return Err(Error::NonSquare {
            rows: c.n_outputs(),
            cols: n,
        });
    }
    require_power_of_two(n)?;
    let product = compile_to_sparse_product(c)?;
    let inner = product.inner_dim().max(2);
    let pad = |m: &SparseMatrix| SparseMatrix::new(inner, inner, m.triples().to_vec());

    let mut acc: Option<KMatrix> = None;
    for f in product.factors() {
        let k = sparse_to_kmatrix(&pad(f)?)?;
        acc = Some(match acc {
            None => k,
            Some(prev) => kmatrix_product(&k, &prev)?,
        });
    }

    let selector = product.selector();
    let mut distinct = selector.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let gather = if distinct.len() == selector.len() {
        let pairs: Vec<(usize, usize)> =
            selector.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        route_permutation(&Permutation::complete(inner, &pairs)?)?
    } else {
        let triples: Vec<(usize, usize, Scalar)> = selector
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, s, ONE))
            .collect();
        sparse_to_kmatrix(&SparseMatrix::new(inner, inner, triples)?)?
    };
    let total = match acc {
        None => gather.expand(4)?,
        Some(k) => kmatrix_product(&gather, &k)?,
    };
    let e = total.inner_size() / n;
    KMatrix::new(n, e, total.into_stages())
}
