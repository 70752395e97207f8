//! Random test inputs shared by the property and acceptance suites.

use kaleido_core::kfactor::{Permutation, StepMatrix};
use kaleido_core::{Scalar, SparseMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize, nnz: usize) -> SparseMatrix {
    let picks = rand::seq::index::sample(rng, n * n, nnz).into_vec();
    let triples = picks
        .into_iter()
        .map(|p| {
            let v = Scalar::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
            (p / n, p % n, v)
        })
        .collect();
    SparseMatrix::new(n, n, triples).unwrap()
}

/// A random horizontal step matrix: rows never decrease and never climb
/// faster than the column gap.
pub fn random_step(rng: &mut ChaCha8Rng, n: usize) -> StepMatrix {
    let density = rng.gen_range(0.1..1.0);
    let mut cols = vec![None; n];
    let mut prev: Option<(usize, usize)> = None;
    for (j, col) in cols.iter_mut().enumerate() {
        if !rng.gen_bool(density) {
            continue;
        }
        let i = match prev {
            None => rng.gen_range(0..n),
            Some((pj, pi)) => (pi + rng.gen_range(0..=j - pj)).min(n - 1),
        };
        *col = Some((
            i,
            Scalar::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)),
        ));
        prev = Some((j, i));
    }
    StepMatrix::new(n, cols).unwrap()
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut image: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        image.swap(i, rng.gen_range(0..=i));
    }
    Permutation::new(image).unwrap()
}
