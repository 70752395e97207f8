use crate::butterfly::{ButterflyMatrix, KMatrix, Stage};
use crate::error::{expect_len, Error, Result};
use crate::numfield::{require_power_of_two, DenseMatrix, Scalar, SparseMatrix, ONE, ZERO};

const STRAIGHT: [Scalar; 4] = [ONE, ZERO, ZERO, ONE];
const CROSS: [Scalar; 4] = [ZERO, ONE, ONE, ZERO];

/// A permutation sending position `j` to `image[j]`; as a matrix,
/// `P[image[j], j] = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotAPermutation(n));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Completes a partial injective map `domain[i] -> codomain[i]` on
    /// `0..n`, sending the unused domain points to the unused codomain points
    /// in ascending order.
    pub fn complete(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for &(from, to) in pairs {
            if from >= n || to >= n || image[from] != usize::MAX || used[to] {
                return Err(Error::NotAPermutation(n));
            }
            image[from] = to;
            used[to] = true;
        }
        let mut free = (0..n).filter(|&i| !used[i]);
        for slot in image.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = free.next().expect("domain and codomain sizes agree");
        }
        Ok(Permutation { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (j, &i) in self.image.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { image: inv }
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        expect_len(self.n(), other.n())?;
        Ok(Permutation {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    pub fn apply(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        expect_len(self.n(), x.len())?;
        let mut y = vec![ZERO; x.len()];
        for (j, &i) in self.image.iter().enumerate() {
            y[i] = x[j];
        }
        Ok(y)
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::new(
            self.n(),
            self.n(),
            self.image
                .iter()
                .enumerate()
                .map(|(j, &i)| (i, j, ONE))
                .collect(),
        )
        .expect("a permutation has one entry per row and column")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.to_sparse().to_dense()
    }
}

/// Routes `p` through a Beneš network laid out as one BB* stage.
///
/// The input switches of a size-`m` subnetwork are the block-size-`m`
/// factor of the right butterfly (applied first, as `B2*`), its output
/// switches the block-size-`m` factor of the left butterfly. Settings come
/// from the looping algorithm; each loop starts at the lowest unrouted input
/// and sends it through the upper subnetwork. The two block-size-2 factors
/// stand for the single middle column of switches, so the left one stays
/// the identity.
pub fn route_permutation(p: &Permutation) -> Result<KMatrix> {
    let n = p.n();
    require_power_of_two(n)?;
    let mut left = ButterflyMatrix::identity(n);
    let mut right = ButterflyMatrix::identity(n);
    route(p.image(), 0, &mut left, &mut right);
    KMatrix::new(n, 1, vec![Stage::new(left, right)?])
}

fn route(perm: &[usize], offset: usize, left: &mut ButterflyMatrix, right: &mut ButterflyMatrix) {
    let m = perm.len();
    if m < 2 {
        return;
    }
    let h = m / 2;
    let block = offset / m;
    if m == 2 {
        let s = if perm[0] == 0 { STRAIGHT } else { CROSS };
        right.factor_mut(2).set_switch(block, 0, s);
        return;
    }
    let partner = |x: usize| x ^ h;
    let mut inv = vec![0; m];
    for (a, &o) in perm.iter().enumerate() {
        inv[o] = a;
    }
    // true: through the upper subnetwork
    let mut in_upper: Vec<Option<bool>> = vec![None; m];
    let mut out_upper: Vec<Option<bool>> = vec![None; m];
    for start in 0..h {
        if in_upper[start].is_some() {
            continue;
        }
        let mut a = start;
        loop {
            let pa = partner(a);
            in_upper[a] = Some(true);
            in_upper[pa] = Some(false);
            out_upper[perm[a]] = Some(true);
            out_upper[perm[pa]] = Some(false);
            let next = inv[partner(perm[pa])];
            if in_upper[next].is_some() {
                debug_assert_eq!(in_upper[next], Some(true));
                break;
            }
            a = next;
        }
    }
    let mut upper = vec![0; h];
    let mut lower = vec![0; h];
    for a in 0..m {
        if in_upper[a] == Some(true) {
            upper[a % h] = perm[a] % h;
        } else {
            lower[a % h] = perm[a] % h;
        }
    }
    let inputs = right.factor_mut(m);
    for s in 0..h {
        let straight = in_upper[s] == Some(true);
        inputs.set_switch(block, s, if straight { STRAIGHT } else { CROSS });
    }
    let outputs = left.factor_mut(m);
    for t in 0..h {
        let straight = out_upper[t] == Some(true);
        outputs.set_switch(block, t, if straight { STRAIGHT } else { CROSS });
    }
    route(&upper, offset, left, right);
    route(&lower, offset + h, left, right);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::butterfly::Diag;

    #[test]
    fn construction() {
        assert!(Permutation::new(vec![1, 0, 2]).is_ok());
        assert_eq!(Permutation::new(vec![1, 1]), Err(Error::NotAPermutation(2)));
        assert_eq!(Permutation::new(vec![0, 2]), Err(Error::NotAPermutation(2)));
        let p = Permutation::complete(4, &[(2, 0), (0, 3)]).unwrap();
        assert_eq!(p.image(), &[3, 1, 0, 2]);
    }

    #[test]
    fn composition_and_inverse() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let q = Permutation::new(vec![1, 2, 0]).unwrap();
        let pq = p.compose(&q).unwrap();
        assert_eq!(pq.to_dense(), p.to_dense().matmul(&q.to_dense()).unwrap());
        assert_eq!(p.compose(&p.inverse()).unwrap(), Permutation::identity(3));
    }

    #[test]
    fn identity_routes_to_identity() {
        for n in [1usize, 2, 4, 8] {
            let k = route_permutation(&Permutation::identity(n)).unwrap();
            assert_eq!(k.densify().unwrap(), DenseMatrix::identity(n));
        }
    }

    #[test]
    fn swap_of_two() {
        let k = route_permutation(&Permutation::new(vec![1, 0]).unwrap()).unwrap();
        let f = &k.stages()[0].right.factors()[0];
        assert_eq!(f.get(0, Diag::D1, 0), ZERO);
        assert_eq!(f.get(0, Diag::D4, 0), ZERO);
        assert_eq!(f.get(0, Diag::D2, 0), ONE);
        assert_eq!(f.get(0, Diag::D3, 0), ONE);
        assert!(k.stages()[0].left.is_identity());
    }

    #[test]
    fn bad_size() {
        assert!(matches!(
            route_permutation(&Permutation::identity(6)),
            Err(Error::NotPowerOfTwo(6))
        ));
    }

    #[test]
    fn reversal_of_eight() {
        let p = Permutation::new((0..8).rev().collect()).unwrap();
        let k = route_permutation(&p).unwrap();
        assert_eq!(k.densify().unwrap(), p.to_dense());
    }
}
