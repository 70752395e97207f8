//! Compilation of a linear circuit of size `s` and depth `d` into a product
//! of `d` sparse `s' x s'` matrices followed by a row selector, where `s'` is
//! the smallest power of two at least `s`.
//!
//! Gates are layered by longest-path depth. The vector after layer `k` holds
//! the inputs and every gate value up to layer `k` in a fixed slot order,
//! padded with zeros. Factor `k` copies the `z_k` slots already computed
//! through identity rows, writes the `w_k` gates of layer `k` as rows
//! `alpha e_src1 + beta e_src2`, and leaves the remaining rows zero.

use crate::circuit::{Circuit, Gate};
use crate::error::{expect_len, Error, Result};
use crate::numfield::{basis, DenseMatrix, Scalar, SparseMatrix, ONE, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseProduct {
    n_inputs: usize,
    inner_dim: usize,
    factors: Vec<SparseMatrix>,
    selector: Vec<usize>,
}

impl SparseProduct {
    pub fn new(
        n_inputs: usize,
        inner_dim: usize,
        factors: Vec<SparseMatrix>,
        selector: Vec<usize>,
    ) -> Result<Self> {
        if n_inputs > inner_dim {
            return Err(Error::InvalidArgument(format!(
                "{n_inputs} inputs do not fit an inner dimension of {inner_dim}"
            )));
        }
        for f in &factors {
            if f.rows() != inner_dim || f.cols() != inner_dim {
                return Err(Error::ShapeMismatch(format!(
                    "factor is {}x{}, expected {inner_dim}x{inner_dim}",
                    f.rows(),
                    f.cols()
                )));
            }
        }
        if let Some(&bad) = selector.iter().find(|&&i| i >= inner_dim) {
            return Err(Error::InvalidArgument(format!(
                "selector index {bad} exceeds inner dimension {inner_dim}"
            )));
        }
        if selector.is_empty() {
            return Err(Error::EmptyOutputs);
        }
        Ok(SparseProduct {
            n_inputs,
            inner_dim,
            factors,
            selector,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.selector.len()
    }

    pub fn inner_dim(&self) -> usize {
        self.inner_dim
    }

    /// Factors in application order (the first is applied first).
    pub fn factors(&self) -> &[SparseMatrix] {
        &self.factors
    }

    pub fn selector(&self) -> &[usize] {
        &self.selector
    }

    pub fn nnz(&self) -> usize {
        self.factors.iter().map(SparseMatrix::nnz).sum()
    }

    /// Pads `x` to the inner dimension, applies the factors, gathers the
    /// selected rows.
    pub fn mvm(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.mvm_counted(x)?.0)
    }

    /// [`SparseProduct::mvm`] plus the number of multiply-adds.
    pub fn mvm_counted(&self, x: &[Scalar]) -> Result<(Vec<Scalar>, usize)> {
        expect_len(self.n_inputs, x.len())?;
        let mut v = x.to_vec();
        v.resize(self.inner_dim, ZERO);
        let mut ops = 0;
        for f in &self.factors {
            v = f.mvm(&v)?;
            ops += f.nnz();
        }
        Ok((self.selector.iter().map(|&i| v[i]).collect(), ops))
    }

    pub fn densify(&self) -> Result<DenseMatrix> {
        let columns = (0..self.n_inputs)
            .map(|j| self.mvm(&basis(self.n_inputs, j)))
            .collect::<Result<Vec<_>>>()?;
        DenseMatrix::from_columns(self.n_outputs(), &columns)
    }
}

/// Slot of every gate: inputs first, then each layer's gates in id order.
/// Returns the slots and the layer boundaries `z_1 < z_2 < ... < z_{d+1}`.
fn assign_slots(c: &Circuit) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let depths = c.gate_depths();
    let layers = depths.iter().copied().max().unwrap_or(0);
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); layers + 1];
    for (id, &d) in depths.iter().enumerate() {
        by_layer[d].push(id);
    }
    let mut slot = vec![0; depths.len()];
    let mut bounds = Vec::with_capacity(layers + 1);
    let mut next = 0;
    for layer in &by_layer {
        for &id in layer {
            slot[id] = next;
            next += 1;
        }
        bounds.push(next);
    }
    (slot, bounds, depths)
}

pub fn compile_to_sparse_product(c: &Circuit) -> Result<SparseProduct> {
    if !c.is_linear() {
        return Err(Error::NonLinearCircuit);
    }
    let (slot, bounds, depths) = assign_slots(c);
    let s = c.gates().len();
    let inner = s.next_power_of_two();
    // Only layers up to the output depth are needed to produce the outputs;
    // deeper gates would never be read.
    let d = c.depth();
    let mut factors = Vec::with_capacity(d);
    for k in 1..=d {
        let computed = bounds[k - 1];
        let mut triples: Vec<(usize, usize, Scalar)> = (0..computed).map(|i| (i, i, ONE)).collect();
        for (id, gate) in c.gates().iter().enumerate() {
            if depths[id] != k {
                continue;
            }
            let Gate::LinComb {
                alpha,
                src1,
                beta,
                src2,
            } = *gate
            else {
                unreachable!("linear circuits only hold inputs and linear combinations")
            };
            let row = slot[id];
            if src1 == src2 {
                triples.push((row, slot[src1], alpha + beta));
            } else {
                triples.push((row, slot[src1], alpha));
                triples.push((row, slot[src2], beta));
            }
        }
        factors.push(SparseMatrix::new(inner, inner, triples)?);
    }
    let selector = c.outputs().iter().map(|&o| slot[o]).collect();
    SparseProduct::new(c.n_inputs(), inner, factors, selector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_fft, CircuitBuilder};
    use crate::numfield::{gen_fourier, real, relative_frobenius_distance};

    fn adder() -> Circuit {
        let mut b = CircuitBuilder::new(2);
        let g = b.lin(ONE, 0, ONE, 1);
        b.finish(vec![g]).unwrap()
    }

    #[test]
    fn single_adder_layout() {
        let p = compile_to_sparse_product(&adder()).unwrap();
        assert_eq!(p.inner_dim(), 4);
        assert_eq!(p.factors().len(), 1);
        assert_eq!(p.selector(), &[2]);
        let expected = DenseMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                1.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        assert_eq!(p.factors()[0].to_dense(), expected);
        assert_eq!(p.mvm(&[real(2.0), real(3.0)]).unwrap(), vec![real(5.0)]);
        assert_eq!(
            p.densify().unwrap(),
            DenseMatrix::from_real(1, 2, &[1.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn identity_circuit_has_no_factors() {
        let c = Circuit::new(1, vec![Gate::Input(0)], vec![0]).unwrap();
        let p = compile_to_sparse_product(&c).unwrap();
        assert!(p.factors().is_empty());
        assert_eq!(p.selector(), &[0]);
        assert_eq!(p.mvm(&[real(4.0)]).unwrap(), vec![real(4.0)]);
        assert_eq!(p.densify().unwrap(), DenseMatrix::identity(1));
    }

    #[test]
    fn fft8_compiles_to_three_factors() {
        let c = build_fft(8).unwrap();
        let p = compile_to_sparse_product(&c).unwrap();
        assert_eq!(p.factors().len(), 3);
        assert_eq!(p.inner_dim(), 32);
        for f in p.factors() {
            assert!(f.nnz() <= 2 * p.inner_dim());
        }
        let err =
            relative_frobenius_distance(&gen_fourier(8).unwrap(), &p.densify().unwrap()).unwrap();
        assert!(err < 1e-10);
    }

    #[test]
    fn repeated_source_and_cross_layer_wires() {
        // g2 = 2*x0 + 3*x0 at layer 1; g3 = g2 - x1 at layer 2 reads an input
        // carried forward by the identity rows.
        let mut b = CircuitBuilder::new(2);
        let g2 = b.lin(real(2.0), 0, real(3.0), 0);
        let g3 = b.lin(ONE, g2, real(-1.0), 1);
        let c = b.finish(vec![g3, 1]).unwrap();
        let p = compile_to_sparse_product(&c).unwrap();
        assert_eq!(p.factors().len(), 2);
        assert_eq!(p.densify().unwrap(), c.densify().unwrap());
    }

    #[test]
    fn rejects_nonlinear() {
        let mut b = CircuitBuilder::new(1);
        let g = b.mul(0, 0);
        let c = b.finish(vec![g]).unwrap();
        assert_eq!(compile_to_sparse_product(&c), Err(Error::NonLinearCircuit));
    }
}
