use super::{Circuit, Gate, GateId};
use crate::error::{Error, Result};
use crate::numfield::{log2, require_power_of_two, root_of_unity, DenseMatrix, Scalar, ONE, ZERO};

/// Appends gates to a circuit under construction; ids are returned in
/// creation order so references are backwards by construction.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> Self {
        CircuitBuilder {
            n_inputs,
            gates: (0..n_inputs).map(Gate::Input).collect(),
        }
    }

    /// Starts from an existing circuit's gates.
    pub fn extend(c: &Circuit) -> Self {
        CircuitBuilder {
            n_inputs: c.n_inputs(),
            gates: c.gates().to_vec(),
        }
    }

    pub fn input(&self, slot: usize) -> GateId {
        assert!(slot < self.n_inputs);
        slot
    }

    pub fn lin(&mut self, alpha: Scalar, src1: GateId, beta: Scalar, src2: GateId) -> GateId {
        self.push(Gate::LinComb {
            alpha,
            src1,
            beta,
            src2,
        })
    }

    pub fn mul(&mut self, src1: GateId, src2: GateId) -> GateId {
        self.push(Gate::Mul(src1, src2))
    }

    fn push(&mut self, gate: Gate) -> GateId {
        let id = self.gates.len();
        let (a, b) = gate
            .sources()
            .expect("builder only appends non-input gates");
        assert!(a < id && b < id, "gate sources must already exist");
        self.gates.push(gate);
        id
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn finish(self, outputs: Vec<GateId>) -> Result<Circuit> {
        Circuit::new(self.n_inputs, self.gates, outputs)
    }
}

/// Radix-2 decimation-in-time FFT circuit computing `F_n x`.
///
/// The bit-reversal reordering is pure wiring: layer one reads the inputs
/// in bit-reversed order, and each of the `log2 n` layers holds `n` gates.
pub fn build_fft(n: usize) -> Result<Circuit> {
    require_power_of_two(n)?;
    let bits = log2(n);
    let mut b = CircuitBuilder::new(n);
    let mut wires: Vec<GateId> = (0..n).map(|i| b.input(bit_reverse(i, bits))).collect();
    let mut m = 2;
    while m <= n {
        let half = m / 2;
        let mut next = wires.clone();
        for start in (0..n).step_by(m) {
            for j in 0..half {
                let w = root_of_unity(m, j);
                let (top, bottom) = (wires[start + j], wires[start + j + half]);
                next[start + j] = b.lin(ONE, top, w, bottom);
                next[start + j + half] = b.lin(ONE, top, -w, bottom);
            }
        }
        wires = next;
        m *= 2;
    }
    b.finish(wires)
}

pub(crate) fn bit_reverse(i: usize, bits: usize) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS as usize - bits)
    }
}

/// The naive row-sum circuit for `W`: per row, a chain
/// `W[i,0] x_0`, then `+ W[i,j] x_j` for each further column.
pub fn build_from_dense(w: &DenseMatrix) -> Result<Circuit> {
    if w.cols() == 0 || w.rows() == 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot build a circuit for a {}x{} matrix",
            w.rows(),
            w.cols()
        )));
    }
    let mut b = CircuitBuilder::new(w.cols());
    let mut outputs = Vec::with_capacity(w.rows());
    for i in 0..w.rows() {
        let mut acc = b.lin(w[(i, 0)], 0, ZERO, 0);
        for j in 1..w.cols() {
            acc = b.lin(ONE, acc, w[(i, j)], j);
        }
        outputs.push(acc);
    }
    b.finish(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::real;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_reversal() {
        assert_eq!(bit_reverse(0, 0), 0);
        assert_eq!(bit_reverse(1, 3), 4);
        assert_eq!(bit_reverse(3, 3), 6);
        assert_eq!(bit_reverse(6, 3), 3);
    }

    #[test]
    fn fft_one_is_identity() {
        let c = build_fft(1).unwrap();
        assert_eq!(c.size(), 0);
        assert_eq!(c.evaluate(&[real(3.5)]).unwrap(), vec![real(3.5)]);
        assert!(matches!(build_fft(3), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn from_dense_examples() {
        let z = build_from_dense(&DenseMatrix::zeros(1, 1)).unwrap();
        assert_eq!(z.evaluate(&[real(4.0)]).unwrap(), vec![ZERO]);
        let id = build_from_dense(&DenseMatrix::identity(2)).unwrap();
        let x = [real(-1.5), Scalar::new(2.0, 0.25)];
        assert_eq!(id.evaluate(&x).unwrap(), x.to_vec());
        assert!(build_from_dense(&DenseMatrix::zeros(2, 0)).is_err());
    }

    #[test]
    fn from_dense_round_trips_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let w = DenseMatrix::from_fn(5, 3, |_, _| {
                Scalar::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
            });
            assert_eq!(build_from_dense(&w).unwrap().densify().unwrap(), w);
        }
    }
}
