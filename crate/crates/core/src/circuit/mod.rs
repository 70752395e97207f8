//! Arithmetic circuits over [`Scalar`]: a topologically indexed DAG of input,
//! linear-combination and multiplication gates.
//!
//! Gate ids are positions in the gate list. The first `n_inputs` gates are the
//! inputs in slot order and every source id points strictly backwards, so a
//! single forward sweep in index order evaluates the circuit.

mod build;
pub mod random;

#[cfg(test)]
pub(crate) use build::bit_reverse;
pub use build::{build_fft, build_from_dense, CircuitBuilder};

use crate::error::{expect_len, Error, Result};
use crate::numfield::{basis, check_finite, DenseMatrix, Scalar};

pub type GateId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Reads input slot `0`.
    Input(usize),
    /// `alpha * src1 + beta * src2`.
    LinComb {
        alpha: Scalar,
        src1: GateId,
        beta: Scalar,
        src2: GateId,
    },
    /// `src1 * src2`.
    Mul(GateId, GateId),
}

impl Gate {
    pub fn sources(&self) -> Option<(GateId, GateId)> {
        match *self {
            Gate::Input(_) => None,
            Gate::LinComb { src1, src2, .. } | Gate::Mul(src1, src2) => Some((src1, src2)),
        }
    }
}

/// Size and depth of a circuit. `size` counts inputs too.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub size: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
}

impl Circuit {
    pub fn new(n_inputs: usize, gates: Vec<Gate>, outputs: Vec<GateId>) -> Result<Self> {
        let c = Circuit {
            n_inputs,
            gates,
            outputs,
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks the structural invariants: an input prefix in slot order,
    /// backwards-only references, and a nonempty in-range output list.
    pub fn validate(&self) -> Result<()> {
        if self.gates.len() < self.n_inputs {
            return Err(Error::BadInputPrefix(self.gates.len()));
        }
        for (id, gate) in self.gates.iter().enumerate() {
            match *gate {
                Gate::Input(slot) => {
                    if id >= self.n_inputs || slot != id {
                        return Err(Error::BadInputPrefix(id));
                    }
                }
                _ if id < self.n_inputs => return Err(Error::BadInputPrefix(id)),
                _ => {
                    let (a, b) = gate.sources().expect("non-input gate");
                    for source_id in [a, b] {
                        if source_id >= id {
                            return Err(Error::ForwardReference {
                                gate: id,
                                source_id,
                            });
                        }
                    }
                }
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::EmptyOutputs);
        }
        if let Some(&bad) = self.outputs.iter().find(|&&o| o >= self.gates.len()) {
            return Err(Error::ForwardReference {
                gate: self.gates.len(),
                source_id: bad,
            });
        }
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    /// Values of every gate, in index order.
    pub fn forward(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        expect_len(self.n_inputs, x.len())?;
        let mut values = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(slot) => x[slot],
                Gate::LinComb {
                    alpha,
                    src1,
                    beta,
                    src2,
                } => alpha * values[src1] + beta * values[src2],
                Gate::Mul(a, b) => values[a] * values[b],
            };
            values.push(v);
        }
        check_finite(&values, "circuit evaluation")?;
        Ok(values)
    }

    pub fn evaluate(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        let values = self.forward(x)?;
        Ok(self.outputs.iter().map(|&o| values[o]).collect())
    }

    pub fn is_linear(&self) -> bool {
        !self.gates.iter().any(|g| matches!(g, Gate::Mul(..)))
    }

    /// The matrix of a linear circuit, one basis vector per column.
    pub fn densify(&self) -> Result<DenseMatrix> {
        if !self.is_linear() {
            return Err(Error::NonLinearCircuit);
        }
        let columns = (0..self.n_inputs)
            .map(|j| self.evaluate(&basis(self.n_inputs, j)))
            .collect::<Result<Vec<_>>>()?;
        DenseMatrix::from_columns(self.n_outputs(), &columns)
    }

    /// Longest path from the inputs to each gate, counted in non-input gates.
    pub fn gate_depths(&self) -> Vec<usize> {
        let mut depth: Vec<usize> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let d = match gate.sources() {
                None => 0,
                Some((a, b)) => 1 + depth[a].max(depth[b]),
            };
            depth.push(d);
        }
        depth
    }

    /// Non-input gate count.
    pub fn size(&self) -> usize {
        self.gates.len() - self.n_inputs
    }

    pub fn depth(&self) -> usize {
        let depths = self.gate_depths();
        self.outputs.iter().map(|&o| depths[o]).max().unwrap_or(0)
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            size: self.gates.len(),
            depth: self.depth(),
        }
    }

    /// Same circuit with a different output list.
    pub fn with_outputs(&self, outputs: Vec<GateId>) -> Result<Circuit> {
        Circuit::new(self.n_inputs, self.gates.clone(), outputs)
    }

    pub(crate) fn from_parts(n_inputs: usize, gates: Vec<Gate>, outputs: Vec<GateId>) -> Self {
        let c = Circuit {
            n_inputs,
            gates,
            outputs,
        };
        debug_assert!(c.validate().is_ok());
        c
    }
}
