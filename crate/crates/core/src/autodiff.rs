//! Reverse-mode differentiation of circuits and the transposition principle.
//!
//! Adjoints are complex: for a circuit computing a polynomial `f`, the
//! returned gradient is the holomorphic derivative `df/dθ_i`. Perturbing the
//! real part of `θ_i` moves `f` by `grad[i]`, the imaginary part by
//! `i * grad[i]`.

use crate::circuit::{Circuit, CircuitBuilder, Gate};
use crate::error::{expect_len, Error, Result};
use crate::numfield::{Scalar, ONE, ZERO};

/// Reverse-pass operation budget per forward operation.
pub const AUDIT_CONSTANT: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientResult {
    pub grad: Vec<Scalar>,
    /// Scalar multiplications and additions performed by the reverse sweep.
    pub op_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpAudit {
    pub forward_ops: usize,
    pub reverse_ops: usize,
}

// A linear combination costs two products and a sum; a product costs one.
fn forward_cost(g: &Gate) -> usize {
    match g {
        Gate::Input(_) => 0,
        Gate::LinComb { .. } => 3,
        Gate::Mul(..) => 1,
    }
}

// Two multiply-accumulates into the source adjoints.
const REVERSE_COST: usize = 4;

fn single_output(c: &Circuit) -> Result<usize> {
    match c.outputs() {
        [o] => Ok(*o),
        outs => Err(Error::MultiOutput(outs.len())),
    }
}

/// Gradient of a single-output circuit at `a`: one forward pass, then a
/// reverse sweep from the output gate accumulating `d[src] += (∂h/∂src)·d[h]`.
pub fn backprop(c: &Circuit, a: &[Scalar]) -> Result<GradientResult> {
    let out = single_output(c)?;
    expect_len(c.n_inputs(), a.len())?;
    let values = c.forward(a)?;
    let gates = c.gates();
    let mut adjoint = vec![ZERO; gates.len()];
    adjoint[out] = ONE;
    let mut op_count = 0;
    for id in (c.n_inputs()..=out).rev() {
        let d = adjoint[id];
        match gates[id] {
            Gate::Input(_) => unreachable!("inputs form the prefix"),
            Gate::LinComb {
                alpha,
                src1,
                beta,
                src2,
            } => {
                adjoint[src1] += alpha * d;
                adjoint[src2] += beta * d;
            }
            Gate::Mul(x, y) => {
                adjoint[x] += values[y] * d;
                adjoint[y] += values[x] * d;
            }
        }
        op_count += REVERSE_COST;
    }
    adjoint.truncate(c.n_inputs());
    Ok(GradientResult {
        grad: adjoint,
        op_count,
    })
}

/// Multiplications and additions in one evaluation of the whole circuit.
pub fn forward_op_count(c: &Circuit) -> usize {
    c.gates().iter().map(forward_cost).sum()
}

/// Forward and reverse operation counts for a single-output circuit.
/// The reverse sweep stays within `AUDIT_CONSTANT` times the forward cost
/// plus a constant per output.
pub fn gradient_op_audit(c: &Circuit) -> Result<OpAudit> {
    let out = single_output(c)?;
    let forward_ops = c.gates()[..=out].iter().map(forward_cost).sum();
    let reverse_ops = (out + 1 - c.n_inputs().min(out + 1)) * REVERSE_COST;
    Ok(OpAudit {
        forward_ops,
        reverse_ops,
    })
}

/// Appends the inner-product chain `z^T y` over a linear circuit's outputs,
/// producing a single-output circuit with `m` extra gates.
pub fn scalarize(c: &Circuit, z: &[Scalar]) -> Result<Circuit> {
    if !c.is_linear() {
        return Err(Error::NonLinearCircuit);
    }
    expect_len(c.n_outputs(), z.len())?;
    let outs = c.outputs();
    let mut b = CircuitBuilder::extend(c);
    let mut acc = b.lin(z[0], outs[0], ZERO, outs[0]);
    for (&o, &zi) in outs.iter().zip(z).skip(1) {
        acc = b.lin(ONE, acc, zi, o);
    }
    b.finish(vec![acc])
}

/// `W^T y` for the matrix `W` of a linear circuit, as the gradient of
/// `y^T W x` with respect to `x`. The gradient of a linear form does not
/// depend on the point, so it is taken at `x = 0`.
pub fn transpose_apply(c: &Circuit, y: &[Scalar]) -> Result<Vec<Scalar>> {
    Ok(transpose_apply_counted(c, y)?.grad)
}

/// [`transpose_apply`] together with the reverse-sweep operation count.
pub fn transpose_apply_counted(c: &Circuit, y: &[Scalar]) -> Result<GradientResult> {
    let s = scalarize(c, y)?;
    backprop(&s, &vec![ZERO; c.n_inputs()])
}
