//! Finite-difference oracles evaluated in double-double arithmetic.
//!
//! Central differences with `h = 1e-5` lose about `eps·|f|/h ≈ 1e-11·|f|`
//! to cancellation in plain `f64`, which swamps a `1e-6` relative check on
//! small gradient components. Evaluating the perturbed functions with
//! ~32 significant digits leaves only the truncation error of the stencil.

#![allow(dead_code)]

pub mod random;

use kaleido_core::butterfly::{KMatrix, Orientation};
use kaleido_core::trainer::{Nonlinearity, Sample};
use kaleido_core::{Circuit, Gate, Scalar};
use num_complex::Complex;
use twofloat::TwoFloat;

pub type Wide = Complex<TwoFloat>;

pub const H: f64 = 1e-5;

pub fn widen(z: Scalar) -> Wide {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub fn narrow(z: Wide) -> Scalar {
    Scalar::new(f64::from(z.re), f64::from(z.im))
}

fn wide_h() -> TwoFloat {
    TwoFloat::from(H)
}

/// `|got - fd| ≤ tol·|fd|`, or `≤ tol` when `|fd| < 1e-8`.
pub fn agrees(got: f64, fd: f64, tol: f64) -> bool {
    if fd.abs() < 1e-8 {
        (got - fd).abs() <= tol
    } else {
        (got - fd).abs() <= tol * fd.abs()
    }
}

pub fn agrees_complex(got: Scalar, fd: Scalar, tol: f64) -> bool {
    agrees(got.re, fd.re, tol) && agrees(got.im, fd.im, tol)
}

pub fn eval_circuit(c: &Circuit, x: &[Wide]) -> Vec<Wide> {
    let mut v: Vec<Wide> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let value = match *g {
            Gate::Input(slot) => x[slot],
            Gate::LinComb {
                alpha,
                src1,
                beta,
                src2,
            } => widen(alpha) * v[src1] + widen(beta) * v[src2],
            Gate::Mul(a, b) => v[a] * v[b],
        };
        v.push(value);
    }
    c.outputs().iter().map(|&o| v[o]).collect()
}

/// Central differences of a single-output circuit at `a`, one entry per
/// input: `(df along re, df along im)`. For a holomorphic `f` these are
/// `f'` and `i·f'`.
pub fn fd_circuit(c: &Circuit, a: &[Scalar]) -> Vec<(Scalar, Scalar)> {
    let base: Vec<Wide> = a.iter().map(|&z| widen(z)).collect();
    let two_h = wide_h() * 2.0;
    let h = wide_h();
    let zero = TwoFloat::from(0.0);
    (0..a.len())
        .map(|j| {
            let along = |dir: Wide| {
                let mut x = base.clone();
                x[j] = base[j] + dir;
                let up = eval_circuit(c, &x)[0];
                x[j] = base[j] - dir;
                let down = eval_circuit(c, &x)[0];
                let d = up - down;
                narrow(Complex::new(d.re / two_h, d.im / two_h))
            };
            (along(Complex::new(h, zero)), along(Complex::new(zero, h)))
        })
        .collect()
}

fn apply_factor(coeffs: &[Wide], block: usize, orientation: Orientation, x: &mut [Wide]) {
    let h = block / 2;
    for (b, chunk) in coeffs.chunks_exact(2 * block).enumerate() {
        for j in 0..h {
            let (top, bot) = (b * block + j, b * block + j + h);
            let d = |k: usize| chunk[k * h + j];
            let (a, bb, c, dd) = match orientation {
                Orientation::Plain => (d(0), d(1), d(2), d(3)),
                Orientation::Adjoint => (d(0).conj(), d(2).conj(), d(1).conj(), d(3).conj()),
                other => panic!("unused orientation {other:?}"),
            };
            let (u, v) = (x[top], x[bot]);
            x[top] = a * u + bb * v;
            x[bot] = c * u + dd * v;
        }
    }
}

fn relu(z: Wide) -> Wide {
    let zero = TwoFloat::from(0.0);
    Complex::new(if z.re > zero { z.re } else { zero }, zero)
}

/// The training loss of `k` with its parameters replaced by `params`.
pub fn kmatrix_loss(k: &KMatrix, params: &[Wide], data: &[Sample], g: Nonlinearity) -> TwoFloat {
    let ne = k.inner_size();
    let factors = k.applied_factors();
    let mut total = TwoFloat::from(0.0);
    for s in data {
        let mut v: Vec<Wide> = s.x.iter().map(|&z| widen(z)).collect();
        v.resize(ne, widen(Scalar::new(0.0, 0.0)));
        for f in &factors {
            let off = k.param_offset(f.stage, f.side, f.index);
            apply_factor(
                &params[off..off + 2 * ne],
                f.factor.block(),
                f.orientation,
                &mut v,
            );
        }
        for i in 0..k.n() {
            let u = match g {
                Nonlinearity::Identity => v[i],
                Nonlinearity::Relu => relu(v[i]),
            };
            let r = widen(s.y[i]) - u;
            total += r.re * r.re + r.im * r.im;
        }
    }
    total
}

/// Central differences of the loss over every parameter, as
/// `∂E/∂re + i ∂E/∂im`.
pub fn fd_loss_gradient(k: &KMatrix, data: &[Sample], g: Nonlinearity) -> Vec<Scalar> {
    let base: Vec<Wide> = k.params().iter().map(|&z| widen(z)).collect();
    let h = wide_h();
    let zero = TwoFloat::from(0.0);
    (0..base.len())
        .map(|i| {
            let partial = |dir: Wide| {
                let mut p = base.clone();
                p[i] = base[i] + dir;
                let up = kmatrix_loss(k, &p, data, g);
                p[i] = base[i] - dir;
                let down = kmatrix_loss(k, &p, data, g);
                f64::from((up - down) / (h * 2.0))
            };
            Scalar::new(
                partial(Complex::new(h, zero)),
                partial(Complex::new(zero, h)),
            )
        })
        .collect()
}
