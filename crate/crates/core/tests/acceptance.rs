//! The acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line (written straight to stderr so it survives output
//! capture) before asserting.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random::{random_perm, random_sparse, random_step};
use common::{agrees, agrees_complex, fd_circuit, fd_loss_gradient};
use kaleido_core::autodiff::{
    backprop, gradient_op_audit, transpose_apply_counted, AUDIT_CONSTANT,
};
use kaleido_core::butterfly::random_kmatrix;
use kaleido_core::circuit::build_fft;
use kaleido_core::circuit::random::{random_circuit, random_vector, RandomCircuitShape};
use kaleido_core::compile::compile_to_sparse_product;
use kaleido_core::kfactor::{
    circuit_to_kmatrix, nsparse_to_kmatrix, route_permutation, sparse_to_kmatrix,
    step_to_butterfly, Permutation,
};
use kaleido_core::numfield::{
    displacement_residual, gen_cauchy, gen_fourier, gen_shift, numeric_rank,
    relative_frobenius_distance, relative_max_error, DEFAULT_RANK_TOL, ONE, ZERO,
};
use kaleido_core::trainer::{
    loss_gradient, train_matrix, Nonlinearity, Sample, TrainConfig, TrainState,
};
use kaleido_core::{DenseMatrix, Error, Scalar};

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id:>2} [{verdict}] {title}: {detail}\n");
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn criterion_01_fft_circuits() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut shapes_ok = true;
    for k in 1..=6u32 {
        let n = 1usize << k;
        let c = build_fft(n).unwrap();
        let err =
            relative_frobenius_distance(&gen_fourier(n).unwrap(), &c.densify().unwrap()).unwrap();
        worst = worst.max(err);
        let m = c.metrics();
        shapes_ok &= m.size == n + n * k as usize && m.depth == k as usize;
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-10 && shapes_ok && within(elapsed, 1.0);
    report(
        1,
        "FFT circuits densify to the DFT, size n + n log n, depth log n",
        pass,
        &format!("max rel err {worst:.2e}, shapes ok {shapes_ok}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_sparse_product_compilation() {
    let start = Instant::now();
    let mut r = rng(2);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut max_s = 0;
    for trial in 0..100 {
        let n = r.gen_range(1..=16);
        let shape = RandomCircuitShape::linear(
            n,
            r.gen_range(1..=512 - n),
            r.gen_range(1..=16),
            r.gen_range(1..=12),
        );
        let c = random_circuit(&mut r, &shape);
        let m = c.metrics();
        max_s = max_s.max(m.size);
        let p = compile_to_sparse_product(&c).unwrap();
        let s2 = p.inner_dim();
        let err =
            relative_frobenius_distance(&c.densify().unwrap(), &p.densify().unwrap()).unwrap();
        worst = worst.max(err);
        let ok = m.size <= 512
            && m.depth <= 12
            && p.factors().len() == m.depth
            && p.selector().len() == c.n_outputs()
            && p.factors().iter().all(|f| f.nnz() <= 2 * s2)
            && m.size <= s2
            && s2 < 2 * m.size
            && err < 1e-9;
        if !ok {
            failures.push(trial);
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && within(elapsed, 30.0);
    report(
        2,
        "100 random linear circuits compile to d sparse factors plus a selector",
        pass,
        &format!("failures {failures:?}, max s {max_s}, max rel err {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_reverse_mode_gradients() {
    let start = Instant::now();
    let mut r = rng(3);
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..100 {
        let n = r.gen_range(1..=8);
        let shape = RandomCircuitShape {
            n_inputs: n,
            gates: r.gen_range(1..=200 - n),
            outputs: 1,
            max_depth: r.gen_range(2..=10),
            mul_fraction: r.gen_range(0.1..0.5),
        };
        let c = random_circuit(&mut r, &shape);
        let a = random_vector(&mut r, n);
        let g = backprop(&c, &a).unwrap().grad;
        let fd = fd_circuit(&c, &a);
        let grads_ok = g.iter().zip(&fd).all(|(&gi, &(along_re, along_im))| {
            agrees_complex(gi, along_re, 1e-6) && agrees_complex(gi * Scalar::i(), along_im, 1e-6)
        });
        let audit = gradient_op_audit(&c).unwrap();
        let bound = AUDIT_CONSTANT * audit.forward_ops + 4 * c.n_outputs();
        if audit.forward_ops > 0 {
            worst_ratio = worst_ratio.max(audit.reverse_ops as f64 / audit.forward_ops as f64);
        }
        if !(grads_ok && audit.reverse_ops <= bound) {
            failures.push(trial);
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && within(elapsed, 30.0);
    report(
        3,
        "backprop matches central differences and stays within the op audit",
        pass,
        &format!("failures {failures:?}, worst reverse/forward {worst_ratio:.2}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_transposition() {
    const C: usize = 6;
    let mut r = rng(4);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let n = r.gen_range(1..=12);
        let shape = RandomCircuitShape::linear(
            n,
            r.gen_range(1..=200),
            r.gen_range(1..=12),
            r.gen_range(1..=10),
        );
        let c = random_circuit(&mut r, &shape);
        let y = random_vector(&mut r, c.n_outputs());
        let t = transpose_apply_counted(&c, &y).unwrap();
        let want = c.densify().unwrap().transpose().mvm(&y).unwrap();
        let err = relative_max_error(&want, &t.grad);
        worst = worst.max(err);
        if !(err < 1e-10 && t.op_count <= 6 * c.metrics().size + C * n) {
            failures.push(trial);
        }
    }
    let pass = failures.is_empty();
    report(
        4,
        "transpose_apply equals W^T y with op count at most 6s + 6n",
        pass,
        &format!("failures {failures:?}, max rel err {worst:.2e}"),
    );
    assert!(pass);
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for at in 0..n {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn criterion_05_benes_routing() {
    let mut r = rng(5);
    let mut perms: Vec<Permutation> = all_permutations(4)
        .into_iter()
        .map(|p| Permutation::new(p).unwrap())
        .collect();
    let exhaustive = perms.len();
    for n in [8, 16, 32, 64] {
        perms.extend((0..100).map(|_| random_perm(&mut r, n)));
    }
    let bad = perms
        .iter()
        .filter(|p| route_permutation(p).unwrap().densify().unwrap() != p.to_dense())
        .count();
    let pass = exhaustive == 24 && bad == 0;
    report(
        5,
        "every permutation routes through one BB* stage exactly",
        pass,
        &format!(
            "{} permutations ({exhaustive} exhaustive at n=4), {bad} inexact",
            perms.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_step_matrices() {
    let mut r = rng(6);
    let mut conflicts = 0;
    let mut invalid = 0;
    let mut worst: f64 = 0.0;
    for n in [4, 8, 16, 32, 64] {
        for _ in 0..200 {
            let h = random_step(&mut r, n);
            if h.validate().is_err() {
                invalid += 1;
                continue;
            }
            match step_to_butterfly(&h) {
                Ok(b) => {
                    let err =
                        relative_frobenius_distance(&h.to_dense(), &b.to_dense().unwrap()).unwrap();
                    worst = worst.max(err);
                }
                Err(Error::RoutingConflict { .. }) => conflicts += 1,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
    let pass = conflicts == 0 && invalid == 0 && worst <= 1e-12;
    report(
        6,
        "1000 random step matrices become butterfly matrices",
        pass,
        &format!("{conflicts} routing conflicts, max rel err {worst:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_sparse_decomposition_shape() {
    let mut r = rng(7);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut widths = Vec::new();
    for n in [4, 8, 16] {
        for _ in 0..20 {
            let s = random_sparse(&mut r, n, n);
            let k = nsparse_to_kmatrix(&s).unwrap();
            let err = relative_frobenius_distance(&s.to_dense(), &k.densify().unwrap()).unwrap();
            worst = worst.max(err);
            ok &= k.width() <= 5 && k.expansion() == 1 && err < 1e-9;
        }
    }
    let n = 8;
    for _ in 0..20 {
        let s = random_sparse(&mut r, n, 3 * n);
        let k = sparse_to_kmatrix(&s).unwrap();
        let err = relative_frobenius_distance(&s.to_dense(), &k.densify().unwrap()).unwrap();
        worst = worst.max(err);
        widths.push(k.width());
        ok &= k.expansion() == 4 && k.width() <= 8 * s.nnz().div_ceil(n) && err < 1e-9;
    }
    widths.dedup();
    report(
        7,
        "sparse matrices decompose at width 5 (n-sparse) and within 8 per chunk at expansion 4",
        ok,
        &format!("3n-sparse widths {widths:?} (bound 24), max rel err {worst:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_fft_circuit_to_kmatrix() {
    let start = Instant::now();
    let c = build_fft(8).unwrap();
    let k = circuit_to_kmatrix(&c).unwrap();
    let err = relative_frobenius_distance(&gen_fourier(8).unwrap(), &k.densify().unwrap()).unwrap();
    let ne = k.inner_size();
    let formula = 4 * k.width() * ne * ne.trailing_zeros() as usize;
    let elapsed = start.elapsed();
    let pass = err < 1e-8
        && k.width() <= 12 * c.depth()
        && k.param_count() == formula
        && k.params().len() == formula
        && within(elapsed, 5.0);
    report(
        8,
        "the FFT-8 circuit becomes a K-matrix equal to F_8",
        pass,
        &format!(
            "rel err {err:.2e}, width {} (bound {}), expansion {}, params {}, {elapsed:.2?}",
            k.width(),
            12 * c.depth(),
            k.expansion(),
            k.param_count()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_displacement_rank() {
    let mut r = rng(9);
    let mut cauchy_ok = true;
    for _ in 0..20 {
        let n = r.gen_range(1..=16);
        let s = random_vector(&mut r, n);
        let t = random_vector(&mut r, n);
        let c = gen_cauchy(&s, &t).unwrap();
        let e = displacement_residual(&c, &DenseMatrix::diagonal(&s), &DenseMatrix::diagonal(&t))
            .unwrap();
        let ones = e.data().iter().all(|z| (z - ONE).norm() < 1e-9);
        cauchy_ok &= ones && numeric_rank(&e, DEFAULT_RANK_TOL) == 1;
    }
    // ZD - DZ has (d[i+1] - d[i]) on the superdiagonal, so with
    // D'[i,i] = D[i,i] - D[i+1,i+1] it equals -(D' Z).
    let mut shift_ok = true;
    for n in 2..=16 {
        let d: Vec<Scalar> = (0..n).map(|i| Scalar::new((i + 1) as f64, 0.0)).collect();
        let z = gen_shift(n).to_dense();
        let dd = DenseMatrix::diagonal(&d);
        let e = displacement_residual(&dd, &z, &z).unwrap();
        let dprime: Vec<Scalar> = (0..n)
            .map(|i| if i + 1 < n { d[i] - d[i + 1] } else { ZERO })
            .collect();
        let dz = DenseMatrix::diagonal(&dprime).matmul(&z).unwrap();
        let negated = DenseMatrix::zeros(n, n).sub(&dz).unwrap();
        shift_ok &= e == negated && numeric_rank(&e, DEFAULT_RANK_TOL) == n - 1;
    }
    let pass = cauchy_ok && shift_ok;
    report(
        9,
        "Cauchy residual is all ones (rank 1); diagonal-vs-shift residual has rank n-1",
        pass,
        &format!("cauchy {cauchy_ok}, shift {shift_ok} (residual = -(D'Z))"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_training() {
    let start = Instant::now();
    let mut r = rng(10);
    let mut fd_failures = Vec::new();
    for draw in 0..50 {
        let n = if draw % 2 == 0 { 4 } else { 8 };
        let w = r.gen_range(1..=2);
        let e = if r.gen_bool(0.5) { 1 } else { 2 };
        let g = if draw % 5 == 4 {
            Nonlinearity::Relu
        } else {
            Nonlinearity::Identity
        };
        let k = random_kmatrix(n, w, e, r.gen()).unwrap();
        let real_only = g == Nonlinearity::Relu;
        let data: Vec<Sample> = (0..5)
            .map(|_| {
                let mut v = || -> Vec<Scalar> {
                    random_vector(&mut r, n)
                        .into_iter()
                        .map(|z| if real_only { Scalar::new(z.re, 0.0) } else { z })
                        .collect()
                };
                let x = v();
                Sample::new(x, v())
            })
            .collect();
        let grad = loss_gradient(&k, &data, g).unwrap();
        let fd = fd_loss_gradient(&k, &data, g);
        let ok = grad
            .iter()
            .zip(&fd)
            .all(|(a, b)| agrees(a.re, b.re, 1e-6) && agrees(a.im, b.im, 1e-6));
        if !ok {
            fd_failures.push(draw);
        }
    }

    let target = DenseMatrix::diagonal(&[Scalar::new(2.0, 0.0), Scalar::new(3.0, 0.0)]);
    let config = TrainConfig {
        eta: 0.05,
        eps: 0.0,
        max_iters: 500,
        seed: 42,
        nonlinearity: Nonlinearity::Identity,
    };
    let first = train_matrix(&target, 1, 1, &config).unwrap();
    let second = train_matrix(&target, 1, 1, &config).unwrap();
    let ratio = first.loss() / first.loss_history[0];
    let bits = |s: &TrainState| {
        s.loss_history
            .iter()
            .map(|l| l.to_bits())
            .collect::<Vec<_>>()
    };
    let deterministic = bits(&first) == bits(&second);
    let elapsed = start.elapsed();
    let pass = fd_failures.is_empty()
        && ratio < 1e-4
        && deterministic
        && first.loss_history.len() == 501
        && within(elapsed, 10.0);
    report(
        10,
        "gradients match central differences; diag(2,3) fit converges deterministically",
        pass,
        &format!(
            "fd failures {fd_failures:?}, loss ratio {ratio:.2e}, deterministic {deterministic}, {elapsed:.2?}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_kmatrix_op_count() {
    let mut r = rng(11);
    let mut mismatches = Vec::new();
    for _ in 0..20 {
        let n = 1usize << r.gen_range(0..=6);
        let e = 1usize << r.gen_range(0..=2);
        let w = r.gen_range(1..=4);
        let k = random_kmatrix(n, w, e, r.gen()).unwrap();
        let (_, ops) = k.mvm_counted(&random_vector(&mut r, n)).unwrap();
        let ne = n * e;
        if ops != 4 * w * ne * ne.trailing_zeros() as usize {
            mismatches.push((n, w, e, ops));
        }
    }
    let pass = mismatches.is_empty();
    report(
        11,
        "K-matrix multiply-add count is exactly 4 w ne log2(ne)",
        pass,
        &format!("mismatches {mismatches:?}"),
    );
    assert!(pass);
}
