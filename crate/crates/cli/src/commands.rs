use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kaleido_core::autodiff::{
    backprop, forward_op_count, gradient_op_audit, transpose_apply_counted,
};
use kaleido_core::circuit::random::random_vector;
use kaleido_core::compile::compile_to_sparse_product;
use kaleido_core::format::{self, format_real, parse_scalar, Document, Kind};
use kaleido_core::kfactor::{circuit_to_kmatrix, route_permutation};
use kaleido_core::numfield::{
    gen_cauchy, gen_fourier, gen_shift, gen_vandermonde, relative_frobenius_distance,
};
use kaleido_core::trainer::{self, matrix_data, Nonlinearity, TrainConfig};
use kaleido_core::{Circuit, DenseMatrix, Scalar, SparseMatrix};

use crate::error::{CliError, CliResult, EXIT_OTHER};
use crate::{
    CheckArgs, CompileArgs, GenArgs, GenKind, GradArgs, MvmArgs, Output, RouteArgs, Target,
    TrainArgs, TransposeArgs,
};

fn read_text(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    let result = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text).map(|_| ()))
    };
    result.map_err(|e| CliError::new(EXIT_OTHER, format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn read_doc(path: &Path, kind: Option<Kind>) -> CliResult<Document> {
    let text = read_text(path)?;
    format::parse(&text, kind).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn read_circuit(path: &Path) -> CliResult<Circuit> {
    match read_doc(path, Some(Kind::Circuit))? {
        Document::Circuit(c) => Ok(c),
        _ => unreachable!("parsed as a circuit"),
    }
}

fn read_vector(path: &Path) -> CliResult<Vec<Scalar>> {
    match read_doc(path, Some(Kind::Vector))? {
        Document::Vector(v) => Ok(v),
        _ => unreachable!("parsed as a vector"),
    }
}

fn emit(out: &Output, text: &str) -> CliResult<()> {
    let result = match &out.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    result.map_err(|m| CliError::new(EXIT_OTHER, m))
}

fn densify(doc: &Document) -> CliResult<DenseMatrix> {
    Ok(match doc {
        Document::Dense(m) => m.clone(),
        Document::Sparse(m) => m.to_dense(),
        Document::Circuit(c) => c.densify()?,
        Document::SparseProduct(p) => p.densify()?,
        Document::KMatrix(k) => k.densify()?,
        Document::Perm(p) => p.to_dense(),
        Document::Pairs(_) | Document::Vector(_) => {
            return Err(CliError::usage(format!(
                "a {} file does not describe an operator",
                doc.kind().keyword()
            )))
        }
    })
}

fn parse_list(flag: &str, text: &str) -> CliResult<Vec<Scalar>> {
    text.split(',')
        .map(|t| {
            parse_scalar(t.trim())
                .ok_or_else(|| CliError::usage(format!("--{flag}: '{t}' is not a finite scalar")))
        })
        .collect()
}

fn nodes(
    flag: &str,
    given: &Option<String>,
    n: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> CliResult<Vec<Scalar>> {
    match (given, n) {
        (Some(text), _) => parse_list(flag, text),
        (None, Some(n)) => Ok(random_vector(rng, n)),
        (None, None) => Err(CliError::usage(format!("--{flag} or --n is required"))),
    }
}

pub fn gen(a: &GenArgs) -> CliResult<()> {
    let need_n = || a.n.ok_or_else(|| CliError::usage("--n is required"));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let doc = match a.kind {
        GenKind::Fourier => Document::Dense(gen_fourier(need_n()?).map_err(CliError::bad_params)?),
        GenKind::Vandermonde => {
            let x = nodes("nodes", &a.nodes, a.n, &mut rng)?;
            let cols = a.n.unwrap_or(x.len());
            Document::Dense(gen_vandermonde(&x, cols).map_err(CliError::bad_params)?)
        }
        GenKind::Cauchy => {
            let s = nodes("s", &a.s, a.n, &mut rng)?;
            let t = nodes("t", &a.t, a.n, &mut rng)?;
            Document::Dense(gen_cauchy(&s, &t).map_err(CliError::bad_params)?)
        }
        GenKind::Shift => Document::Sparse(gen_shift(need_n()?)),
        GenKind::Identity => Document::Sparse(SparseMatrix::identity(need_n()?)),
    };
    emit(&a.out, &doc.write())
}

fn as_circuit(path: &Path, kind: Option<Kind>) -> CliResult<Circuit> {
    match read_doc(path, kind.or(Some(Kind::Circuit)))? {
        Document::Circuit(c) => Ok(c),
        other => Err(CliError::usage(format!(
            "expected a circuit, found a {} file",
            other.kind().keyword()
        ))),
    }
}

pub fn compile(a: &CompileArgs) -> CliResult<()> {
    let c = as_circuit(&a.circuit, a.format)?;
    let metrics = c.metrics();
    let product = compile_to_sparse_product(&c)?;
    let (text, width, expansion, params) = match a.target {
        Target::Sparseproduct => (format::write_sparse_product(&product), None, None, None),
        Target::Kmatrix => {
            let k = circuit_to_kmatrix(&c)?;
            let stats = (Some(k.width()), Some(k.expansion()), Some(k.param_count()));
            (format::write_kmatrix(&k), stats.0, stats.1, stats.2)
        }
    };
    let show = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    emit(&a.out, &text)?;
    eprintln!(
        "s={} d={} s'={} width={} expansion={} params={}",
        metrics.size,
        metrics.depth,
        product.inner_dim(),
        show(width),
        show(expansion),
        show(params)
    );
    Ok(())
}

pub fn check(a: &CheckArgs) -> CliResult<()> {
    if !(a.tol.is_finite() && a.tol >= 0.0) {
        return Err(CliError::usage("--tol must be finite and non-negative"));
    }
    let original = densify(&read_doc(&a.original, a.format)?)?;
    let factored = densify(&read_doc(&a.factorization, a.factor_format)?)?;
    if (original.rows(), original.cols()) != (factored.rows(), factored.cols()) {
        return Err(CliError::verify(format!(
            "shape mismatch: {}x{} against {}x{}",
            original.rows(),
            original.cols(),
            factored.rows(),
            factored.cols()
        )));
    }
    let d = relative_frobenius_distance(&original, &factored)?;
    println!("distance={}", format_real(d));
    if d <= a.tol {
        Ok(())
    } else {
        Err(CliError::verify(format!(
            "distance {} exceeds tolerance {}",
            format_real(d),
            format_real(a.tol)
        )))
    }
}

pub fn route(a: &RouteArgs) -> CliResult<()> {
    let perm = match read_doc(&a.perm, a.format.or(Some(Kind::Perm)))? {
        Document::Perm(p) => p,
        other => {
            return Err(CliError::usage(format!(
                "expected a permutation, found a {} file",
                other.kind().keyword()
            )))
        }
    };
    let k = route_permutation(&perm)?;
    emit(&a.out, &format::write_kmatrix(&k))
}

pub fn train(a: &TrainArgs) -> CliResult<()> {
    let config = TrainConfig {
        eta: a.eta,
        eps: a.eps,
        max_iters: a.iters,
        seed: a.seed,
        nonlinearity: if a.relu {
            Nonlinearity::Relu
        } else {
            Nonlinearity::Identity
        },
    };
    config.validate().map_err(CliError::bad_params)?;
    if a.w == 0 || !a.e.is_power_of_two() {
        return Err(CliError::usage(
            "--w must be positive and --e a power of two",
        ));
    }
    let data = match read_doc(&a.target, a.format)? {
        Document::Pairs(d) => d,
        Document::Vector(_) => return Err(CliError::usage("cannot train against a vector")),
        other => matrix_data(&densify(&other)?, a.probes, a.seed)?,
    };
    let n = data
        .first()
        .map(|s| s.x.len())
        .ok_or_else(|| CliError::usage("no training data"))?;
    if let Some(want) = a.n {
        if want != n {
            return Err(CliError::usage(format!(
                "--n {want} does not match the data size {n}"
            )));
        }
    }
    let state = trainer::train(&data, n, a.w, a.e, &config)?;
    if let Some(path) = &a.loss_csv {
        fs::write(path, format::write_loss_csv(&state.loss_history))
            .map_err(|e| CliError::new(EXIT_OTHER, format!("{}: {e}", path.display())))?;
    }
    emit(&a.out, &format::write_kmatrix(&state.model))?;
    let initial = state.loss_history[0];
    let last = state.loss();
    let ratio = if initial > 0.0 { last / initial } else { 0.0 };
    eprintln!(
        "iters={} initial_loss={} final_loss={} ratio={}",
        state.iter,
        format_real(initial),
        format_real(last),
        format_real(ratio)
    );
    Ok(())
}

pub fn mvm(a: &MvmArgs) -> CliResult<()> {
    let op = read_doc(&a.operator, a.format)?;
    let x = read_vector(&a.vector)?;
    let (y, ops) = match &op {
        Document::Dense(m) => (m.mvm(&x)?, m.rows() * m.cols()),
        Document::Sparse(m) => (m.mvm(&x)?, m.nnz()),
        Document::Circuit(c) => (c.evaluate(&x)?, forward_op_count(c)),
        Document::SparseProduct(p) => p.mvm_counted(&x)?,
        Document::KMatrix(k) => k.mvm_counted(&x)?,
        Document::Perm(p) => (p.apply(&x)?, 0),
        Document::Pairs(_) | Document::Vector(_) => {
            return Err(CliError::usage(format!(
                "a {} file is not an operator",
                op.kind().keyword()
            )))
        }
    };
    emit(&a.out, &format::write_vector(&y))?;
    if a.count_ops {
        eprintln!("ops={ops}");
    }
    Ok(())
}

pub fn grad(a: &GradArgs) -> CliResult<()> {
    let c = read_circuit(&a.circuit)?;
    let x = read_vector(&a.point)?;
    let g = backprop(&c, &x)?;
    emit(&a.out, &format::write_vector(&g.grad))?;
    if a.count_ops {
        let audit = gradient_op_audit(&c)?;
        eprintln!(
            "ops={} forward_ops={} reverse_ops={}",
            g.op_count, audit.forward_ops, audit.reverse_ops
        );
    }
    Ok(())
}

pub fn transpose(a: &TransposeArgs) -> CliResult<()> {
    let c = read_circuit(&a.circuit)?;
    let y = read_vector(&a.vector)?;
    let t = transpose_apply_counted(&c, &y)?;
    emit(&a.out, &format::write_vector(&t.grad))?;
    if a.count_ops {
        eprintln!("ops={}", t.op_count);
    }
    Ok(())
}
