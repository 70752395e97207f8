mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kaleido_core::format::Kind;

#[derive(Parser, Debug)]
#[command(
    name = "kaleido",
    version,
    about = "Build, compile, verify and train kaleidoscope matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated matrix (dense, or sparse for shift and identity).
    Gen(GenArgs),
    /// Compile a linear circuit into a sparse product or a K-matrix.
    Compile(CompileArgs),
    /// Compare two operators by densification.
    Check(CheckArgs),
    /// Route a permutation through a single BB* stage.
    Route(RouteArgs),
    /// Fit a K-matrix to a matrix or to training pairs by gradient descent.
    Train(TrainArgs),
    /// Apply any operator file to a vector.
    Mvm(MvmArgs),
    /// Gradient of a single-output circuit at a point.
    Grad(GradArgs),
    /// Apply the transpose of a linear circuit.
    Transpose(TransposeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GenKind {
    Fourier,
    Vandermonde,
    Cauchy,
    Shift,
    Identity,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Sparseproduct,
    Kmatrix,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated Vandermonde nodes (`re` or `re:im`).
    #[arg(long)]
    nodes: Option<String>,
    /// Comma-separated Cauchy row nodes.
    #[arg(long)]
    s: Option<String>,
    /// Comma-separated Cauchy column nodes.
    #[arg(long)]
    t: Option<String>,
    /// Seed for nodes that are not given explicitly.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CompileArgs {
    circuit: PathBuf,
    #[arg(long, value_enum, default_value_t = Target::Sparseproduct)]
    target: Target,
    #[arg(long)]
    format: Option<Kind>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CheckArgs {
    original: PathBuf,
    factorization: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Format of the original, overriding its header.
    #[arg(long)]
    format: Option<Kind>,
    /// Format of the factorization, overriding its header.
    #[arg(long)]
    factor_format: Option<Kind>,
}

#[derive(Args, Debug)]
struct RouteArgs {
    perm: PathBuf,
    #[arg(long)]
    format: Option<Kind>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Training pairs, or any operator file to fit.
    target: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    w: usize,
    #[arg(long, default_value_t = 1)]
    e: usize,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    eta: f64,
    #[arg(long, default_value_t = 1e-12, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fit `relu(Kx)` instead of `Kx` (real data only).
    #[arg(long)]
    relu: bool,
    /// Random probe inputs added to the basis when fitting a matrix.
    #[arg(long, default_value_t = 0)]
    probes: usize,
    /// Where to write the `iter,loss` history.
    #[arg(long)]
    loss_csv: Option<PathBuf>,
    #[arg(long)]
    format: Option<Kind>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct MvmArgs {
    operator: PathBuf,
    vector: PathBuf,
    /// Report the multiply-add count on standard error.
    #[arg(long)]
    count_ops: bool,
    #[arg(long)]
    format: Option<Kind>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct GradArgs {
    circuit: PathBuf,
    point: PathBuf,
    #[arg(long)]
    count_ops: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct TransposeArgs {
    circuit: PathBuf,
    vector: PathBuf,
    #[arg(long)]
    count_ops: bool,
    #[command(flatten)]
    out: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Compile(a) => commands::compile(&a),
        Command::Check(a) => commands::check(&a),
        Command::Route(a) => commands::route(&a),
        Command::Train(a) => commands::train(&a),
        Command::Mvm(a) => commands::mvm(&a),
        Command::Grad(a) => commands::grad(&a),
        Command::Transpose(a) => commands::transpose(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kaleido: error: {e}");
            ExitCode::from(e.code)
        }
    }
}
