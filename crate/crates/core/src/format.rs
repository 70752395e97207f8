//! Line-oriented text formats for every object the crate exchanges.
//!
//! Each document opens with a keyword header that names its kind:
//!
//! ```text
//! dense <rows> <cols>            then one row of scalars per line
//! sparse <rows> <cols> <nnz>     then `row col value` per line
//! inputs <n>                     then `gate ...` lines and `outputs ...`
//! sparseproduct <n> <m> <s'> <d> then d sparse blocks and `selector ...`
//! kmatrix <n> <e> <w>            then per stage: left, right butterfly
//! perm <n>                       then the image list
//! pairs <L> <n> <m>              then alternating x and y lines
//! vector <n>                     then the entries
//! ```
//!
//! A butterfly block is `butterfly <ne>` followed by one `factor <k> ...`
//! line per factor, from `k = ne` down to 2, each listing `D1 D2 D3 D4` for
//! every block in ascending order. Scalars are `re` or `re:im`. Blank lines
//! and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::butterfly::{ButterflyMatrix, FactorMatrix, KMatrix, Stage};
use crate::circuit::{Circuit, Gate};
use crate::compile::SparseProduct;
use crate::error::{Error, Result};
use crate::kfactor::Permutation;
use crate::numfield::{log2, DenseMatrix, Scalar, SparseMatrix};
use crate::trainer::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dense,
    Sparse,
    Circuit,
    SparseProduct,
    KMatrix,
    Perm,
    Pairs,
    Vector,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Dense,
        Kind::Sparse,
        Kind::Circuit,
        Kind::SparseProduct,
        Kind::KMatrix,
        Kind::Perm,
        Kind::Pairs,
        Kind::Vector,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Dense => "dense",
            Kind::Sparse => "sparse",
            Kind::Circuit => "inputs",
            Kind::SparseProduct => "sparseproduct",
            Kind::KMatrix => "kmatrix",
            Kind::Perm => "perm",
            Kind::Pairs => "pairs",
            Kind::Vector => "vector",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "circuit" => Ok(Kind::Circuit),
            _ => Kind::ALL
                .into_iter()
                .find(|k| k.keyword() == s)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
    Circuit(Circuit),
    SparseProduct(SparseProduct),
    KMatrix(KMatrix),
    Perm(Permutation),
    Pairs(Vec<Sample>),
    Vector(Vec<Scalar>),
}

impl Document {
    pub fn kind(&self) -> Kind {
        match self {
            Document::Dense(_) => Kind::Dense,
            Document::Sparse(_) => Kind::Sparse,
            Document::Circuit(_) => Kind::Circuit,
            Document::SparseProduct(_) => Kind::SparseProduct,
            Document::KMatrix(_) => Kind::KMatrix,
            Document::Perm(_) => Kind::Perm,
            Document::Pairs(_) => Kind::Pairs,
            Document::Vector(_) => Kind::Vector,
        }
    }

    pub fn write(&self) -> String {
        match self {
            Document::Dense(m) => write_dense(m),
            Document::Sparse(m) => write_sparse(m),
            Document::Circuit(c) => write_circuit(c),
            Document::SparseProduct(p) => write_sparse_product(p),
            Document::KMatrix(k) => write_kmatrix(k),
            Document::Perm(p) => write_perm(p),
            Document::Pairs(d) => write_pairs(d),
            Document::Vector(v) => write_vector(v),
        }
    }
}

/// Shortest text that reads back to the same bits; `-0` prints as `0`.
pub fn format_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn format_scalar(z: Scalar) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else {
        format!("{}:{}", format_real(z.re), format_real(z.im))
    }
}

fn parse_real(s: &str) -> Option<f64> {
    f64::from_str(s).ok().filter(|x| x.is_finite())
}

pub fn parse_scalar(s: &str) -> Option<Scalar> {
    match s.split_once(':') {
        None => parse_real(s).map(|re| Scalar::new(re, 0.0)),
        Some((re, im)) => Some(Scalar::new(parse_real(re)?, parse_real(im)?)),
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

impl<'a> Line<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.number, message)
    }

    fn keyword(&self, want: &str) -> Result<()> {
        if self.tokens.first() == Some(&want) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{want}'")))
        }
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.tokens.len() == n {
            Ok(())
        } else {
            Err(self.err(format!("expected {n} fields, found {}", self.tokens.len())))
        }
    }

    fn count(&self, i: usize) -> Result<usize> {
        self.tokens
            .get(i)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err(format!("field {} is not a count", i + 1)))
    }

    fn scalar(&self, i: usize) -> Result<Scalar> {
        self.tokens
            .get(i)
            .and_then(|t| parse_scalar(t))
            .ok_or_else(|| self.err(format!("field {} is not a finite scalar", i + 1)))
    }

    fn scalars(&self, from: usize) -> Result<Vec<Scalar>> {
        (from..self.tokens.len()).map(|i| self.scalar(i)).collect()
    }

    fn counts(&self, from: usize) -> Result<Vec<usize>> {
        (from..self.tokens.len()).map(|i| self.count(i)).collect()
    }
}

struct Reader<'a> {
    lines: Vec<Line<'a>>,
    at: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.trim();
                (!l.is_empty() && !l.starts_with('#')).then(|| Line {
                    number: i + 1,
                    tokens: l.split_whitespace().collect(),
                })
            })
            .collect();
        Reader { lines, at: 0 }
    }

    fn next(&mut self) -> Result<&Line<'a>> {
        let last = self.lines.last().map_or(0, |l| l.number);
        let line = self
            .lines
            .get(self.at)
            .ok_or_else(|| Error::parse(last + 1, "unexpected end of input"))?;
        self.at += 1;
        Ok(line)
    }

    fn header(&mut self, keyword: &str, fields: usize) -> Result<(usize, Vec<usize>)> {
        let line = self.next()?;
        line.keyword(keyword)?;
        line.arity(fields + 1)?;
        Ok((line.number, line.counts(1)?))
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.at) {
            None => Ok(()),
            Some(l) => Err(l.err("unexpected trailing content")),
        }
    }
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

/// The kind named by the first meaningful line.
pub fn sniff(text: &str) -> Result<Kind> {
    let reader = Reader::new(text);
    let line = reader
        .lines
        .first()
        .ok_or_else(|| Error::parse(1, "empty document"))?;
    Kind::ALL
        .into_iter()
        .find(|k| line.tokens[0] == k.keyword())
        .ok_or_else(|| line.err(format!("unknown header '{}'", line.tokens[0])))
}

/// Parses `text` as `kind`, or as whatever its header names.
pub fn parse(text: &str, kind: Option<Kind>) -> Result<Document> {
    let kind = match kind {
        Some(k) => k,
        None => sniff(text)?,
    };
    Ok(match kind {
        Kind::Dense => Document::Dense(parse_dense(text)?),
        Kind::Sparse => Document::Sparse(parse_sparse(text)?),
        Kind::Circuit => Document::Circuit(parse_circuit(text)?),
        Kind::SparseProduct => Document::SparseProduct(parse_sparse_product(text)?),
        Kind::KMatrix => Document::KMatrix(parse_kmatrix(text)?),
        Kind::Perm => Document::Perm(parse_perm(text)?),
        Kind::Pairs => Document::Pairs(parse_pairs(text)?),
        Kind::Vector => Document::Vector(parse_vector(text)?),
    })
}

fn whole<T>(text: &str, body: impl FnOnce(&mut Reader) -> Result<T>) -> Result<T> {
    let mut r = Reader::new(text);
    let out = body(&mut r)?;
    r.finish()?;
    Ok(out)
}

fn push_scalars(out: &mut String, values: &[Scalar]) {
    for (i, &z) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format_scalar(z));
    }
}

pub fn parse_dense(text: &str) -> Result<DenseMatrix> {
    whole(text, |r| {
        let (at, h) = r.header("dense", 2)?;
        let (rows, cols) = (h[0], h[1]);
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = r.next()?;
            line.arity(cols)?;
            data.extend(line.scalars(0)?);
        }
        at_line(at, DenseMatrix::new(rows, cols, data))
    })
}

pub fn write_dense(m: &DenseMatrix) -> String {
    let mut out = format!("dense {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        push_scalars(&mut out, m.row(i));
        out.push('\n');
    }
    out
}

fn read_sparse(r: &mut Reader) -> Result<SparseMatrix> {
    let (at, h) = r.header("sparse", 3)?;
    let (rows, cols, nnz) = (h[0], h[1], h[2]);
    let mut triples = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let line = r.next()?;
        line.arity(3)?;
        triples.push((line.count(0)?, line.count(1)?, line.scalar(2)?));
    }
    at_line(at, SparseMatrix::new(rows, cols, triples))
}

pub fn parse_sparse(text: &str) -> Result<SparseMatrix> {
    whole(text, read_sparse)
}

pub fn write_sparse(m: &SparseMatrix) -> String {
    let mut out = format!("sparse {} {} {}\n", m.rows(), m.cols(), m.nnz());
    for &(i, j, v) in m.triples() {
        let _ = writeln!(out, "{i} {j} {}", format_scalar(v));
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    whole(text, |r| {
        let (at, h) = r.header("inputs", 1)?;
        let n = h[0];
        let mut gates: Vec<Gate> = (0..n).map(Gate::Input).collect();
        loop {
            let line = r.next()?;
            match line.tokens[0] {
                "gate" => {
                    let id = line.count(1)?;
                    if id != gates.len() {
                        return Err(
                            line.err(format!("expected gate id {}, found {id}", gates.len()))
                        );
                    }
                    let gate = match line.tokens.get(2) {
                        Some(&"lin") => {
                            line.arity(7)?;
                            Gate::LinComb {
                                alpha: line.scalar(3)?,
                                src1: line.count(4)?,
                                beta: line.scalar(5)?,
                                src2: line.count(6)?,
                            }
                        }
                        Some(&"mul") => {
                            line.arity(5)?;
                            Gate::Mul(line.count(3)?, line.count(4)?)
                        }
                        _ => return Err(line.err("gate kind must be 'lin' or 'mul'")),
                    };
                    if let Some((a, b)) = gate.sources() {
                        if a >= id || b >= id {
                            return Err(line.err(format!("gate {id} reads a later gate")));
                        }
                    }
                    gates.push(gate);
                }
                "outputs" => {
                    let outputs = line.counts(1)?;
                    let number = line.number;
                    return at_line(number, Circuit::new(n, gates, outputs));
                }
                other => {
                    return Err(line.err(format!("unexpected '{other}' (line of inputs {at})")))
                }
            }
        }
    })
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("inputs {}\n", c.n_inputs());
    for (id, g) in c.gates().iter().enumerate() {
        match *g {
            Gate::Input(_) => {}
            Gate::LinComb {
                alpha,
                src1,
                beta,
                src2,
            } => {
                let _ = writeln!(
                    out,
                    "gate {id} lin {} {src1} {} {src2}",
                    format_scalar(alpha),
                    format_scalar(beta)
                );
            }
            Gate::Mul(a, b) => {
                let _ = writeln!(out, "gate {id} mul {a} {b}");
            }
        }
    }
    out.push_str("outputs");
    for o in c.outputs() {
        let _ = write!(out, " {o}");
    }
    out.push('\n');
    out
}

pub fn parse_sparse_product(text: &str) -> Result<SparseProduct> {
    whole(text, |r| {
        let (at, h) = r.header("sparseproduct", 4)?;
        let (n, m, inner, d) = (h[0], h[1], h[2], h[3]);
        let factors = (0..d).map(|_| read_sparse(r)).collect::<Result<Vec<_>>>()?;
        let line = r.next()?;
        line.keyword("selector")?;
        let selector = line.counts(1)?;
        if selector.len() != m {
            return Err(line.err(format!(
                "expected {m} selector entries, found {}",
                selector.len()
            )));
        }
        at_line(at, SparseProduct::new(n, inner, factors, selector))
    })
}

pub fn write_sparse_product(p: &SparseProduct) -> String {
    let mut out = format!(
        "sparseproduct {} {} {} {}\n",
        p.n_inputs(),
        p.n_outputs(),
        p.inner_dim(),
        p.factors().len()
    );
    for f in p.factors() {
        out.push_str(&write_sparse(f));
    }
    out.push_str("selector");
    for s in p.selector() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    out
}

fn read_butterfly(r: &mut Reader, size: usize) -> Result<ButterflyMatrix> {
    let (at, h) = r.header("butterfly", 1)?;
    if h[0] != size {
        return Err(Error::parse(
            at,
            format!("expected butterfly of size {size}, found {}", h[0]),
        ));
    }
    let mut factors = Vec::with_capacity(log2(size));
    let mut k = size;
    while k >= 2 {
        let line = r.next()?;
        line.keyword("factor")?;
        line.arity(2 + 2 * size)?;
        if line.count(1)? != k {
            return Err(line.err(format!("expected factor of block size {k}")));
        }
        let number = line.number;
        let coeffs = line.scalars(2)?;
        factors.push(at_line(number, FactorMatrix::new(size, k, coeffs))?);
        k /= 2;
    }
    at_line(at, ButterflyMatrix::new(size, factors))
}

pub fn parse_kmatrix(text: &str) -> Result<KMatrix> {
    whole(text, |r| {
        let (at, h) = r.header("kmatrix", 3)?;
        let (n, e, w) = (h[0], h[1], h[2]);
        let size = n
            .checked_mul(e)
            .filter(|s| s.is_power_of_two())
            .ok_or_else(|| Error::parse(at, "n·e must be a power of two"))?;
        let mut stages = Vec::with_capacity(w);
        for _ in 0..w {
            let left = read_butterfly(r, size)?;
            let right = read_butterfly(r, size)?;
            stages.push(Stage { left, right });
        }
        at_line(at, KMatrix::new(n, e, stages))
    })
}

fn push_butterfly(out: &mut String, b: &ButterflyMatrix) {
    let _ = writeln!(out, "butterfly {}", b.n());
    for f in b.factors() {
        let _ = write!(out, "factor {} ", f.block());
        push_scalars(out, f.coeffs());
        out.push('\n');
    }
}

pub fn write_kmatrix(k: &KMatrix) -> String {
    let mut out = format!("kmatrix {} {} {}\n", k.n(), k.expansion(), k.width());
    for stage in k.stages() {
        push_butterfly(&mut out, &stage.left);
        push_butterfly(&mut out, &stage.right);
    }
    out
}

pub fn parse_perm(text: &str) -> Result<Permutation> {
    whole(text, |r| {
        let (at, h) = r.header("perm", 1)?;
        let line = r.next()?;
        line.arity(h[0])?;
        let image = line.counts(0)?;
        at_line(at, Permutation::new(image))
    })
}

pub fn write_perm(p: &Permutation) -> String {
    let image: Vec<String> = p.image().iter().map(|i| i.to_string()).collect();
    format!("perm {}\n{}\n", p.n(), image.join(" "))
}

pub fn parse_pairs(text: &str) -> Result<Vec<Sample>> {
    whole(text, |r| {
        let (_, h) = r.header("pairs", 3)?;
        let (count, n, m) = (h[0], h[1], h[2]);
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            let x = r.next()?;
            x.arity(n)?;
            let x = x.scalars(0)?;
            let y = r.next()?;
            y.arity(m)?;
            data.push(Sample::new(x, y.scalars(0)?));
        }
        Ok(data)
    })
}

pub fn write_pairs(data: &[Sample]) -> String {
    let n = data.first().map_or(0, |s| s.x.len());
    let m = data.first().map_or(0, |s| s.y.len());
    let mut out = format!("pairs {} {n} {m}\n", data.len());
    for s in data {
        push_scalars(&mut out, &s.x);
        out.push('\n');
        push_scalars(&mut out, &s.y);
        out.push('\n');
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<Scalar>> {
    whole(text, |r| {
        let (at, h) = r.header("vector", 1)?;
        let mut v = Vec::with_capacity(h[0]);
        while v.len() < h[0] {
            let line = r.next()?;
            v.extend(line.scalars(0)?);
        }
        if v.len() != h[0] {
            return Err(Error::parse(
                at,
                format!("expected {} entries, found {}", h[0], v.len()),
            ));
        }
        Ok(v)
    })
}

pub fn write_vector(v: &[Scalar]) -> String {
    let mut out = format!("vector {}\n", v.len());
    push_scalars(&mut out, v);
    out.push('\n');
    out
}

/// `iter,loss` with a header row.
pub fn write_loss_csv(history: &[f64]) -> String {
    let mut out = String::from("iter,loss\n");
    for (i, l) in history.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", format_real(*l));
    }
    out
}
