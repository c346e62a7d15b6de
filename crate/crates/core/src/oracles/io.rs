//! Plain-text instance files.
//!
//! The format is line oriented and whitespace separated. The first line is a
//! header
//!
//! ```text
//! relbreg-instance <family> n=<n> m=<m> seed=<seed>
//! ```
//!
//! with `family` one of `iep`, `svm-saddle`, `quartic` (`m=0` for quartic).
//! Each following block starts with a tag line and is followed by rows of
//! numbers, one matrix row or one vector per line:
//!
//! - `iep`: for each `i < m`, `A <i>` + `n` rows, `b <i>` + one row; then
//!   `c` + one row of `m` values.
//! - `svm-saddle`: `lambda` + one value, `W` + `n` rows, `labels` + one row,
//!   `alpha` + `m` rows.
//! - `quartic`: `E`, `A`, `C` each + `n` rows, then `b` and `b_hat` each +
//!   one row.
//!
//! Numbers are written in shortest round-trip scientific notation, so a
//! write/read cycle is lossless. Derived constants are recomputed on load.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};

use super::{IepInstance, QuarticInstance, SvmSaddleInstance};
use crate::error::{Error, Result};

const MAGIC: &str = "relbreg-instance";

/// Any serialisable benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Iep(IepInstance),
    Svm(SvmSaddleInstance),
    Quartic(QuarticInstance),
}

fn write_row<'a, W: Write>(out: &mut W, vals: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut first = true;
    for v in vals {
        if !first {
            out.write_all(b" ")?;
        }
        write!(out, "{v:e}")?;
        first = false;
    }
    out.write_all(b"\n")?;
    Ok(())
}

fn write_matrix<W: Write>(out: &mut W, tag: &str, m: &DMatrix<f64>) -> Result<()> {
    writeln!(out, "{tag}")?;
    for r in m.row_iter() {
        write_row(out, r.iter())?;
    }
    Ok(())
}

fn write_vector<W: Write>(out: &mut W, tag: &str, v: &DVector<f64>) -> Result<()> {
    writeln!(out, "{tag}")?;
    write_row(out, v.iter())
}

pub fn write_instance<W: Write>(out: &mut W, inst: &Instance) -> Result<()> {
    match inst {
        Instance::Iep(i) => {
            writeln!(out, "{MAGIC} iep n={} m={} seed={}", i.n(), i.m(), i.seed)?;
            for (k, (a, b)) in i.a.iter().zip(&i.b).enumerate() {
                write_matrix(out, &format!("A {k}"), a)?;
                write_vector(out, &format!("b {k}"), b)?;
            }
            writeln!(out, "c")?;
            write_row(out, i.c.iter())?;
        }
        Instance::Svm(s) => {
            writeln!(out, "{MAGIC} svm-saddle n={} m={} seed={}", s.n(), s.m(), s.seed)?;
            writeln!(out, "lambda")?;
            write_row(out, std::iter::once(&s.lambda_reg))?;
            write_matrix(out, "W", &s.w)?;
            write_vector(out, "labels", &s.labels)?;
            write_matrix(out, "alpha", &s.alpha_constr)?;
        }
        Instance::Quartic(q) => {
            writeln!(out, "{MAGIC} quartic n={} m=0 seed={}", q.n(), q.seed)?;
            write_matrix(out, "E", &q.e)?;
            write_matrix(out, "A", &q.a)?;
            write_matrix(out, "C", &q.c)?;
            write_vector(out, "b", &q.b)?;
            write_vector(out, "b_hat", &q.b_hat)?;
        }
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_line(&mut self) -> Result<String> {
        loop {
            self.line += 1;
            match self.inner.next() {
                Some(l) => {
                    let l = l?;
                    if !l.trim().is_empty() {
                        return Ok(l);
                    }
                }
                None => return Err(self.err("unexpected end of file")),
            }
        }
    }

    fn expect_tag(&mut self, tag: &str) -> Result<()> {
        let l = self.next_line()?;
        if l.split_whitespace().collect::<Vec<_>>().join(" ") == tag {
            Ok(())
        } else {
            Err(self.err(format!("expected `{tag}`, found `{}`", l.trim())))
        }
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>> {
        let l = self.next_line()?;
        let vals = l
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| self.err(e.to_string()))?;
        if vals.len() != len {
            return Err(self.err(format!("expected {len} values, found {}", vals.len())));
        }
        Ok(vals)
    }

    fn matrix(&mut self, tag: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        self.expect_tag(tag)?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.row(cols)?);
        }
        Ok(DMatrix::from_row_slice(rows, cols, &data))
    }

    fn vector(&mut self, tag: &str, len: usize) -> Result<DVector<f64>> {
        self.expect_tag(tag)?;
        Ok(DVector::from_vec(self.row(len)?))
    }
}

fn header_field(tok: Option<&str>, key: &str) -> Option<u64> {
    tok?.strip_prefix(key)?.strip_prefix('=')?.parse().ok()
}

pub fn read_instance<R: BufRead>(input: R) -> Result<Instance> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let header = lines.next_line()?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some(MAGIC) {
        return Err(lines.err("missing instance header"));
    }
    let family = toks.next().unwrap_or_default().to_string();
    let (n, m, seed) = match (
        header_field(toks.next(), "n"),
        header_field(toks.next(), "m"),
        header_field(toks.next(), "seed"),
    ) {
        (Some(n), Some(m), Some(s)) => (n as usize, m as usize, s),
        _ => return Err(lines.err("header must read `n=.. m=.. seed=..`")),
    };
    match family.as_str() {
        "iep" => {
            let mut a = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(m);
            for k in 0..m {
                a.push(lines.matrix(&format!("A {k}"), n, n)?);
                b.push(lines.vector(&format!("b {k}"), n)?);
            }
            lines.expect_tag("c")?;
            let c = lines.row(m)?;
            Ok(Instance::Iep(IepInstance::from_parts(a, b, c, seed)?))
        }
        "svm-saddle" => {
            lines.expect_tag("lambda")?;
            let lambda = lines.row(1)?[0];
            let w = lines.matrix("W", n, n)?;
            let labels = lines.vector("labels", n)?;
            let alpha = lines.matrix("alpha", m, n)?;
            Ok(Instance::Svm(SvmSaddleInstance::new(w, labels, lambda, alpha, seed)?))
        }
        "quartic" => {
            let e = lines.matrix("E", n, n)?;
            let a = lines.matrix("A", n, n)?;
            let c = lines.matrix("C", n, n)?;
            let b = lines.vector("b", n)?;
            let b_hat = lines.vector("b_hat", n)?;
            Ok(Instance::Quartic(QuarticInstance::from_parts(e, a, c, b, b_hat, seed)?))
        }
        other => Err(lines.err(format!("unknown family `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{generate_iep, generate_quartic, generate_svm};

    fn round_trip(inst: Instance) {
        let mut buf = Vec::new();
        write_instance(&mut buf, &inst).unwrap();
        let back = read_instance(buf.as_slice()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn lossless_round_trips() {
        round_trip(Instance::Iep(generate_iep(3, 2, 5).unwrap()));
        round_trip(Instance::Svm(generate_svm(4, 2, 0.5, 5).unwrap()));
        round_trip(Instance::Quartic(generate_quartic(3, 5).unwrap()));
    }

    #[test]
    fn reports_line_of_bad_row() {
        let text = "relbreg-instance quartic n=1 m=0 seed=0\nE\n1\nA\nx\n";
        match read_instance(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_family() {
        assert!(read_instance("relbreg-instance foo n=1 m=1 seed=0\n".as_bytes()).is_err());
    }
}
