//! Plain-text serialization of Gram matrices and truncated representations.
//!
//! Gram file:
//!
//! ```text
//! VIRASORO-GRAM v1 c=1/2 h=0/1 N=2 order=reverse-lex
//! basis (2) (1,1)
//! 1/4 0/1
//! 0/1 0/1
//! ```
//!
//! Representation file: a `VIRASORO-REP v1 c=.. h=.. N=.. unitary=..` header,
//! one `level k dim d norms ...` line per level, then for every block a
//! `block n k rows cols` line followed by its rows. Entries are `p/q`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::partition::{enumerate_partitions, Partition};
use crate::rep::TruncatedRep;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::verma::GramMatrix;

pub const SCHEMA_VERSION: u32 = 1;
const GRAM_MAGIC: &str = "VIRASORO-GRAM";
const REP_MAGIC: &str = "VIRASORO-REP";

pub fn write_gram(g: &GramMatrix<Rational>) -> String {
    let mut out = format!(
        "{GRAM_MAGIC} v{SCHEMA_VERSION} c={} h={} N={} order=reverse-lex\nbasis",
        format_rational(&g.c),
        format_rational(&g.h),
        g.level
    );
    for p in &g.basis {
        write!(out, " {p}").unwrap();
    }
    out.push('\n');
    write_rows(&mut out, &g.entries);
    out
}

pub fn read_gram(text: &str) -> Result<GramMatrix<Rational>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| format_err("gram", 1, "empty input"))?;
    let fields = parse_header(header, GRAM_MAGIC, "gram")?;
    let c = parse_rational(field(&fields, "c", "gram")?)?;
    let h = parse_rational(field(&fields, "h", "gram")?)?;
    let level: usize = field(&fields, "N", "gram")?
        .parse()
        .map_err(|_| format_err("gram", 1, "bad N"))?;
    let expected = enumerate_partitions(level);
    let (ln, basis_line) = lines.next().ok_or_else(|| format_err("gram", 2, "missing basis line"))?;
    let listed: Vec<&str> = basis_line
        .strip_prefix("basis")
        .ok_or_else(|| format_err("gram", ln, "expected `basis`"))?
        .split_whitespace()
        .collect();
    let rendered: Vec<String> = expected.iter().map(Partition::to_string).collect();
    if listed != rendered.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(format_err("gram", ln, "basis does not match reverse-lex partitions"));
    }
    let n = expected.len();
    let entries = read_matrix(&mut lines, n, n, "gram")?;
    Ok(GramMatrix {
        level,
        c,
        h,
        basis: expected,
        entries,
    })
}

pub fn write_rep(rep: &TruncatedRep<Rational>) -> String {
    let mut out = format!(
        "{REP_MAGIC} v{SCHEMA_VERSION} c={} h={} N={} unitary={}\n",
        format_rational(rep.central_charge()),
        format_rational(rep.lowest_weight()),
        rep.n_max(),
        rep.is_unitary()
    );
    for k in 0..=rep.n_max() {
        write!(out, "level {k} dim {} norms", rep.dim(k)).unwrap();
        for n in rep.norms(k) {
            write!(out, " {}", format_rational(n)).unwrap();
        }
        out.push('\n');
    }
    for (&(n, k), b) in rep.blocks() {
        writeln!(out, "block {n} {k} {} {}", b.rows(), b.cols()).unwrap();
        write_rows(&mut out, b);
    }
    out
}

pub fn read_rep(text: &str) -> Result<TruncatedRep<Rational>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let (_, header) = lines.next().ok_or_else(|| format_err("rep", 1, "empty input"))?;
    let fields = parse_header(header, REP_MAGIC, "rep")?;
    let c = parse_rational(field(&fields, "c", "rep")?)?;
    let h = parse_rational(field(&fields, "h", "rep")?)?;
    let n_max: usize = field(&fields, "N", "rep")?
        .parse()
        .map_err(|_| format_err("rep", 1, "bad N"))?;
    let unitary = match field(&fields, "unitary", "rep")? {
        "true" => true,
        "false" => false,
        other => return Err(format_err("rep", 1, &format!("bad unitary flag {other:?}"))),
    };
    let mut norms = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        let (ln, line) = lines.next().ok_or_else(|| format_err("rep", 0, "truncated level table"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 5 || tokens[0] != "level" || tokens[2] != "dim" || tokens[4] != "norms" {
            return Err(format_err("rep", ln, "expected `level k dim d norms ...`"));
        }
        if tokens[1].parse::<usize>().ok() != Some(k) {
            return Err(format_err("rep", ln, "levels out of order"));
        }
        let dim: usize = tokens[3].parse().map_err(|_| format_err("rep", ln, "bad dim"))?;
        let ns = tokens[5..]
            .iter()
            .map(|t| parse_rational(t))
            .collect::<Result<Vec<_>>>()?;
        if ns.len() != dim {
            return Err(format_err("rep", ln, "norm count differs from dim"));
        }
        norms.push(ns);
    }
    let mut blocks = BTreeMap::new();
    while let Some((ln, line)) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 || tokens[0] != "block" {
            return Err(format_err("rep", ln, "expected `block n k rows cols`"));
        }
        let parse = |t: &str| t.parse::<i64>().map_err(|_| format_err("rep", ln, "bad integer"));
        let (n, k, rows, cols) = (parse(tokens[1])?, parse(tokens[2])?, parse(tokens[3])?, parse(tokens[4])?);
        let (Ok(k), Ok(rows), Ok(cols)) = (usize::try_from(k), usize::try_from(rows), usize::try_from(cols)) else {
            return Err(format_err("rep", ln, "negative size"));
        };
        let target = k as i64 - n;
        if k > n_max || !(0..=n_max as i64).contains(&target) {
            return Err(format_err("rep", ln, "block outside the truncation"));
        }
        if rows != norms[target as usize].len() || cols != norms[k].len() {
            return Err(format_err("rep", ln, "block shape disagrees with level dims"));
        }
        let m = read_matrix(&mut lines, rows, cols, "rep")?;
        blocks.insert((n, k), m);
    }
    Ok(TruncatedRep::from_parts(c, h, n_max, norms, blocks, unitary))
}

fn write_rows(out: &mut String, m: &DenseMatrix<Rational>) {
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(format_rational).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn read_matrix<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    rows: usize,
    cols: usize,
    what: &'static str,
) -> Result<DenseMatrix<Rational>> {
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (ln, line) = lines.next().ok_or_else(|| format_err(what, 0, "missing matrix rows"))?;
        let row = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| format_err(what, ln, &e.to_string()))?;
        if row.len() != cols {
            return Err(format_err(what, ln, &format!("expected {cols} entries, found {}", row.len())));
        }
        data.push(row);
    }
    if rows == 0 {
        return Ok(DenseMatrix::zeros(0, cols));
    }
    Ok(DenseMatrix::from_rows(data))
}

fn parse_header<'a>(line: &'a str, magic: &str, what: &'static str) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(magic) {
        return Err(format_err(what, 1, &format!("expected `{magic}` header")));
    }
    let version = tokens.next().and_then(|v| v.strip_prefix('v')).and_then(|v| v.parse::<u32>().ok());
    match version {
        Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(format_err(what, 1, &format!("unsupported schema version {v}"))),
        None => return Err(format_err(what, 1, "missing schema version")),
    }
    Ok(tokens.filter_map(|t| t.split_once('=')).collect())
}

fn field<'a>(fields: &BTreeMap<&str, &'a str>, key: &str, what: &'static str) -> Result<&'a str> {
    fields
        .get(key)
        .copied()
        .ok_or_else(|| format_err(what, 1, &format!("missing `{key}=`")))
}

fn format_err(what: &'static str, line: usize, detail: &str) -> Error {
    Error::Format {
        what,
        line,
        detail: detail.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{CentralCharge, LowestWeight};
    use crate::scalar::rational;
    use crate::verma::VermaModule;

    #[test]
    fn gram_header_and_entries() {
        let v = VermaModule::new(&CentralCharge::new(rational(1, 2)).unwrap(), &LowestWeight::vacuum());
        let text = write_gram(&v.gram_matrix(2));
        assert_eq!(
            text,
            "VIRASORO-GRAM v1 c=1/2 h=0/1 N=2 order=reverse-lex\nbasis (2) (1,1)\n1/4 0/1\n0/1 0/1\n"
        );
        assert_eq!(read_gram(&text).unwrap(), v.gram_matrix(2));
    }

    #[test]
    fn stale_schema_is_rejected() {
        let text = "VIRASORO-GRAM v0 c=1/2 h=0/1 N=0 order=reverse-lex\nbasis ()\n1/1\n";
        let err = read_gram(text).unwrap_err();
        assert!(err.to_string().contains("schema version"), "{err}");
    }

    #[test]
    fn rep_round_trip_is_exact() {
        let rep = TruncatedRep::exact(&CentralCharge::new(rational(7, 10)).unwrap(), &LowestWeight::new(rational(1, 10)).unwrap(), 4).unwrap();
        let back = read_rep(&write_rep(&rep)).unwrap();
        assert_eq!(back.level_dims(), rep.level_dims());
        for (key, b) in rep.blocks() {
            assert_eq!(back.block(key.0, key.1), Some(b));
        }
        assert_eq!(write_rep(&back), write_rep(&rep));
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "VIRASORO-GRAM v1 c=1/2 h=0/1 N=1 order=reverse-lex\nbasis (1)\n1/2 3\n";
        match read_gram(text).unwrap_err() {
            Error::Format { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }
}
