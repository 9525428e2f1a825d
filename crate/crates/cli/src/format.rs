//! Text formats read and written by the command line tool.
//!
//! Code file:
//!
//! ```text
//! flagcode v1
//! GF(3)
//! n=4
//! dim=4
//!
//! 1,0,1,1
//! 0,1,0,0
//! 0,0,1,1
//! 0,0,0,0
//!
//! ...
//! ```
//!
//! Every basis matrix is one block of lines; a block may also be written on a
//! single line in the matrix text format (`a,b;c,d`). Received words are
//! given as a matrix, as a flag (`V<i>: row;row;...`, one line per member), or
//! as a packet listing (`packet <seq>: a,b,...`) as printed by `encode`.
//! Entries are element codes. `#` starts a comment.

use std::fmt::Write as _;

use flagcode::codes::FlagRankCode;
use flagcode::flags::UpperTriangular;
use flagcode::gf::FieldSpec;
use flagcode::linalg::{MatrixF, Subspace};
use flagcode::netsim::{receiver_reconstruct, Inbox, Packet};

use crate::error::{CliError, CliResult};

pub const CODE_HEADER: &str = "flagcode v1";

/// Non-empty lines with comments stripped, tagged with 1-based line numbers.
/// Blank lines are kept as `None` so block structure survives.
fn lines(text: &str) -> Vec<(usize, Option<&str>)> {
    text.lines()
        .enumerate()
        .map(|(k, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            (k + 1, (!line.is_empty()).then_some(line))
        })
        .collect()
}

fn parse_entries(spec: &FieldSpec, origin: &str, line: usize, row: &str) -> CliResult<Vec<u32>> {
    row.split(',')
        .map(|e| {
            let e = e.trim();
            let v: u32 = e
                .parse()
                .map_err(|_| CliError::parse(origin, line, format!("bad entry `{e}`")))?;
            if v >= spec.order() {
                return Err(CliError::parse(origin, line, format!("entry {v} is not an element of {spec}")));
            }
            Ok(v)
        })
        .collect()
}

/// Rows of a matrix spread over `(line, text)` pairs; each text may hold
/// several `;`-separated rows.
fn parse_rows(spec: &FieldSpec, origin: &str, src: &[(usize, &str)]) -> CliResult<Vec<(usize, Vec<u32>)>> {
    let mut rows = Vec::new();
    for &(line, text) in src {
        for row in text.split(';').map(str::trim).filter(|r| !r.is_empty()) {
            rows.push((line, parse_entries(spec, origin, line, row)?));
        }
    }
    Ok(rows)
}

fn upper_from_rows(
    spec: &FieldSpec,
    n: usize,
    origin: &str,
    first_line: usize,
    rows: &[(usize, Vec<u32>)],
) -> CliResult<UpperTriangular> {
    if rows.len() != n {
        return Err(CliError::parse(origin, first_line, format!("{} rows given, expected {n}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (line, row) in rows {
        if row.len() != n {
            return Err(CliError::parse(origin, *line, format!("row has {} entries, expected {n}", row.len())));
        }
        data.extend_from_slice(row);
    }
    let m = MatrixF::from_codes(spec, n, n, data)?;
    UpperTriangular::from_matrix(&m).map_err(|e| CliError::parse(origin, first_line, e.to_string()))
}

/// Parses an `n x n` upper triangular matrix written in matrix text format,
/// possibly over several lines.
pub fn parse_upper(spec: &FieldSpec, n: usize, origin: &str, text: &str) -> CliResult<UpperTriangular> {
    let src: Vec<(usize, &str)> = lines(text).into_iter().filter_map(|(l, t)| t.map(|t| (l, t))).collect();
    let first = src.first().map_or(1, |s| s.0);
    upper_from_rows(spec, n, origin, first, &parse_rows(spec, origin, &src)?)
}

fn header_value<'a>(origin: &str, line: usize, text: &'a str, key: &str) -> CliResult<&'a str> {
    text.strip_prefix(key)
        .and_then(|rest| rest.trim_start().strip_prefix('='))
        .map(str::trim)
        .ok_or_else(|| CliError::parse(origin, line, format!("expected `{key}=<int>`, found `{text}`")))
}

fn header_int(origin: &str, line: usize, text: &str, key: &str) -> CliResult<usize> {
    let v = header_value(origin, line, text, key)?;
    v.parse().map_err(|_| CliError::parse(origin, line, format!("`{v}` is not a nonnegative integer")))
}

pub fn parse_code_file(origin: &str, text: &str) -> CliResult<FlagRankCode> {
    let all = lines(text);
    let mut content = all.iter().filter_map(|&(l, t)| t.map(|t| (l, t)));
    let mut next = |what: &str| {
        content
            .next()
            .ok_or_else(|| CliError::parse(origin, all.len().max(1), format!("missing {what}")))
    };
    let (l, header) = next("header")?;
    if header != CODE_HEADER {
        return Err(CliError::parse(origin, l, format!("expected `{CODE_HEADER}`, found `{header}`")));
    }
    let (l, field) = next("field line")?;
    let spec: FieldSpec = field.parse().map_err(|e: flagcode::Error| CliError::parse(origin, l, e.to_string()))?;
    let (l, n_line) = next("n= line")?;
    let n = header_int(origin, l, n_line, "n")?;
    if n == 0 {
        return Err(CliError::parse(origin, l, "n must be at least 1"));
    }
    let (dim_line_no, dim_line) = next("dim= line")?;
    let dim = header_int(origin, dim_line_no, dim_line, "dim")?;

    // Blocks: maximal runs of content lines after the dim line.
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    let mut current = Vec::new();
    for &(l, t) in all.iter().filter(|(l, _)| *l > dim_line_no) {
        match t {
            Some(t) => current.push((l, t)),
            None if !current.is_empty() => blocks.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    if blocks.len() != dim {
        let line = blocks.last().and_then(|b| b.last()).map_or(dim_line_no, |x| x.0);
        return Err(CliError::parse(origin, line, format!("{} basis matrices given, dim={dim}", blocks.len())));
    }
    let basis = blocks
        .iter()
        .map(|b| upper_from_rows(&spec, n, origin, b[0].0, &parse_rows(&spec, origin, b)?))
        .collect::<CliResult<Vec<_>>>()?;
    FlagRankCode::new(&spec, n, basis).map_err(|e| CliError::parse(origin, dim_line_no, e.to_string()))
}

pub fn write_code_file(code: &FlagRankCode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CODE_HEADER}");
    let _ = writeln!(s, "{}", code.spec());
    let _ = writeln!(s, "n={}", code.n());
    let _ = writeln!(s, "dim={}", code.dim());
    for b in code.basis() {
        s.push('\n');
        for i in 0..code.n() {
            let row: Vec<String> = (0..code.n()).map(|j| b.code(i, j).to_string()).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
    }
    s
}

/// A received word in one of the three accepted shapes.
#[derive(Clone, Debug)]
pub enum Received {
    Matrix(UpperTriangular),
    /// `(V_1, ..., V_n)`, not yet validated as a degenerate flag.
    Flag(Vec<Subspace>),
    /// The receiver's spans built from a packet listing.
    Packets(Vec<Subspace>),
}

fn label<'a>(text: &'a str, prefix: &str) -> Option<(&'a str, &'a str)> {
    let rest = text.strip_prefix(prefix)?;
    let (tag, body) = rest.split_once(':')?;
    Some((tag.trim(), body.trim()))
}

fn vector_rows(spec: &FieldSpec, n: usize, origin: &str, line: usize, body: &str) -> CliResult<Vec<Vec<u32>>> {
    let rows = parse_rows(spec, origin, &[(line, body)])?;
    rows.into_iter()
        .map(|(_, r)| {
            if r.len() == n + 1 {
                Ok(r)
            } else {
                Err(CliError::parse(origin, line, format!("vector has {} entries, expected {}", r.len(), n + 1)))
            }
        })
        .collect()
}

pub fn parse_received(spec: &FieldSpec, n: usize, origin: &str, text: &str) -> CliResult<Received> {
    let src: Vec<(usize, &str)> = lines(text).into_iter().filter_map(|(l, t)| t.map(|t| (l, t))).collect();
    let is_flag = |t: &str| t.starts_with('V') && t.contains(':');
    if src.iter().any(|(_, t)| is_flag(t)) {
        let mut spaces: Vec<Option<Subspace>> = vec![None; n];
        for &(line, t) in src.iter().filter(|(_, t)| is_flag(t)) {
            let (tag, body) = label(t, "V").expect("checked");
            let i: usize = tag.parse().map_err(|_| CliError::parse(origin, line, format!("bad flag index `{tag}`")))?;
            if i == 0 || i > n {
                return Err(CliError::parse(origin, line, format!("flag index {i} outside 1..={n}")));
            }
            let rows = vector_rows(spec, n, origin, line, body)?;
            let m = MatrixF::from_codes(spec, rows.len(), n + 1, rows.concat())?;
            if spaces[i - 1].replace(Subspace::from_rows(&m)).is_some() {
                return Err(CliError::parse(origin, line, format!("V{i} given twice")));
            }
        }
        let last = src.last().map_or(1, |s| s.0);
        let spaces = spaces
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| CliError::parse(origin, last, format!("V{} missing", k + 1))))
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(Received::Flag(spaces));
    }
    if src.iter().any(|(_, t)| t.starts_with("packet")) {
        let mut inbox = Inbox::new(n);
        for &(line, t) in &src {
            let (tag, body) = label(t, "packet")
                .ok_or_else(|| CliError::parse(origin, line, format!("expected `packet <seq>: ...`, found `{t}`")))?;
            let seq: usize = tag.parse().map_err(|_| CliError::parse(origin, line, format!("bad sequence number `{tag}`")))?;
            for payload in vector_rows(spec, n, origin, line, body)? {
                inbox
                    .push(Packet { seq, payload })
                    .map_err(|e| CliError::parse(origin, line, e.to_string()))?;
            }
        }
        return Ok(Received::Packets(receiver_reconstruct(spec, &inbox)));
    }
    parse_upper(spec, n, origin, text).map(Received::Matrix)
}

/// `V<i>: row;row;...` with the RREF basis of each member.
pub fn write_flag(spaces: &[Subspace]) -> String {
    let mut s = String::new();
    for (k, v) in spaces.iter().enumerate() {
        let _ = writeln!(s, "V{}: {}", k + 1, v.basis());
    }
    s
}
