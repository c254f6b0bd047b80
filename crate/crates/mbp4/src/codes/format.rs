//! Quaternary check-matrix text format.
//!
//! ```text
//! # comments start with '#', blank lines are ignored
//! M N
//! <M dense rows of N characters over {I,X,Y,Z}>
//! LOGICALS K            # optional
//! <2K dense rows: X1, Z1, X2, Z2, ...>
//! ```
//!
//! A sparse variant replaces the dense rows with a `SPARSE` header followed
//! by `m n W` triples (1-based check and qubit indices).

use std::fs;
use std::path::Path;

use super::{CheckMatrix, Code, CodeError};
use crate::pauli::{Pauli1, PauliString};

/// Parses a code from the text format, validating commutation and computing
/// rank/K. Logical pairs in the file are validated; otherwise they are
/// derived from the checks.
pub fn parse_check_matrix(text: &str, label: impl Into<String>) -> Result<Code, CodeError> {
    // (line number, content) with comments stripped
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0;
    let next = |pos: &mut usize| -> Option<(usize, &str)> {
        let item = lines.get(*pos).copied();
        *pos += 1;
        item
    };

    let (hline, header) = next(&mut pos).ok_or(CodeError::Parse {
        line: 0,
        reason: "empty file, expected a header line \"M N\"".into(),
    })?;
    let mut parts = header.split_whitespace();
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(CodeError::Parse { line: hline, reason: "header must be \"M N\"".into() })?;
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(CodeError::Parse { line: hline, reason: "header must be \"M N\"".into() })?;
    if parts.next().is_some() {
        return Err(CodeError::Parse { line: hline, reason: "header must be exactly \"M N\"".into() });
    }
    if m == 0 || n == 0 {
        return Err(CodeError::Parse { line: hline, reason: "M and N must be positive".into() });
    }

    let rows = match lines.get(pos) {
        Some(&(_, "SPARSE")) => {
            pos += 1;
            parse_sparse_rows(&lines, &mut pos, m, n)?
        }
        _ => parse_dense_rows(&lines, &mut pos, m, n, "check row")?,
    };

    let logicals = match next(&mut pos) {
        None => None,
        Some((lline, l)) => {
            let mut parts = l.split_whitespace();
            if parts.next() != Some("LOGICALS") {
                return Err(CodeError::Parse {
                    line: lline,
                    reason: format!("unexpected content {l:?} after check rows"),
                });
            }
            let k: usize = parts.next().and_then(|t| t.parse().ok()).ok_or(CodeError::Parse {
                line: lline,
                reason: "LOGICALS header must be \"LOGICALS K\"".into(),
            })?;
            let flat = parse_dense_rows(&lines, &mut pos, 2 * k, n, "logical row")?;
            if let Some((line, content)) = lines.get(pos) {
                return Err(CodeError::Parse {
                    line: *line,
                    reason: format!("unexpected trailing content {content:?}"),
                });
            }
            Some(flat.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect::<Vec<_>>())
        }
    };

    let checks = CheckMatrix::from_rows(rows)?;
    match logicals {
        Some(pairs) => Code::from_checks_with_logicals(label, checks, None, pairs),
        None => Code::from_checks(label, checks, None),
    }
}

fn parse_dense_rows(
    lines: &[(usize, &str)],
    pos: &mut usize,
    count: usize,
    n: usize,
    what: &str,
) -> Result<Vec<PauliString>, CodeError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let (line, content) = *lines.get(*pos).ok_or(CodeError::Parse {
            line: lines.last().map_or(0, |(l, _)| *l),
            reason: format!("expected {count} {what}s, found {i}"),
        })?;
        *pos += 1;
        // allow whitespace between characters
        let compact: String = content.split_whitespace().collect();
        let row: PauliString = compact
            .parse()
            .map_err(|e| CodeError::Parse { line, reason: format!("bad {what}: {e}") })?;
        if row.len() != n {
            return Err(CodeError::Parse {
                line,
                reason: format!("{what} has length {}, expected {n}", row.len()),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_sparse_rows(
    lines: &[(usize, &str)],
    pos: &mut usize,
    m: usize,
    n: usize,
) -> Result<Vec<PauliString>, CodeError> {
    let mut entries: Vec<Vec<(usize, Pauli1)>> = vec![Vec::new(); m];
    while let Some(&(line, content)) = lines.get(*pos) {
        if content.starts_with("LOGICALS") {
            break;
        }
        *pos += 1;
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(CodeError::Parse {
                line,
                reason: format!("sparse entry must be \"m n W\", got {content:?}"),
            });
        }
        let mi: usize = toks[0].parse().map_err(|_| CodeError::Parse {
            line,
            reason: format!("bad check index {:?}", toks[0]),
        })?;
        let ni: usize = toks[1].parse().map_err(|_| CodeError::Parse {
            line,
            reason: format!("bad qubit index {:?}", toks[1]),
        })?;
        if mi == 0 || mi > m || ni == 0 || ni > n {
            return Err(CodeError::Parse {
                line,
                reason: format!("sparse entry ({mi}, {ni}) out of range for {m} x {n}"),
            });
        }
        let w = toks[2]
            .chars()
            .next()
            .filter(|_| toks[2].len() == 1)
            .and_then(Pauli1::from_char)
            .ok_or(CodeError::Parse { line, reason: format!("bad Pauli letter {:?}", toks[2]) })?;
        if w == Pauli1::I {
            return Err(CodeError::Parse { line, reason: "sparse entries must be non-identity".into() });
        }
        entries[mi - 1].push((ni - 1, w));
    }
    Ok(entries
        .into_iter()
        .map(|e| PauliString::from_sparse(n, &e))
        .collect())
}

/// Loads a code from a file in the text format.
pub fn load_check_matrix(path: impl AsRef<Path>) -> Result<Code, CodeError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_check_matrix(&text, label)
}

/// Serializes a code to the dense text format, including its logical pairs.
pub fn write_check_matrix(code: &Code) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", code.m(), code.n()));
    for row in code.checks().rows() {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    if !code.logicals().is_empty() {
        out.push_str(&format!("LOGICALS {}\n", code.k()));
        for (x, z) in code.logicals() {
            out.push_str(&x.to_string());
            out.push('\n');
            out.push_str(&z.to_string());
            out.push('\n');
        }
    }
    out
}
