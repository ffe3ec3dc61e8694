use std::fmt::Write as _;
use std::path::Path;

use super::{validate_sequence, BiDegreeSequence, DegModelError};

/// Parses `d_in d_out` lines; blank lines and lines starting with `#` are
/// skipped.
pub fn parse_degree_file(text: &str) -> Result<BiDegreeSequence, DegModelError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u32, DegModelError> {
            let tok = tok.ok_or_else(|| DegModelError::Parse {
                line: idx + 1,
                msg: "expected two integers".into(),
            })?;
            tok.parse::<u32>().map_err(|e| DegModelError::Parse {
                line: idx + 1,
                msg: format!("bad degree {tok:?}: {e}"),
            })
        };
        let a = parse(it.next())?;
        let b = parse(it.next())?;
        if it.next().is_some() {
            return Err(DegModelError::Parse {
                line: idx + 1,
                msg: "trailing tokens".into(),
            });
        }
        pairs.push((a, b));
    }
    validate_sequence(pairs)
}

pub fn read_degree_file(path: &Path) -> Result<BiDegreeSequence, DegModelError> {
    parse_degree_file(&std::fs::read_to_string(path)?)
}

pub fn write_degree_file(seq: &BiDegreeSequence) -> String {
    let mut out = format!("# n={} m={}\n", seq.n(), seq.m());
    for &(a, b) in seq.pairs() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}
