use std::fmt::Write as _;
use std::path::Path;

use super::{Digraph, GraphGenError};

/// Metadata carried by the `# n=… m=… simple=… seed=…` header line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeListHeader {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub simple: Option<bool>,
    pub seed: Option<u64>,
}

/// Plain-text edge list, one `source target` pair per line, 0-indexed.
pub fn write_edge_list(g: &Digraph, seed: Option<u64>) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    let mut out = format!(
        "# n={} m={} simple={} seed={}\n",
        g.n(),
        g.m(),
        g.simple_flag(),
        seed
    );
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn parse_header(line: &str, header: &mut EdgeListHeader) {
    for tok in line.trim_start_matches('#').split_whitespace() {
        let Some((key, value)) = tok.split_once('=') else { continue };
        match key {
            "n" => header.n = value.parse().ok(),
            "m" => header.m = value.parse().ok(),
            "simple" => header.simple = value.parse().ok(),
            "seed" => header.seed = value.parse().ok(),
            _ => {}
        }
    }
}

/// Parses an edge list. Without an `n=` header the vertex count is one more
/// than the largest endpoint.
pub fn parse_edge_list(text: &str) -> Result<(Digraph, EdgeListHeader), GraphGenError> {
    let mut header = EdgeListHeader::default();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            parse_header(line, &mut header);
            continue;
        }
        let err = |msg: String| GraphGenError::Parse { line: idx + 1, msg };
        let mut it = line.split_whitespace();
        let mut next = || -> Result<u32, GraphGenError> {
            let tok = it.next().ok_or_else(|| err("expected `source target`".into()))?;
            tok.parse().map_err(|e| err(format!("bad vertex {tok:?}: {e}")))
        };
        let u = next()?;
        let v = next()?;
        if it.next().is_some() {
            return Err(err("trailing tokens".into()));
        }
        edges.push((u, v));
    }
    let max_end = edges.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    let n = match header.n {
        Some(n) if n < max_end => {
            return Err(GraphGenError::Parse {
                line: 1,
                msg: format!("header says n={n} but an endpoint is {}", max_end - 1),
            })
        }
        Some(n) => n,
        None => max_end,
    };
    if let Some(m) = header.m {
        if m != edges.len() {
            return Err(GraphGenError::Parse {
                line: 1,
                msg: format!("header says m={m} but {} edges follow", edges.len()),
            });
        }
    }
    let mut g = Digraph::from_edges(n, &edges);
    if header.simple == Some(true) {
        if !g.is_simple() {
            return Err(GraphGenError::Parse {
                line: 1,
                msg: "header says simple=true but the graph has loops or parallel edges".into(),
            });
        }
        g.simple = true;
    }
    Ok((g, header))
}

pub fn read_edge_list(path: &Path) -> Result<(Digraph, EdgeListHeader), GraphGenError> {
    let text = std::fs::read_to_string(path).map_err(|e| GraphGenError::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_edge_list(&text)
}
