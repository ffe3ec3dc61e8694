//! Random digraph construction.
//!
//! Half-edges are numbered by vertex: the tails of vertex `v` occupy the
//! contiguous range `out_offsets[v]..out_offsets[v+1]`, its heads the range
//! `in_offsets[v]..in_offsets[v+1]`. A configuration-model graph stores the
//! pairing in the adjacency arrays themselves: out slot `t` holds the owner
//! of the head paired with tail `t`, and in slot `h` the owner of its tail.

mod io;
mod lazy;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degmodel::BiDegreeSequence;

pub use io::{parse_edge_list, read_edge_list, write_edge_list, EdgeListHeader};
pub use lazy::{
    lazy_explore, Chooser, ExplorationOutcome, ExplorationState, HalfEdgeStatus, ReplayChooser,
    RngChooser, StopRule, TreeNode,
};

/// Marks "no partner" in pairing arrays.
pub const UNPAIRED: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum GraphGenError {
    #[error("no simple graph after {0} attempts")]
    AttemptsExhausted(u64),
    #[error("half-edge {0} is already paired")]
    StartAlreadyPaired(u32),
    #[error("half-edge {0} sits on a vertex of the prior exploration")]
    StartInsidePrior(u32),
    #[error("half-edge {index} out of range ({len} available)")]
    HalfEdgeOutOfRange { index: u32, len: u64 },
    #[error("invalid argument: {0}")]
    DomainError(String),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Which binomial digraph: every ordered pair independently, or one
/// undirected edge per unordered pair with a fair orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinomialVariant {
    Independent,
    Oriented,
}

/// Vertex-indexed half-edge ranges and owners of a bi-degree sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeLayout {
    pub out_offsets: Vec<u32>,
    pub in_offsets: Vec<u32>,
    pub tail_owner: Vec<u32>,
    pub head_owner: Vec<u32>,
}

impl HalfEdgeLayout {
    pub fn new(seq: &BiDegreeSequence) -> Self {
        let n = seq.n();
        let m = seq.m() as usize;
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut in_offsets = Vec::with_capacity(n + 1);
        let mut tail_owner = Vec::with_capacity(m);
        let mut head_owner = Vec::with_capacity(m);
        out_offsets.push(0);
        in_offsets.push(0);
        for (v, &(d_in, d_out)) in seq.pairs().iter().enumerate() {
            tail_owner.extend(std::iter::repeat_n(v as u32, d_out as usize));
            head_owner.extend(std::iter::repeat_n(v as u32, d_in as usize));
            out_offsets.push(tail_owner.len() as u32);
            in_offsets.push(head_owner.len() as u32);
        }
        HalfEdgeLayout {
            out_offsets,
            in_offsets,
            tail_owner,
            head_owner,
        }
    }

    pub fn n(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.tail_owner.len()
    }

    pub fn tails(&self, v: usize) -> std::ops::Range<u32> {
        self.out_offsets[v]..self.out_offsets[v + 1]
    }

    pub fn heads(&self, v: usize) -> std::ops::Range<u32> {
        self.in_offsets[v]..self.in_offsets[v + 1]
    }
}

/// An immutable directed multigraph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out_offsets: Vec<u32>,
    out_targets: Vec<u32>,
    in_offsets: Vec<u32>,
    in_sources: Vec<u32>,
    /// In-slot of the head paired with each out-slot tail.
    head_of_tail: Vec<u32>,
    simple: bool,
}

impl Digraph {
    /// Materializes a perfect pairing `head_of_tail` of the sequence's
    /// half-edges.
    pub fn from_pairing(layout: &HalfEdgeLayout, head_of_tail: Vec<u32>) -> Self {
        let m = layout.m();
        assert_eq!(head_of_tail.len(), m, "pairing length");
        let mut out_targets = vec![0u32; m];
        let mut in_sources = vec![0u32; m];
        for (t, &h) in head_of_tail.iter().enumerate() {
            out_targets[t] = layout.head_owner[h as usize];
            in_sources[h as usize] = layout.tail_owner[t];
        }
        Digraph {
            n: layout.n(),
            out_offsets: layout.out_offsets.clone(),
            out_targets,
            in_offsets: layout.in_offsets.clone(),
            in_sources,
            head_of_tail,
            simple: false,
        }
    }

    /// Builds the adjacency arrays from an edge list; edges keep their
    /// relative order within each source (and within each target).
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut out_offsets = vec![0u32; n + 1];
        let mut in_offsets = vec![0u32; n + 1];
        for &(u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) outside [0, {n})");
            out_offsets[u as usize + 1] += 1;
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut out_fill = out_offsets.clone();
        let mut in_fill = in_offsets.clone();
        let mut out_targets = vec![0u32; edges.len()];
        let mut in_sources = vec![0u32; edges.len()];
        let mut head_of_tail = vec![0u32; edges.len()];
        for &(u, v) in edges {
            let (t, h) = (out_fill[u as usize], in_fill[v as usize]);
            out_targets[t as usize] = v;
            in_sources[h as usize] = u;
            head_of_tail[t as usize] = h;
            out_fill[u as usize] += 1;
            in_fill[v as usize] += 1;
        }
        Digraph {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            head_of_tail,
            simple: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.out_targets.len()
    }

    /// Out-neighbours of `v`, with multiplicity.
    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[v] as usize..self.out_offsets[v + 1] as usize]
    }

    /// In-neighbours of `v`, with multiplicity.
    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[v] as usize..self.in_offsets[v + 1] as usize]
    }

    #[inline]
    pub fn neighbors(&self, v: usize, dir: crate::Direction) -> &[u32] {
        match dir {
            crate::Direction::Out => self.out_neighbors(v),
            crate::Direction::In => self.in_neighbors(v),
        }
    }

    pub fn out_degree(&self, v: usize) -> u32 {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: usize) -> u32 {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// Per-vertex `(in, out)` degrees.
    pub fn degree_pairs(&self) -> Vec<(u32, u32)> {
        (0..self.n).map(|v| (self.in_degree(v), self.out_degree(v))).collect()
    }

    pub fn out_offsets(&self) -> &[u32] {
        &self.out_offsets
    }

    pub fn in_offsets(&self) -> &[u32] {
        &self.in_offsets
    }

    /// Edges in out-slot order, with multiplicity.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m());
        for v in 0..self.n {
            out.extend(self.out_neighbors(v).iter().map(|&w| (v as u32, w)));
        }
        out
    }

    /// The half-edge pairing: in-slot of the head matched to each out-slot.
    /// For graphs built from an edge list, edges are matched in list order.
    pub fn head_of_tail(&self) -> &[u32] {
        &self.head_of_tail
    }

    /// Target of out-slot `t`.
    #[inline]
    pub fn tail_target(&self, t: u32) -> u32 {
        self.out_targets[t as usize]
    }

    /// Source of in-slot `h`.
    #[inline]
    pub fn head_source(&self, h: u32) -> u32 {
        self.in_sources[h as usize]
    }

    /// Inverse of [`Digraph::head_of_tail`].
    pub fn tail_of_head(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.m()];
        for (t, &h) in self.head_of_tail.iter().enumerate() {
            inv[h as usize] = t as u32;
        }
        inv
    }

    /// Vertex owning tail `t`.
    pub fn tail_owner(&self, t: u32) -> u32 {
        (self.out_offsets.partition_point(|&o| o <= t) - 1) as u32
    }

    /// Vertex owning head `h`.
    pub fn head_owner(&self, h: u32) -> u32 {
        (self.in_offsets.partition_point(|&o| o <= h) - 1) as u32
    }

    /// Whether the graph was generated under a simplicity guarantee.
    pub fn simple_flag(&self) -> bool {
        self.simple
    }

    /// Checks for self-loops and repeated `(source, target)` pairs.
    pub fn is_simple(&self) -> bool {
        let mut buf = Vec::new();
        (0..self.n).all(|v| {
            buf.clear();
            buf.extend_from_slice(self.out_neighbors(v));
            buf.sort_unstable();
            buf.iter().all(|&w| w as usize != v) && buf.windows(2).all(|p| p[0] != p[1])
        })
    }
}

/// Uniform perfect matching of tails to heads: the head slots are shuffled
/// against the fixed tail order.
pub fn pair_uniform<R: Rng + ?Sized>(seq: &BiDegreeSequence, rng: &mut R) -> Digraph {
    pair_uniform_with_layout(&HalfEdgeLayout::new(seq), rng)
}

pub fn pair_uniform_with_layout<R: Rng + ?Sized>(layout: &HalfEdgeLayout, rng: &mut R) -> Digraph {
    let mut heads: Vec<u32> = (0..layout.m() as u32).collect();
    heads.shuffle(rng);
    Digraph::from_pairing(layout, heads)
}

#[derive(Debug, Clone)]
pub struct SimpleSample {
    pub graph: Digraph,
    /// Pairings drawn, including the accepted one.
    pub attempts: u64,
}

/// Rejection sampling of a simple configuration-model graph.
pub fn sample_simple<R: Rng + ?Sized>(
    seq: &BiDegreeSequence,
    rng: &mut R,
    max_attempts: u64,
) -> Result<SimpleSample, GraphGenError> {
    let layout = HalfEdgeLayout::new(seq);
    for attempt in 1..=max_attempts {
        let mut g = pair_uniform_with_layout(&layout, rng);
        if g.is_simple() {
            g.simple = true;
            return Ok(SimpleSample {
                graph: g,
                attempts: attempt,
            });
        }
    }
    Err(GraphGenError::AttemptsExhausted(max_attempts))
}

/// Every vertex sends `d` edges to i.i.d. uniform targets.
pub fn d_out_model<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> Result<Digraph, GraphGenError> {
    if n == 0 || d == 0 {
        return Err(GraphGenError::DomainError(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    if n as u64 * u64::from(d) > crate::degmodel::MAX_HALF_EDGES {
        return Err(GraphGenError::DomainError("too many edges".into()));
    }
    let mut edges = Vec::with_capacity(n * d as usize);
    for v in 0..n as u32 {
        for _ in 0..d {
            edges.push((v, rng.random_range(0..n as u32)));
        }
    }
    Ok(Digraph::from_edges(n, &edges))
}

/// Successes of `total` Bernoulli(`p`) trials, visited by geometric skips.
fn bernoulli_indices<R: Rng + ?Sized>(total: u64, p: f64, rng: &mut R, mut hit: impl FnMut(u64, &mut R)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        for k in 0..total {
            hit(k, rng);
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut k: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>(); // in (0, 1]
        let skip = (u.ln() / log_q).floor();
        if skip >= (total - k) as f64 {
            return;
        }
        k += skip as u64;
        hit(k, rng);
        k += 1;
        if k >= total {
            return;
        }
    }
}

/// Binomial random digraph; always simple.
pub fn binomial_digraph<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    variant: BinomialVariant,
    rng: &mut R,
) -> Result<Digraph, GraphGenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphGenError::DomainError(format!("p = {p} outside [0, 1]")));
    }
    if variant == BinomialVariant::Oriented && 2.0 * p > 1.0 {
        return Err(GraphGenError::DomainError(format!("oriented variant needs p <= 1/2, got {p}")));
    }
    let nn = n as u64;
    let mut edges = Vec::new();
    match variant {
        BinomialVariant::Independent => {
            let total = nn * nn.saturating_sub(1);
            bernoulli_indices(total, p, rng, |k, _| {
                let i = k / (nn - 1);
                let mut j = k % (nn - 1);
                if j >= i {
                    j += 1;
                }
                edges.push((i as u32, j as u32));
            });
        }
        BinomialVariant::Oriented => {
            // unordered pairs {i < j} enumerated row by row
            let total = nn * nn.saturating_sub(1) / 2;
            let mut row = 0u64;
            let mut row_start = 0u64;
            bernoulli_indices(total, 2.0 * p, rng, |k, rng| {
                while k >= row_start + (nn - 1 - row) {
                    row_start += nn - 1 - row;
                    row += 1;
                }
                let i = row as u32;
                let j = (row + 1 + (k - row_start)) as u32;
                if rng.random::<bool>() {
                    edges.push((i, j));
                } else {
                    edges.push((j, i));
                }
            });
        }
    }
    let mut g = Digraph::from_edges(n, &edges);
    g.simple = true;
    Ok(g)
}
