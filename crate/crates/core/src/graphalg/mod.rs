//! Distances on materialized digraphs, neighbourhood profiles and path
//! counting.
//!
//! Exact diameters use a bit-parallel breadth-first search: 64 sources
//! share one pass, each vertex carrying a 64-bit mask of the sources that
//! have reached it. A vertex is expanded only on levels where some lane
//! reaches it for the first time, so the cost per batch is close to that of
//! a single BFS rather than 64 of them.

mod paths;
mod profile;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphgen::{Digraph, GraphGenError};
use crate::Direction;

pub use paths::{count_simple_paths, expected_path_bound, expected_path_bound_nu, exact_path_expectation};
pub use profile::{
    neighborhood_profile_graph, neighborhood_profile_lazy, thin_depth_scan, NeighborhoodProfile,
    ThinScan,
};

/// Distance sentinel for unreachable vertices.
pub const INF: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum GraphAlgError {
    #[error("index {index} out of range ({len} available)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("instance too large for exhaustive path counting: n = {n}, k_max = {k_max}")]
    InstanceTooLarge { n: usize, k_max: u32 },
    #[error("invalid argument: {0}")]
    DomainError(String),
    #[error(transparent)]
    Exploration(#[from] GraphGenError),
}

/// Hop distances from `source` following edges in `dir`.
pub fn bfs_distances(g: &Digraph, source: usize, dir: Direction) -> Result<Vec<u32>, GraphAlgError> {
    if source >= g.n() {
        return Err(GraphAlgError::IndexOutOfRange {
            index: source,
            len: g.n(),
        });
    }
    let mut dist = vec![INF; g.n()];
    let mut queue = Vec::with_capacity(g.n());
    dist[source] = 0;
    queue.push(source as u32);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head] as usize;
        head += 1;
        let d = dist[v] + 1;
        for &w in g.neighbors(v, dir) {
            if dist[w as usize] == INF {
                dist[w as usize] = d;
                queue.push(w);
            }
        }
    }
    Ok(dist)
}

/// Result of [`diameter_exact`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub diameter: u32,
    /// Smallest source, then smallest target, attaining the diameter.
    pub argmax: (u32, u32),
    /// Ordered pairs `i != j` with `dist(i, j) < ∞`.
    pub finite_pairs: u64,
    pub eccentricities: Option<Vec<u32>>,
}

const LANES: usize = 64;

/// Per-thread buffers for the bit-parallel search.
struct BatchWorkspace {
    seen: Vec<u64>,
    next: Vec<u64>,
    frontier: Vec<(u32, u64)>,
    touched_next: Vec<u32>,
}

impl BatchWorkspace {
    fn new(n: usize) -> Self {
        BatchWorkspace {
            seen: vec![0; n],
            next: vec![0; n],
            frontier: Vec::new(),
            touched_next: Vec::new(),
        }
    }

    /// Eccentricities of sources `first..first+lanes` and the number of
    /// vertices each reaches (itself included).
    fn run(&mut self, g: &Digraph, first: usize, lanes: usize) -> ([u32; LANES], u64) {
        self.seen.iter_mut().for_each(|x| *x = 0);
        self.frontier.clear();
        for lane in 0..lanes {
            let bit = 1u64 << lane;
            self.seen[first + lane] |= bit;
            self.frontier.push(((first + lane) as u32, bit));
        }
        let mut ecc = [0u32; LANES];
        let mut level = 0u32;
        while !self.frontier.is_empty() {
            level += 1;
            for &(v, mask) in &self.frontier {
                for &w in g.out_neighbors(v as usize) {
                    let w = w as usize;
                    let add = mask & !self.seen[w];
                    if add != 0 {
                        if self.next[w] == 0 {
                            self.touched_next.push(w as u32);
                        }
                        self.next[w] |= add;
                    }
                }
            }
            self.frontier.clear();
            let mut reached = 0u64;
            for &w in &self.touched_next {
                let bits = self.next[w as usize];
                self.next[w as usize] = 0;
                self.seen[w as usize] |= bits;
                reached |= bits;
                self.frontier.push((w, bits));
            }
            self.touched_next.clear();
            let mut r = reached;
            while r != 0 {
                ecc[r.trailing_zeros() as usize] = level;
                r &= r - 1;
            }
        }
        let reached: u64 = self.seen.iter().map(|x| u64::from(x.count_ones())).sum();
        (ecc, reached)
    }
}

/// Exact diameter over all ordered pairs with finite distance.
///
/// An edgeless graph (or one whose only edges are self-loops) has
/// diameter 0, attained by `(0, 0)`.
pub fn diameter_exact(g: &Digraph) -> DistanceReport {
    diameter_exact_with(g, false)
}

pub fn diameter_exact_with(g: &Digraph, keep_eccentricities: bool) -> DistanceReport {
    let n = g.n();
    assert!(n >= 1, "diameter of an empty graph");
    let batches: Vec<usize> = (0..n).step_by(LANES).collect();
    let per_batch: Vec<([u32; LANES], u64)> = batches
        .par_iter()
        .map_init(
            || BatchWorkspace::new(n),
            |ws, &first| ws.run(g, first, LANES.min(n - first)),
        )
        .collect();

    let mut diameter = 0u32;
    let mut source = 0usize;
    let mut finite_pairs = 0u64;
    let mut ecc_all = keep_eccentricities.then(|| Vec::with_capacity(n));
    for (&first, (ecc, reached)) in batches.iter().zip(&per_batch) {
        let lanes = LANES.min(n - first);
        finite_pairs += reached - lanes as u64;
        for (lane, &e) in ecc.iter().enumerate().take(lanes) {
            if e > diameter {
                diameter = e;
                source = first + lane;
            }
        }
        if let Some(all) = ecc_all.as_mut() {
            all.extend_from_slice(&ecc[..lanes]);
        }
    }
    let target = if diameter == 0 {
        0
    } else {
        let dist = bfs_distances(g, source, Direction::Out).expect("source in range");
        dist.iter().position(|&d| d == diameter).expect("eccentricity attained")
    };
    DistanceReport {
        diameter,
        argmax: (source as u32, target as u32),
        finite_pairs,
        eccentricities: ecc_all,
    }
}

/// Reusable single-source search with early exit.
pub struct BfsWorkspace {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

impl BfsWorkspace {
    pub fn new(n: usize) -> Self {
        BfsWorkspace {
            dist: vec![INF; n],
            queue: Vec::new(),
        }
    }

    /// `dist(u, v)` along out-edges, or `None` if `v` is unreachable.
    pub fn distance(&mut self, g: &Digraph, u: usize, v: usize) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        self.queue.clear();
        self.queue.push(u as u32);
        self.dist[u] = 0;
        let mut head = 0;
        let mut found = None;
        'search: while head < self.queue.len() {
            let x = self.queue[head] as usize;
            head += 1;
            let d = self.dist[x] + 1;
            for &w in g.out_neighbors(x) {
                if self.dist[w as usize] == INF {
                    self.dist[w as usize] = d;
                    self.queue.push(w);
                    if w as usize == v {
                        found = Some(d);
                        break 'search;
                    }
                }
            }
        }
        for &x in &self.queue {
            self.dist[x as usize] = INF;
        }
        found
    }
}

/// Distances for explicit ordered pairs (`None` when infinite).
pub fn pair_distances(g: &Digraph, pairs: &[(u32, u32)]) -> Vec<Option<u32>> {
    let mut ws = BfsWorkspace::new(g.n());
    pairs
        .iter()
        .map(|&(u, v)| ws.distance(g, u as usize, v as usize))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSample {
    /// Finite distances, in sampling order.
    pub distances: Vec<u32>,
    pub finite_fraction: f64,
    pub pairs: u64,
}

impl TypicalSample {
    pub fn mean(&self) -> f64 {
        crate::stats::mean(&self.distances.iter().map(|&d| f64::from(d)).collect::<Vec<_>>())
    }
}

/// Distances between `pairs` i.i.d. uniform ordered vertex pairs.
pub fn typical_distance_sample<R: Rng + ?Sized>(g: &Digraph, pairs: u64, rng: &mut R) -> TypicalSample {
    assert!(pairs >= 1, "pairs must be positive");
    let n = g.n() as u32;
    let sampled: Vec<(u32, u32)> = (0..pairs)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    sample_from_pairs(g, &sampled)
}

/// [`typical_distance_sample`] on a fixed list of pairs; parallel over
/// chunks, deterministic in the order of `pairs`.
pub fn sample_from_pairs(g: &Digraph, pairs: &[(u32, u32)]) -> TypicalSample {
    let dists: Vec<Option<u32>> = pairs
        .par_chunks(64)
        .map_init(
            || BfsWorkspace::new(g.n()),
            |ws, chunk| {
                chunk
                    .iter()
                    .map(|&(u, v)| ws.distance(g, u as usize, v as usize))
                    .collect::<Vec<_>>()
            },
        )
        .flatten()
        .collect();
    let distances: Vec<u32> = dists.iter().flatten().copied().collect();
    TypicalSample {
        finite_fraction: distances.len() as f64 / pairs.len() as f64,
        distances,
        pairs: pairs.len() as u64,
    }
}
