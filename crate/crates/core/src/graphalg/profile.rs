//! Edge-neighbourhood profiles `|N_t(e)|` and thin-depth scans.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GraphAlgError;
use crate::degmodel::BiDegreeSequence;
use crate::graphgen::{
    lazy_explore, Digraph, ExplorationOutcome, ExplorationState, HalfEdgeLayout, RngChooser, StopRule,
};
use crate::Direction;

/// Level sizes of the exploration tree rooted at a half-edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodProfile {
    pub start: u32,
    pub direction: Direction,
    /// `|N_t|` for `t = 0..=T`; `sizes[0] == 1`.
    pub sizes: Vec<u64>,
    /// First `t >= 1` with `|N_t| >= omega`.
    pub expansion_time: Option<u32>,
    /// First `t` with `|N_t| == 0`.
    pub died_at: Option<u32>,
    pub omega: u64,
}

impl NeighborhoodProfile {
    fn from_state(state: &ExplorationState, omega: u64) -> Self {
        let outcome = state.outcome().expect("explored state");
        NeighborhoodProfile {
            start: state.start().expect("explored state"),
            direction: state.direction(),
            sizes: state.level_sizes().to_vec(),
            expansion_time: match outcome {
                ExplorationOutcome::Expanded { depth } => Some(depth),
                _ => None,
            },
            died_at: match outcome {
                ExplorationOutcome::Died { depth } => Some(depth),
                _ => None,
            },
            omega,
        }
    }
}

/// Profile of `start` (a tail for `Out`, a head for `In`) in a materialized
/// graph: level `t` holds the half-edges of the vertices first reached at
/// distance `t`, with the start's own vertex counted as reached at level 0.
pub fn neighborhood_profile_graph(
    g: &Digraph,
    start: u32,
    direction: Direction,
    omega: u64,
    max_t: u32,
) -> Result<NeighborhoodProfile, GraphAlgError> {
    if omega < 1 || max_t < 1 {
        return Err(GraphAlgError::DomainError("omega and max_t must be >= 1".into()));
    }
    if start as usize >= g.m() {
        return Err(GraphAlgError::IndexOutOfRange {
            index: start as usize,
            len: g.m(),
        });
    }
    let (offsets, v0) = match direction {
        Direction::Out => (g.out_offsets(), g.tail_owner(start)),
        Direction::In => (g.in_offsets(), g.head_owner(start)),
    };
    let far_end = |x: u32| match direction {
        Direction::Out => g.tail_target(x),
        Direction::In => g.head_source(x),
    };
    let mut visited = vec![false; g.n()];
    visited[v0 as usize] = true;
    let mut level = vec![start];
    let mut sizes = vec![1u64];
    let mut expansion_time = None;
    let mut died_at = None;
    for t in 1..=max_t {
        let mut next = Vec::new();
        for &x in &level {
            let w = far_end(x) as usize;
            if !visited[w] {
                visited[w] = true;
                next.extend(offsets[w]..offsets[w + 1]);
            }
        }
        sizes.push(next.len() as u64);
        if next.is_empty() {
            died_at = Some(t);
            break;
        }
        if next.len() as u64 >= omega {
            expansion_time = Some(t);
            break;
        }
        level = next;
    }
    Ok(NeighborhoodProfile {
        start,
        direction,
        sizes,
        expansion_time,
        died_at,
        omega,
    })
}

/// Profile of `start` generated lazily from the sequence, optionally
/// conditioned on a prior exploration.
pub fn neighborhood_profile_lazy<R: Rng + ?Sized>(
    seq: &BiDegreeSequence,
    start: u32,
    direction: Direction,
    omega: u64,
    max_t: u32,
    rng: &mut R,
    prior: Option<&ExplorationState>,
) -> Result<NeighborhoodProfile, GraphAlgError> {
    let state = lazy_explore(seq, start, direction, &StopRule::new(max_t, omega), rng, prior)?;
    Ok(NeighborhoodProfile::from_state(&state, omega))
}

/// Outcome of [`thin_depth_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinScan {
    pub probes: u64,
    pub omega: u64,
    /// Largest `t` at which some probe had `0 < |N_r| < omega` for all `r <= t`.
    pub max_thin_depth: u32,
    /// `thin_counts[t]`: probes alive and thin through level `t`.
    pub thin_counts: Vec<u64>,
    pub expansion_hist: BTreeMap<u32, u64>,
    pub death_hist: BTreeMap<u32, u64>,
}

/// Lazily explores from up to `budget` distinct start half-edges (a random
/// subset, every one if `budget >= m`), each probe on a fresh pairing.
pub fn thin_depth_scan<R: Rng + ?Sized>(
    seq: &BiDegreeSequence,
    direction: Direction,
    omega: u64,
    rng: &mut R,
    budget: u64,
) -> Result<ThinScan, GraphAlgError> {
    if budget < 1 || omega < 1 {
        return Err(GraphAlgError::DomainError("budget and omega must be >= 1".into()));
    }
    let layout = Arc::new(HalfEdgeLayout::new(seq));
    let m = layout.m() as u32;
    let mut starts: Vec<u32> = (0..m).collect();
    starts.shuffle(rng);
    starts.truncate(budget.min(u64::from(m)) as usize);

    let mut state = ExplorationState::with_layout(layout);
    // explorations of a finite pairing end long before n levels
    let stop = StopRule::new(seq.n().max(1) as u32, omega);
    let mut thin_counts: Vec<u64> = Vec::new();
    let mut expansion_hist = BTreeMap::new();
    let mut death_hist = BTreeMap::new();
    for &start in &starts {
        state.reset();
        let outcome = state.explore(start, direction, &stop, &mut RngChooser(&mut *rng))?;
        // levels 0..depth-1 were all nonempty and below omega
        let thin_through = outcome.depth().saturating_sub(1) as usize;
        if omega > 1 {
            if thin_counts.len() <= thin_through {
                thin_counts.resize(thin_through + 1, 0);
            }
            thin_counts[..=thin_through].iter_mut().for_each(|c| *c += 1);
        }
        match outcome {
            ExplorationOutcome::Expanded { depth } => *expansion_hist.entry(depth).or_insert(0) += 1,
            ExplorationOutcome::Died { depth } => *death_hist.entry(depth).or_insert(0) += 1,
            _ => {}
        }
    }
    Ok(ThinScan {
        probes: starts.len() as u64,
        omega,
        max_thin_depth: thin_counts.len().saturating_sub(1) as u32,
        thin_counts,
        expansion_hist,
        death_hist,
    })
}
