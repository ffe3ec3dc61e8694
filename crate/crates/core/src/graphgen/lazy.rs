//! On-demand pairing of half-edges during a breadth-first exploration.
//!
//! Exploring from a tail `e⁺` pairs, epoch by epoch, every active tail of
//! the previous level with a uniformly chosen unpaired head. Only the
//! explored region of the pairing is ever generated, and its law is the
//! same as under a full uniform pairing. The `In` direction is the mirror
//! image: heads are paired with uniform unpaired tails.
//!
//! A prior state `H` conditions the new exploration on its pairings: they
//! stay in place, and every unpaired half-edge on a vertex touched by `H`
//! becomes fatal, so pairing into one ends the exploration.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::{GraphGenError, HalfEdgeLayout, UNPAIRED};
use crate::degmodel::BiDegreeSequence;
use crate::Direction;

const TAIL: usize = 0;
const HEAD: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfEdgeStatus {
    Undiscovered,
    Active,
    Paired,
    Fatal,
}

/// When an exploration stops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopRule {
    pub max_depth: u32,
    /// Stop once a level holds at least this many half-edges.
    pub omega: u64,
    /// Vertices whose half-edges count as fatal from the start.
    pub forbidden_vertices: Vec<u32>,
}

impl StopRule {
    pub fn new(max_depth: u32, omega: u64) -> Self {
        StopRule {
            max_depth,
            omega,
            forbidden_vertices: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExplorationOutcome {
    /// Level `depth` was empty.
    Died { depth: u32 },
    /// Level `depth` reached the width threshold.
    Expanded { depth: u32 },
    /// A pairing in epoch `depth` landed on fatal half-edge `half_edge`.
    HitFatal { depth: u32, half_edge: u32 },
    DepthLimit { depth: u32 },
}

impl ExplorationOutcome {
    pub fn depth(&self) -> u32 {
        match *self {
            ExplorationOutcome::Died { depth }
            | ExplorationOutcome::Expanded { depth }
            | ExplorationOutcome::HitFatal { depth, .. }
            | ExplorationOutcome::DepthLimit { depth } => depth,
        }
    }
}

/// A node of the exploration tree: one explored half-edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub half_edge: u32,
    /// Index of the parent node, `UNPAIRED` for the root.
    pub parent: u32,
    pub depth: u32,
    pub paired: bool,
}

/// Picks the partner of `half_edge` among the currently unpaired
/// half-edges of the opposite kind; returns an index into `unpaired`.
pub trait Chooser {
    fn choose(&mut self, half_edge: u32, unpaired: &[u32]) -> usize;
}

/// Uniform choice.
pub struct RngChooser<'a, R: ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> Chooser for RngChooser<'_, R> {
    #[inline]
    fn choose(&mut self, _half_edge: u32, unpaired: &[u32]) -> usize {
        self.0.random_range(0..unpaired.len())
    }
}

/// Replays a fixed full pairing (`partner[x]` for every half-edge `x` on the
/// exploring side).
pub struct ReplayChooser<'a> {
    pub partner: &'a [u32],
}

impl Chooser for ReplayChooser<'_> {
    fn choose(&mut self, half_edge: u32, unpaired: &[u32]) -> usize {
        let target = self.partner[half_edge as usize];
        unpaired
            .iter()
            .position(|&y| y == target)
            .expect("replayed partner is no longer unpaired")
    }
}

/// Unpaired half-edges of one kind, removable in O(1).
#[derive(Debug, Clone)]
struct FreeList {
    items: Vec<u32>,
    pos: Vec<u32>,
    len: usize,
    /// Positions of removals, so that a reset restores the exact order.
    undo: Vec<u32>,
}

impl FreeList {
    fn full(m: usize) -> Self {
        FreeList {
            items: (0..m as u32).collect(),
            pos: (0..m as u32).collect(),
            len: m,
            undo: Vec::new(),
        }
    }

    fn live(&self) -> &[u32] {
        &self.items[..self.len]
    }

    fn remove(&mut self, x: u32) {
        let i = self.pos[x as usize] as usize;
        debug_assert!(i < self.len, "half-edge {x} already removed");
        let last = self.len - 1;
        let y = self.items[last];
        self.items.swap(i, last);
        self.pos[y as usize] = i as u32;
        self.pos[x as usize] = last as u32;
        self.len = last;
        self.undo.push(i as u32);
    }

    fn restore_all(&mut self) {
        while let Some(i) = self.undo.pop() {
            let i = i as usize;
            let last = self.len;
            self.len += 1;
            let (x, y) = (self.items[last], self.items[i]);
            self.items.swap(i, last);
            self.pos[x as usize] = i as u32;
            self.pos[y as usize] = last as u32;
        }
    }
}

/// Status of every half-edge, the partial pairing, and the exploration tree.
#[derive(Debug, Clone)]
pub struct ExplorationState {
    layout: Arc<HalfEdgeLayout>,
    direction: Direction,
    start: Option<u32>,
    status: [Vec<HalfEdgeStatus>; 2],
    partner: [Vec<u32>; 2],
    free: [FreeList; 2],
    tree: Vec<TreeNode>,
    /// Tree index at which each level begins, plus a final sentinel.
    level_starts: Vec<usize>,
    level_sizes: Vec<u64>,
    /// Pairings made by the end of each epoch (`i_t`).
    epoch_ends: Vec<u64>,
    pairings: u64,
    outcome: Option<ExplorationOutcome>,
    touched: [Vec<u32>; 2],
}

impl ExplorationState {
    pub fn new(seq: &BiDegreeSequence) -> Self {
        Self::with_layout(Arc::new(HalfEdgeLayout::new(seq)))
    }

    pub fn with_layout(layout: Arc<HalfEdgeLayout>) -> Self {
        let m = layout.m();
        ExplorationState {
            layout,
            direction: Direction::Out,
            start: None,
            status: [vec![HalfEdgeStatus::Undiscovered; m], vec![HalfEdgeStatus::Undiscovered; m]],
            partner: [vec![UNPAIRED; m], vec![UNPAIRED; m]],
            free: [FreeList::full(m), FreeList::full(m)],
            tree: Vec::new(),
            level_starts: Vec::new(),
            level_sizes: Vec::new(),
            epoch_ends: Vec::new(),
            pairings: 0,
            outcome: None,
            touched: [Vec::new(), Vec::new()],
        }
    }

    pub fn layout(&self) -> &HalfEdgeLayout {
        &self.layout
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn start(&self) -> Option<u32> {
        self.start
    }

    pub fn tail_status(&self) -> &[HalfEdgeStatus] {
        &self.status[TAIL]
    }

    pub fn head_status(&self) -> &[HalfEdgeStatus] {
        &self.status[HEAD]
    }

    /// Head paired with each tail (`UNPAIRED` if none).
    pub fn head_of_tail(&self) -> &[u32] {
        &self.partner[TAIL]
    }

    pub fn tail_of_head(&self) -> &[u32] {
        &self.partner[HEAD]
    }

    /// All pairs `(tail, head)` made so far, including prior ones.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.partner[TAIL]
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != UNPAIRED)
            .map(|(t, &h)| (t as u32, h))
            .collect()
    }

    pub fn tree(&self) -> &[TreeNode] {
        &self.tree
    }

    /// Tree nodes of level `t`.
    pub fn level(&self, t: usize) -> &[TreeNode] {
        &self.tree[self.level_starts[t]..self.level_starts[t + 1]]
    }

    /// `|N_t|` for every completed level, starting with `|N_0| = 1`.
    pub fn level_sizes(&self) -> &[u64] {
        &self.level_sizes
    }

    pub fn epoch_ends(&self) -> &[u64] {
        &self.epoch_ends
    }

    pub fn outcome(&self) -> Option<ExplorationOutcome> {
        self.outcome
    }

    /// Explored half-edges still waiting to be paired, in FIFO order.
    pub fn frontier(&self) -> Vec<u32> {
        self.tree.iter().filter(|n| !n.paired).map(|n| n.half_edge).collect()
    }

    #[inline]
    fn set_status(&mut self, side: usize, x: u32, s: HalfEdgeStatus) {
        self.status[side][x as usize] = s;
        self.touched[side].push(x);
    }

    fn owner(&self, side: usize, x: u32) -> u32 {
        if side == TAIL {
            self.layout.tail_owner[x as usize]
        } else {
            self.layout.head_owner[x as usize]
        }
    }

    fn range(&self, side: usize, v: u32) -> std::ops::Range<u32> {
        if side == TAIL {
            self.layout.tails(v as usize)
        } else {
            self.layout.heads(v as usize)
        }
    }

    /// Makes every unpaired half-edge of `v` fatal.
    fn make_fatal(&mut self, v: u32) {
        for side in [TAIL, HEAD] {
            for x in self.range(side, v) {
                if self.status[side][x as usize] != HalfEdgeStatus::Paired {
                    self.set_status(side, x, HalfEdgeStatus::Fatal);
                }
            }
        }
    }

    /// A fresh state conditioned on this one's pairings: the tree is
    /// cleared, pairings stay, and unpaired half-edges on touched vertices
    /// become fatal.
    pub fn conditioned(&self) -> ExplorationState {
        let mut next = self.clone();
        next.start = None;
        next.tree.clear();
        next.level_starts.clear();
        next.level_sizes.clear();
        next.epoch_ends.clear();
        next.pairings = 0;
        next.outcome = None;
        let n = self.layout.n() as u32;
        for v in 0..n {
            let touched = [TAIL, HEAD].iter().any(|&side| {
                self.range(side, v)
                    .any(|x| self.status[side][x as usize] != HalfEdgeStatus::Undiscovered)
            });
            if touched {
                next.make_fatal(v);
            }
        }
        next.touched = [Vec::new(), Vec::new()];
        next.free[TAIL].undo.clear();
        next.free[HEAD].undo.clear();
        next
    }

    /// Undoes everything since construction. Only valid for states that did
    /// not come from [`ExplorationState::conditioned`].
    pub fn reset(&mut self) {
        for side in [TAIL, HEAD] {
            let touched = std::mem::take(&mut self.touched[side]);
            for &x in &touched {
                self.status[side][x as usize] = HalfEdgeStatus::Undiscovered;
                self.partner[side][x as usize] = UNPAIRED;
            }
            self.touched[side] = touched;
            self.touched[side].clear();
            self.free[side].restore_all();
        }
        self.start = None;
        self.tree.clear();
        self.level_starts.clear();
        self.level_sizes.clear();
        self.epoch_ends.clear();
        self.pairings = 0;
        self.outcome = None;
    }

    /// Runs one exploration from `start` (a tail for `Out`, a head for
    /// `In`). The state must not have been explored since its last reset or
    /// conditioning.
    pub fn explore<C: Chooser + ?Sized>(
        &mut self,
        start: u32,
        direction: Direction,
        stop: &StopRule,
        chooser: &mut C,
    ) -> Result<ExplorationOutcome, GraphGenError> {
        if stop.max_depth < 1 || stop.omega < 1 {
            return Err(GraphGenError::DomainError("max_depth and omega must be >= 1".into()));
        }
        if self.start.is_some() {
            return Err(GraphGenError::DomainError("state already explored; reset or condition it".into()));
        }
        let m = self.layout.m();
        if start as usize >= m {
            return Err(GraphGenError::HalfEdgeOutOfRange {
                index: start,
                len: m as u64,
            });
        }
        let (f, b) = match direction {
            Direction::Out => (TAIL, HEAD),
            Direction::In => (HEAD, TAIL),
        };
        match self.status[f][start as usize] {
            HalfEdgeStatus::Paired => return Err(GraphGenError::StartAlreadyPaired(start)),
            HalfEdgeStatus::Fatal => return Err(GraphGenError::StartInsidePrior(start)),
            _ => {}
        }
        let v0 = self.owner(f, start);
        if stop.forbidden_vertices.contains(&v0) {
            return Err(GraphGenError::StartInsidePrior(start));
        }
        for &v in &stop.forbidden_vertices {
            if (v as usize) < self.layout.n() {
                self.make_fatal(v);
            }
        }

        self.direction = direction;
        self.start = Some(start);
        self.set_status(f, start, HalfEdgeStatus::Active);
        for y in self.range(b, v0) {
            if self.status[b][y as usize] == HalfEdgeStatus::Undiscovered {
                self.set_status(b, y, HalfEdgeStatus::Active);
            }
        }
        self.tree.push(TreeNode {
            half_edge: start,
            parent: UNPAIRED,
            depth: 0,
            paired: false,
        });
        self.level_starts.extend([0, 1]);
        self.level_sizes.push(1);

        for t in 1..=stop.max_depth {
            let (lo, hi) = (self.level_starts[t as usize - 1], self.level_starts[t as usize]);
            for idx in lo..hi {
                let x = self.tree[idx].half_edge;
                let live = self.free[b].live();
                assert!(!live.is_empty(), "unpaired half-edge without a partner");
                let y = live[chooser.choose(x, live)];
                self.free[b].remove(y);
                self.free[f].remove(x);
                self.partner[f][x as usize] = y;
                self.partner[b][y as usize] = x;
                self.set_status(f, x, HalfEdgeStatus::Paired);
                self.tree[idx].paired = true;
                self.pairings += 1;
                let previous = self.status[b][y as usize];
                self.set_status(b, y, HalfEdgeStatus::Paired);
                match previous {
                    HalfEdgeStatus::Fatal => {
                        self.epoch_ends.push(self.pairings);
                        let out = ExplorationOutcome::HitFatal { depth: t, half_edge: y };
                        self.outcome = Some(out);
                        return Ok(out);
                    }
                    HalfEdgeStatus::Active => {}
                    HalfEdgeStatus::Undiscovered => {
                        let w = self.owner(b, y);
                        for y2 in self.range(b, w) {
                            if self.status[b][y2 as usize] == HalfEdgeStatus::Undiscovered {
                                self.set_status(b, y2, HalfEdgeStatus::Active);
                            }
                        }
                        for x2 in self.range(f, w) {
                            self.set_status(f, x2, HalfEdgeStatus::Active);
                            self.tree.push(TreeNode {
                                half_edge: x2,
                                parent: idx as u32,
                                depth: t,
                                paired: false,
                            });
                        }
                    }
                    HalfEdgeStatus::Paired => unreachable!("paired half-edge in the free list"),
                }
            }
            self.level_starts.push(self.tree.len());
            let size = (self.tree.len() - hi) as u64;
            self.level_sizes.push(size);
            self.epoch_ends.push(self.pairings);
            let out = if size == 0 {
                ExplorationOutcome::Died { depth: t }
            } else if size >= stop.omega {
                ExplorationOutcome::Expanded { depth: t }
            } else if t == stop.max_depth {
                ExplorationOutcome::DepthLimit { depth: t }
            } else {
                continue;
            };
            self.outcome = Some(out);
            return Ok(out);
        }
        unreachable!("loop returns at max_depth")
    }
}

/// Lazily explores from `start`, optionally conditioned on a prior state.
pub fn lazy_explore<R: Rng + ?Sized>(
    seq: &BiDegreeSequence,
    start: u32,
    direction: Direction,
    stop: &StopRule,
    rng: &mut R,
    prior: Option<&ExplorationState>,
) -> Result<ExplorationState, GraphGenError> {
    let mut state = match prior {
        Some(p) => {
            // a start paired inside the prior must be reported as such
            let side = if direction == Direction::Out { TAIL } else { HEAD };
            if (start as usize) < p.layout.m() && p.status[side][start as usize] == HalfEdgeStatus::Paired {
                return Err(GraphGenError::StartAlreadyPaired(start));
            }
            p.conditioned()
        }
        None => ExplorationState::new(seq),
    };
    state.explore(start, direction, stop, &mut RngChooser(rng))?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn seq(pairs: &[(u32, u32)]) -> BiDegreeSequence {
        BiDegreeSequence::new(pairs.to_vec()).unwrap()
    }

    fn assert_partition(state: &ExplorationState) {
        // every half-edge has one status and pairing is symmetric
        for (t, &h) in state.head_of_tail().iter().enumerate() {
            let paired = state.tail_status()[t] == HalfEdgeStatus::Paired;
            assert_eq!(paired, h != UNPAIRED);
            if paired {
                assert_eq!(state.tail_of_head()[h as usize], t as u32);
                assert_eq!(state.head_status()[h as usize], HalfEdgeStatus::Paired);
            }
        }
    }

    #[test]
    fn forced_pairing_dies_at_one() {
        let s = seq(&[(0, 1), (1, 0)]);
        let st = lazy_explore(&s, 0, Direction::Out, &StopRule::new(10, 5), &mut stream(0), None).unwrap();
        assert_eq!(st.level_sizes(), &[1, 0]);
        assert_eq!(st.outcome(), Some(ExplorationOutcome::Died { depth: 1 }));
        assert_eq!(st.tree().len(), 1);
        assert_eq!(st.pairs(), vec![(0, 0)]);
        assert_partition(&st);
    }

    #[test]
    fn functional_line_has_width_one() {
        let s = seq(&[(1, 1); 50]);
        let mut rng = stream(3);
        for start in 0..50 {
            let st = lazy_explore(&s, start, Direction::Out, &StopRule::new(100, 2), &mut rng, None).unwrap();
            assert!(st.level_sizes().iter().all(|&k| k <= 1));
            assert!(matches!(st.outcome(), Some(ExplorationOutcome::Died { .. })));
            assert_partition(&st);
        }
    }

    #[test]
    fn doubling_until_omega() {
        let s = seq(&[(2, 2); 5000]);
        let st = lazy_explore(&s, 0, Direction::Out, &StopRule::new(50, 50), &mut stream(1), None).unwrap();
        assert_eq!(st.outcome(), Some(ExplorationOutcome::Expanded { depth: 6 }));
        assert_eq!(st.epoch_ends().len(), 6);
        let levels: u64 = st.level_sizes().iter().sum();
        assert_eq!(levels as usize, st.tree().len());
    }

    #[test]
    fn in_direction_mirrors_out() {
        let s = seq(&[(1, 0), (0, 1)]);
        let st = lazy_explore(&s, 0, Direction::In, &StopRule::new(5, 5), &mut stream(0), None).unwrap();
        assert_eq!(st.level_sizes(), &[1, 0]);
        assert_eq!(st.tail_of_head()[0], 0);
    }

    #[test]
    fn resumed_exploration_keeps_prior_pairs() {
        let s = seq(&[(2, 2); 200]);
        let mut rng = stream(9);
        let first = lazy_explore(&s, 0, Direction::Out, &StopRule::new(4, 1000), &mut rng, None).unwrap();
        // head 399 belongs to vertex 199, untouched by a 4-level exploration from vertex 0 whp
        let start = (0..400u32)
            .rev()
            .find(|&h| {
                let v = first.layout().head_owner[h as usize];
                first.layout().heads(v as usize).all(|y| first.head_status()[y as usize] == HalfEdgeStatus::Undiscovered)
                    && first.layout().tails(v as usize).all(|x| first.tail_status()[x as usize] == HalfEdgeStatus::Undiscovered)
            })
            .unwrap();
        let second = lazy_explore(&s, start, Direction::In, &StopRule::new(6, 1000), &mut rng, Some(&first)).unwrap();
        for (t, h) in first.pairs() {
            assert_eq!(second.head_of_tail()[t as usize], h);
        }
        assert_partition(&second);
        assert!(second.pairs().len() > first.pairs().len());
        let first_tail = first.tree()[0].half_edge;
        assert_eq!(
            lazy_explore(&s, first_tail, Direction::Out, &StopRule::new(2, 10), &mut rng, Some(&first)).unwrap_err(),
            GraphGenError::StartAlreadyPaired(first_tail)
        );
    }

    #[test]
    fn reset_restores_a_fresh_state() {
        let s = seq(&[(2, 2); 100]);
        let mut st = ExplorationState::new(&s);
        let mut rng = stream(2);
        st.explore(7, Direction::Out, &StopRule::new(5, 1000), &mut RngChooser(&mut rng)).unwrap();
        st.reset();
        assert!(st.tail_status().iter().all(|&x| x == HalfEdgeStatus::Undiscovered));
        assert!(st.head_of_tail().iter().all(|&x| x == UNPAIRED));
        let mut a = stream(5);
        let mut b = stream(5);
        st.explore(3, Direction::Out, &StopRule::new(5, 1000), &mut RngChooser(&mut a)).unwrap();
        let fresh = lazy_explore(&s, 3, Direction::Out, &StopRule::new(5, 1000), &mut b, None).unwrap();
        assert_eq!(st.pairs(), fresh.pairs());
        assert_eq!(st.tree(), fresh.tree());
    }
}
