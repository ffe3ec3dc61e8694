//! Bi-degree sequences and joint degree distributions.
//!
//! Degree pairs are ordered `(in, out)` everywhere.

mod dist;
mod io;

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

pub use dist::{DistSpec, JointDegreeDistribution, Marginal, MarginalSpec, PairSampler, TRUNCATION_TAIL};
pub use io::{parse_degree_file, read_degree_file, write_degree_file};

#[derive(Debug, Error)]
pub enum DegModelError {
    #[error("in-degree sum {0} differs from out-degree sum {1}")]
    SumMismatch(u64, u64),
    #[error("degree sums still unequal after {redraws} redraws")]
    RepairBudgetExceeded { redraws: u64 },
    #[error("sequence has no half-edges")]
    EmptySequence,
    #[error("vertex {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("exponent ({0}, {1}) outside {{0, 1, 2}}")]
    InvalidExponent(u32, u32),
    #[error("integer overflow while accumulating degree moments")]
    Overflow,
    #[error("sequence too large: {0}")]
    TooLarge(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("in-degree mean {mean_in} differs from out-degree mean {mean_out}")]
    MeanMismatch { mean_in: f64, mean_out: f64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A validated bi-degree sequence: per-vertex `(d_in, d_out)` with equal
/// in and out totals `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiDegreeSequence {
    pairs: Vec<(u32, u32)>,
    m: u64,
}

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 1 << 31;
/// Largest supported half-edge count (half-edges are indexed by `u32`).
pub const MAX_HALF_EDGES: u64 = u32::MAX as u64 - 1;

impl BiDegreeSequence {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self, DegModelError> {
        validate_sequence(pairs)
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn in_degree(&self, v: usize) -> u32 {
        self.pairs[v].0
    }

    pub fn out_degree(&self, v: usize) -> u32 {
        self.pairs[v].1
    }

    /// Maximum degree over both coordinates.
    pub fn max_degree(&self) -> u32 {
        self.pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0)
    }

    pub fn into_pairs(self) -> Vec<(u32, u32)> {
        self.pairs
    }
}

/// Checks `Σ d_in == Σ d_out` and returns the sequence with `m` filled in.
pub fn validate_sequence(pairs: Vec<(u32, u32)>) -> Result<BiDegreeSequence, DegModelError> {
    if pairs.len() > MAX_VERTICES {
        return Err(DegModelError::TooLarge(format!("{} vertices", pairs.len())));
    }
    let sum_in: u64 = pairs.iter().map(|p| u64::from(p.0)).sum();
    let sum_out: u64 = pairs.iter().map(|p| u64::from(p.1)).sum();
    if sum_in != sum_out {
        return Err(DegModelError::SumMismatch(sum_in, sum_out));
    }
    if sum_in > MAX_HALF_EDGES {
        return Err(DegModelError::TooLarge(format!("{sum_in} half-edge pairs")));
    }
    Ok(BiDegreeSequence { pairs, m: sum_in })
}

/// Outcome of [`sample_sequence_with_report`].
#[derive(Debug, Clone)]
pub struct SampledSequence {
    pub sequence: BiDegreeSequence,
    /// Redraws attempted by the repair loop (accepted or not).
    pub redraws: u64,
}

/// `n` i.i.d. draws from `dist`, repaired until the degree sums agree.
pub fn sample_sequence<R: Rng + ?Sized>(
    dist: &JointDegreeDistribution,
    n: usize,
    rng: &mut R,
) -> Result<BiDegreeSequence, DegModelError> {
    sample_sequence_with_report(dist, n, rng).map(|s| s.sequence)
}

/// Like [`sample_sequence`] but also reports the repair effort.
///
/// Repair picks a uniformly random index and redraws its pair; the redraw is
/// kept when it does not move the imbalance `Σin − Σout` further from zero.
/// At most `100 n` redraws are tried.
pub fn sample_sequence_with_report<R: Rng + ?Sized>(
    dist: &JointDegreeDistribution,
    n: usize,
    rng: &mut R,
) -> Result<SampledSequence, DegModelError> {
    if n == 0 {
        return Err(DegModelError::EmptySequence);
    }
    if n > MAX_VERTICES {
        return Err(DegModelError::TooLarge(format!("{n} vertices")));
    }
    let sampler = dist.sampler();
    let mut pairs: Vec<(u32, u32)> = (0..n).map(|_| sampler.draw(rng)).collect();
    let mut imbalance: i64 = pairs
        .iter()
        .map(|&(a, b)| i64::from(a) - i64::from(b))
        .sum();
    let budget = 100 * n as u64;
    let mut redraws = 0u64;
    while imbalance != 0 {
        if redraws >= budget {
            return Err(DegModelError::RepairBudgetExceeded { redraws });
        }
        redraws += 1;
        let i = rng.random_range(0..n);
        let old = pairs[i];
        let new = sampler.draw(rng);
        let shifted = imbalance - (i64::from(old.0) - i64::from(old.1))
            + (i64::from(new.0) - i64::from(new.1));
        if shifted.abs() <= imbalance.abs() {
            pairs[i] = new;
            imbalance = shifted;
        }
    }
    Ok(SampledSequence {
        sequence: validate_sequence(pairs)?,
        redraws,
    })
}

/// Summary statistics of a degree sequence, accumulated in exact integers.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStats {
    pub n: usize,
    pub m: u64,
    /// `m / n`.
    pub lambda_n: f64,
    /// `Σ d_in d_out / m`.
    pub nu_n: f64,
    /// `(E[(D⁻)²], E[(D⁺)²], E[D⁻D⁺])` under the uniform vertex law.
    pub second_moments: (f64, f64, f64),
    pub delta_n: u32,
    pub counts: BTreeMap<(u32, u32), u64>,
    pub sum_in_sq: u64,
    pub sum_out_sq: u64,
    pub sum_in_out: u64,
}

impl SequenceStats {
    /// `nu_n` as the exact fraction `(Σ d_in d_out, m)`.
    pub fn nu_n_fraction(&self) -> (u64, u64) {
        (self.sum_in_out, self.m)
    }
}

pub fn stats(seq: &BiDegreeSequence) -> Result<SequenceStats, DegModelError> {
    if seq.m == 0 {
        return Err(DegModelError::EmptySequence);
    }
    let mut sum_in_sq = 0u64;
    let mut sum_out_sq = 0u64;
    let mut sum_in_out = 0u64;
    let mut counts = BTreeMap::new();
    let mut delta = 0u32;
    for &(a, b) in &seq.pairs {
        let (a64, b64) = (u64::from(a), u64::from(b));
        sum_in_sq = checked_acc(sum_in_sq, a64, a64)?;
        sum_out_sq = checked_acc(sum_out_sq, b64, b64)?;
        sum_in_out = checked_acc(sum_in_out, a64, b64)?;
        *counts.entry((a, b)).or_insert(0u64) += 1;
        delta = delta.max(a).max(b);
    }
    let n = seq.n() as f64;
    Ok(SequenceStats {
        n: seq.n(),
        m: seq.m,
        lambda_n: seq.m as f64 / n,
        nu_n: sum_in_out as f64 / seq.m as f64,
        second_moments: (
            sum_in_sq as f64 / n,
            sum_out_sq as f64 / n,
            sum_in_out as f64 / n,
        ),
        delta_n: delta,
        counts,
        sum_in_sq,
        sum_out_sq,
        sum_in_out,
    })
}

fn checked_acc(acc: u64, a: u64, b: u64) -> Result<u64, DegModelError> {
    a.checked_mul(b)
        .and_then(|x| acc.checked_add(x))
        .ok_or(DegModelError::Overflow)
}

/// `d_S(i, j) = Σ_{v ∈ S} d_in(v)^i d_out(v)^j` for `i, j ∈ {0, 1, 2}`.
///
/// `subset` is treated as a set; repeated vertices count once.
pub fn subset_degree_sums<I>(
    seq: &BiDegreeSequence,
    subset: I,
    i: u32,
    j: u32,
) -> Result<u64, DegModelError>
where
    I: IntoIterator<Item = usize>,
{
    if i > 2 || j > 2 {
        return Err(DegModelError::InvalidExponent(i, j));
    }
    let mut vs: Vec<usize> = subset.into_iter().collect();
    vs.sort_unstable();
    vs.dedup();
    let mut acc = 0u64;
    for v in vs {
        if v >= seq.n() {
            return Err(DegModelError::IndexOutOfRange { index: v, n: seq.n() });
        }
        let (a, b) = seq.pairs[v];
        let term = u64::from(a)
            .checked_pow(i)
            .and_then(|x| u64::from(b).checked_pow(j).and_then(|y| x.checked_mul(y)))
            .ok_or(DegModelError::Overflow)?;
        acc = acc.checked_add(term).ok_or(DegModelError::Overflow)?;
    }
    Ok(acc)
}
