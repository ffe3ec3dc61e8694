//! Monte Carlo for Galton-Watson branching processes.
//!
//! Every estimator splits its runs over [`Substreams`] indexed by run
//! number and only reduces integer counts, so results are identical for any
//! rayon pool size.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::Substreams;
use crate::stats::binomial_stderr;
use crate::theory::{solve_survival, OffspringDistribution};

/// Default per-generation population cap for [`simulate`].
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum GwError {
    #[error("no run went extinct within the horizon")]
    NoExtinctRuns,
    #[error("no run survived to depth {0}")]
    NoSurvivors(u32),
    #[error("invalid argument: {0}")]
    DomainError(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GwStatus {
    Extinct,
    AliveAtHorizon,
    /// A generation exceeded the population cap; `sizes` stops before it.
    SizeCensored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GWTrajectory {
    /// `X_0 = 1, X_1, …`.
    pub sizes: Vec<u64>,
    /// `Y = Σ X_i` over the recorded generations.
    pub total: u64,
    pub status: GwStatus,
}

/// Cdf-inversion sampler for an offspring law.
#[derive(Debug, Clone)]
pub struct OffspringSampler {
    cdf: Vec<f64>,
}

impl OffspringSampler {
    pub fn new(xi: &OffspringDistribution) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = xi
            .pmf()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().expect("nonempty pmf") = f64::INFINITY;
        OffspringSampler { cdf }
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        if self.cdf.len() <= 24 {
            self.cdf.iter().position(|&c| u < c).unwrap_or(0) as u64
        } else {
            self.cdf.partition_point(|&c| c <= u) as u64
        }
    }

    /// Offspring total of `parents` individuals, or `None` as soon as the
    /// partial sum reaches `limit`.
    #[inline]
    fn generation<R: Rng + ?Sized>(&self, parents: u64, limit: u64, rng: &mut R) -> Option<u64> {
        let mut total = 0u64;
        for _ in 0..parents {
            total += self.draw(rng);
            if total >= limit {
                return None;
            }
        }
        Some(total)
    }
}

/// Forward simulation up to `max_t` generations; a generation larger than
/// `cap` ends the run as [`GwStatus::SizeCensored`].
pub fn simulate<R: Rng + ?Sized>(
    xi: &OffspringDistribution,
    max_t: u32,
    cap: u64,
    rng: &mut R,
) -> GWTrajectory {
    simulate_with(&OffspringSampler::new(xi), max_t, cap, rng)
}

fn simulate_with<R: Rng + ?Sized>(
    sampler: &OffspringSampler,
    max_t: u32,
    cap: u64,
    rng: &mut R,
) -> GWTrajectory {
    let mut sizes = vec![1u64];
    let mut current = 1u64;
    for _ in 0..max_t {
        match sampler.generation(current, cap.saturating_add(1), rng) {
            None => {
                let total = sizes.iter().sum();
                return GWTrajectory {
                    sizes,
                    total,
                    status: GwStatus::SizeCensored,
                };
            }
            Some(next) => {
                sizes.push(next);
                current = next;
                if next == 0 {
                    let total = sizes.iter().sum();
                    return GWTrajectory {
                        sizes,
                        total,
                        status: GwStatus::Extinct,
                    };
                }
            }
        }
    }
    let total = sizes.iter().sum();
    GWTrajectory {
        sizes,
        total,
        status: GwStatus::AliveAtHorizon,
    }
}

/// Population cap above which a supercritical run is classified as
/// surviving: the smallest cap with `ρ^cap ≤ 1e−16`, clamped to
/// `[16, DEFAULT_CAP]`.
pub fn survival_cap(xi: &OffspringDistribution) -> u64 {
    let rho = solve_survival(xi).extinction;
    if rho <= 0.0 {
        return 16;
    }
    if rho >= 1.0 {
        return DEFAULT_CAP;
    }
    let c = ((1e-16f64).ln() / rho.ln()).ceil();
    (c as u64).clamp(16, DEFAULT_CAP)
}

/// Burn-in `t_ξ(ω) = ⌈log_ν ω⌉` for ν > 1; `None` otherwise.
pub fn burn_in(xi: &OffspringDistribution, omega: u64) -> Option<u32> {
    let nu = xi.mean();
    if nu <= 1.0 {
        return None;
    }
    // exact powers of ν must not round up past the integer
    let r = (omega as f64).ln() / nu.ln();
    Some((r - 1e-9).ceil().max(0.0) as u32)
}

/// A Monte Carlo proportion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub runs: u64,
}

impl McEstimate {
    fn from_counts(hits: u64, runs: u64) -> Self {
        let estimate = hits as f64 / runs as f64;
        McEstimate {
            estimate,
            stderr: binomial_stderr(estimate, runs),
            hits,
            runs,
        }
    }
}

fn count_runs<F>(runs: u64, seed: u64, f: F) -> u64
where
    F: Fn(&mut crate::rng::StreamRng) -> bool + Sync,
{
    let streams = Substreams::new(seed);
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.get(i);
            u64::from(f(&mut rng))
        })
        .sum()
}

/// Fraction of runs with `X_horizon > 0`.
pub fn estimate_survival(xi: &OffspringDistribution, horizon: u32, runs: u64, seed: u64) -> McEstimate {
    assert!(runs >= 1, "runs must be positive");
    let sampler = OffspringSampler::new(xi);
    let cap = survival_cap(xi);
    let hits = count_runs(runs, seed, |rng| {
        alive_at(&sampler, horizon, cap, rng)
    });
    McEstimate::from_counts(hits, runs)
}

fn alive_at<R: Rng + ?Sized>(sampler: &OffspringSampler, horizon: u32, cap: u64, rng: &mut R) -> bool {
    let traj = simulate_with(sampler, horizon, cap, rng);
    traj.status != GwStatus::Extinct
}

/// Estimate of `P(∩_{r=1}^t [0 < X_r < ω])` and the burn-in `t_ξ(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub runs: u64,
    pub omega: u64,
    pub t: u32,
    pub burn_in: Option<u32>,
}

#[inline]
pub(crate) fn thin_indicator<R: Rng + ?Sized>(
    sampler: &OffspringSampler,
    omega: u64,
    t: u32,
    rng: &mut R,
) -> bool {
    let mut current = 1u64;
    for _ in 0..t {
        match sampler.generation(current, omega, rng) {
            Some(0) | None => return false,
            Some(next) => current = next,
        }
    }
    true
}

pub fn thin_event_probability(
    xi: &OffspringDistribution,
    omega: u64,
    t: u32,
    runs: u64,
    seed: u64,
) -> Result<ThinEstimate, GwError> {
    if omega < 2 || t < 1 || runs < 1 {
        return Err(GwError::DomainError(format!(
            "need omega >= 2, t >= 1, runs >= 1 (got {omega}, {t}, {runs})"
        )));
    }
    let sampler = OffspringSampler::new(xi);
    let hits = count_runs(runs, seed, |rng| thin_indicator(&sampler, omega, t, rng));
    let e = McEstimate::from_counts(hits, runs);
    Ok(ThinEstimate {
        estimate: e.estimate,
        stderr: e.stderr,
        hits,
        runs,
        omega,
        t,
        burn_in: burn_in(xi, omega),
    })
}

/// Empirical law of the root's offspring count among runs extinct by
/// `horizon`.
pub fn extinct_root_offspring_law(
    xi: &OffspringDistribution,
    horizon: u32,
    runs: u64,
    seed: u64,
) -> Result<OffspringDistribution, GwError> {
    let (pmf, _) = extinct_root_counts(xi, horizon, runs, seed)?;
    Ok(pmf)
}

/// [`extinct_root_offspring_law`] plus the number of extinct runs.
pub fn extinct_root_counts(
    xi: &OffspringDistribution,
    horizon: u32,
    runs: u64,
    seed: u64,
) -> Result<(OffspringDistribution, u64), GwError> {
    let sampler = OffspringSampler::new(xi);
    let cap = survival_cap(xi);
    let streams = Substreams::new(seed);
    let hist = (0..runs)
        .into_par_iter()
        .fold(Vec::<u64>::new, |mut acc, i| {
            let mut rng = streams.get(i);
            let traj = simulate_with(&sampler, horizon, cap, &mut rng);
            if traj.status == GwStatus::Extinct {
                let k = traj.sizes.get(1).copied().unwrap_or(0) as usize;
                if acc.len() <= k {
                    acc.resize(k + 1, 0);
                }
                acc[k] += 1;
            }
            acc
        })
        .reduce(Vec::new, merge_hist);
    let extinct: u64 = hist.iter().sum();
    if extinct == 0 {
        return Err(GwError::NoExtinctRuns);
    }
    let pmf = hist.iter().map(|&c| c as f64 / extinct as f64).collect();
    Ok((OffspringDistribution::from_pmf_unchecked(pmf), extinct))
}

fn merge_hist(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    /// `(survivors / runs)^{1/t}`.
    pub root_estimate: f64,
    pub fraction: f64,
    pub survivors: u64,
    pub runs: u64,
    pub t: u32,
    pub total_bound: Option<u64>,
}

/// `P(X_t > 0)^{1/t}` for a subcritical law, optionally restricted to the
/// joint event `Y_t = Σ_{i≤t} X_i ≤ total_bound`.
pub fn subcritical_decay(
    xi: &OffspringDistribution,
    t: u32,
    runs: u64,
    seed: u64,
    total_bound: Option<u64>,
) -> Result<DecayEstimate, GwError> {
    if xi.mean() >= 1.0 {
        return Err(GwError::DomainError(format!(
            "offspring mean {} is not subcritical",
            xi.mean()
        )));
    }
    if t < 1 || runs < 1 {
        return Err(GwError::DomainError("need t >= 1 and runs >= 1".into()));
    }
    let sampler = OffspringSampler::new(xi);
    let bound = total_bound.unwrap_or(u64::MAX);
    let survivors = count_runs(runs, seed, |rng| {
        let mut current = 1u64;
        let mut total = 1u64;
        for _ in 0..t {
            // a generation that pushes Y past the bound already fails
            let room = bound.saturating_sub(total).saturating_add(1);
            match sampler.generation(current, room, rng) {
                None | Some(0) => return false,
                Some(next) => {
                    current = next;
                    total += next;
                }
            }
        }
        total <= bound
    });
    if survivors == 0 {
        return Err(GwError::NoSurvivors(t));
    }
    let fraction = survivors as f64 / runs as f64;
    Ok(DecayEstimate {
        root_estimate: fraction.powf(1.0 / f64::from(t)),
        fraction,
        survivors,
        runs,
        t,
        total_bound,
    })
}

/// Mean and standard error of `X_t / ν^t` without any population cap.
pub fn martingale_mean(xi: &OffspringDistribution, t: u32, runs: u64, seed: u64) -> (f64, f64) {
    let sampler = OffspringSampler::new(xi);
    let streams = Substreams::new(seed);
    let scale = xi.mean().powi(t as i32);
    let (s1, s2) = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.get(i);
            let traj = simulate_with(&sampler, t, u64::MAX - 1, &mut rng);
            let x = *traj.sizes.last().unwrap() as f64;
            let x = if traj.sizes.len() == t as usize + 1 { x } else { 0.0 };
            let w = x / scale;
            (w, w * w)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = runs as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}
