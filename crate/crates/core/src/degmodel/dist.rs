use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BiDegreeSequence, DegModelError};

/// Cumulative tail mass at which infinite-support families are cut.
pub const TRUNCATION_TAIL: f64 = 1e-12;

/// Hard cap on the support length of a truncated family.
const MAX_SUPPORT: usize = 10_000_000;

/// A one-dimensional degree law on `0..pmf.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pmf: Vec<f64>,
    truncation_mass: f64,
}

impl Marginal {
    pub fn point(k: u32) -> Self {
        let mut pmf = vec![0.0; k as usize + 1];
        pmf[k as usize] = 1.0;
        Marginal {
            pmf,
            truncation_mass: 0.0,
        }
    }

    /// Poisson(`lambda`) truncated once the remaining tail drops below
    /// [`TRUNCATION_TAIL`], then renormalized.
    pub fn poisson(lambda: f64) -> Result<Self, DegModelError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(DegModelError::InvalidDistribution(format!(
                "poisson mean must be finite and nonnegative, got {lambda}"
            )));
        }
        if lambda == 0.0 {
            return Ok(Marginal::point(0));
        }
        let mut pmf = Vec::new();
        let mut term = (-lambda).exp();
        let mut cum = 0.0;
        let mut k = 0u32;
        loop {
            pmf.push(term);
            cum += term;
            // stop only past the mode so that the tail estimate is honest
            if f64::from(k) > lambda && 1.0 - cum <= TRUNCATION_TAIL {
                break;
            }
            k += 1;
            term *= lambda / f64::from(k);
            if pmf.len() > MAX_SUPPORT {
                return Err(DegModelError::InvalidDistribution(
                    "poisson support too long".into(),
                ));
            }
        }
        Ok(Self::renormalized(pmf, (1.0 - cum).max(0.0)))
    }

    /// Zeta-type law `P(k) ∝ k^-exponent` for `k >= kmin`.
    ///
    /// Requires `exponent > 3` so that the second moment is finite.
    pub fn powerlaw(exponent: f64, kmin: u32) -> Result<Self, DegModelError> {
        if !(exponent.is_finite() && exponent > 3.0) {
            return Err(DegModelError::InvalidDistribution(format!(
                "power-law exponent must exceed 3 for finite second moments, got {exponent}"
            )));
        }
        if kmin == 0 {
            return Err(DegModelError::InvalidDistribution(
                "power-law kmin must be at least 1".into(),
            ));
        }
        let head_end = kmin as usize + 2000;
        let mut z = 0.0;
        for k in kmin as usize..=head_end {
            z += (k as f64).powf(-exponent);
        }
        // midpoint-rule tail of the normalizing sum
        z += (head_end as f64 + 0.5).powf(1.0 - exponent) / (exponent - 1.0);
        let target = (exponent - 1.0) * z * TRUNCATION_TAIL;
        let kmax = (target.powf(1.0 / (1.0 - exponent)) - 0.5).ceil().max(kmin as f64) as usize;
        if kmax > MAX_SUPPORT {
            return Err(DegModelError::InvalidDistribution(format!(
                "power-law support of {kmax} exceeds the truncation limit"
            )));
        }
        let mut pmf = vec![0.0; kmax + 1];
        let mut cum = 0.0;
        for (k, p) in pmf.iter_mut().enumerate().skip(kmin as usize) {
            *p = (k as f64).powf(-exponent) / z;
            cum += *p;
        }
        Ok(Self::renormalized(pmf, (1.0 - cum).max(0.0)))
    }

    /// An explicit pmf indexed by degree; renormalized once.
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self, DegModelError> {
        if pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(DegModelError::InvalidDistribution(
                "pmf entries must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = pmf.iter().sum();
        if total <= 0.0 {
            return Err(DegModelError::InvalidDistribution("pmf has zero mass".into()));
        }
        Ok(Self::renormalized(pmf, 0.0))
    }

    fn renormalized(mut pmf: Vec<f64>, truncation_mass: f64) -> Self {
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let total: f64 = pmf.iter().sum();
        for p in &mut pmf {
            *p /= total;
        }
        Marginal {
            pmf,
            truncation_mass,
        }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k * k) as f64 * p)
            .sum()
    }

    /// Derivative of order 0 or 1 of the generating function at `x`.
    pub(crate) fn pgf(&self, x: f64, order: u32) -> f64 {
        let mut acc = 0.0;
        let mut pow = 1.0; // x^(k - order)
        for (k, &p) in self.pmf.iter().enumerate().skip(order as usize) {
            let coeff = if order == 0 { 1.0 } else { k as f64 };
            acc += coeff * p * pow;
            pow *= x;
        }
        acc
    }

    /// Law of `k - 1` where `k` is drawn with probability `k p_k / mean`.
    pub(crate) fn size_biased_shift(&self) -> Option<Marginal> {
        let mean = self.mean();
        if mean <= 0.0 {
            return None;
        }
        let pmf: Vec<f64> = self
            .pmf
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, p)| k as f64 * p / mean)
            .collect();
        Some(Marginal {
            pmf,
            truncation_mass: self.truncation_mass,
        })
    }

    fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = self
            .pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = f64::INFINITY;
        }
        cdf
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Repr {
    Table(Vec<((u32, u32), f64)>),
    Product { d_in: Marginal, d_out: Marginal },
}

/// The limiting joint law `D = (D⁻, D⁺)` of (in-degree, out-degree).
///
/// Independent families are stored as a product of marginals so that heavy
/// truncated tails never materialize the full product support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDegreeDistribution {
    repr: Repr,
    truncation_mass: f64,
}

impl JointDegreeDistribution {
    pub fn point(d_in: u32, d_out: u32) -> Self {
        JointDegreeDistribution {
            repr: Repr::Table(vec![((d_in, d_out), 1.0)]),
            truncation_mass: 0.0,
        }
    }

    /// Independent in- and out-degrees.
    pub fn product(d_in: Marginal, d_out: Marginal) -> Result<Self, DegModelError> {
        let truncation_mass = d_in.truncation_mass + d_out.truncation_mass;
        let dist = JointDegreeDistribution {
            repr: Repr::Product { d_in, d_out },
            truncation_mass,
        };
        dist.check_means()?;
        Ok(dist)
    }

    pub fn poisson_product(lambda_in: f64, lambda_out: f64) -> Result<Self, DegModelError> {
        Self::product(Marginal::poisson(lambda_in)?, Marginal::poisson(lambda_out)?)
    }

    pub fn powerlaw_product(exponent: f64, kmin: u32) -> Result<Self, DegModelError> {
        let m = Marginal::powerlaw(exponent, kmin)?;
        Self::product(m.clone(), m)
    }

    /// Explicit table of `((in, out), p)` entries; duplicate pairs are
    /// merged and the total is renormalized once.
    pub fn table(entries: Vec<((u32, u32), f64)>) -> Result<Self, DegModelError> {
        if entries.is_empty() {
            return Err(DegModelError::InvalidDistribution("empty table".into()));
        }
        if entries.iter().any(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return Err(DegModelError::InvalidDistribution(
                "table probabilities must be finite and nonnegative".into(),
            ));
        }
        let mut merged = std::collections::BTreeMap::new();
        for (kl, p) in entries {
            *merged.entry(kl).or_insert(0.0) += p;
        }
        let total: f64 = merged.values().sum();
        if total <= 0.0 {
            return Err(DegModelError::InvalidDistribution("table has zero mass".into()));
        }
        let entries = merged
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(kl, p)| (kl, p / total))
            .collect();
        let dist = JointDegreeDistribution {
            repr: Repr::Table(entries),
            truncation_mass: 0.0,
        };
        dist.check_means()?;
        Ok(dist)
    }

    /// The empirical law `D_n` of a degree sequence (`n_{k,l} / n`).
    pub fn empirical(seq: &BiDegreeSequence) -> Result<Self, DegModelError> {
        if seq.n() == 0 {
            return Err(DegModelError::EmptySequence);
        }
        let w = 1.0 / seq.n() as f64;
        Self::table(seq.pairs().iter().map(|&kl| (kl, w)).collect())
    }

    pub fn from_spec(spec: &DistSpec) -> Result<Self, DegModelError> {
        match spec {
            DistSpec::Point { d_in, d_out } => Ok(Self::point(*d_in, *d_out)),
            DistSpec::PoissonProduct {
                lambda,
                lambda_in,
                lambda_out,
            } => {
                let li = lambda_in.or(*lambda);
                let lo = lambda_out.or(*lambda);
                match (li, lo) {
                    (Some(a), Some(b)) => Self::poisson_product(a, b),
                    _ => Err(DegModelError::InvalidDistribution(
                        "poisson_product needs `lambda` or both `lambda_in` and `lambda_out`"
                            .into(),
                    )),
                }
            }
            DistSpec::Table { entries } => {
                Self::table(entries.iter().map(|&(k, l, p)| ((k, l), p)).collect())
            }
            DistSpec::PowerlawProduct { exponent, kmin } => {
                Self::powerlaw_product(*exponent, kmin.unwrap_or(1))
            }
            DistSpec::Product { d_in, d_out } => {
                Self::product(d_in.build()?, d_out.build()?)
            }
        }
    }

    fn check_means(&self) -> Result<(), DegModelError> {
        let (a, b) = (self.mean_in(), self.mean_out());
        if (a - b).abs() > 1e-9 * a.max(b).max(1.0) {
            return Err(DegModelError::MeanMismatch {
                mean_in: a,
                mean_out: b,
            });
        }
        Ok(())
    }

    /// Probability mass removed when truncating infinite-support families.
    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    /// Materialized support as `((in, out), p)`; product laws are expanded,
    /// so avoid this on heavy-tailed products.
    pub fn support(&self) -> Vec<((u32, u32), f64)> {
        match &self.repr {
            Repr::Table(t) => t.clone(),
            Repr::Product { d_in, d_out } => {
                let mut out = Vec::new();
                for (k, &p) in d_in.pmf.iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    for (l, &q) in d_out.pmf.iter().enumerate() {
                        if q > 0.0 {
                            out.push(((k as u32, l as u32), p * q));
                        }
                    }
                }
                out
            }
        }
    }

    /// Number of support points with positive mass.
    pub fn support_len(&self) -> usize {
        match &self.repr {
            Repr::Table(t) => t.len(),
            Repr::Product { d_in, d_out } => {
                d_in.pmf.iter().filter(|p| **p > 0.0).count()
                    * d_out.pmf.iter().filter(|p| **p > 0.0).count()
            }
        }
    }

    /// `Some((in, out))` when in- and out-degrees are independent.
    pub fn as_product(&self) -> Option<(&Marginal, &Marginal)> {
        match &self.repr {
            Repr::Product { d_in, d_out } => Some((d_in, d_out)),
            Repr::Table(_) => None,
        }
    }

    pub fn table_entries(&self) -> Option<&[((u32, u32), f64)]> {
        match &self.repr {
            Repr::Table(t) => Some(t),
            Repr::Product { .. } => None,
        }
    }

    pub fn mean_in(&self) -> f64 {
        match &self.repr {
            Repr::Table(t) => t.iter().map(|((k, _), p)| f64::from(*k) * p).sum(),
            Repr::Product { d_in, .. } => d_in.mean(),
        }
    }

    pub fn mean_out(&self) -> f64 {
        match &self.repr {
            Repr::Table(t) => t.iter().map(|((_, l), p)| f64::from(*l) * p).sum(),
            Repr::Product { d_out, .. } => d_out.mean(),
        }
    }

    /// `E[D⁻ D⁺]`.
    pub fn mean_product(&self) -> f64 {
        match &self.repr {
            Repr::Table(t) => t
                .iter()
                .map(|((k, l), p)| f64::from(*k) * f64::from(*l) * p)
                .sum(),
            Repr::Product { d_in, d_out } => d_in.mean() * d_out.mean(),
        }
    }

    /// Probability of a single pair.
    pub fn prob(&self, d_in: u32, d_out: u32) -> f64 {
        match &self.repr {
            Repr::Table(t) => t
                .iter()
                .find(|(kl, _)| *kl == (d_in, d_out))
                .map_or(0.0, |(_, p)| *p),
            Repr::Product { d_in: a, d_out: b } => {
                a.pmf.get(d_in as usize).copied().unwrap_or(0.0)
                    * b.pmf.get(d_out as usize).copied().unwrap_or(0.0)
            }
        }
    }

    pub(crate) fn from_parts_table(entries: Vec<((u32, u32), f64)>, truncation_mass: f64) -> Self {
        JointDegreeDistribution {
            repr: Repr::Table(entries),
            truncation_mass,
        }
    }

    pub(crate) fn from_parts_product(d_in: Marginal, d_out: Marginal) -> Self {
        let truncation_mass = d_in.truncation_mass + d_out.truncation_mass;
        JointDegreeDistribution {
            repr: Repr::Product { d_in, d_out },
            truncation_mass,
        }
    }

    /// Inversion sampler for i.i.d. degree pairs.
    pub fn sampler(&self) -> PairSampler {
        match &self.repr {
            Repr::Table(t) => {
                let mut acc = 0.0;
                let mut cdf: Vec<f64> = t
                    .iter()
                    .map(|(_, p)| {
                        acc += p;
                        acc
                    })
                    .collect();
                *cdf.last_mut().expect("nonempty table") = f64::INFINITY;
                PairSampler::Table {
                    cdf,
                    pairs: t.iter().map(|(kl, _)| *kl).collect(),
                }
            }
            Repr::Product { d_in, d_out } => PairSampler::Product {
                cdf_in: d_in.cdf(),
                cdf_out: d_out.cdf(),
            },
        }
    }
}

/// Draws `(in, out)` pairs by cdf inversion.
#[derive(Debug, Clone)]
pub enum PairSampler {
    Table { cdf: Vec<f64>, pairs: Vec<(u32, u32)> },
    Product { cdf_in: Vec<f64>, cdf_out: Vec<f64> },
}

impl PairSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        fn invert(cdf: &[f64], u: f64) -> usize {
            cdf.partition_point(|&c| c <= u)
        }
        match self {
            PairSampler::Table { cdf, pairs } => pairs[invert(cdf, rng.random::<f64>())],
            PairSampler::Product { cdf_in, cdf_out } => {
                let k = invert(cdf_in, rng.random::<f64>());
                let l = invert(cdf_out, rng.random::<f64>());
                (k as u32, l as u32)
            }
        }
    }
}

/// JSON description of a joint degree distribution.
///
/// ```json
/// {"family": "poisson_product", "lambda": 2.0}
/// {"family": "table", "entries": [[1, 1, 0.5], [0, 1, 0.25], [1, 0, 0.25]]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Point {
        d_in: u32,
        d_out: u32,
    },
    PoissonProduct {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_in: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_out: Option<f64>,
    },
    Table {
        entries: Vec<(u32, u32, f64)>,
    },
    PowerlawProduct {
        exponent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kmin: Option<u32>,
    },
    /// Independent marginals given separately.
    Product {
        #[serde(rename = "in")]
        d_in: MarginalSpec,
        #[serde(rename = "out")]
        d_out: MarginalSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    Point { k: u32 },
    Poisson { lambda: f64 },
    Powerlaw { exponent: f64, #[serde(default)] kmin: Option<u32> },
    Pmf { pmf: Vec<f64> },
}

impl MarginalSpec {
    pub fn build(&self) -> Result<Marginal, DegModelError> {
        match self {
            MarginalSpec::Point { k } => Ok(Marginal::point(*k)),
            MarginalSpec::Poisson { lambda } => Marginal::poisson(*lambda),
            MarginalSpec::Powerlaw { exponent, kmin } => {
                Marginal::powerlaw(*exponent, kmin.unwrap_or(1))
            }
            MarginalSpec::Pmf { pmf } => Marginal::from_pmf(pmf.clone()),
        }
    }
}
