//! Analytic side: generating functions, size-biased and conjugate laws,
//! survival probabilities and the limiting diameter constants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degmodel::{JointDegreeDistribution, Marginal};
use crate::Direction;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("argument outside its domain: {0}")]
    DomainError(String),
    #[error("mean degree is zero")]
    ZeroMeanDegree,
    #[error("conjugate mass {total} is not normalized (survival probability inconsistent with the law?)")]
    NotNormalized { total: f64 },
    #[error("expansion rate nu = {0} is critical")]
    CriticalRegime(f64),
    #[error("expansion rate nu is zero")]
    ZeroNu,
    #[error("invalid offspring law: {0}")]
    InvalidOffspring(String),
    #[error("nu_hat{side} disagrees between routes: {via_g} vs {via_conjugate}")]
    DualityMismatch {
        side: &'static str,
        via_g: f64,
        via_conjugate: f64,
    },
}

/// A one-dimensional offspring law on `0..pmf.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffspringDistribution {
    pmf: Vec<f64>,
    mean: f64,
}

impl OffspringDistribution {
    /// Validates nonnegativity and `|Σp − 1| ≤ 1e−10`; the pmf is kept as
    /// given (no renormalization).
    pub fn new(pmf: Vec<f64>) -> Result<Self, TheoryError> {
        if pmf.is_empty() {
            return Err(TheoryError::InvalidOffspring("empty pmf".into()));
        }
        if pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(TheoryError::InvalidOffspring(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(TheoryError::InvalidOffspring(format!("mass {total} != 1")));
        }
        Ok(Self::from_pmf_unchecked(pmf))
    }

    pub(crate) fn from_pmf_unchecked(mut pmf: Vec<f64>) -> Self {
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        OffspringDistribution { pmf, mean }
    }

    pub fn point(k: u32) -> Self {
        Self::from_marginal(&Marginal::point(k))
    }

    /// Truncated Poisson law (same truncation rule as the degree families).
    pub fn poisson(lambda: f64) -> Result<Self, TheoryError> {
        Marginal::poisson(lambda)
            .map(|m| Self::from_marginal(&m))
            .map_err(|e| TheoryError::DomainError(e.to_string()))
    }

    pub fn from_marginal(m: &Marginal) -> Self {
        Self::from_pmf_unchecked(m.pmf().to_vec())
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `h(x) = Σ p_k x^k`, Horner form.
    pub fn pgf(&self, x: f64) -> f64 {
        self.pmf.iter().rev().fold(0.0, |acc, p| acc * x + p)
    }

    /// `h'(x)`.
    pub fn pgf_derivative(&self, x: f64) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, p)| acc * x + k as f64 * p)
    }

    /// `E[ξ log₊ ξ]`; finite for every stored (finite-support) law.
    pub fn x_log_x(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, p)| p * k as f64 * (k as f64).ln())
            .sum()
    }
}

/// Partial derivative `∂^{dz+dw} f / ∂z^{dz} ∂w^{dw}` of the bivariate
/// generating function `f(z, w) = Σ λ_{k,l} z^k w^l` (z marks in-degree).
pub fn bivariate_pgf_eval(
    dist: &JointDegreeDistribution,
    z: f64,
    w: f64,
    dz: u32,
    dw: u32,
) -> Result<f64, TheoryError> {
    if !((0.0..=1.0).contains(&z) && (0.0..=1.0).contains(&w)) {
        return Err(TheoryError::DomainError(format!(
            "({z}, {w}) outside the unit square"
        )));
    }
    if dz > 1 || dw > 1 {
        return Err(TheoryError::DomainError(
            "derivative orders must be 0 or 1".into(),
        ));
    }
    if let Some((d_in, d_out)) = dist.as_product() {
        return Ok(d_in.pgf(z, dz) * d_out.pgf(w, dw));
    }
    let entries = dist.table_entries().expect("non-product law is a table");
    let term = |x: f64, k: u32, order: u32| -> f64 {
        match (order, k) {
            (0, _) => x.powi(k as i32),
            (_, 0) => 0.0,
            _ => f64::from(k) * x.powi(k as i32 - 1),
        }
    };
    Ok(entries
        .iter()
        .map(|&((k, l), p)| p * term(z, k, dz) * term(w, l, dw))
        .sum())
}

/// `g(z, w) = ∂²f/∂z∂w / λ`.
fn g(dist: &JointDegreeDistribution, lambda: f64, z: f64, w: f64) -> Result<f64, TheoryError> {
    Ok(bivariate_pgf_eval(dist, z, w, 1, 1)? / lambda)
}

/// In- or out-size-biased law and its relevant marginal.
///
/// `In`: `P(D_in = (k−1, l)) = k λ_{k,l} / λ`, marginal `D_in⁺` (the
/// offspring law of out-explorations). `Out`: `P(D_out = (k, l−1)) =
/// l λ_{k,l} / λ`, marginal `D_out⁻`.
pub fn size_biased(
    dist: &JointDegreeDistribution,
    direction: Direction,
) -> Result<(JointDegreeDistribution, OffspringDistribution), TheoryError> {
    let lambda = match direction {
        Direction::In => dist.mean_in(),
        Direction::Out => dist.mean_out(),
    };
    if lambda <= 0.0 {
        return Err(TheoryError::ZeroMeanDegree);
    }
    if let Some((d_in, d_out)) = dist.as_product() {
        let out = match direction {
            Direction::In => {
                let shifted = d_in.size_biased_shift().ok_or(TheoryError::ZeroMeanDegree)?;
                (
                    JointDegreeDistribution::from_parts_product(shifted, d_out.clone()),
                    OffspringDistribution::from_marginal(d_out),
                )
            }
            Direction::Out => {
                let shifted = d_out.size_biased_shift().ok_or(TheoryError::ZeroMeanDegree)?;
                (
                    JointDegreeDistribution::from_parts_product(d_in.clone(), shifted),
                    OffspringDistribution::from_marginal(d_in),
                )
            }
        };
        return Ok(out);
    }
    let entries = dist.table_entries().expect("non-product law is a table");
    let mut joint = Vec::new();
    let mut marginal = Vec::new();
    for &((k, l), p) in entries {
        let (weight, shifted, keep) = match direction {
            Direction::In => (f64::from(k), (k.wrapping_sub(1), l), l),
            Direction::Out => (f64::from(l), (k, l.wrapping_sub(1)), k),
        };
        if weight == 0.0 || p == 0.0 {
            continue;
        }
        let q = weight * p / lambda;
        joint.push((shifted, q));
        if marginal.len() <= keep as usize {
            marginal.resize(keep as usize + 1, 0.0);
        }
        marginal[keep as usize] += q;
    }
    joint.sort_by_key(|e| e.0);
    Ok((
        JointDegreeDistribution::from_parts_table(joint, dist.truncation_mass()),
        OffspringDistribution::from_pmf_unchecked(marginal),
    ))
}

/// Fixed-point solution for the extinction probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSolution {
    pub survival: f64,
    pub extinction: f64,
    pub iterations: u64,
}

const FIXED_POINT_TOL: f64 = 1e-14;
const FIXED_POINT_MAX_ITER: u64 = 1_000_000;

/// Solves `ρ = h(ρ)` by iterating from 0, which converges monotonically to
/// the smallest root. Returns survival 0 without iterating when the mean is
/// at most 1.
pub fn solve_survival(xi: &OffspringDistribution) -> SurvivalSolution {
    if xi.mean() <= 1.0 {
        return SurvivalSolution {
            survival: 0.0,
            extinction: 1.0,
            iterations: 0,
        };
    }
    let mut w = 0.0f64;
    let mut iterations = 0;
    while iterations < FIXED_POINT_MAX_ITER {
        let next = xi.pgf(w);
        iterations += 1;
        let done = (next - w).abs() < FIXED_POINT_TOL;
        w = next;
        if done {
            break;
        }
    }
    SurvivalSolution {
        survival: (1.0 - w).clamp(0.0, 1.0),
        extinction: w,
        iterations,
    }
}

pub fn survival_probability(xi: &OffspringDistribution) -> f64 {
    solve_survival(xi).survival
}

/// Conjugate law `P(ξ̂ = l) = (1 − s)^{l−1} P(ξ = l)`, with the `s = 1`
/// limit `{0: 1 − p_1, 1: p_1}`.
pub fn conjugate(xi: &OffspringDistribution, s: f64) -> Result<OffspringDistribution, TheoryError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(TheoryError::DomainError(format!("survival probability {s}")));
    }
    let pmf = if s == 1.0 {
        let p1 = xi.prob(1);
        vec![1.0 - p1, p1]
    } else {
        let rho = 1.0 - s;
        let mut scale = 1.0 / rho; // rho^(l-1) at l = 0
        xi.pmf()
            .iter()
            .map(|p| {
                let q = scale * p;
                scale *= rho;
                q
            })
            .collect()
    };
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(TheoryError::NotNormalized { total });
    }
    Ok(OffspringDistribution::from_pmf_unchecked(pmf))
}

/// Root of `x e^{−x} = ν e^{−ν}` in `(0, 1)` by bisection.
pub fn poisson_conjugate_mean(nu: f64) -> Result<f64, TheoryError> {
    if !(nu.is_finite() && nu > 1.0) {
        return Err(TheoryError::DomainError(format!("need nu > 1, got {nu}")));
    }
    let target = nu * (-nu).exp();
    let f = |x: f64| x * (-x).exp() - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Supercritical,
    Subcritical,
}

/// Solver and truncation details reported alongside [`TheoryConstants`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryProvenance {
    pub truncation_mass: f64,
    pub solver_iterations_plus: u64,
    pub solver_iterations_minus: u64,
    /// `|ν̂₊(g) − ν̂₊(conjugate mean)|`.
    pub duality_gap_plus: f64,
    pub duality_gap_minus: f64,
}

/// Limiting constants of a joint degree law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub lambda: f64,
    pub nu: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub nu_hat_plus: f64,
    pub nu_hat_minus: f64,
    /// `1 / log(1/ν̂₊)` (0 when `ν̂₊ = 0`); `None` in the subcritical regime.
    pub t_plus_coeff: Option<f64>,
    pub t_minus_coeff: Option<f64>,
    /// Limit of `diam / log n`.
    pub diameter_coeff: f64,
    /// `1 / log ν`, supercritical only.
    pub typical_coeff: Option<f64>,
    pub regime: Regime,
    pub provenance: TheoryProvenance,
}

impl TheoryConstants {
    /// Harness-level prediction `t⁺ + t⁻ + log_ν n` (or `log_{1/ν} n`).
    pub fn diameter_prediction(&self, n: usize) -> f64 {
        self.diameter_coeff * (n as f64).ln()
    }

    /// `log_ν n`, supercritical only.
    pub fn typical_prediction(&self, n: usize) -> Option<f64> {
        self.typical_coeff.map(|c| c * (n as f64).ln())
    }
}

/// `1 / log(1/x)` with `1/log(1/0) = 0`.
fn inverse_log_inverse(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / (1.0 / x).ln()
    }
}

const DUALITY_TOL: f64 = 1e-8;

pub fn theory_constants(dist: &JointDegreeDistribution) -> Result<TheoryConstants, TheoryError> {
    let lambda = dist.mean_in();
    if lambda <= 0.0 {
        return Err(TheoryError::ZeroMeanDegree);
    }
    let nu = g(dist, lambda, 1.0, 1.0)?;
    if nu == 0.0 {
        return Err(TheoryError::ZeroNu);
    }
    if (nu - 1.0).abs() < 1e-9 {
        return Err(TheoryError::CriticalRegime(nu));
    }
    let (_, d_in_plus) = size_biased(dist, Direction::In)?;
    let (_, d_out_minus) = size_biased(dist, Direction::Out)?;
    let truncation_mass = dist.truncation_mass();

    if nu < 1.0 {
        return Ok(TheoryConstants {
            lambda,
            nu,
            s_plus: 0.0,
            s_minus: 0.0,
            nu_hat_plus: nu,
            nu_hat_minus: nu,
            t_plus_coeff: None,
            t_minus_coeff: None,
            diameter_coeff: 1.0 / (1.0 / nu).ln(),
            typical_coeff: None,
            regime: Regime::Subcritical,
            provenance: TheoryProvenance {
                truncation_mass,
                solver_iterations_plus: 0,
                solver_iterations_minus: 0,
                duality_gap_plus: 0.0,
                duality_gap_minus: 0.0,
            },
        });
    }

    let plus = solve_survival(&d_in_plus);
    let minus = solve_survival(&d_out_minus);
    let nu_hat_plus = g(dist, lambda, 1.0, plus.extinction)?;
    let nu_hat_minus = g(dist, lambda, minus.extinction, 1.0)?;
    let conj_plus = conjugate(&d_in_plus, plus.survival)?.mean();
    let conj_minus = conjugate(&d_out_minus, minus.survival)?.mean();
    for (side, via_g, via_conjugate) in [
        ("+", nu_hat_plus, conj_plus),
        ("-", nu_hat_minus, conj_minus),
    ] {
        if (via_g - via_conjugate).abs() > DUALITY_TOL {
            return Err(TheoryError::DualityMismatch {
                side,
                via_g,
                via_conjugate,
            });
        }
    }
    let t_plus = inverse_log_inverse(nu_hat_plus);
    let t_minus = inverse_log_inverse(nu_hat_minus);
    let typical = 1.0 / nu.ln();
    Ok(TheoryConstants {
        lambda,
        nu,
        s_plus: plus.survival,
        s_minus: minus.survival,
        nu_hat_plus,
        nu_hat_minus,
        t_plus_coeff: Some(t_plus),
        t_minus_coeff: Some(t_minus),
        diameter_coeff: t_plus + t_minus + typical,
        typical_coeff: Some(typical),
        regime: Regime::Supercritical,
        provenance: TheoryProvenance {
            truncation_mass,
            solver_iterations_plus: plus.iterations,
            solver_iterations_minus: minus.iterations,
            duality_gap_plus: (nu_hat_plus - conj_plus).abs(),
            duality_gap_minus: (nu_hat_minus - conj_minus).abs(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degmodel::BiDegreeSequence;

    /// Independent bisection for `ρ = e^{ν(ρ−1)}` on (0, 1).
    fn poisson_extinction_bisect(nu: f64) -> f64 {
        let f = |r: f64| (nu * (r - 1.0)).exp() - r;
        let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pgf_examples() {
        let d = JointDegreeDistribution::point(2, 2);
        assert_eq!(bivariate_pgf_eval(&d, 1.0, 1.0, 1, 1).unwrap(), 4.0);
        let p = JointDegreeDistribution::poisson_product(2.0, 2.0).unwrap();
        for (z, w) in [(1.0, 1.0), (0.3, 0.8), (0.0, 0.5)] {
            let closed: f64 = 4.0 * (2.0f64 * (z - 1.0)).exp() * (2.0f64 * (w - 1.0)).exp();
            let v = bivariate_pgf_eval(&p, z, w, 1, 1).unwrap();
            assert!((v - closed).abs() < 1e-10, "{v} vs {closed}");
        }
        assert!((bivariate_pgf_eval(&p, 1.0, 1.0, 0, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((bivariate_pgf_eval(&p, 1.0, 1.0, 1, 0).unwrap() - 2.0).abs() < 1e-9);
        assert!(bivariate_pgf_eval(&p, 1.1, 0.5, 0, 0).is_err());
        assert!(bivariate_pgf_eval(&p, 0.5, 0.5, 2, 0).is_err());
    }

    #[test]
    fn table_pgf_matches_product_route() {
        let p = JointDegreeDistribution::poisson_product(1.5, 1.5).unwrap();
        let t = JointDegreeDistribution::table(p.support()).unwrap();
        for (dz, dw) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let a = bivariate_pgf_eval(&p, 0.7, 0.2, dz, dw).unwrap();
            let b = bivariate_pgf_eval(&t, 0.7, 0.2, dz, dw).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn size_biased_figure1() {
        let seq = BiDegreeSequence::new(vec![(1, 2), (3, 2), (1, 1)]).unwrap();
        let d = JointDegreeDistribution::empirical(&seq).unwrap();
        let (_, q) = size_biased(&d, Direction::In).unwrap();
        assert!((q.prob(2) - 0.8).abs() < 1e-12);
        assert!((q.prob(1) - 0.2).abs() < 1e-12);
        assert!((q.mean() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn size_biased_point_and_poisson() {
        let (_, q) = size_biased(&JointDegreeDistribution::point(3, 3), Direction::Out).unwrap();
        assert_eq!(q.pmf(), &[0.0, 0.0, 0.0, 1.0]);
        let p = JointDegreeDistribution::poisson_product(2.0, 2.0).unwrap();
        let (_, q) = size_biased(&p, Direction::In).unwrap();
        let poi = OffspringDistribution::poisson(2.0).unwrap();
        assert!(crate::stats::total_variation(q.pmf(), poi.pmf()) < 1e-15);
        assert!((q.mean() - 2.0).abs() < 1e-9);
        assert_eq!(
            size_biased(&JointDegreeDistribution::point(0, 0), Direction::In).unwrap_err(),
            TheoryError::ZeroMeanDegree
        );
    }

    #[test]
    fn size_biased_marginal_mean_is_nu() {
        let d = JointDegreeDistribution::table(vec![
            ((0, 1), 0.2),
            ((1, 0), 0.1),
            ((2, 3), 0.3),
            ((3, 1), 0.4),
        ]);
        // means: in = 0.1+0.6+1.2 = 1.9, out = 0.2+0.9+0.4 = 1.5 -> rejected
        assert!(d.is_err());
        let d = JointDegreeDistribution::table(vec![
            ((0, 2), 0.25),
            ((2, 0), 0.25),
            ((1, 1), 0.25),
            ((3, 3), 0.25),
        ])
        .unwrap();
        let nu = d.mean_product() / d.mean_in();
        for dir in [Direction::In, Direction::Out] {
            let (joint, q) = size_biased(&d, dir).unwrap();
            assert!((q.mean() - nu).abs() < 1e-12);
            let total: f64 = joint.support().iter().map(|e| e.1).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn survival_examples() {
        let poi = OffspringDistribution::poisson(2.0).unwrap();
        let oracle = 1.0 - poisson_extinction_bisect(2.0);
        let s = survival_probability(&poi);
        assert!((s - oracle).abs() < 1e-10, "{s} vs {oracle}");
        assert!((s - 0.7968121).abs() < 1e-6);
        assert_eq!(survival_probability(&OffspringDistribution::poisson(0.5).unwrap()), 0.0);
        assert_eq!(survival_probability(&OffspringDistribution::point(2)), 1.0);
        let sol = solve_survival(&poi);
        assert!((poi.pgf(sol.extinction) - sol.extinction).abs() <= 1e-12);
        assert!(sol.iterations > 0);
    }

    #[test]
    fn conjugate_examples() {
        let poi = OffspringDistribution::poisson(2.0).unwrap();
        let s = survival_probability(&poi);
        let c = conjugate(&poi, s).unwrap();
        let nu_hat = poisson_conjugate_mean(2.0).unwrap();
        assert!((nu_hat - 0.4063757).abs() < 1e-7);
        let target = OffspringDistribution::poisson(nu_hat).unwrap();
        for k in 0..poi.pmf().len() {
            assert!((c.prob(k) - target.prob(k)).abs() < 1e-8, "k = {k}");
        }

        let xi = OffspringDistribution::new(vec![0.0, 0.3, 0.7]).unwrap();
        let c = conjugate(&xi, 1.0).unwrap();
        assert_eq!(c.pmf(), &[0.7, 0.3]);

        let sub = OffspringDistribution::poisson(0.5).unwrap();
        assert_eq!(conjugate(&sub, 0.0).unwrap(), sub);

        assert!(matches!(
            conjugate(&poi, 0.5),
            Err(TheoryError::NotNormalized { .. })
        ));
    }

    #[test]
    fn poisson_conjugate_mean_examples() {
        let x = poisson_conjugate_mean(2.0).unwrap();
        assert!((x * (-x).exp() - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
        let near = poisson_conjugate_mean(1.0 + 1e-6).unwrap();
        assert!((near - 1.0).abs() < 1e-3);
        assert!(poisson_conjugate_mean(1.0).is_err());
        let tc = theory_constants(&JointDegreeDistribution::poisson_product(2.0, 2.0).unwrap())
            .unwrap();
        assert!((tc.nu_hat_plus - x).abs() < 1e-8);
    }

    #[test]
    fn constants_poisson_product() {
        let d = JointDegreeDistribution::poisson_product(2.0, 2.0).unwrap();
        let tc = theory_constants(&d).unwrap();
        assert_eq!(tc.regime, Regime::Supercritical);
        assert!((tc.nu - 2.0).abs() < 1e-9);
        let nh = poisson_conjugate_mean(2.0).unwrap();
        assert!((tc.nu_hat_plus - nh).abs() < 1e-8);
        assert!((tc.nu_hat_minus - nh).abs() < 1e-8);
        let expected = 2.0 / (1.0 / nh).ln() + 1.0 / 2.0f64.ln();
        assert!((tc.diameter_coeff - expected).abs() < 1e-8);
        assert!((tc.diameter_coeff - 3.6637).abs() < 1e-4);
        assert!(
            (tc.diameter_coeff
                - (tc.t_plus_coeff.unwrap() + tc.t_minus_coeff.unwrap() + tc.typical_coeff.unwrap()))
            .abs()
                < 1e-15
        );
    }

    #[test]
    fn constants_asymmetric_dout_like() {
        let d = JointDegreeDistribution::product(
            Marginal::poisson(2.0).unwrap(),
            Marginal::point(2),
        )
        .unwrap();
        let tc = theory_constants(&d).unwrap();
        assert_eq!(tc.nu_hat_plus, 0.0);
        assert_eq!(tc.s_plus, 1.0);
        assert_eq!(tc.t_plus_coeff, Some(0.0));
        assert!((tc.nu_hat_minus - 0.4063757).abs() < 1e-7);
        assert!((tc.diameter_coeff - 2.5532).abs() < 1e-4, "{}", tc.diameter_coeff);
    }

    #[test]
    fn constants_regular_and_subcritical() {
        for d in 2..6u32 {
            let tc = theory_constants(&JointDegreeDistribution::point(d, d)).unwrap();
            assert!((tc.diameter_coeff - 1.0 / f64::from(d).ln()).abs() < 1e-12);
        }
        let sub = JointDegreeDistribution::table(vec![
            ((1, 1), 1.0 / 3.0),
            ((1, 0), 1.0 / 3.0),
            ((0, 1), 1.0 / 3.0),
        ])
        .unwrap();
        let tc = theory_constants(&sub).unwrap();
        assert_eq!(tc.regime, Regime::Subcritical);
        assert!((tc.nu - 0.5).abs() < 1e-12);
        assert!((tc.diameter_coeff - 1.0 / 2.0f64.ln()).abs() < 1e-12);
        assert_eq!(tc.t_plus_coeff, None);
        assert_eq!(tc.nu_hat_plus, tc.nu);
    }

    #[test]
    fn constants_errors() {
        assert_eq!(
            theory_constants(&JointDegreeDistribution::point(1, 1)).unwrap_err(),
            TheoryError::CriticalRegime(1.0)
        );
        let zero = JointDegreeDistribution::table(vec![((1, 0), 0.5), ((0, 1), 0.5)]).unwrap();
        assert_eq!(theory_constants(&zero).unwrap_err(), TheoryError::ZeroNu);
    }
}
