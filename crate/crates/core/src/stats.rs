//! Small statistical helpers shared by the Monte Carlo estimators, the
//! experiment harness and the test suites.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper tail p-value of Pearson's chi-square statistic for observed counts
/// against expected probabilities.
///
/// Cells with zero expected probability must have zero observations; they
/// are dropped from the degrees of freedom.
pub fn chi_square_p_value(observed: &[u64], expected_probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected_probs.len());
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        if p <= 0.0 {
            if o > 0 {
                return 0.0;
            }
            continue;
        }
        let e = p * total;
        let d = o as f64 - e;
        stat += d * d / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    let dist = ChiSquared::new((cells - 1) as f64).expect("positive dof");
    1.0 - dist.cdf(stat)
}

/// Total-variation distance between two pmfs on `0..`; missing tails count
/// as zero mass.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let mut s = 0.0;
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        s += (x - y).abs();
    }
    0.5 * s
}

/// Binomial standard error of a proportion estimated from `runs` trials.
pub fn binomial_stderr(p: f64, runs: u64) -> f64 {
    if runs == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / runs as f64).sqrt()
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need two points for a fit");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    v.sqrt()
}
