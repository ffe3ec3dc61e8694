//! Counting simple directed paths between half-edge sets, and the first
//! moment of that count under a uniform pairing.
//!
//! A path of length `k` is a sequence `e⁺, (v₁, e₁⁻, e₁⁺), …, (v_{k−1},
//! e_{k−1}⁻, e_{k−1}⁺), e⁻` with distinct intermediate vertices `vᵢ` taken
//! from an allowed set, and it is present in a realized graph when every
//! consecutive tail and head are paired. Parallel edges therefore give
//! distinct paths, one per realized pairing.

use num_rational::Ratio;

use super::GraphAlgError;
use crate::degmodel::SequenceStats;
use crate::graphgen::Digraph;

/// `P_k(X⁺, X⁻, I)` for `k = 1..=k_max` (index `k − 1`).
///
/// `x_plus` are tails, `x_minus` heads (slot indices), `allowed` the
/// vertices usable as intermediates. Exhaustive, so limited to `n <= 64`
/// or `k_max <= 4`.
pub fn count_simple_paths(
    g: &Digraph,
    x_plus: &[u32],
    x_minus: &[u32],
    allowed: &[u32],
    k_max: u32,
) -> Result<Vec<u64>, GraphAlgError> {
    if g.n() > 64 && k_max > 4 {
        return Err(GraphAlgError::InstanceTooLarge { n: g.n(), k_max });
    }
    let m = g.m();
    let check = |xs: &[u32], len: usize| {
        xs.iter().find(|&&x| x as usize >= len).map_or(Ok(()), |&x| {
            Err(GraphAlgError::IndexOutOfRange {
                index: x as usize,
                len,
            })
        })
    };
    check(x_plus, m)?;
    check(x_minus, m)?;
    check(allowed, g.n())?;

    let mut target = vec![false; m];
    for &h in x_minus {
        target[h as usize] = true;
    }
    let mut usable = vec![false; g.n()];
    for &v in allowed {
        usable[v as usize] = true;
    }
    let mut walker = Walker {
        g,
        target,
        usable,
        counts: vec![0; k_max as usize],
    };
    let mut seen = x_plus.to_vec();
    seen.sort_unstable();
    seen.dedup();
    for &t in &seen {
        walker.extend(t, 1);
    }
    Ok(walker.counts)
}

struct Walker<'a> {
    g: &'a Digraph,
    target: Vec<bool>,
    usable: Vec<bool>,
    counts: Vec<u64>,
}

impl Walker<'_> {
    fn extend(&mut self, tail: u32, k: usize) {
        let h = self.g.head_of_tail()[tail as usize];
        if self.target[h as usize] {
            self.counts[k - 1] += 1;
        }
        if k == self.counts.len() {
            return;
        }
        let w = self.g.head_owner(h) as usize;
        if !self.usable[w] {
            return;
        }
        self.usable[w] = false;
        let tails = self.g.out_offsets()[w]..self.g.out_offsets()[w + 1];
        for t in tails {
            self.extend(t, k + 1);
        }
        self.usable[w] = true;
    }
}

/// Exact `E[P_k(X⁺, X⁻, I) | E_H]` under a uniform pairing conditioned on
/// `s` fixed pairs, given the `(in, out)` degrees of the vertices in `I`:
///
/// `|X⁺||X⁻| / (m−k−s+1) · Σ_{distinct v₁…v_{k−1} ∈ I} Π d⁻(vᵢ)d⁺(vᵢ)/(m−i−s+1)`.
pub fn exact_path_expectation(
    allowed_degrees: &[(u32, u32)],
    m: u64,
    x_plus: u64,
    x_minus: u64,
    s: u64,
    k: u32,
) -> Result<Ratio<i128>, GraphAlgError> {
    if k < 1 || m + 1 < u64::from(k) + s + 1 {
        return Err(GraphAlgError::DomainError(format!(
            "need 1 <= k and m - k - s + 1 > 0 (m={m}, k={k}, s={s})"
        )));
    }
    let j = (k - 1) as usize;
    // elementary symmetric polynomial e_j of the products d⁻d⁺
    let mut e = vec![0i128; j + 1];
    e[0] = 1;
    for &(a, b) in allowed_degrees {
        let w = i128::from(a) * i128::from(b);
        for i in (1..=j).rev() {
            e[i] += e[i - 1] * w;
        }
    }
    let ordered: i128 = e[j] * (1..=j as i128).product::<i128>();
    let denom: i128 = (1..=i128::from(k))
        .map(|i| m as i128 - i - s as i128 + 1)
        .product();
    Ok(Ratio::new(ordered * x_plus as i128 * x_minus as i128, denom))
}

/// The first-moment bound
/// `ν_I^{k−1} |X⁺||X⁻| / (m−k−s+1) · Π_{i=0}^{k−2} (1 − i/r) / (1 − (i+s)/m)`.
pub fn expected_path_bound_nu(
    nu_i: f64,
    m: u64,
    x_plus: u64,
    x_minus: u64,
    s: u64,
    k: u32,
    r: u64,
) -> Result<f64, GraphAlgError> {
    if k < 1 || u64::from(k) > r + 1 {
        return Err(GraphAlgError::DomainError(format!("need 1 <= k <= r + 1 (k={k}, r={r})")));
    }
    let gap = m as f64 - f64::from(k) - s as f64 + 1.0;
    if gap <= 0.0 {
        return Err(GraphAlgError::DomainError(format!(
            "m - k - s + 1 = {gap} is not positive"
        )));
    }
    let mut value = nu_i.powi(k as i32 - 1) * (x_plus * x_minus) as f64 / gap;
    for i in 0..u64::from(k).saturating_sub(1) {
        value *= (1.0 - i as f64 / r as f64) / (1.0 - (i + s) as f64 / m as f64);
    }
    Ok(value)
}

/// [`expected_path_bound_nu`] with `I = [n]`, so `ν_I = ν_n`.
pub fn expected_path_bound(
    stats: &SequenceStats,
    x_plus: u64,
    x_minus: u64,
    s: u64,
    k: u32,
    r: u64,
) -> Result<f64, GraphAlgError> {
    expected_path_bound_nu(stats.nu_n, stats.m, x_plus, x_minus, s, k, r)
}
