// SPDX-License-Identifier: Apache-2.0

//! Bridges, renewal times and Kesten's relation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::enumerate::{count_half_space, count_saws, default_saw_cap, visit_half_space};
use crate::lattice::walk::{Walk, WalkKind};

/// Which inequality anchors the bridge condition.
///
/// `Standard` requires `x_0 < x_j <= x_n` for `j = 1..=n`; `FirstStep`
/// requires `x_1 < x_j <= x_n` for `j = 2..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeConvention {
    #[default]
    Standard,
    FirstStep,
}

/// Renewal indices of a walk given by its first coordinates `x_0..=x_n`:
/// `j` in `1..n` with `x_k <= x_j < x_m` for all `k <= j < m`.
pub fn renewal_indices(xs: &[i32]) -> Vec<usize> {
    let n = xs.len().saturating_sub(1);
    if n < 2 {
        return Vec::new();
    }
    let mut suffix_min = vec![i32::MAX; n + 2];
    for j in (0..=n).rev() {
        suffix_min[j] = suffix_min[j + 1].min(xs[j]);
    }
    let mut out = Vec::new();
    let mut prefix_max = xs[0];
    for j in 1..n {
        prefix_max = prefix_max.max(xs[j]);
        if prefix_max <= xs[j] && xs[j] < suffix_min[j + 1] {
            out.push(j);
        }
    }
    out
}

/// Least renewal index, `None` when there is none.
pub fn first_renewal(xs: &[i32]) -> Option<usize> {
    let n = xs.len().saturating_sub(1);
    if n < 2 {
        return None;
    }
    let mut suffix_min = vec![i32::MAX; n + 2];
    for j in (0..=n).rev() {
        suffix_min[j] = suffix_min[j + 1].min(xs[j]);
    }
    let mut prefix_max = xs[0];
    for j in 1..n {
        prefix_max = prefix_max.max(xs[j]);
        if prefix_max <= xs[j] && xs[j] < suffix_min[j + 1] {
            return Some(j);
        }
    }
    None
}

pub(crate) fn is_bridge_coords(xs: &[i32], convention: BridgeConvention) -> bool {
    let n = xs.len() - 1;
    if n == 0 {
        return false;
    }
    let last = xs[n];
    match convention {
        BridgeConvention::Standard => xs[1..].iter().all(|&x| xs[0] < x && x <= last),
        BridgeConvention::FirstStep => xs[2..].iter().all(|&x| xs[1] < x && x <= last),
    }
}

fn half_space_coords(w: &Walk) -> Result<Vec<i32>> {
    if w.kind() != WalkKind::Open {
        return Err(invalid("renewal times are defined for open walks"));
    }
    if w.points()[0].coords().iter().any(|&c| c != 0) {
        return Err(invalid("half-space walk must start at the origin"));
    }
    let xs = w.first_coords();
    if xs[1..].iter().any(|&x| x <= 0) {
        return Err(invalid("walk leaves the open half-space"));
    }
    Ok(xs)
}

/// Sorted renewal times of a half-space walk.
pub fn renewal_times(w: &Walk) -> Result<Vec<usize>> {
    Ok(renewal_indices(&half_space_coords(w)?))
}

pub fn is_bridge(w: &Walk, convention: BridgeConvention) -> bool {
    w.kind() == WalkKind::Open && is_bridge_coords(&w.first_coords(), convention)
}

/// A bridge without renewal times.
pub fn is_irreducible_bridge(w: &Walk, convention: BridgeConvention) -> bool {
    is_bridge(w, convention) && first_renewal(&w.first_coords()).is_none()
}

/// `lambda_k`: irreducible `k`-step bridges inside the half-space walks.
pub fn count_irreducible_bridges(k: usize, d: usize, convention: BridgeConvention) -> Result<u64> {
    let mut count = 0u64;
    visit_half_space(k, d, true, &mut |_, xs| {
        if is_bridge_coords(xs, convention) && first_renewal(xs).is_none() {
            count += 1;
        }
    })?;
    Ok(count)
}

/// Distribution of the least renewal time over all `n`-step half-space walks:
/// entry `k` (for `1 <= k < n`) counts walks with `s = k`; entry `0` counts
/// walks with no renewal time.
pub fn first_renewal_histogram(n: usize, d: usize) -> Result<Vec<u64>> {
    let mut hist = vec![0u64; n.max(1)];
    visit_half_space(n, d, false, &mut |_, xs| match first_renewal(xs) {
        Some(k) => hist[k] += 1,
        None => hist[0] += 1,
    })?;
    Ok(hist)
}

/// Exact counts up to a truncation length, with the Kesten estimate of the
/// connective constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeTable {
    pub truncation: usize,
    pub dim: usize,
    pub convention: BridgeConvention,
    /// `C_1..=C_K`, empty where `K` exceeds the SAW enumeration cap.
    pub saw_counts: Vec<u64>,
    /// `upsilon_1..=upsilon_K`.
    pub half_counts: Vec<u64>,
    /// `lambda_1..=lambda_K`.
    pub irreducible_counts: Vec<u64>,
    pub beta_estimate: f64,
}

impl BridgeTable {
    pub fn build(truncation: usize, d: usize) -> Result<Self> {
        Self::build_with(truncation, d, BridgeConvention::Standard)
    }

    pub fn build_with(truncation: usize, d: usize, convention: BridgeConvention) -> Result<Self> {
        if truncation == 0 {
            return Err(invalid("bridge table needs K >= 1"));
        }
        let saw_counts = if truncation <= default_saw_cap(d) {
            (1..=truncation).map(|n| count_saws(n, d)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let half_counts = (1..=truncation).map(|n| count_half_space(n, d)).collect::<Result<_>>()?;
        let irreducible_counts = (1..=truncation)
            .map(|k| count_irreducible_bridges(k, d, convention))
            .collect::<Result<Vec<_>>>()?;
        let beta_estimate = solve_kesten(&irreducible_counts)?;
        Ok(Self { truncation, dim: d, convention, saw_counts, half_counts, irreducible_counts, beta_estimate })
    }

    /// `S_K(beta) = sum_{k <= K} lambda_k beta^{-k}`.
    pub fn kesten_partial_sum(&self, k: usize, beta: f64) -> Result<f64> {
        if k > self.truncation || k == 0 {
            return Err(invalid(format!("K = {k} outside 1..={}", self.truncation)));
        }
        if !(beta > 1.0) {
            return Err(invalid("beta must exceed 1"));
        }
        Ok(partial_sum(&self.irreducible_counts[..k], beta))
    }

    /// Root of `S_K(beta) = 1`.
    pub fn kesten_beta(&self, k: usize) -> Result<f64> {
        if k > self.truncation || k == 0 {
            return Err(invalid(format!("K = {k} outside 1..={}", self.truncation)));
        }
        solve_kesten(&self.irreducible_counts[..k])
    }

    /// Checks `lambda_k <= upsilon_k <= C_k`, positivity and
    /// submultiplicativity of the stored counts.
    pub fn check_invariants(&self) -> Result<()> {
        for k in 0..self.truncation {
            let lam = self.irreducible_counts[k];
            let ups = self.half_counts[k];
            if lam == 0 || lam > ups {
                return Err(Error::Numeric(format!("lambda_{} = {lam} inconsistent", k + 1)));
            }
            if let Some(&c) = self.saw_counts.get(k) {
                if ups > c {
                    return Err(Error::Numeric(format!("upsilon_{} exceeds C", k + 1)));
                }
            }
        }
        let c = &self.saw_counts;
        for n in 1..=c.len() {
            for m in 1..=c.len() {
                if n + m <= c.len() && c[n + m - 1] as u128 > c[n - 1] as u128 * c[m - 1] as u128 {
                    return Err(Error::Numeric(format!("C_{} > C_{n} C_{m}", n + m)));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn partial_sum(lambdas: &[u64], beta: f64) -> f64 {
    let inv = 1.0 / beta;
    let mut pow = 1.0;
    let mut s = 0.0;
    for &l in lambdas {
        pow *= inv;
        s += l as f64 * pow;
    }
    s
}

/// Bisection for the decreasing function `S(beta) - 1` on `[1, 1 + sum lambda]`.
fn solve_kesten(lambdas: &[u64]) -> Result<f64> {
    let total: f64 = lambdas.iter().map(|&l| l as f64).sum();
    if total < 1.0 {
        return Err(Error::Numeric("no Kesten root: all lambda vanish".into()));
    }
    let (mut lo, mut hi) = (1.0f64, 1.0 + total);
    if partial_sum(lambdas, lo) <= 1.0 {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if partial_sum(lambdas, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
