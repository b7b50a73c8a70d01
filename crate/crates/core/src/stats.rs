// SPDX-License-Identifier: Apache-2.0

//! Statistics utilities: summaries with error bars, least-squares fits,
//! Kolmogorov-Smirnov and Pearson chi-square tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Result};

/// Range of the independent variable a fit was taken over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

/// A point estimate with a one-sigma standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub window: Option<FitWindow>,
    /// Set when the estimate is known to be unreliable (too few samples,
    /// dropped fit points, empty bins).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl EstimateWithError {
    pub fn new(value: f64, std_error: f64, n_samples: usize) -> Self {
        Self {
            value,
            std_error: if std_error.is_finite() { std_error.max(0.0) } else { f64::MAX },
            n_samples: n_samples.max(1),
            window: None,
            flags: Vec::new(),
        }
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some(FitWindow { lo, hi });
        self
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    /// `|value - target| <= k * std_error + slack`
    pub fn agrees_with(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error + slack
    }
}

/// Sample mean with the standard error of the mean.
pub fn mean_with_error(xs: &[f64]) -> EstimateWithError {
    let n = xs.len();
    if n == 0 {
        let mut e = EstimateWithError::new(f64::NAN, f64::MAX, 1);
        e.flag("no samples");
        return e;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let se = if n > 1 {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        (var / n as f64).sqrt()
    } else {
        f64::MAX
    };
    EstimateWithError::new(mean, se, n)
}

/// Mean of a correlated series with a batch-means error bar.
pub fn batch_means(xs: &[f64], batches: usize) -> EstimateWithError {
    let batches = batches.max(2);
    if xs.len() < 2 * batches {
        return mean_with_error(xs);
    }
    let size = xs.len() / batches;
    let means: Vec<f64> = xs
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let mut e = mean_with_error(&means);
    e.value = xs.iter().sum::<f64>() / xs.len() as f64;
    e.n_samples = xs.len();
    e
}

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Unweighted least squares. With exactly two points the slope error is
/// reported as zero.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("linear fit needs at least two paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("linear fit over a degenerate abscissa"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, slope_se })
}

/// Weighted least squares with per-point standard deviations `sigmas`; the
/// slope error is propagated from the point errors.
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() != sigmas.len() || xs.len() < 2 {
        return Err(invalid("weighted fit needs at least two paired points"));
    }
    if sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(invalid("weighted fit needs positive finite sigmas"));
    }
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let mx = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&w).map(|(x, w)| w * (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("weighted fit over a degenerate abscissa"));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .zip(&w)
        .map(|((x, y), w)| w * (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    Ok(LineFit { slope, intercept: my - slope * mx, slope_se: (1.0 / sxx).sqrt() })
}

/// Result of a goodness-of-fit or two-sample test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(l) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 l^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN filtered"));
    Ok(v)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the effective size). Ties are
/// handled by stepping both empirical CDFs past equal values together.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(invalid("KS test needs two nonempty samples"));
    }
    let a = sorted(xs)?;
    let b = sorted(ys)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let p = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    Ok(TestResult { statistic: d, p_value: p })
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestResult> {
    if xs.is_empty() {
        return Err(invalid("KS test needs a nonempty sample"));
    }
    let a = sorted(xs)?;
    let n = a.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in a.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let en = n.sqrt();
    Ok(TestResult { statistic: d, p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d) })
}

/// Pearson chi-square statistic with `bins - 1 - constraints` degrees of
/// freedom.
pub fn chi_square_with_constraints(
    observed: &[f64],
    expected: &[f64],
    constraints: usize,
) -> Result<TestResult> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(invalid("chi-square needs matching nonempty bins"));
    }
    if let Some(k) = expected.iter().position(|&e| !(e > 0.0)) {
        return Err(invalid(format!("expected bin {k} has zero mass")));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let dof = observed.len() as isize - 1 - constraints as isize;
    if dof < 1 {
        return Err(invalid("chi-square has no degrees of freedom"));
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| invalid(e.to_string()))?;
    Ok(TestResult { statistic: stat, p_value: (1.0 - dist.cdf(stat)).clamp(0.0, 1.0) })
}

/// Pearson chi-square goodness of fit, `bins - 1` degrees of freedom.
pub fn chi_square(observed: &[f64], expected: &[f64]) -> Result<TestResult> {
    chi_square_with_constraints(observed, expected, 0)
}

/// Upper tail of the binomial distribution, `P[X >= k]` for `X ~ Bin(n, p)`.
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    let mut log_c = 0.0f64;
    for i in 0..=n {
        if i > 0 {
            log_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= k {
            total += (log_c + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp();
        }
    }
    total.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_samples_have_zero_statistic() {
        let xs = [0.3, 1.2, 5.0, -2.0];
        let r = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_disjoint_supports_have_unit_statistic() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[10.0, 11.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn ks_hand_computed_ecdf_gap() {
        // ECDFs differ by exactly 1/3 on [1,1.5), [2,2.5), [3,3.5).
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[1.5, 2.5, 3.5]).unwrap();
        assert!((r.statistic - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_rejects_empty() {
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn kolmogorov_q_reference_values() {
        // Q(1.36) ~ 0.049, Q(1.63) ~ 0.0098 (standard critical values).
        assert!((kolmogorov_q(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_q(1.628) - 0.01).abs() < 5e-4);
    }

    #[test]
    fn chi_square_zero_expected_is_invalid() {
        assert!(chi_square(&[1.0, 2.0], &[0.0, 3.0]).is_err());
    }

    #[test]
    fn chi_square_perfect_fit() {
        let r = chi_square(&[10.0, 20.0, 30.0], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_known_quantile() {
        // chi2 with 2 dof: P[X > 2 ln 20] = 0.05.
        let r = chi_square(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!((r.statistic - 3.0).abs() < 1e-12);
        assert!((r.p_value - (-1.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
    }

    #[test]
    fn binomial_tail_edges() {
        assert_eq!(binomial_upper_tail(10, 0.3, 0), 1.0);
        assert!((binomial_upper_tail(1, 0.3, 1) - 0.3).abs() < 1e-12);
        assert!((binomial_upper_tail(2, 0.5, 2) - 0.25).abs() < 1e-12);
    }
}
