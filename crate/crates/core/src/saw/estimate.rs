// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo estimators of `nu` and `rho`, and the diameter-scaling fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::enumerate::{count_half_space, count_saws};
use crate::rng::substream;
use crate::saw::exponents::ScalingKind;
use crate::saw::pivot::{point_diameter, random_walk, PivotChain, SiteLaw};
use crate::stats::{batch_means, weighted_linear_fit, EstimateWithError};

/// Where the walks come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkSource {
    #[default]
    Pivot,
    /// Simple random walk with self-avoidance switched off.
    RandomWalk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub lengths: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub source: WalkSource,
    /// Pivot proposals between recorded samples.
    #[serde(default = "default_thin")]
    pub thin: usize,
    /// Accepted moves discarded per unit length before recording.
    #[serde(default = "default_burn_in")]
    pub burn_in_per_step: usize,
}

fn default_thin() -> usize {
    10
}

fn default_burn_in() -> usize {
    10
}

impl EstimateConfig {
    pub fn new(lengths: Vec<usize>, samples: usize, seed: u64) -> Self {
        Self { lengths, samples, seed, source: WalkSource::Pivot, thin: default_thin(), burn_in_per_step: default_burn_in() }
    }

    pub fn random_walk(mut self) -> Self {
        self.source = WalkSource::RandomWalk;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.lengths.len() < 3 {
            return Err(invalid("need at least three lengths"));
        }
        if self.lengths.contains(&0) {
            return Err(invalid("lengths must be positive"));
        }
        if self.samples < 32 {
            return Err(invalid("need at least 32 samples per length"));
        }
        Ok(())
    }
}

/// Per-length observables of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRow {
    pub n: usize,
    pub mean_r2: EstimateWithError,
    pub mean_diameter: EstimateWithError,
    pub half_plane_fraction: EstimateWithError,
    pub acceptance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuEstimate {
    /// From the mean squared end-to-end distance.
    pub end_to_end: EstimateWithError,
    /// From the mean diameter.
    pub diameter: EstimateWithError,
    pub rows: Vec<LengthRow>,
}

fn sample_length(cfg: &EstimateConfig, idx: usize) -> LengthRow {
    let n = cfg.lengths[idx];
    let mut rng = substream(cfg.seed, idx as u64);
    let mut r2 = Vec::with_capacity(cfg.samples);
    let mut diam = Vec::with_capacity(cfg.samples);
    let mut half = Vec::with_capacity(cfg.samples);
    let mut record = |pts: &[(i32, i32)]| {
        let e = pts[pts.len() - 1];
        r2.push((e.0 as f64).powi(2) + (e.1 as f64).powi(2));
        diam.push(point_diameter(pts));
        half.push(if pts[1..].iter().all(|p| p.1 > 0) { 1.0 } else { 0.0 });
    };
    let acceptance = match cfg.source {
        WalkSource::RandomWalk => {
            for _ in 0..cfg.samples {
                record(&random_walk(n, &mut rng));
            }
            1.0
        }
        WalkSource::Pivot => {
            // Near-origin pivots refresh the first steps, which decide the
            // half-plane indicator.
            let near = ((n as f64).sqrt() as usize).max(2);
            let mut chain = PivotChain::straight(n, false)
                .expect("n >= 1")
                .with_site_law(SiteLaw::NearOrigin { near, near_prob: 0.3 });
            chain.thermalize((cfg.burn_in_per_step * n) as u64, &mut rng);
            for _ in 0..cfg.samples {
                for _ in 0..cfg.thin.max(1) {
                    chain.step(&mut rng);
                }
                record(chain.points());
            }
            chain.acceptance_rate()
        }
    };
    LengthRow {
        n,
        mean_r2: batch_means(&r2, 32),
        mean_diameter: batch_means(&diam, 32),
        half_plane_fraction: batch_means(&half, 32),
        acceptance,
    }
}

fn run_rows(cfg: &EstimateConfig) -> Result<Vec<LengthRow>> {
    cfg.validate()?;
    Ok((0..cfg.lengths.len()).into_par_iter().map(|i| sample_length(cfg, i)).collect())
}

fn log_fit(rows: &[(f64, &EstimateWithError)]) -> Result<(f64, f64)> {
    let xs: Vec<f64> = rows.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, e)| e.value.ln()).collect();
    let sig: Vec<f64> = rows.iter().map(|(_, e)| (e.std_error / e.value).max(1e-12)).collect();
    let fit = weighted_linear_fit(&xs, &ys, &sig)?;
    Ok((fit.slope, fit.slope_se))
}

fn window(rows: &[LengthRow]) -> (f64, f64) {
    let lo = rows.iter().map(|r| r.n).min().unwrap_or(0) as f64;
    let hi = rows.iter().map(|r| r.n).max().unwrap_or(0) as f64;
    (lo, hi)
}

/// `<|omega(n)|^2> ~ n^{2 nu}`, plus the diameter variant `diam ~ n^nu`.
pub fn estimate_nu(cfg: &EstimateConfig) -> Result<NuEstimate> {
    let rows = run_rows(cfg)?;
    let total = cfg.samples * rows.len();
    let (lo, hi) = window(&rows);
    let pts: Vec<_> = rows.iter().map(|r| (r.n as f64, &r.mean_r2)).collect();
    let (s, se) = log_fit(&pts)?;
    let mut end_to_end = EstimateWithError::new(s / 2.0, se / 2.0, total).with_window(lo, hi);
    let pts: Vec<_> = rows.iter().map(|r| (r.n as f64, &r.mean_diameter)).collect();
    let (s, se) = log_fit(&pts)?;
    let diameter = EstimateWithError::new(s, se, total).with_window(lo, hi);
    if cfg.samples < 500 {
        end_to_end.flag("few samples per length: error bars are wide");
    }
    Ok(NuEstimate { end_to_end, diameter, rows })
}

/// Fraction of walks staying in the open upper half-plane `~ n^{-rho}`.
pub fn estimate_rho(cfg: &EstimateConfig) -> Result<(EstimateWithError, Vec<LengthRow>)> {
    let rows = run_rows(cfg)?;
    let kept: Vec<&LengthRow> = rows.iter().filter(|r| r.half_plane_fraction.value > 0.0).collect();
    let dropped = rows.len() - kept.len();
    if kept.len() < 2 {
        return Err(invalid("fewer than two lengths had half-plane samples"));
    }
    let pts: Vec<_> = kept.iter().map(|r| (r.n as f64, &r.half_plane_fraction)).collect();
    let (s, se) = log_fit(&pts)?;
    let (lo, hi) = window(&rows);
    let mut est = EstimateWithError::new(-s, se, cfg.samples * rows.len()).with_window(lo, hi);
    if dropped > 0 {
        est.flag(format!("{dropped} lengths without half-plane samples were dropped"));
    }
    Ok((est, rows))
}

/// Exact fraction of `n`-step walks that stay in an open half-plane.
pub fn exact_half_plane_fraction(n: usize) -> Result<f64> {
    Ok(count_half_space(n, 2)? as f64 / count_saws(n, 2)? as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub kind: ScalingKind,
    pub exponent: EstimateWithError,
    /// `(R, mass of diameters in [R, 2R))`.
    pub masses: Vec<(f64, f64)>,
    pub max_length: usize,
}

/// Exact-enumeration fit of the `beta^{-n}`-weighted mass of walks or
/// polygons with diameter in `[R, 2R)` against `R`. Walks longer than
/// `max_length` are missing, so large `R` are underweighted; the result is
/// flagged as truncated.
pub fn diameter_mass_scaling(kind: ScalingKind, radii: &[f64], max_length: usize, beta: f64) -> Result<ScalingFit> {
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("need at least two positive radii"));
    }
    if max_length > 18 {
        return Err(crate::Error::ResourceLimit(format!("max_length {max_length} above 18")));
    }
    let polygon = matches!(kind, ScalingKind::SapFree | ScalingKind::SapHalf);
    let half = matches!(kind, ScalingKind::SawHalf | ScalingKind::SapHalf);
    // hist[n] = squared diameters of every object of length n.
    let mut hist: Vec<Vec<i64>> = vec![Vec::new(); max_length + 1];
    let mut e = Enumerator { pts: vec![(0, 0)], diam2: vec![0], polygon, half, max_length, hist: &mut hist };
    e.recurse();
    let mut masses = Vec::new();
    for &r in radii {
        let mut m = 0.0;
        for (n, ds) in hist.iter().enumerate() {
            // Each polygon through the origin is traversed in both orientations.
            let w = beta.powi(-(n as i32)) * if polygon { 0.5 } else { 1.0 };
            m += w * ds.iter().filter(|&&d2| (d2 as f64) >= r * r && (d2 as f64) < 4.0 * r * r).count() as f64;
        }
        masses.push((r, m));
    }
    let kept: Vec<(f64, f64)> = masses.iter().copied().filter(|&(_, m)| m > 0.0).collect();
    if kept.len() < 2 {
        return Err(invalid("fewer than two nonempty diameter bins"));
    }
    let xs: Vec<f64> = kept.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let fit = crate::stats::linear_fit(&xs, &ys)?;
    let mut exponent = EstimateWithError::new(fit.slope, fit.slope_se, kept.len())
        .with_window(radii[0], *radii.last().expect("nonempty"));
    exponent.flag(format!("exact enumeration truncated at length {max_length}"));
    if kept.len() < masses.len() {
        exponent.flag("empty diameter bins dropped");
    }
    Ok(ScalingFit { kind, exponent, masses, max_length })
}

struct Enumerator<'a> {
    pts: Vec<(i32, i32)>,
    diam2: Vec<i64>,
    polygon: bool,
    half: bool,
    max_length: usize,
    hist: &'a mut Vec<Vec<i64>>,
}

impl Enumerator<'_> {
    fn recurse(&mut self) {
        let depth = self.pts.len() - 1;
        let p = *self.pts.last().expect("nonempty");
        let d2 = *self.diam2.last().expect("nonempty");
        if !self.polygon && depth > 0 {
            self.hist[depth].push(d2);
        }
        if self.polygon && depth >= 3 && (p.0.abs() + p.1.abs()) == 1 && depth < self.max_length {
            self.hist[depth + 1].push(d2);
        }
        if depth == self.max_length || (self.polygon && depth + 1 >= self.max_length) {
            return;
        }
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let q = (p.0 + dx, p.1 + dy);
            if self.half {
                let floor = if self.polygon { 0 } else { 1 };
                if q.1 < floor {
                    continue;
                }
            }
            if self.polygon && (q.0.abs() + q.1.abs()) as usize > self.max_length - depth - 1 {
                continue;
            }
            if self.pts.contains(&q) {
                continue;
            }
            let nd = self
                .pts
                .iter()
                .map(|a| ((a.0 - q.0) as i64).pow(2) + ((a.1 - q.1) as i64).pow(2))
                .max()
                .unwrap_or(0)
                .max(d2);
            self.pts.push(q);
            self.diam2.push(nd);
            self.recurse();
            self.pts.pop();
            self.diam2.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate::count_saps;

    #[test]
    fn random_walk_nu_is_half() {
        let cfg = EstimateConfig::new(vec![100, 200, 400, 800], 4000, 3).random_walk();
        let est = estimate_nu(&cfg).unwrap();
        assert!((est.end_to_end.value - 0.5).abs() < 0.02, "{:?}", est.end_to_end);
    }

    #[test]
    fn random_walk_rho_is_half() {
        let cfg = EstimateConfig::new(vec![50, 100, 200, 400], 40_000, 4).random_walk();
        let (est, _) = estimate_rho(&cfg).unwrap();
        assert!((est.value - 0.5).abs() < 0.06, "{est:?}");
    }

    #[test]
    fn pivot_half_plane_fraction_matches_enumeration() {
        let n = 10;
        let exact = exact_half_plane_fraction(n).unwrap();
        let mut cfg = EstimateConfig::new(vec![n, n, n], 20_000, 5);
        cfg.thin = 20;
        let rows = run_rows(&cfg).unwrap();
        for r in rows {
            let f = &r.half_plane_fraction;
            assert!((f.value - exact).abs() < 4.0 * f.std_error + 0.005, "{f:?} vs {exact}");
        }
    }

    #[test]
    fn validation() {
        assert!(estimate_nu(&EstimateConfig::new(vec![10, 20], 100, 1)).is_err());
        assert!(estimate_nu(&EstimateConfig::new(vec![10, 20, 40], 10, 1)).is_err());
    }

    #[test]
    fn enumerator_reproduces_polygon_counts() {
        let mut hist: Vec<Vec<i64>> = vec![Vec::new(); 11];
        let mut e = Enumerator { pts: vec![(0, 0)], diam2: vec![0], polygon: true, half: false, max_length: 10, hist: &mut hist };
        e.recurse();
        for n2 in [4, 6, 8, 10] {
            // Walks from the origin closing a polygon: every rooted polygon counted once.
            assert_eq!(hist[n2].len() as u64, count_saps(n2).unwrap().rooted, "length {n2}");
        }
        // Unit square diameter is sqrt 2.
        assert!(hist[4].iter().all(|&d| d == 2));
    }

    #[test]
    fn scaling_fit_reports_truncation() {
        let fit = diameter_mass_scaling(ScalingKind::SawHalf, &[1.0, 2.0, 4.0], 12, 2.638).unwrap();
        assert!(fit.exponent.flags.iter().any(|f| f.contains("truncated")));
        assert!(fit.exponent.value > 0.0);
    }
}
