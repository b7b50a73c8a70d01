// SPDX-License-Identifier: Apache-2.0

//! Lattice-versus-continuum comparison of exit functionals.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functionals::{exit_functionals, ExitFunctionals};
use crate::error::{invalid, Result};
use crate::rng::substream;
use crate::saw::pivot::{PivotChain, SiteLaw};
use crate::sle::chordal::trace_until;
use crate::sle::driving::{DrivingPath, TimeGrid};
use crate::stats::{ks_two_sample, TestResult};

/// Settings for half-plane SAW samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SawSampling {
    /// Walk length.
    pub length: usize,
    /// Half-disk radius in lattice units.
    pub radius: f64,
    /// Independent pivot chains.
    pub chains: usize,
    /// Accepted pivots before the first sample of each chain.
    pub burn_in: u64,
    /// Pivot attempts between samples.
    pub thin: usize,
    /// Pivots are drawn from the first `near` sites with probability 1/2.
    pub near: usize,
}

impl Default for SawSampling {
    fn default() -> Self {
        Self { length: 2000, radius: 80.0, chains: 8, burn_in: 40_000, thin: 500, near: 700 }
    }
}

impl SawSampling {
    pub fn validate(&self) -> Result<()> {
        if self.length < 2 || self.chains == 0 || self.thin == 0 || !(self.radius >= 2.0) {
            return Err(invalid("SAW sampling needs length >= 2, chains >= 1, thin >= 1, radius >= 2"));
        }
        Ok(())
    }
}

/// Exit functionals of `count` half-plane SAW samples; the second value
/// counts walks that never left the half-disk.
pub fn saw_exit_samples(s: &SawSampling, count: usize, seed: u64) -> Result<(Vec<ExitFunctionals>, usize)> {
    s.validate()?;
    let per = count.div_ceil(s.chains);
    let chunks: Vec<Result<(Vec<ExitFunctionals>, usize)>> = (0..s.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c as u64);
            let law = SiteLaw::NearOrigin { near: s.near.clamp(1, s.length), near_prob: 0.5 };
            let mut chain = PivotChain::straight(s.length, true)?.with_site_law(law);
            chain.thermalize(s.burn_in, &mut rng);
            let mut out = Vec::with_capacity(per);
            let mut missed = 0;
            let mut buf = Vec::with_capacity(s.length + 1);
            for _ in 0..per {
                for _ in 0..s.thin {
                    chain.step(&mut rng);
                }
                buf.clear();
                buf.extend(chain.points().iter().map(|&(x, y)| Complex64::new(x as f64, y as f64)));
                match exit_functionals(&buf, s.radius) {
                    Some(f) => out.push(f),
                    None => missed += 1,
                }
            }
            Ok((out, missed))
        })
        .collect();
    let mut all = Vec::with_capacity(count);
    let mut missed = 0;
    for c in chunks {
        let (v, m) = c?;
        all.extend(v);
        missed += m;
    }
    all.truncate(count);
    Ok((all, missed))
}

/// Exit functionals of chordal traces stopped on leaving the unit half-disk.
/// The curve has half-plane capacity at most 1 before leaving, so the
/// horizon `0.55` with `points` uniform steps always suffices.
pub fn sle_exit_samples(kappa: f64, count: usize, points: usize, seed: u64) -> Result<(Vec<ExitFunctionals>, usize)> {
    let grid = TimeGrid::uniform(0.55, points)?;
    let res: Vec<Result<Option<ExitFunctionals>>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let path = DrivingPath::brownian(kappa, &grid, 0.0, &mut rng)?;
            let (curve, _) = trace_until(&path, |z| z.norm() >= 1.0)?;
            Ok(exit_functionals(&curve.points, 1.0))
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut missed = 0;
    for r in res {
        match r? {
            Some(f) => out.push(f),
            None => missed += 1,
        }
    }
    Ok((out, missed))
}

/// Two-sample KS test per functional.
pub fn compare_functionals(a: &[ExitFunctionals], b: &[ExitFunctionals]) -> Result<[TestResult; 3]> {
    let col = |v: &[ExitFunctionals], k: usize| v.iter().map(|f| f.values()[k]).collect::<Vec<_>>();
    Ok([
        ks_two_sample(&col(a, 0), &col(b, 0))?,
        ks_two_sample(&col(a, 1), &col(b, 1))?,
        ks_two_sample(&col(a, 2), &col(b, 2))?,
    ])
}
