// SPDX-License-Identifier: Apache-2.0

//! Infinite half-space SAWs from i.i.d. irreducible bridges, and the
//! `a^n`-weighted measure on finite half-space walks.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::lattice::bridge::{first_renewal, is_bridge_coords, partial_sum, BridgeConvention, BridgeTable};
use crate::lattice::enumerate::visit_half_space;
use crate::lattice::walk::{LatticePoint, Walk, WalkKind};

/// Largest truncation for which full walk catalogs are kept in memory.
pub const MAX_CATALOG_K: usize = 16;

/// All walks of each length `1..=K` satisfying a filter, stored as direction codes.
#[derive(Debug, Clone)]
struct Catalog {
    by_len: Vec<Vec<u8>>,
}

impl Catalog {
    fn build(k: usize, d: usize, bridges_only: bool, keep: impl Fn(&[i32]) -> bool) -> Result<Self> {
        let mut by_len = vec![Vec::new()];
        for n in 1..=k {
            let mut flat = Vec::new();
            visit_half_space(n, d, bridges_only, &mut |dirs, xs| {
                if keep(xs) {
                    flat.extend_from_slice(dirs);
                }
            })?;
            by_len.push(flat);
        }
        Ok(Self { by_len })
    }

    fn count(&self, n: usize) -> usize {
        // The empty walk is the one walk of length 0.
        self.by_len[n].len().checked_div(n).unwrap_or(1)
    }

    fn pick<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> &[u8] {
        let i = rng.gen_range(0..self.count(n));
        &self.by_len[n][i * n..(i + 1) * n]
    }
}

fn check_catalog_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_CATALOG_K {
        return Err(invalid(format!("sampler truncation K = {k} outside 1..={MAX_CATALOG_K}")));
    }
    Ok(())
}

fn append_dirs(points: &mut Vec<LatticePoint>, dirs: &[u8]) {
    let mut p = *points.last().expect("walk has a start");
    for &dir in dirs {
        p = p.step(dir);
        points.push(p);
    }
}

/// Concatenation sampler with truncated weights `w_k ∝ lambda_k beta^{-k}`.
#[derive(Debug, Clone)]
pub struct HalfSpaceSampler {
    table: BridgeTable,
    beta: f64,
    weights: Vec<f64>,
    length_law: WeightedIndex<f64>,
    bridges: Catalog,
}

impl HalfSpaceSampler {
    /// Uses the table's own Kesten root.
    pub fn new(table: BridgeTable) -> Result<Self> {
        let beta = table.beta_estimate;
        Self::with_beta(table, beta)
    }

    pub fn with_beta(table: BridgeTable, beta: f64) -> Result<Self> {
        check_catalog_k(table.truncation)?;
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(invalid("sampler beta must be a finite number >= 1"));
        }
        let raw: Vec<f64> = table
            .irreducible_counts
            .iter()
            .enumerate()
            .map(|(i, &l)| l as f64 * beta.powi(-(i as i32 + 1)))
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let length_law = WeightedIndex::new(&weights).map_err(|e| Error::Numeric(e.to_string()))?;
        let convention = table.convention;
        let bridges = Catalog::build(table.truncation, table.dim, true, |xs| {
            is_bridge_coords(xs, convention) && first_renewal(xs).is_none()
        })?;
        for k in 1..=table.truncation {
            if bridges.count(k) as u64 != table.irreducible_counts[k - 1] {
                return Err(Error::Numeric(format!("bridge catalog disagrees with lambda_{k}")));
            }
        }
        Ok(Self { table, beta, weights, length_law, bridges })
    }

    pub fn table(&self) -> &BridgeTable {
        &self.table
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `w_1..=w_K`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Length of one irreducible bridge drawn from the truncated law.
    pub fn sample_bridge_length<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.length_law.sample(rng) + 1
    }

    /// Concatenates bridges until the walk has at least `steps` steps.
    pub fn sample<R: Rng + ?Sized>(&self, steps: usize, rng: &mut R) -> Walk {
        self.sample_with_lengths(steps, rng).0
    }

    /// As [`Self::sample`], also returning the bridge lengths used.
    pub fn sample_with_lengths<R: Rng + ?Sized>(&self, steps: usize, rng: &mut R) -> (Walk, Vec<usize>) {
        let mut points = Vec::with_capacity(steps + self.table.truncation + 1);
        points.push(LatticePoint::origin(self.table.dim).expect("table dimension is valid"));
        let mut lengths = Vec::new();
        while points.len() - 1 < steps {
            let k = self.sample_bridge_length(rng);
            append_dirs(&mut points, self.bridges.pick(k, rng));
            lengths.push(k);
        }
        (Walk::from_trusted(points, WalkKind::Open), lengths)
    }
}

pub fn sample_half_space_saw<R: Rng + ?Sized>(steps: usize, sampler: &HalfSpaceSampler, rng: &mut R) -> Walk {
    sampler.sample(steps, rng)
}

/// Sampler for the measure proportional to `a^n` on all half-space walks.
///
/// A walk splits uniquely at its renewal times into irreducible bridges
/// followed by one final piece without renewal times, so the weighted
/// measure is a geometric number of bridges plus an independent final piece.
/// With catalogs truncated at `K` the law of lengths `n <= K` is exact.
#[derive(Debug, Clone)]
pub struct WeightedHalfSpaceSampler {
    a: f64,
    dim: usize,
    bridge_mass: f64,
    empty_prob: f64,
    bridge_law: WeightedIndex<f64>,
    tail_law: WeightedIndex<f64>,
    bridges: Catalog,
    tails: Catalog,
}

impl WeightedHalfSpaceSampler {
    pub fn new(table: &BridgeTable, a: f64) -> Result<Self> {
        check_catalog_k(table.truncation)?;
        if table.convention != BridgeConvention::Standard {
            return Err(invalid("weighted sampler requires the standard bridge convention"));
        }
        if !(a > 0.0) {
            return Err(invalid("weight a must be positive"));
        }
        let bridge_mass = partial_sum(&table.irreducible_counts, 1.0 / a);
        if bridge_mass >= 1.0 - 1e-12 {
            return Err(invalid(format!(
                "a = {a} is not below 1/beta_K = {}: the weighted measure does not normalize",
                1.0 / table.beta_estimate
            )));
        }
        let k = table.truncation;
        let d = table.dim;
        let bridges = Catalog::build(k, d, true, |xs| {
            is_bridge_coords(xs, BridgeConvention::Standard) && first_renewal(xs).is_none()
        })?;
        let tails = Catalog::build(k, d, false, |xs| first_renewal(xs).is_none())?;
        let bw: Vec<f64> = (1..=k).map(|n| bridges.count(n) as f64 * a.powi(n as i32)).collect();
        let tw: Vec<f64> = (1..=k).map(|n| tails.count(n) as f64 * a.powi(n as i32)).collect();
        let tail_mass: f64 = tw.iter().sum();
        // Z = 1 + T / (1 - L) with the empty walk weighted 1.
        let z = 1.0 + tail_mass / (1.0 - bridge_mass);
        let err = |e: rand::distributions::WeightedError| Error::Numeric(e.to_string());
        Ok(Self {
            a,
            dim: d,
            bridge_mass,
            empty_prob: 1.0 / z,
            bridge_law: WeightedIndex::new(&bw).map_err(err)?,
            tail_law: WeightedIndex::new(&tw).map_err(err)?,
            bridges,
            tails,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn empty_probability(&self) -> f64 {
        self.empty_prob
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Walk {
        let mut points = vec![LatticePoint::origin(self.dim).expect("valid dimension")];
        if rng.gen::<f64>() < self.empty_prob {
            return Walk::from_trusted(points, WalkKind::Open);
        }
        while rng.gen::<f64>() < self.bridge_mass {
            let k = self.bridge_law.sample(rng) + 1;
            append_dirs(&mut points, self.bridges.pick(k, rng));
        }
        let r = self.tail_law.sample(rng) + 1;
        append_dirs(&mut points, self.tails.pick(r, rng));
        Walk::from_trusted(points, WalkKind::Open)
    }
}
