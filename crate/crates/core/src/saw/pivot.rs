// SPDX-License-Identifier: Apache-2.0

//! Pivot algorithm for planar self-avoiding walks of fixed length.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::enumerate::count_saws;
use crate::lattice::walk::{LatticePoint, Walk, WalkKind};
use crate::rng::substream;
use crate::stats::{chi_square, TestResult};

/// The eight symmetries of `Z^2`; index 0 is the identity.
pub const SYMMETRIES: [[i32; 4]; 8] = [
    [1, 0, 0, 1],
    [0, -1, 1, 0],
    [-1, 0, 0, -1],
    [0, 1, -1, 0],
    [1, 0, 0, -1],
    [-1, 0, 0, 1],
    [0, 1, 1, 0],
    [0, -1, -1, 0],
];

#[inline]
fn apply(g: usize, x: i32, y: i32) -> (i32, i32) {
    let m = SYMMETRIES[g];
    (m[0] * x + m[1] * y, m[2] * x + m[3] * y)
}

/// How pivot sites are drawn. Any law that ignores the current state keeps
/// proposals symmetric, so the uniform measure stays stationary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SiteLaw {
    /// Uniform on `0..n`.
    Uniform,
    /// With probability `near_prob`, uniform on `0..near`; otherwise uniform on `0..n`.
    NearOrigin { near: usize, near_prob: f64 },
}

const EMPTY: u32 = u32::MAX;

/// Markov chain on `n`-step walks from the origin, either unrestricted or
/// confined to the upper half-plane (`y > 0` after the first site).
#[derive(Debug, Clone)]
pub struct PivotChain {
    n: usize,
    pts: Vec<(i32, i32)>,
    occ: Vec<u32>,
    side: usize,
    half_plane: bool,
    site_law: SiteLaw,
    scratch: Vec<(i32, i32)>,
    accepted: u64,
    proposed: u64,
}

impl PivotChain {
    /// Straight rod: east for the free chain, north for the half-plane chain.
    pub fn straight(n: usize, half_plane: bool) -> Result<Self> {
        if n == 0 {
            return Err(invalid("pivot chain needs n >= 1"));
        }
        let pts = (0..=n as i32).map(|j| if half_plane { (0, j) } else { (j, 0) }).collect();
        Ok(Self::from_points(pts, half_plane))
    }

    pub fn from_walk(w: &Walk, half_plane: bool) -> Result<Self> {
        if w.dim() != 2 || w.kind() != WalkKind::Open || w.is_empty() {
            return Err(invalid("pivot chain needs a nonempty open planar walk"));
        }
        let pts: Vec<(i32, i32)> = w.points().iter().map(|p| (p.coords()[0], p.coords()[1])).collect();
        if pts[0] != (0, 0) {
            return Err(invalid("walk must start at the origin"));
        }
        if half_plane && pts[1..].iter().any(|p| p.1 <= 0) {
            return Err(invalid("walk leaves the upper half-plane"));
        }
        Ok(Self::from_points(pts, half_plane))
    }

    fn from_points(pts: Vec<(i32, i32)>, half_plane: bool) -> Self {
        let n = pts.len() - 1;
        let side = 2 * n + 1;
        let mut chain = Self {
            n,
            pts,
            occ: vec![EMPTY; side * side],
            side,
            half_plane,
            site_law: SiteLaw::Uniform,
            scratch: Vec::with_capacity(n + 1),
            accepted: 0,
            proposed: 0,
        };
        for j in 0..=n {
            let c = chain.cell(chain.pts[j]);
            chain.occ[c] = j as u32;
        }
        chain
    }

    pub fn with_site_law(mut self, law: SiteLaw) -> Self {
        self.site_law = law;
        self
    }

    #[inline]
    fn cell(&self, p: (i32, i32)) -> usize {
        let n = self.n as i32;
        (p.0 + n) as usize + (p.1 + n) as usize * self.side
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[(i32, i32)] {
        &self.pts
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn proposed(&self) -> u64 {
        self.proposed
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn walk(&self) -> Walk {
        let pts = self.pts.iter().map(|&(x, y)| LatticePoint::xy(x, y)).collect();
        Walk::from_trusted(pts, WalkKind::Open)
    }

    fn draw_site<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.site_law {
            SiteLaw::Uniform => rng.gen_range(0..self.n),
            SiteLaw::NearOrigin { near, near_prob } => {
                if rng.gen::<f64>() < near_prob {
                    rng.gen_range(0..near.clamp(1, self.n))
                } else {
                    rng.gen_range(0..self.n)
                }
            }
        }
    }

    /// One proposal with a uniform non-identity symmetry.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let k = self.draw_site(rng);
        let g = rng.gen_range(1..8);
        self.propose(k, g)
    }

    /// Applies symmetry `g` about site `k` to sites `k+1..=n`; keeps the
    /// result when it is self-avoiding (and stays in the half-plane).
    pub fn propose(&mut self, k: usize, g: usize) -> bool {
        assert!(k < self.n && g < 8, "pivot site or symmetry out of range");
        self.proposed += 1;
        if g == 0 {
            self.accepted += 1;
            return true;
        }
        let (px, py) = self.pts[k];
        self.scratch.clear();
        // Walk outward from the pivot: collisions are most likely nearby.
        for j in k + 1..=self.n {
            let (dx, dy) = (self.pts[j].0 - px, self.pts[j].1 - py);
            let (rx, ry) = apply(g, dx, dy);
            let q = (px + rx, py + ry);
            if self.half_plane && q.1 <= 0 {
                return false;
            }
            let owner = self.occ[self.cell(q)];
            if owner != EMPTY && owner as usize <= k {
                return false;
            }
            self.scratch.push(q);
        }
        for j in k + 1..=self.n {
            let c = self.cell(self.pts[j]);
            self.occ[c] = EMPTY;
        }
        for (i, &q) in self.scratch.iter().enumerate() {
            let j = k + 1 + i;
            self.pts[j] = q;
            let c = self.cell(q);
            self.occ[c] = j as u32;
        }
        self.accepted += 1;
        true
    }

    /// Runs proposals until `accepts` of them have been accepted.
    pub fn thermalize<R: Rng + ?Sized>(&mut self, accepts: u64, rng: &mut R) {
        let target = self.accepted + accepts;
        while self.accepted < target {
            self.step(rng);
        }
    }
}

/// Simple random walk from the origin, for calibrating the estimators.
pub fn random_walk<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(i32, i32)> {
    let mut pts = Vec::with_capacity(n + 1);
    let mut p = (0, 0);
    pts.push(p);
    for _ in 0..n {
        p = match rng.gen_range(0..4) {
            0 => (p.0 + 1, p.1),
            1 => (p.0 - 1, p.1),
            2 => (p.0, p.1 + 1),
            _ => (p.0, p.1 - 1),
        };
        pts.push(p);
    }
    pts
}

/// Euclidean diameter via the convex hull.
pub fn point_diameter(pts: &[(i32, i32)]) -> f64 {
    let mut v: Vec<(i64, i64)> = pts.iter().map(|&(x, y)| (x as i64, y as i64)).collect();
    v.sort_unstable();
    v.dedup();
    if v.len() < 2 {
        return 0.0;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * v.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> =
            if pass == 0 { Box::new(v.iter()) } else { Box::new(v.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut best = 0i64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2));
        }
    }
    (best as f64).sqrt()
}

fn step_codes(pts: &[(i32, i32)]) -> Vec<u8> {
    pts.windows(2)
        .map(|w| match (w[1].0 - w[0].0, w[1].1 - w[0].1) {
            (1, 0) => 0,
            (-1, 0) => 1,
            (0, 1) => 2,
            _ => 3,
        })
        .collect()
}

/// Chi-square test of uniformity of a full-plane pivot chain over all
/// `n`-step walks, recording one state every `thin` proposals. Returns the
/// test and the number of distinct walks seen.
pub fn pivot_uniformity(n: usize, draws: usize, thin: usize, seed: u64) -> Result<(TestResult, usize)> {
    let total = count_saws(n, 2)? as usize;
    if draws < 5 * total || thin == 0 {
        return Err(invalid("need at least five expected draws per walk and thin >= 1"));
    }
    let mut c = PivotChain::straight(n, false)?;
    let mut rng = substream(seed, 0);
    c.thermalize(1000, &mut rng);
    let mut hist: HashMap<Vec<u8>, f64> = HashMap::new();
    for _ in 0..draws {
        for _ in 0..thin {
            c.step(&mut rng);
        }
        *hist.entry(step_codes(c.points())).or_default() += 1.0;
    }
    let seen = hist.len();
    let mut obs: Vec<f64> = hist.into_values().collect();
    obs.resize(total.max(seen), 0.0);
    let exp = vec![draws as f64 / total as f64; obs.len()];
    Ok((chi_square(&obs, &exp)?, seen))
}
