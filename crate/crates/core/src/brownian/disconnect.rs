// SPDX-License-Identifier: Apache-2.0

//! Pairs of Brownian paths whose union does not disconnect the origin
//! from infinity.
//!
//! By scaling, the window of a path from the first hit of radius `eps` to the
//! first hit of `1/eps` is a path from a uniform point of the unit circle to
//! radius `eps^-2`. Paths are advanced with scale-invariant Gaussian steps
//! of size `step * |z|` and rasterized on a log-polar grid, where every
//! annulus of fixed modulus gets the same number of cells.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{Geometry, PlanarCurve};
use crate::error::{invalid, Error, Result};
use crate::rng::substream;
use crate::sle::restriction::proportion;
use crate::stats::EstimateWithError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisconnectParams {
    /// Cells around each circle of the log-polar grid.
    pub angular_cells: usize,
    /// Per-coordinate step standard deviation relative to `|z|`.
    pub step: f64,
    /// Trials between stopping checks.
    pub batch: usize,
    pub max_trials: usize,
}

impl Default for DisconnectParams {
    fn default() -> Self {
        Self { angular_cells: 128, step: 0.04, batch: 64, max_trials: 2_000_000 }
    }
}

/// Two windows of Brownian paths started at the origin, in original
/// coordinates. Both curves begin at 0; their second point is the first hit
/// of the circle of radius `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPair {
    pub first: PlanarCurve,
    pub second: PlanarCurve,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonDisconnection {
    /// Estimate of `P(V_eps)`.
    pub probability: EstimateWithError,
    pub trials: usize,
    pub accepts: usize,
    pub sample: Option<PathPair>,
}

// Below this radius (in window units) steps stop shrinking, which bounds the
// cost of deep excursions towards the origin.
const R_FLOOR: f64 = 1e-8;
// Steps between connectivity checks while a path is being drawn.
const CHECK_EVERY: usize = 4096;

/// Log-polar raster `(ln|z|, arg z)` reused across trials; cells are
/// stamped with a per-trial generation so nothing is cleared.
struct Raster {
    m: usize,
    a: f64,
    base: i64,
    rows: usize,
    wall: Vec<u32>,
    seen: Vec<u32>,
    gen: u32,
    visit: u32,
    queue: VecDeque<(usize, usize)>,
    lowest: usize,
}

impl Raster {
    fn new(m: usize, r_out: f64) -> Self {
        let a = 2.0 * PI / m as f64;
        let base = (R_FLOOR.ln() / a).floor() as i64 - 2;
        let top = (r_out.ln() / a).floor() as i64 + 1;
        let rows = (top - base + 1) as usize;
        Self { m, a, base, rows, wall: vec![0; rows * m], seen: vec![0; rows * m], gen: 0, visit: 0, queue: VecDeque::new(), lowest: rows }
    }

    fn reset(&mut self) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.wall.iter_mut().for_each(|w| *w = 0);
            self.gen = 1;
        }
        self.lowest = self.rows;
    }

    fn cell(&self, (u, th): (f64, f64)) -> (i64, i64) {
        ((u / self.a).floor() as i64 - self.base, (th.rem_euclid(2.0 * PI) / self.a).floor() as i64 % self.m as i64)
    }

    fn put(&mut self, r: i64, q: i64) {
        let r = r as usize;
        self.lowest = self.lowest.min(r);
        self.wall[r * self.m + q.rem_euclid(self.m as i64) as usize] = self.gen;
    }

    /// 8-connected segment between consecutive samples, unwrapping the angle.
    fn segment(&mut self, from: (f64, f64), to: (f64, f64)) {
        let (r0, c0) = self.cell(from);
        let (r1, mut c1) = self.cell(to);
        let m = self.m as i64;
        if c1 - c0 > m / 2 {
            c1 -= m;
        } else if c0 - c1 > m / 2 {
            c1 += m;
        }
        let n = (r1 - r0).abs().max((c1 - c0).abs());
        self.put(r0, c0);
        for j in 1..=n {
            let r = r0 + ((r1 - r0) * j + n / 2 * (r1 - r0).signum()) / n;
            let q = c0 + ((c1 - c0) * j + n / 2 * (c1 - c0).signum()) / n;
            self.put(r, q);
        }
    }

    /// Whether the free cells connect the row below the drawn paths to the
    /// row beyond the outer circle (4-connectivity).
    fn escapes(&mut self) -> bool {
        self.visit = self.visit.wrapping_add(1);
        if self.visit == 0 {
            self.seen.iter_mut().for_each(|v| *v = 0);
            self.visit = 1;
        }
        let (m, top, v, g) = (self.m, self.rows - 1, self.visit, self.gen);
        let bottom = self.lowest.saturating_sub(1);
        self.queue.clear();
        for q in 0..m {
            let i = bottom * m + q;
            if self.wall[i] != g {
                self.seen[i] = v;
                self.queue.push_back((bottom, q));
            }
        }
        while let Some((r, q)) = self.queue.pop_front() {
            if r == top {
                return true;
            }
            for (nr, nq) in [(r + 1, q), (r.wrapping_sub(1), q), (r, (q + 1) % m), (r, (q + m - 1) % m)] {
                if nr >= bottom && nr < self.rows {
                    let i = nr * m + nq;
                    if self.wall[i] != g && self.seen[i] != v {
                        self.seen[i] = v;
                        self.queue.push_back((nr, nq));
                    }
                }
            }
        }
        false
    }

    /// Draws a window from a uniform point of the unit circle to radius
    /// `r_out`, returning `None` as soon as the origin is cut off.
    fn window<R: Rng + ?Sized>(&mut self, r_out: f64, h: f64, rng: &mut R) -> Option<Vec<(f64, f64)>> {
        let mut z = Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>());
        let mut out = vec![(0.0, z.arg())];
        let (r0, c0) = self.cell(out[0]);
        self.put(r0, c0);
        loop {
            let s = h * z.norm().max(R_FLOOR);
            z += s * Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let r = z.norm();
            let next = (r.clamp(R_FLOOR, r_out).ln(), z.arg());
            self.segment(*out.last().expect("nonempty"), next);
            out.push(next);
            if r >= r_out {
                return self.escapes().then_some(out);
            }
            if out.len() % CHECK_EVERY == 0 && !self.escapes() {
                return None;
            }
        }
    }

    fn trial<R: Rng + ?Sized>(&mut self, r_out: f64, h: f64, rng: &mut R) -> Option<[Vec<(f64, f64)>; 2]> {
        self.reset();
        let a = self.window(r_out, h, rng)?;
        let b = self.window(r_out, h, rng)?;
        Some([a, b])
    }
}

fn to_curve(w: &[(f64, f64)], eps: f64) -> PlanarCurve {
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    pts.extend(w.iter().map(|&(u, th)| Complex64::from_polar(eps * u.exp(), th)));
    PlanarCurve::new(pts, Geometry::Plane)
}

/// Samples path pairs until `target_accepts` of them leave the origin in the
/// unbounded component, and estimates `P(V_eps)`.
pub fn non_disconnecting_pair(eps: f64, target_accepts: usize, seed: u64, p: &DisconnectParams) -> Result<NonDisconnection> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    if target_accepts == 0 || p.angular_cells < 8 || !(p.step > 0.0 && p.step < 0.5) || p.batch == 0 {
        return Err(invalid("need target_accepts >= 1, angular_cells >= 8, step in (0, 0.5)"));
    }
    let r_out = eps.powi(-2);
    let (mut trials, mut accepts) = (0usize, 0usize);
    let mut sample = None;
    while accepts < target_accepts {
        if trials >= p.max_trials || (trials >= 100_000 && (accepts as f64) < 1e-4 * trials as f64) {
            let rate = accepts as f64 / trials.max(1) as f64;
            return Err(Error::ResourceLimit(format!(
                "acceptance rate {rate:.2e} after {trials} trials; try a larger eps"
            )));
        }
        let results: Vec<Option<PathPair>> = (trials..trials + p.batch)
            .into_par_iter()
            .map_init(
                || Raster::new(p.angular_cells, r_out),
                |raster, i| {
                    let mut rng = substream(seed, i as u64);
                    raster
                        .trial(r_out, p.step, &mut rng)
                        .map(|[a, b]| PathPair { first: to_curve(&a, eps), second: to_curve(&b, eps), eps })
                },
            )
            .collect();
        for r in results {
            trials += 1;
            if let Some(pair) = r {
                accepts += 1;
                sample.get_or_insert(pair);
                if accepts == target_accepts {
                    break;
                }
            }
        }
    }
    Ok(NonDisconnection { probability: proportion(accepts, trials), trials, accepts, sample })
}
