// SPDX-License-Identifier: Apache-2.0

//! Exact enumeration of self-avoiding walks and polygons on Z^d.
//!
//! Walks are grown depth-first on a dense occupancy grid. Full-space counts
//! use the lattice symmetry: every nonstraight walk is an image of one that
//! starts with a run of `+e1` steps followed by a `+e2` step, and there are
//! `2d * 2(d-1)` such images. Independent prefixes are counted as separate
//! tasks and summed with overflow checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::walk::MAX_DIM;

/// Largest walk length enumerated by default, per dimension.
pub fn default_saw_cap(d: usize) -> usize {
    match d {
        2 => 20,
        3 => 14,
        _ => 11,
    }
}

/// Default cap for half-space and bridge enumeration.
pub const DEFAULT_HALF_CAP: usize = 24;

/// Dense occupancy grid centred on the origin.
#[derive(Clone)]
pub(crate) struct Grid {
    pub occ: Vec<bool>,
    /// Index offsets of the `2d` neighbour directions, ordered as direction codes.
    pub offsets: Vec<isize>,
    pub origin: usize,
    side: usize,
    dim: usize,
}

impl Grid {
    pub fn new(n: usize, dim: usize) -> Self {
        let side = 2 * n + 3;
        let mut offsets = Vec::with_capacity(2 * dim);
        let mut stride = 1isize;
        for _ in 0..dim {
            offsets.push(stride);
            offsets.push(-stride);
            stride *= side as isize;
        }
        let cells = stride as usize;
        let centre = (n + 1) as isize;
        let origin: isize = (0..dim).map(|a| centre * (side as isize).pow(a as u32)).sum();
        Self { occ: vec![false; cells], offsets, origin: origin as usize, side, dim }
    }

    /// First coordinate of a cell relative to the origin.
    pub fn first_coord(&self, cell: usize) -> i32 {
        (cell % self.side) as i32 - (self.side as i32 - 1) / 2
    }

    /// Marks every cell with first coordinate `<= 0` except the origin.
    pub fn block_closed_half_space(&mut self) {
        for cell in 0..self.occ.len() {
            if self.first_coord(cell) <= 0 {
                self.occ[cell] = true;
            }
        }
        self.occ[self.origin] = false;
    }

    pub fn step(&self, cell: usize, dir: u8) -> usize {
        (cell as isize + self.offsets[dir as usize]) as usize
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Number of self-avoiding continuations of length `remaining` from `pos`.
pub(crate) fn count_continuations(occ: &mut [bool], offsets: &[isize], pos: usize, remaining: usize) -> u64 {
    match remaining {
        0 => 1,
        1 => offsets
            .iter()
            .filter(|&&o| !occ[(pos as isize + o) as usize])
            .count() as u64,
        _ => {
            let mut total = 0u64;
            for &o in offsets {
                let q = (pos as isize + o) as usize;
                if !occ[q] {
                    occ[q] = true;
                    total += count_continuations(occ, offsets, q, remaining - 1);
                    occ[q] = false;
                }
            }
            total
        }
    }
}

fn check_overflow(n: usize, d: usize) -> Result<()> {
    let mut bound: u64 = 2 * d as u64;
    for _ in 1..n {
        bound = bound
            .checked_mul(2 * d as u64 - 1)
            .ok_or_else(|| Error::ResourceLimit(format!("counts at n = {n} may exceed 64 bits")))?;
    }
    Ok(())
}

fn checked_sum(parts: impl IntoIterator<Item = u64>) -> Result<u64> {
    parts.into_iter().try_fold(0u64, |acc, x| {
        acc.checked_add(x).ok_or_else(|| Error::ResourceLimit("count overflowed u64".into()))
    })
}

fn check_dim(d: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(invalid(format!("lattice dimension {d} outside 2..={MAX_DIM}")))
    }
}

/// `C_n`, the number of `n`-step SAWs from the origin in Z^d, with the
/// default length cap.
pub fn count_saws(n: usize, d: usize) -> Result<u64> {
    count_saws_capped(n, d, default_saw_cap(d))
}

pub fn count_saws_capped(n: usize, d: usize, cap: usize) -> Result<u64> {
    check_dim(d)?;
    if n > cap {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the enumeration cap {cap}")));
    }
    if n == 0 {
        return Ok(1);
    }
    check_overflow(n, d)?;
    // Tasks: `+e1` run of length k, then `+e2`, then one more step (or the end).
    let mut tasks: Vec<(usize, Option<u8>)> = Vec::new();
    for k in 1..n {
        if k + 1 == n {
            tasks.push((k, None));
        } else {
            for dir in 0..(2 * d) as u8 {
                tasks.push((k, Some(dir)));
            }
        }
    }
    let parts: Vec<u64> = tasks
        .into_par_iter()
        .map(|(k, next)| {
            let mut g = Grid::new(n, d);
            let mut pos = g.origin;
            g.occ[pos] = true;
            for _ in 0..k {
                pos = g.step(pos, 0);
                g.occ[pos] = true;
            }
            pos = g.step(pos, 2);
            g.occ[pos] = true;
            let mut used = k + 1;
            if let Some(dir) = next {
                let q = g.step(pos, dir);
                if g.occ[q] {
                    return 0;
                }
                g.occ[q] = true;
                pos = q;
                used += 1;
            }
            count_continuations(&mut g.occ, &g.offsets, pos, n - used)
        })
        .collect();
    let bent = checked_sum(parts)?;
    let per_axis = bent
        .checked_mul(2 * (d as u64 - 1))
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_mul(2 * d as u64))
        .ok_or_else(|| Error::ResourceLimit("count overflowed u64".into()))?;
    Ok(per_axis)
}

/// `C_1..=C_n` (index 0 holds `C_0 = 1`).
pub fn saw_counts(n: usize, d: usize) -> Result<Vec<u64>> {
    (0..=n).map(|k| count_saws(k, d)).collect()
}

/// `upsilon_n`: walks from the origin whose first coordinate is positive after
/// the first step.
pub fn count_half_space(n: usize, d: usize) -> Result<u64> {
    count_half_space_capped(n, d, DEFAULT_HALF_CAP)
}

pub fn count_half_space_capped(n: usize, d: usize, cap: usize) -> Result<u64> {
    check_dim(d)?;
    if n > cap {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the enumeration cap {cap}")));
    }
    if n == 0 {
        return Ok(1);
    }
    check_overflow(n, d)?;
    let mut g = Grid::new(n, d);
    g.block_closed_half_space();
    let first = g.step(g.origin, 0);
    g.occ[g.origin] = true;
    g.occ[first] = true;
    if n == 1 {
        return Ok(1);
    }
    let dirs: Vec<u8> = (0..(2 * d) as u8).collect();
    let parts: Vec<u64> = dirs
        .into_par_iter()
        .map(|dir| {
            let mut g = g.clone();
            let q = g.step(first, dir);
            if g.occ[q] {
                return 0;
            }
            g.occ[q] = true;
            count_continuations(&mut g.occ, &g.offsets, q, n - 2)
        })
        .collect();
    checked_sum(parts)
}

/// Rooted and translation-class counts of self-avoiding polygons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SapCounts {
    pub length: usize,
    /// Polygons with `omega_0` at the origin, counted with orientation.
    pub rooted: u64,
    /// Polygons up to translation, rerooting and reversal: `rooted / (2 * length)`.
    pub classes: u64,
}

/// Self-avoiding polygons of length `n2` in Z^2. A polygon of length `2n`
/// corresponds to a `(2n-1)`-step walk ending next to the origin.
pub fn count_saps(n2: usize) -> Result<SapCounts> {
    if n2 % 2 == 1 {
        return Err(invalid(format!("polygon length {n2} is odd")));
    }
    if n2 < 4 {
        return Ok(SapCounts { length: n2, rooted: 0, classes: 0 });
    }
    let cap = default_saw_cap(2) + 1;
    if n2 > cap {
        return Err(Error::ResourceLimit(format!("polygon length {n2} exceeds cap {cap}")));
    }
    let steps = n2 - 1;
    let mut g = Grid::new(steps, 2);
    let origin = g.origin;
    g.occ[origin] = true;
    let first = g.step(origin, 0);
    g.occ[first] = true;
    let mut closing = 0u64;
    close_count(&mut g, first, steps - 1, origin, &mut closing);
    // Four choices of first step by symmetry.
    let rooted = closing * 4;
    let per_class = 2 * n2 as u64;
    debug_assert_eq!(rooted % per_class, 0);
    Ok(SapCounts { length: n2, rooted, classes: rooted / per_class })
}

fn close_count(g: &mut Grid, pos: usize, remaining: usize, origin: usize, acc: &mut u64) {
    if remaining == 0 {
        if g.offsets.iter().any(|&o| (pos as isize + o) as usize == origin) {
            *acc += 1;
        }
        return;
    }
    for i in 0..g.offsets.len() {
        let q = (pos as isize + g.offsets[i]) as usize;
        if !g.occ[q] {
            g.occ[q] = true;
            close_count(g, q, remaining - 1, origin, acc);
            g.occ[q] = false;
        }
    }
}

/// Depth-first visit of every `n`-step half-space walk. The visitor receives
/// direction codes and first coordinates `x_0..=x_n`. With `bridge_prune`,
/// branches that can no longer end at the running maximum of the first
/// coordinate are cut.
pub(crate) fn visit_half_space<F: FnMut(&[u8], &[i32])>(
    n: usize,
    d: usize,
    bridge_prune: bool,
    visit: &mut F,
) -> Result<()> {
    check_dim(d)?;
    if n > DEFAULT_HALF_CAP {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the half-space cap")));
    }
    if n == 0 {
        visit(&[], &[0]);
        return Ok(());
    }
    let mut g = Grid::new(n, d);
    g.block_closed_half_space();
    let first = g.step(g.origin, 0);
    g.occ[g.origin] = true;
    g.occ[first] = true;
    let mut dirs = Vec::with_capacity(n);
    dirs.push(0u8);
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(0);
    xs.push(1);
    let mut st = VisitState { g, dirs, xs, n, bridge_prune };
    st.recurse(first, 1, visit);
    Ok(())
}

struct VisitState {
    g: Grid,
    dirs: Vec<u8>,
    xs: Vec<i32>,
    n: usize,
    bridge_prune: bool,
}

impl VisitState {
    fn recurse<F: FnMut(&[u8], &[i32])>(&mut self, pos: usize, max_x: i32, visit: &mut F) {
        let depth = self.dirs.len();
        if depth == self.n {
            visit(&self.dirs, &self.xs);
            return;
        }
        let x = *self.xs.last().expect("nonempty");
        if self.bridge_prune && x + ((self.n - depth) as i32) < max_x {
            return;
        }
        for dir in 0..(2 * self.g.dim()) as u8 {
            let q = self.g.step(pos, dir);
            if self.g.occ[q] {
                continue;
            }
            let nx = x + match dir {
                0 => 1,
                1 => -1,
                _ => 0,
            };
            self.g.occ[q] = true;
            self.dirs.push(dir);
            self.xs.push(nx);
            self.recurse(q, max_x.max(nx), visit);
            self.xs.pop();
            self.dirs.pop();
            self.g.occ[q] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Independent oracle: recursive walk growth with a hash set of visited sites.
    fn oracle(n: usize, half: bool) -> u64 {
        fn go(path: &mut Vec<(i32, i32)>, seen: &mut HashSet<(i32, i32)>, left: usize, half: bool) -> u64 {
            if left == 0 {
                return 1;
            }
            let (x, y) = *path.last().unwrap();
            let mut total = 0;
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let p = (x + dx, y + dy);
                if half && p.0 <= 0 {
                    continue;
                }
                if seen.insert(p) {
                    path.push(p);
                    total += go(path, seen, left - 1, half);
                    path.pop();
                    seen.remove(&p);
                }
            }
            total
        }
        let mut seen = HashSet::from([(0, 0)]);
        go(&mut vec![(0, 0)], &mut seen, n, half)
    }

    #[test]
    fn trivial_counts() {
        assert_eq!(count_saws(0, 2).unwrap(), 1);
        assert_eq!(count_saws(1, 2).unwrap(), 4);
        assert_eq!(count_saws(1, 3).unwrap(), 6);
    }

    #[test]
    fn small_counts_match_hash_set_oracle() {
        for n in 0..=9 {
            assert_eq!(count_saws(n, 2).unwrap(), oracle(n, false), "C_{n}");
        }
        // Frozen from the oracle: C_4 = 100.
        assert_eq!(count_saws(4, 2).unwrap(), 100);
    }

    #[test]
    fn half_space_matches_oracle() {
        assert_eq!(count_half_space(1, 2).unwrap(), 1);
        assert_eq!(count_half_space(2, 2).unwrap(), 3);
        for n in 0..=10 {
            assert_eq!(count_half_space(n, 2).unwrap(), oracle(n, true), "upsilon_{n}");
        }
    }

    #[test]
    fn cubic_lattice_small_counts() {
        // 6, 30, 150 on Z^3 (5 continuations per step until the first loop at n = 4).
        assert_eq!(count_saws(2, 3).unwrap(), 30);
        assert_eq!(count_saws(3, 3).unwrap(), 150);
        assert_eq!(count_saws(4, 3).unwrap(), 726);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(count_saws(21, 2), Err(Error::ResourceLimit(_))));
        assert!(count_saws_capped(3, 2, 2).is_err());
    }

    /// Brute-force cycle oracle: closed 2n-step walks from the origin with
    /// distinct vertices.
    fn sap_oracle(n2: usize) -> u64 {
        fn go(path: &mut Vec<(i32, i32)>, seen: &mut HashSet<(i32, i32)>, left: usize) -> u64 {
            let (x, y) = *path.last().unwrap();
            if left == 1 {
                return ((x.abs() + y.abs()) == 1 && path.len() > 2) as u64;
            }
            let mut total = 0;
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let p = (x + dx, y + dy);
                if seen.insert(p) {
                    path.push(p);
                    total += go(path, seen, left - 1);
                    path.pop();
                    seen.remove(&p);
                }
            }
            total
        }
        let mut seen = HashSet::from([(0, 0)]);
        go(&mut vec![(0, 0)], &mut seen, n2)
    }

    #[test]
    fn polygon_counts() {
        let s4 = count_saps(4).unwrap();
        assert_eq!((s4.rooted, s4.classes), (8, 1));
        assert_eq!(count_saps(2).unwrap().rooted, 0);
        assert!(count_saps(5).is_err());
        for n2 in [4, 6, 8, 10] {
            let s = count_saps(n2).unwrap();
            assert_eq!(s.rooted, sap_oracle(n2), "rooted SAPs of length {n2}");
            assert_eq!(s.rooted % 2, 0);
            assert_eq!(s.rooted % (2 * n2 as u64), 0);
        }
        // The oracle finds the two dominoes at length 6.
        let s6 = count_saps(6).unwrap();
        assert_eq!((s6.rooted, s6.classes), (24, 2));
    }

    #[test]
    fn visitor_sees_every_half_space_walk() {
        let mut count = 0u64;
        visit_half_space(7, 2, false, &mut |dirs, xs| {
            assert_eq!(dirs.len(), 7);
            assert_eq!(xs.len(), 8);
            assert!(xs[1..].iter().all(|&x| x > 0));
            count += 1;
        })
        .unwrap();
        assert_eq!(count, count_half_space(7, 2).unwrap());
    }
}
