// SPDX-License-Identifier: Apache-2.0

//! Cell regions: rasterization, hole filling, outer frontiers and box
//! counting.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::pair;
use crate::curve::{Geometry, PlanarCurve};
use crate::error::{invalid, Error, Result};
use crate::stats::{linear_fit, EstimateWithError};

const N4: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
// Counter-clockwise Moore neighbourhood.
const N8: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

/// A finite set of square cells on a grid anchored at `origin` (the lower
/// left corner of cell `(0, 0)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridRegion {
    pub origin: Complex64,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    cells: Vec<bool>,
}

impl GridRegion {
    pub fn empty(origin: Complex64, cell: f64, width: usize, height: usize) -> Result<Self> {
        if !(cell > 0.0) || width == 0 || height == 0 {
            return Err(invalid("grid needs a positive cell size and dimensions"));
        }
        Ok(Self { origin, cell, width, height, cells: vec![false; width * height] })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    #[inline]
    fn get_i(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.cells[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.cell * self.cell
    }

    pub fn center(&self, x: usize, y: usize) -> Complex64 {
        self.origin + Complex64::new((x as f64 + 0.5) * self.cell, (y as f64 + 0.5) * self.cell)
    }

    /// Cell containing `z`, if inside the grid.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let (x, y) = self.locate_i(z);
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height).then_some((x as usize, y as usize))
    }

    fn locate_i(&self, z: Complex64) -> (i64, i64) {
        let d = (z - self.origin) / self.cell;
        (d.re.floor() as i64, d.im.floor() as i64)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).filter(move |&x| self.get(x, y)).map(move |x| (x, y)))
    }

    /// Marks the 8-connected cell path of a polyline; returns the longest
    /// segment measured in cells.
    pub fn draw_polyline(&mut self, pts: &[Complex64]) -> f64 {
        let mut longest: f64 = 0.0;
        let mut prev: Option<(i64, i64)> = None;
        for &z in pts {
            let c = self.locate_i(z);
            match prev {
                None => self.mark(c),
                Some(p) => {
                    longest = longest.max(((c.0 - p.0).abs().max((c.1 - p.1).abs())) as f64);
                    for q in bresenham(p, c) {
                        self.mark(q);
                    }
                }
            }
            prev = Some(c);
        }
        longest
    }

    fn mark(&mut self, (x, y): (i64, i64)) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.set(x as usize, y as usize, true);
        }
    }

    /// Cells not reachable from outside the grid through 4-connected
    /// unoccupied cells.
    pub fn fill_holes(&self) -> GridRegion {
        let outside = self.exterior();
        let mut out = self.clone();
        for (c, o) in out.cells.iter_mut().zip(&outside) {
            *c = !o;
        }
        out
    }

    fn exterior(&self) -> Vec<bool> {
        let (w, h) = (self.width as i64, self.height as i64);
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::new();
        let push = |x: i64, y: i64, seen: &mut Vec<bool>, q: &mut VecDeque<(i64, i64)>| {
            let i = (y * w + x) as usize;
            if !self.cells[i] && !seen[i] {
                seen[i] = true;
                q.push_back((x, y));
            }
        };
        for x in 0..w {
            push(x, 0, &mut seen, &mut queue);
            push(x, h - 1, &mut seen, &mut queue);
        }
        for y in 0..h {
            push(0, y, &mut seen, &mut queue);
            push(w - 1, y, &mut seen, &mut queue);
        }
        while let Some((x, y)) = queue.pop_front() {
            for (dx, dy) in N4 {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h {
                    push(nx, ny, &mut seen, &mut queue);
                }
            }
        }
        seen
    }

    /// 8-connected components, largest first.
    pub fn components(&self) -> Vec<Vec<(usize, usize)>> {
        let mut label = vec![false; self.cells.len()];
        let mut comps = Vec::new();
        for (sx, sy) in self.cells() {
            if label[sy * self.width + sx] {
                continue;
            }
            label[sy * self.width + sx] = true;
            let mut comp = vec![(sx, sy)];
            let mut i = 0;
            while i < comp.len() {
                let (x, y) = comp[i];
                i += 1;
                for (dx, dy) in N8 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if self.get_i(nx, ny) {
                        let k = ny as usize * self.width + nx as usize;
                        if !label[k] {
                            label[k] = true;
                            comp.push((nx as usize, ny as usize));
                        }
                    }
                }
            }
            comps.push(comp);
        }
        comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
        comps
    }

    /// Occupied cells with a 4-neighbour outside the region.
    pub fn boundary_cells(&self) -> Vec<(usize, usize)> {
        self.cells()
            .filter(|&(x, y)| N4.iter().any(|&(dx, dy)| !self.get_i(x as i64 + dx, y as i64 + dy)))
            .collect()
    }

    pub fn to_rle(&self) -> RleRegion {
        let rows = (0..self.height)
            .map(|y| {
                let mut runs = Vec::new();
                let mut x = 0;
                while x < self.width {
                    if self.get(x, y) {
                        let s = x;
                        while x < self.width && self.get(x, y) {
                            x += 1;
                        }
                        runs.push([s, x - s]);
                    } else {
                        x += 1;
                    }
                }
                runs
            })
            .collect();
        RleRegion { origin: self.origin, cell: self.cell, width: self.width, height: self.height, rows }
    }

    pub fn from_rle(r: &RleRegion) -> Result<Self> {
        if r.rows.len() != r.height {
            return Err(invalid("row count does not match height"));
        }
        let mut g = Self::empty(r.origin, r.cell, r.width, r.height)?;
        for (y, runs) in r.rows.iter().enumerate() {
            for &[s, len] in runs {
                if s + len > r.width {
                    return Err(invalid("run exceeds grid width"));
                }
                for x in s..s + len {
                    g.set(x, y, true);
                }
            }
        }
        Ok(g)
    }
}

/// Run-length encoded rows of `[start, length]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RleRegion {
    #[serde(with = "pair")]
    pub origin: Complex64,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<[usize; 2]>>,
}

fn bresenham(a: (i64, i64), b: (i64, i64)) -> impl Iterator<Item = (i64, i64)> {
    let (dx, dy) = ((b.0 - a.0).abs(), -(b.1 - a.1).abs());
    let (sx, sy) = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
    let mut err = dx + dy;
    let mut cur = a;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == b {
            done = true;
        } else {
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                cur.0 += sx;
            }
            if e2 <= dx {
                err += dx;
                cur.1 += sy;
            }
        }
        Some(out)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullFill {
    pub region: GridRegion,
    /// Diagnostics, e.g. polyline segments much longer than a cell.
    pub flags: Vec<String>,
}

/// Rasterizes the curves on a grid with cells of side `resolution` and fills
/// every hole.
pub fn hull_fill(curves: &[PlanarCurve], resolution: f64) -> Result<HullFill> {
    if curves.is_empty() || curves.iter().all(|c| c.points.is_empty()) {
        return Err(invalid("hull_fill needs at least one nonempty curve"));
    }
    if !(resolution > 0.0) {
        return Err(invalid("resolution must be positive"));
    }
    let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for z in curves.iter().flat_map(|c| &c.points) {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let cells_x = ((hi.re - lo.re) / resolution).floor() as usize + 3;
    let cells_y = ((hi.im - lo.im) / resolution).floor() as usize + 3;
    if cells_x.saturating_mul(cells_y) > 1 << 28 {
        return Err(Error::ResourceLimit(format!("grid of {cells_x}x{cells_y} cells")));
    }
    let mut g = GridRegion::empty(lo - Complex64::new(resolution, resolution), resolution, cells_x, cells_y)?;
    let mut longest: f64 = 0.0;
    for c in curves {
        longest = longest.max(g.draw_polyline(&c.points));
    }
    let mut flags = Vec::new();
    if longest > 4.0 {
        flags.push(format!("polyline steps up to {longest} cells; hull may leak"));
    }
    Ok(HullFill { region: g.fill_holes(), flags })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    /// Closed path through outer boundary cell centres.
    pub curve: PlanarCurve,
    pub cells: Vec<(usize, usize)>,
    pub flags: Vec<String>,
}

/// Outer boundary of the largest component, traced as a closed 8-connected
/// cell path (Moore neighbour tracing).
pub fn frontier(region: &GridRegion) -> Result<Frontier> {
    let comps = region.components();
    let Some(main) = comps.first() else {
        return Err(invalid("frontier of an empty region"));
    };
    let mut flags = Vec::new();
    if comps.len() > 1 {
        flags.push(format!("region has {} components; using the largest", comps.len()));
    }
    let mut comp = GridRegion::empty(region.origin, region.cell, region.width, region.height)?;
    for &(x, y) in main {
        comp.set(x, y, true);
    }
    let start = comp.cells().next().expect("nonempty");
    let s = (start.0 as i64, start.1 as i64);
    // The cell below the scan-order minimum is outside.
    let mut back = 6usize;
    let mut cur = s;
    let mut path = vec![start];
    let mut first: Option<((i64, i64), usize)> = None;
    let limit = 4 * comp.width * comp.height + 8;
    loop {
        let mut next = None;
        for k in 1..=8 {
            let i = (back + k) % 8;
            let n = (cur.0 + N8[i].0, cur.1 + N8[i].1);
            if comp.get_i(n.0, n.1) {
                let p = (cur.0 + N8[(back + k - 1) % 8].0, cur.1 + N8[(back + k - 1) % 8].1);
                let d = (p.0 - n.0, p.1 - n.1);
                let nb = N8.iter().position(|&q| q == d).expect("adjacent");
                next = Some((n, nb));
                break;
            }
        }
        let Some((n, nb)) = next else { break };
        if cur == s {
            if first.is_some_and(|f| f == (n, nb)) {
                break;
            }
            first.get_or_insert((n, nb));
        }
        cur = n;
        back = nb;
        path.push((cur.0 as usize, cur.1 as usize));
        if path.len() > limit {
            return Err(Error::Numeric("frontier tracing did not close".into()));
        }
    }
    if path.len() > 1 {
        path.pop();
    }
    let mut pts: Vec<Complex64> = path.iter().map(|&(x, y)| region.center(x, y)).collect();
    pts.push(pts[0]);
    Ok(Frontier { curve: PlanarCurve::new(pts, Geometry::Plane), cells: path, flags })
}

/// Dyadic box sizes `diameter * 2^-k` for `k` in `k_min..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    pub k_min: u32,
    pub k_max: u32,
}

impl ScaleGrid {
    pub fn validate(&self) -> Result<()> {
        if self.k_max < self.k_min + 3 {
            return Err(invalid("box counting needs at least 4 dyadic scales"));
        }
        if (self.k_max - self.k_min) < 7 {
            return Err(invalid("box-counting scales must span at least two decades"));
        }
        if self.k_max > 30 {
            return Err(invalid("box sizes below diameter * 2^-30"));
        }
        Ok(())
    }
}

/// Box-counting dimension of a polyline: every segment is sampled at a
/// quarter box size and the occupied boxes counted. The closed bounding box
/// is covered by `ceil(extent / eps)` boxes per axis, so points on its upper
/// edges do not open an extra row or column.
pub fn box_dimension(curve: &PlanarCurve, scales: ScaleGrid) -> Result<EstimateWithError> {
    scales.validate()?;
    let diam = curve.diameter();
    if !(diam > 0.0) {
        return Err(invalid("curve has zero diameter"));
    }
    let (lo, hi) = curve.bounds().ok_or_else(|| invalid("empty curve"))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in scales.k_min..=scales.k_max {
        let eps = diam * 0.5f64.powi(k as i32);
        let mut boxes = HashSet::new();
        let last = |extent: f64| ((extent / eps).ceil() as i64 - 1).max(0);
        let (mx, my) = (last(hi.re - lo.re), last(hi.im - lo.im));
        let key = |z: Complex64| {
            (
                (((z.re - lo.re) / eps).floor() as i64).min(mx),
                (((z.im - lo.im) / eps).floor() as i64).min(my),
            )
        };
        boxes.insert(key(curve.points[0]));
        for w in curve.points.windows(2) {
            let n = ((w[1] - w[0]).norm() / (0.25 * eps)).ceil().max(1.0) as usize;
            for j in 1..=n {
                boxes.insert(key(w[0] + (w[1] - w[0]) * (j as f64 / n as f64)));
            }
        }
        xs.push(k as f64 * std::f64::consts::LN_2);
        ys.push((boxes.len() as f64).ln());
    }
    fit_dimension(&xs, &ys, scales)
}

/// Box-counting dimension of a set of grid cells, using boxes of
/// `2^j` cells for `j` in the scale window.
pub fn box_dimension_cells(cells: &[(usize, usize)], scales: ScaleGrid) -> Result<EstimateWithError> {
    scales.validate()?;
    if cells.is_empty() {
        return Err(invalid("no cells to count"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in scales.k_min..=scales.k_max {
        let boxes: HashSet<(usize, usize)> = cells.iter().map(|&(x, y)| (x >> j, y >> j)).collect();
        xs.push(-(j as f64) * std::f64::consts::LN_2);
        ys.push((boxes.len() as f64).ln());
    }
    fit_dimension(&xs, &ys, scales)
}

fn fit_dimension(xs: &[f64], ys: &[f64], scales: ScaleGrid) -> Result<EstimateWithError> {
    let f = linear_fit(xs, ys)?;
    Ok(EstimateWithError::new(f.slope, f.slope_se, xs.len()).with_window(scales.k_min as f64, scales.k_max as f64))
}
