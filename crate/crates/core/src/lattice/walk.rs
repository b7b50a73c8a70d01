// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 4;

/// A point of Z^d, `2 <= d <= MAX_DIM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    coords: [i32; MAX_DIM],
    dim: u8,
}

impl LatticePoint {
    pub fn new(coords: &[i32]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { coords: c, dim: coords.len() as u8 })
    }

    pub fn origin(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { coords: [0; MAX_DIM], dim: dim as u8 })
    }

    pub fn xy(x: i32, y: i32) -> Self {
        Self { coords: [x, y, 0, 0], dim: 2 }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    /// First coordinate, the direction bridges advance in.
    pub fn first(&self) -> i32 {
        self.coords[0]
    }

    pub fn l1_distance(&self, other: &Self) -> i64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (*a as i64 - *b as i64).abs())
            .sum()
    }

    /// Neighbor in direction `dir`: axis `dir / 2`, positive when `dir` is even.
    pub fn step(&self, dir: u8) -> Self {
        let mut p = *self;
        let axis = (dir / 2) as usize;
        p.coords[axis] += if dir.is_multiple_of(2) { 1 } else { -1 };
        p
    }

    pub fn translate(&self, by: &Self) -> Self {
        let mut p = *self;
        for i in 0..self.dim as usize {
            p.coords[i] += by.coords[i];
        }
        p
    }

    pub fn euclidean_sqr(&self, other: &Self) -> i64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| {
                let d = *a as i64 - *b as i64;
                d * d
            })
            .sum()
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i32>::deserialize(d)?;
        LatticePoint::new(&v).map_err(serde::de::Error::custom)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(invalid(format!("lattice dimension {d} outside 2..={MAX_DIM}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Open,
    Polygon,
}

/// Nearest-neighbour self-avoiding walk or polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    points: Vec<LatticePoint>,
    kind: WalkKind,
}

impl Walk {
    /// Validates adjacency, self-avoidance and (for polygons) closure.
    pub fn new(points: Vec<LatticePoint>, kind: WalkKind) -> Result<Self> {
        let first = points.first().ok_or_else(|| invalid("walk has no points"))?;
        let dim = first.dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(invalid("walk mixes lattice dimensions"));
        }
        if let Some(j) = points.windows(2).position(|w| w[0].l1_distance(&w[1]) != 1) {
            return Err(invalid(format!("points {j} and {} are not neighbours", j + 1)));
        }
        let distinct = match kind {
            WalkKind::Open => &points[..],
            WalkKind::Polygon => {
                let n = points.len() - 1;
                if n < 4 || n % 2 == 1 {
                    return Err(invalid(format!("polygon length {n} must be even and at least 4")));
                }
                if points[0] != points[n] {
                    return Err(invalid("polygon is not closed"));
                }
                &points[..n]
            }
        };
        let mut seen = HashSet::with_capacity(distinct.len());
        for (j, p) in distinct.iter().enumerate() {
            if !seen.insert(*p) {
                return Err(invalid(format!("walk revisits a site at index {j}")));
            }
        }
        Ok(Self { points, kind })
    }

    /// Open walk from the origin following direction codes (see [`LatticePoint::step`]).
    pub fn from_dirs(dim: usize, dirs: &[u8]) -> Result<Self> {
        let mut p = LatticePoint::origin(dim)?;
        let mut pts = Vec::with_capacity(dirs.len() + 1);
        pts.push(p);
        for &d in dirs {
            if (d as usize) >= 2 * dim {
                return Err(invalid(format!("direction code {d} invalid in dimension {dim}")));
            }
            p = p.step(d);
            pts.push(p);
        }
        Walk::new(pts, WalkKind::Open)
    }

    /// Planar walk from compass letters `E W N S` (E = +x, N = +y).
    pub fn from_compass(s: &str) -> Result<Self> {
        let dirs: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c.to_ascii_uppercase() {
                'E' => Ok(0),
                'W' => Ok(1),
                'N' => Ok(2),
                'S' => Ok(3),
                other => Err(invalid(format!("unknown compass step `{other}`"))),
            })
            .collect::<Result<_>>()?;
        Walk::from_dirs(2, &dirs)
    }

    /// Build without validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(points: Vec<LatticePoint>, kind: WalkKind) -> Self {
        debug_assert!(Walk::new(points.clone(), kind).is_ok());
        Self { points, kind }
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// The open walk made of the first `steps` steps (all of them if fewer).
    pub fn prefix(&self, steps: usize) -> Walk {
        let end = steps.min(self.len());
        Self { points: self.points[..=end].to_vec(), kind: WalkKind::Open }
    }

    pub fn first_coords(&self) -> Vec<i32> {
        self.points.iter().map(|p| p.first()).collect()
    }

    /// Maximal Euclidean distance between two points.
    pub fn diameter(&self) -> f64 {
        let mut best = 0i64;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.max(a.euclidean_sqr(b));
            }
        }
        (best as f64).sqrt()
    }

    /// One JSON array of integer coordinate arrays.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.points).expect("integers serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let pts: Vec<LatticePoint> = serde_json::from_str(line)?;
        let closed = pts.len() > 4 && pts.first() == pts.last();
        Walk::new(pts, if closed { WalkKind::Polygon } else { WalkKind::Open })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_keeps_the_first_steps() {
        let w = Walk::from_compass("ENNW").unwrap();
        let p = w.prefix(2);
        assert_eq!(p.len(), 2);
        assert_eq!(p.points(), &w.points()[..3]);
        assert_eq!(w.prefix(10).len(), 4);
    }

    #[test]
    fn rejects_non_adjacent_points() {
        let pts = vec![LatticePoint::xy(0, 0), LatticePoint::xy(2, 0)];
        assert!(Walk::new(pts, WalkKind::Open).is_err());
    }

    #[test]
    fn rejects_self_intersection() {
        assert!(Walk::from_compass("ENWS").is_err());
        assert!(Walk::from_compass("EW").is_err());
    }

    #[test]
    fn square_is_a_polygon() {
        let w = Walk::from_compass("ENW").unwrap();
        let mut pts = w.points().to_vec();
        pts.push(LatticePoint::xy(0, 0));
        let poly = Walk::new(pts, WalkKind::Polygon).unwrap();
        assert_eq!(poly.len(), 4);
    }

    #[test]
    fn back_and_forth_is_not_a_polygon() {
        let pts = vec![LatticePoint::xy(0, 0), LatticePoint::xy(1, 0), LatticePoint::xy(0, 0)];
        assert!(Walk::new(pts, WalkKind::Polygon).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = Walk::from_compass("EENNW").unwrap();
        assert_eq!(w.to_json_line(), "[[0,0],[1,0],[2,0],[2,1],[2,2],[1,2]]");
        assert_eq!(Walk::from_json_line(&w.to_json_line()).unwrap(), w);
    }

    #[test]
    fn dimension_bounds() {
        assert!(LatticePoint::origin(1).is_err());
        assert!(LatticePoint::origin(5).is_err());
        let w = Walk::from_dirs(3, &[0, 4, 2]).unwrap();
        assert_eq!(w.points()[3].coords(), &[1, 1, 1]);
    }
}
