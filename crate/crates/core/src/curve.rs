// SPDX-License-Identifier: Apache-2.0

//! Finitely sampled planar curves.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Numerical slack allowed below the real axis for half-plane curves.
pub const HALF_PLANE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    HalfPlane,
    Disk,
    Plane,
}

/// A curve in the complex plane, optionally stamped with capacity times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCurve {
    pub points: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    pub geometry: Geometry,
}

impl PlanarCurve {
    pub fn new(points: Vec<Complex64>, geometry: Geometry) -> Self {
        Self { points, times: None, geometry }
    }

    pub fn with_times(points: Vec<Complex64>, times: Vec<f64>, geometry: Geometry) -> Result<Self> {
        if points.len() != times.len() {
            return Err(invalid("curve points and times differ in length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("curve times must be strictly increasing"));
        }
        Ok(Self { points, times: Some(times), geometry })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every point respects the geometry's range constraint.
    pub fn respects_geometry(&self) -> bool {
        match self.geometry {
            Geometry::HalfPlane => self.points.iter().all(|z| z.im >= -HALF_PLANE_SLACK),
            Geometry::Disk => self.points.iter().all(|z| z.norm() <= 1.0 + 1e-9),
            Geometry::Plane => true,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self.points.iter().map(|z| z * factor).collect(),
            times: self.times.as_ref().map(|t| t.iter().map(|t| t * factor * factor).collect()),
            geometry: self.geometry,
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> Option<(Complex64, Complex64)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), z| {
            (
                Complex64::new(lo.re.min(z.re), lo.im.min(z.im)),
                Complex64::new(hi.re.max(z.re), hi.im.max(z.im)),
            )
        }))
    }

    /// Maximal distance between two sample points.
    pub fn diameter(&self) -> f64 {
        // The farthest pair lies on the convex hull, which is small for the
        // paths sampled here.
        let hull = convex_hull(&self.points);
        let mut d: f64 = 0.0;
        for (i, a) in hull.iter().enumerate() {
            for b in &hull[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// One JSON array of `[re, im]` pairs, the line format of curve JSONL files.
    pub fn to_json_line(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.points.iter().map(|z| [z.re, z.im]).collect();
        serde_json::to_string(&pairs).expect("finite floats serialize")
    }

    pub fn from_json_line(line: &str, geometry: Geometry) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(line)?;
        Ok(Self::new(pairs.into_iter().map(|[a, b]| Complex64::new(a, b)).collect(), geometry))
    }
}

/// Monotone-chain convex hull, counterclockwise without repeated ends.
fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn directed_hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in a {
        let mut best = f64::INFINITY;
        for q in b {
            let d = (p - q).norm_sqr();
            if d < best {
                best = d;
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

/// Point-set Hausdorff distance between the sample points of two curves.
pub fn curve_hausdorff(c1: &PlanarCurve, c2: &PlanarCurve) -> Result<f64> {
    if c1.is_empty() || c2.is_empty() {
        return Err(invalid("Hausdorff distance needs nonempty curves"));
    }
    Ok(directed_hausdorff(&c1.points, &c2.points).max(directed_hausdorff(&c2.points, &c1.points)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(pts: &[(f64, f64)]) -> PlanarCurve {
        PlanarCurve::new(pts.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), Geometry::Plane)
    }

    proptest! {
        #[test]
        fn diameter_matches_all_pairs(pts in prop::collection::vec((-10i32..10, -10i32..10), 1..40)) {
            let pts: Vec<(f64, f64)> = pts.into_iter().map(|(a, b)| (a as f64 * 0.5, b as f64 * 0.5)).collect();
            let mut brute: f64 = 0.0;
            for a in &pts {
                for b in &pts {
                    brute = brute.max((a.0 - b.0).hypot(a.1 - b.1));
                }
            }
            prop_assert!((c(&pts).diameter() - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn hausdorff_of_identical_curves_is_zero() {
        let a = c(&[(0.0, 0.0), (1.0, 2.0), (3.0, -1.0)]);
        assert_eq!(curve_hausdorff(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_of_points_is_their_distance() {
        let d = curve_hausdorff(&c(&[(0.0, 0.0)]), &c(&[(3.0, 4.0)])).unwrap();
        assert!((d - 5.0).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_of_translated_segment() {
        let seg: Vec<(f64, f64)> = (0..=100).map(|k| (k as f64 / 100.0, 0.0)).collect();
        let moved: Vec<(f64, f64)> = seg.iter().map(|&(x, y)| (x, y + 0.1)).collect();
        let d = curve_hausdorff(&c(&seg), &c(&moved)).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn json_line_round_trip() {
        let a = c(&[(0.5, 0.25), (-1.0, 2.0)]);
        let back = PlanarCurve::from_json_line(&a.to_json_line(), Geometry::Plane).unwrap();
        assert_eq!(a, back);
    }

    fn curve_strategy() -> impl Strategy<Value = PlanarCurve> {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..12).prop_map(|v| c(&v))
    }

    proptest! {
        #[test]
        fn hausdorff_is_a_metric(a in curve_strategy(), b in curve_strategy(), x in curve_strategy()) {
            let ab = curve_hausdorff(&a, &b).unwrap();
            let ba = curve_hausdorff(&b, &a).unwrap();
            let ax = curve_hausdorff(&a, &x).unwrap();
            let xb = curve_hausdorff(&x, &b).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab <= ax + xb + 1e-12);
        }
    }
}
