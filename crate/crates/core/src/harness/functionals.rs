// SPDX-License-Identifier: Apache-2.0

//! Scale-invariant functionals of a curve from 0 stopped on leaving the
//! half-disk of radius `R`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The three comparison functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitFunctionals {
    /// `arg` of the first exit point, in `[0, pi]`.
    pub exit_angle: f64,
    /// Largest real part before the exit, divided by `R`.
    pub rightmost: f64,
    /// 1 when the marked point lies left of the curve (the curve passes to
    /// its right), else 0.
    pub passes_right: f64,
}

impl ExitFunctionals {
    pub const NAMES: [&'static str; 3] = ["exit_angle", "rightmost", "passes_right"];

    pub fn values(&self) -> [f64; 3] {
        [self.exit_angle, self.rightmost, self.passes_right]
    }

    /// Rounds the rightmost extent to the lattice of spacing `1/radius`, the
    /// values a walk on the integer lattice can take.
    pub fn on_lattice(mut self, radius: f64) -> Self {
        self.rightmost = (self.rightmost * radius).round() / radius;
        self
    }
}

/// The marked point `(R/2) e^{i pi/3}`, nudged off lattice lines.
pub fn marked_point(radius: f64) -> Complex64 {
    Complex64::from_polar(0.5 * radius, PI / 3.0) + Complex64::new(1e-7, 1.3e-7) * radius
}

/// Evaluates the functionals on a polyline starting at 0; `None` when the
/// curve never leaves the half-disk.
pub fn exit_functionals(points: &[Complex64], radius: f64) -> Option<ExitFunctionals> {
    let exit = points.iter().position(|z| z.norm() >= radius)?;
    if exit == 0 {
        return None;
    }
    let (a, b) = (points[exit - 1], points[exit]);
    // Crossing of the circle on the last segment.
    let d = b - a;
    let (qa, qb, qc) = (d.norm_sqr(), 2.0 * (a.re * d.re + a.im * d.im), a.norm_sqr() - radius * radius);
    let s = ((-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa)).clamp(0.0, 1.0);
    let hit = a + d * s;
    let path = || points[..exit].iter().copied().chain(std::iter::once(hit));
    let rightmost = path().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) / radius;
    // Parity of crossings of the vertical segment from the marked point down
    // to the real axis: odd means the curve separates the point from the
    // positive axis, so the point is on its left.
    let p = marked_point(radius);
    let mut crossings = 0usize;
    let mut prev: Option<Complex64> = None;
    for z in path() {
        if let Some(w) = prev {
            if (w.re - p.re) * (z.re - p.re) < 0.0 {
                let t = (p.re - w.re) / (z.re - w.re);
                let y = w.im + t * (z.im - w.im);
                if y > 0.0 && y < p.im {
                    crossings += 1;
                }
            }
        }
        prev = Some(z);
    }
    Some(ExitFunctionals {
        exit_angle: hit.arg().clamp(0.0, PI),
        rightmost,
        passes_right: (crossings % 2) as f64,
    })
}
