// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::ExtPoint;
use crate::error::{invalid, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if (a * d - b * c).norm() < 1e-300 {
            return Err(invalid("degenerate Mobius map"));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn eval(&self, z: ExtPoint) -> ExtPoint {
        match z {
            ExtPoint::Infinity if self.c == Complex64::new(0.0, 0.0) => ExtPoint::Infinity,
            ExtPoint::Infinity => ExtPoint::Finite(self.a / self.c),
            ExtPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// First three derivatives at a finite, non-polar point.
    pub fn derivatives(&self, z: Complex64) -> [Complex64; 3] {
        let det = self.a * self.d - self.b * self.c;
        let den = self.c * z + self.d;
        let d1 = det / (den * den);
        let d2 = -2.0 * self.c * d1 / den;
        let d3 = 6.0 * self.c * self.c * d1 / (den * den);
        [d1, d2, d3]
    }
}

/// Unit disk to upper half-plane: `0 -> i`, `1 -> infinity`.
pub fn cayley(z: ExtPoint) -> ExtPoint {
    Mobius { a: I, b: I, c: Complex64::new(-1.0, 0.0), d: Complex64::new(1.0, 0.0) }.eval(z)
}

/// Inverse of [`cayley`].
pub fn cayley_inverse(w: ExtPoint) -> ExtPoint {
    Mobius { a: Complex64::new(1.0, 0.0), b: -I, c: Complex64::new(1.0, 0.0), d: I }.eval(w)
}

/// Cayley image of the boundary point `e^{i alpha}`, `alpha` not a multiple of `2 pi`.
pub fn cayley_boundary(alpha: f64) -> Result<f64> {
    let half = 0.5 * alpha;
    if half.sin().abs() < 1e-15 {
        return Err(invalid("boundary point 1 maps to infinity"));
    }
    Ok(-half.cos() / half.sin())
}
