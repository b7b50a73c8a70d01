// SPDX-License-Identifier: Apache-2.0

//! Restriction map for an obstacle attached to the unit circle.
//!
//! The obstacle at `e^{i theta}` is the cap of the disk cut off by the circle
//! orthogonal to the unit circle through `e^{i(theta +- phi)}`, where
//! `2 sin(phi/2) = delta` puts the feet at distance `delta` from
//! `e^{i theta}`. Under the Cayley map the cap becomes a half-disk on the
//! real axis, so the normalized map is a closed-form composition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::cayley_boundary;
use crate::error::{invalid, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialRestrictionMap {
    pub theta: f64,
    pub delta: f64,
    /// Half-plane picture: center and radius of the half-disk.
    center: f64,
    radius: f64,
}

/// `(|Psi'(1)|, |Psi'(0)|, |Psi'(1)|^{5/8} |Psi'(0)|^{5/48})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialFactors {
    pub dprime_at_one: f64,
    pub dprime_at_zero: f64,
    pub probability: f64,
}

impl RadialRestrictionMap {
    pub fn new(theta: f64, delta: f64) -> Result<Self> {
        let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
        if !(delta > 0.0) || delta >= 1.0 {
            return Err(invalid("delta must lie in (0, 1)"));
        }
        if delta >= (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta)).norm() {
            return Err(invalid("obstacle reaches the marked point 1"));
        }
        let phi = 2.0 * (0.5 * delta).asin();
        let a1 = cayley_boundary(theta - phi)?;
        let a2 = cayley_boundary(theta + phi)?;
        Ok(Self { theta, delta, center: 0.5 * (a1 + a2), radius: 0.5 * (a1 - a2).abs() })
    }

    /// Half-angle subtended by the obstacle's feet.
    pub fn foot_angle(&self) -> f64 {
        2.0 * (0.5 * self.delta).asin()
    }

    pub fn half_plane_obstacle(&self) -> (f64, f64) {
        (self.center, self.radius)
    }

    /// Whether `z` in the closed disk lies in the closed cap.
    pub fn contains(&self, z: Complex64) -> bool {
        let phi = self.foot_angle();
        // Orthogonal circle: center sec(phi) e^{i theta}, radius tan(phi).
        let c = Complex64::from_polar(1.0 / phi.cos(), self.theta);
        (z - c).norm() <= phi.tan() && z.norm() <= 1.0 + 1e-15
    }

    /// Distance from `z` to the cap.
    pub fn distance(&self, z: Complex64) -> f64 {
        if self.contains(z) {
            return 0.0;
        }
        let phi = self.foot_angle();
        let c = Complex64::from_polar(1.0 / phi.cos(), self.theta);
        let r = phi.tan();
        let p = c + r * (z - c) / (z - c).norm();
        if p.norm() <= 1.0 {
            (z - p).norm()
        } else {
            let f1 = (z - Complex64::from_polar(1.0, self.theta - phi)).norm();
            let f2 = (z - Complex64::from_polar(1.0, self.theta + phi)).norm();
            f1.min(f2)
        }
    }

    fn h(&self, w: Complex64) -> Complex64 {
        let u = w - self.center;
        u + self.radius * self.radius / u
    }

    fn h_prime(&self, w: Complex64) -> Complex64 {
        let u = w - self.center;
        1.0 - self.radius * self.radius / (u * u)
    }

    /// `Psi(z)`, defined on the disk minus the cap.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-12 || self.contains(z) {
            return Err(invalid(format!("{z} is outside the slit disk")));
        }
        if (z - 1.0).norm() < 1e-300 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let w = I * (1.0 + z) / (1.0 - z);
        let hi = self.h(I);
        let v = (self.h(w) - hi.re) / hi.im;
        Ok((v - I) / (v + I))
    }

    pub fn factors(&self) -> RadialFactors {
        let hi = self.h(I);
        let s = hi.im;
        let d0 = (self.h_prime(I) / s).norm();
        RadialFactors {
            dprime_at_one: s,
            dprime_at_zero: d0,
            probability: s.powf(5.0 / 8.0) * d0.powf(5.0 / 48.0),
        }
    }
}

pub fn radial_restriction_factors(m: &RadialRestrictionMap) -> RadialFactors {
    m.factors()
}
