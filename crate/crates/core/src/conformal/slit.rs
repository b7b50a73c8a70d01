// SPDX-License-Identifier: Apache-2.0

//! Hydrodynamically normalized maps `H \ A -> H` fixing 0 and infinity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::schwarzian::{schwarzian_numeric, schwarzian_of_derivatives, Derivatives};
use super::sqrt_upper;
use crate::error::{invalid, Result};

/// Obstacle removed from the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SlitMap {
    /// Segment from `x0` to `x0 + i h`.
    VerticalSlit { x0: f64, h: f64 },
    /// Closed half-disk of radius `rho` centered at `x` on the real axis.
    HalfDisk { x: f64, rho: f64 },
}

impl SlitMap {
    pub fn vertical_slit(x0: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !x0.is_finite() || !h.is_finite() {
            return Err(invalid("slit height must be positive and finite"));
        }
        if x0 == 0.0 {
            return Err(invalid("slit must not touch the origin"));
        }
        Ok(SlitMap::VerticalSlit { x0, h })
    }

    pub fn half_disk(x: f64, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !x.is_finite() || !rho.is_finite() {
            return Err(invalid("half-disk radius must be positive and finite"));
        }
        if x.abs() <= rho {
            return Err(invalid("half-disk must not contain the origin"));
        }
        Ok(SlitMap::HalfDisk { x, rho })
    }

    /// Whether `z` lies on the obstacle (closed).
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            SlitMap::VerticalSlit { x0, h } => z.re == x0 && z.im >= 0.0 && z.im <= h,
            SlitMap::HalfDisk { x, rho } => (z - x).norm() <= rho && z.im >= 0.0,
        }
    }

    /// Euclidean distance from `z` to the obstacle.
    pub fn distance(&self, z: Complex64) -> f64 {
        match *self {
            SlitMap::VerticalSlit { x0, h } => {
                let y = z.im.clamp(0.0, h);
                Complex64::new(z.re - x0, z.im - y).norm()
            }
            SlitMap::HalfDisk { x, rho } => {
                if z.im >= 0.0 {
                    ((z - x).norm() - rho).max(0.0)
                } else {
                    let dx = ((z.re - x).abs() - rho).max(0.0);
                    Complex64::new(dx, z.im).norm()
                }
            }
        }
    }

    /// Largest distance from the origin to a point of the obstacle.
    pub fn reach(&self) -> f64 {
        match *self {
            SlitMap::VerticalSlit { x0, h } => (x0 * x0 + h * h).sqrt(),
            SlitMap::HalfDisk { x, rho } => x.abs() + rho,
        }
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(invalid("non-finite argument"));
        }
        let on = match *self {
            SlitMap::VerticalSlit { .. } => self.contains(z),
            SlitMap::HalfDisk { x, rho } => (z - x).norm() < rho && z.im >= 0.0,
        };
        if on {
            Err(invalid(format!("{z} lies on the obstacle")))
        } else {
            Ok(())
        }
    }

    /// Un-normalized map `psi`, with `Phi = psi - psi(0)`.
    fn psi(&self, z: Complex64) -> Complex64 {
        match *self {
            SlitMap::VerticalSlit { x0, h } => {
                let u = z - x0;
                sqrt_upper(u * u + h * h, u.re)
            }
            SlitMap::HalfDisk { x, rho } => {
                let u = z - x;
                u + rho * rho / u
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        Ok(self.psi(z) - self.psi(Complex64::new(0.0, 0.0)))
    }

    /// `[Phi', Phi'', Phi''']` from closed forms.
    pub fn derivatives(&self, z: Complex64) -> Result<Derivatives> {
        self.check_domain(z)?;
        Ok(match *self {
            SlitMap::VerticalSlit { x0, h } => {
                let u = z - x0;
                let p = self.psi(z);
                let h2 = h * h;
                [u / p, h2 / (p * p * p), -3.0 * h2 * u / p.powi(5)]
            }
            SlitMap::HalfDisk { x, rho } => {
                let u = z - x;
                let r2 = rho * rho;
                [1.0 - r2 / (u * u), 2.0 * r2 / u.powi(3), -6.0 * r2 / u.powi(4)]
            }
        })
    }

    /// `Phi'(0)`, the restriction factor of the obstacle.
    pub fn dprime_at_zero(&self) -> f64 {
        match *self {
            SlitMap::VerticalSlit { x0, h } => x0.abs() / (x0 * x0 + h * h).sqrt(),
            SlitMap::HalfDisk { x, rho } => 1.0 - rho * rho / (x * x),
        }
    }

    /// Coefficient of `1/z` at infinity, i.e. the half-plane capacity.
    pub fn capacity(&self) -> f64 {
        match *self {
            SlitMap::VerticalSlit { h, .. } => 0.5 * h * h,
            SlitMap::HalfDisk { rho, .. } => rho * rho,
        }
    }

    pub fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        schwarzian_of_derivatives(self.derivatives(z)?)
    }

    /// Same quantity through finite differences of [`Self::eval`].
    pub fn schwarzian_fd(&self, z: Complex64, step: f64) -> Result<Complex64> {
        self.check_domain(z)?;
        let f = |w: Complex64| self.psi(w);
        schwarzian_numeric(&f, z, step)
    }

    /// Mass of boundary bubbles at 0 hitting the obstacle: `-(5/48) S(0)`.
    pub fn bubble_mass(&self) -> Result<f64> {
        Ok(-5.0 / 48.0 * self.schwarzian(Complex64::new(0.0, 0.0))?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::schwarzian::DEFAULT_FD_STEP;
    use crate::conformal::Mobius;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn slit_derivative_at_zero() {
        let m = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        assert!((m.dprime_at_zero() - 0.5f64.sqrt()).abs() < 1e-15);
        let d = m.derivatives(c(0.0, 0.0)).unwrap();
        assert!((d[0].re - m.dprime_at_zero()).abs() < 1e-15);
        assert!((m.dprime_at_zero().powf(0.625) - 0.8053).abs() < 1e-4);
        assert_eq!(m.eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn vanishing_slit_is_identity() {
        let m = SlitMap::vertical_slit(-1.0, 1e-6).unwrap();
        assert!((m.dprime_at_zero() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn slit_schwarzian_and_bubble() {
        let m = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        let s = m.schwarzian(c(0.0, 0.0)).unwrap();
        assert!((s - c(-1.125, 0.0)).norm() < 1e-14);
        assert!((m.bubble_mass().unwrap() - 15.0 / 128.0).abs() < 1e-14);
        let fd = m.schwarzian_fd(c(0.0, 0.0), DEFAULT_FD_STEP).unwrap();
        assert!((fd - s).norm() < 1e-6, "{fd}");
    }

    #[test]
    fn hydrodynamic_normalization() {
        for m in [SlitMap::vertical_slit(-1.0, 1.0).unwrap(), SlitMap::half_disk(2.0, 0.5).unwrap()] {
            let z = c(0.0, 1e3);
            assert!(((m.eval(z).unwrap() / z) - 1.0).norm() < 1e-3);
            // z Phi(z) - z^2 -> const + capacity; compare two radii to cancel the constant term.
            let coef = |y: f64| {
                let z = c(0.0, y);
                let r = m.eval(z).unwrap() - z - (m.psi(c(1e9, 1e9)) - c(1e9, 1e9) - m.psi(c(0.0, 0.0)));
                (r * z).re
            };
            assert!((coef(1e4) - m.capacity()).abs() < 1e-3 * m.capacity().max(1.0), "{}", coef(1e4));
        }
    }

    #[test]
    fn continuous_across_real_axis() {
        let m = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        for k in 0..100 {
            let x = -5.0 + 10.0 * (k as f64 + 0.5) / 100.0;
            if (x - (-1.0)).abs() < 1e-9 {
                continue;
            }
            let on = m.eval(c(x, 0.0)).unwrap();
            let above = m.eval(c(x, 1e-9)).unwrap();
            assert!((on - above).norm() < 1e-6, "x = {x}");
            assert!(on.im.abs() < 1e-12);
        }
    }

    #[test]
    fn maps_into_upper_half_plane() {
        let m = SlitMap::vertical_slit(0.7, 2.0).unwrap();
        for k in 0..50 {
            let z = c(-3.0 + 0.13 * k as f64, 0.05 + 0.1 * k as f64);
            if m.contains(z) {
                continue;
            }
            assert!(m.eval(z).unwrap().im >= -1e-12);
        }
        assert!(m.eval(c(0.7, 1.0)).is_err());
    }

    #[test]
    fn half_disk_factors() {
        let m = SlitMap::half_disk(2.0, 1.0).unwrap();
        assert!((m.dprime_at_zero() - 0.75).abs() < 1e-15);
        assert_eq!(m.capacity(), 1.0);
        let fd = m.schwarzian_fd(c(0.0, 0.0), DEFAULT_FD_STEP).unwrap();
        assert!((fd - m.schwarzian(c(0.0, 0.0)).unwrap()).norm() < 1e-6);
        assert!(SlitMap::half_disk(0.5, 1.0).is_err());
    }

    #[test]
    fn schwarzian_invariant_under_post_mobius() {
        let m = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        let mob = Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(0.2, 0.0), c(1.0, 0.0)).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.3), c(-2.0, 0.7)] {
            let d = m.derivatives(z).unwrap();
            let w = m.eval(z).unwrap();
            let [g1, g2, g3] = mob.derivatives(w);
            let comp = [g1 * d[0], g2 * d[0] * d[0] + g1 * d[1], g3 * d[0].powi(3) + 3.0 * g2 * d[0] * d[1] + g1 * d[2]];
            let lhs = schwarzian_of_derivatives(comp).unwrap();
            assert!((lhs - m.schwarzian(z).unwrap()).norm() < 1e-12);
        }
    }
}
