// SPDX-License-Identifier: Apache-2.0

//! Radial and full-plane Loewner evolution.
//!
//! With `K(z) = z / (1 + z)^2` mapping the disk onto the plane minus
//! `[1/4, inf)`, the radial flow over a step of length `dt` with driving
//! angle `U` is `z -> e^{iU} K^{-1}(e^{dt} K(e^{-iU} z))`: it removes a radial
//! slit ending at `e^{iU}` and multiplies the derivative at 0 by `e^{dt}`.

use num_complex::Complex64;
use rand::Rng;

use super::driving::{DrivingPath, TimeGrid};
use crate::conformal::fast_sqrt;
use crate::curve::{Geometry, PlanarCurve};
use crate::error::{invalid, Error, Result};

#[inline]
fn koebe(z: Complex64) -> Complex64 {
    let d = 1.0 + z;
    z / (d * d)
}

#[inline]
fn koebe_inv(v: Complex64) -> Complex64 {
    let s = fast_sqrt(1.0 - 4.0 * v);
    2.0 * v / (1.0 - 2.0 * v + s)
}

#[inline]
fn koebe_d(z: Complex64) -> Complex64 {
    (1.0 - z) / (1.0 + z).powi(3)
}

/// Forward radial step.
#[inline]
pub fn forward_step(z: Complex64, u: f64, dt: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, u);
    rot * koebe_inv(dt.exp() * koebe(z / rot))
}

/// Forward step and derivative.
#[inline]
pub fn forward_step_d(z: Complex64, u: f64, dt: f64) -> (Complex64, Complex64) {
    let rot = Complex64::from_polar(1.0, u);
    let x = z / rot;
    let e = dt.exp();
    let y = koebe_inv(e * koebe(x));
    (rot * y, e * koebe_d(x) / koebe_d(y))
}

#[inline]
pub fn inverse_step(w: Complex64, u: f64, dt: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, u);
    rot * koebe_inv((-dt).exp() * koebe(w / rot))
}

/// Radius of the slit tip after a step of capacity `dt`.
pub fn slit_tip(dt: f64) -> f64 {
    let e = dt.exp();
    2.0 * e - 1.0 - 2.0 * (e * e - e).sqrt()
}

fn tip(path: &DrivingPath, k: usize) -> Complex64 {
    let (_, u) = path.step(k);
    let mut w = Complex64::from_polar(1.0, u);
    for j in (1..=k).rev() {
        let (dt, uj) = path.step(j);
        w = inverse_step(w, uj, dt);
    }
    w
}

/// Radial trace in the unit disk from `e^{i W_0}` toward 0.
pub fn trace_from_driving(path: &DrivingPath) -> Result<PlanarCurve> {
    let mut pts = vec![Complex64::from_polar(1.0, path.values[0])];
    for k in 1..=path.steps() {
        let z = tip(path, k);
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 + 1e-9 {
            return Err(Error::Numeric(format!("radial trace left the disk at step {k}")));
        }
        pts.push(z);
    }
    PlanarCurve::with_times(pts, path.times.clone(), Geometry::Disk)
}

/// Radial SLE from a uniform boundary point when `w0` is `None`.
pub fn radial_trace<R: Rng + ?Sized>(kappa: f64, t_end: f64, n: usize, w0: Option<f64>, rng: &mut R) -> Result<PlanarCurve> {
    let grid = TimeGrid::uniform(t_end, n)?;
    let w0 = w0.unwrap_or_else(|| rng.gen_range(0.0..2.0 * std::f64::consts::PI));
    let path = DrivingPath::brownian(kappa, &grid, w0, rng)?;
    trace_from_driving(&path)
}

/// Composed forward map and its derivative.
pub fn forward_map_d(path: &DrivingPath, z: Complex64) -> (Complex64, Complex64) {
    let mut w = z;
    let mut d = Complex64::new(1.0, 0.0);
    for j in 1..=path.steps() {
        let (dt, u) = path.step(j);
        let (nw, dd) = forward_step_d(w, u, dt);
        w = nw;
        d *= dd;
    }
    (w, d)
}

/// Full-plane SLE from 0 to infinity on `[k_start, t_end]`, `k_start < t_end`.
///
/// The plane minus the disk of radius `e^{k_start}` is inverted to a disk of
/// radius `e^{-k_start}`; there the process is radial SLE with driving `-W`,
/// `W_{k_start}` uniform, and the trace is mapped back. This approximates
/// the process started at time minus infinity.
pub fn full_plane_trace<R: Rng + ?Sized>(kappa: f64, k_start: f64, t_end: f64, n: usize, rng: &mut R) -> Result<PlanarCurve> {
    if !(t_end > k_start) {
        return Err(invalid("full-plane trace needs K < T"));
    }
    let grid = TimeGrid::uniform(t_end - k_start, n)?;
    let w0: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let mut path = DrivingPath::brownian(kappa, &grid, w0, rng)?;
    for v in &mut path.values {
        *v = -*v;
    }
    let inner = trace_from_driving(&path)?;
    let scale = k_start.exp();
    let pts = inner.points.iter().map(|&z| scale / z).collect();
    let times = grid.times().iter().map(|t| t + k_start).collect();
    PlanarCurve::with_times(pts, times, Geometry::Plane)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::stats::{ks_one_sample, ks_two_sample};
    use std::f64::consts::PI;

    #[test]
    fn step_properties() {
        let dt = 0.01;
        let r = slit_tip(dt);
        // The tip is the preimage of the driving point.
        assert!((inverse_step(Complex64::new(1.0, 0.0), 0.0, dt) - r).norm() < 1e-12);
        assert!(forward_step(Complex64::new(0.0, 0.0), 0.3, dt).norm() < 1e-15);
        let z = Complex64::new(0.2, -0.4);
        assert!((inverse_step(forward_step(z, 0.7, dt), 0.7, dt) - z).norm() < 1e-13);
        let (_, d) = forward_step_d(Complex64::new(0.0, 0.0), 1.0, dt);
        assert!((d - dt.exp()).norm() < 1e-13);
    }

    #[test]
    fn starts_on_circle_and_kappa_zero_is_radial_segment() {
        let c = radial_trace(8.0 / 3.0, 1.0, 50, Some(0.4), &mut substream(1, 0)).unwrap();
        assert!((c.points[0] - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert!(c.respects_geometry());
        let g = TimeGrid::uniform(2.0, 200).unwrap();
        let c = trace_from_driving(&DrivingPath::constant(&g, 0.0)).unwrap();
        assert!(c.points.iter().all(|z| z.im.abs() < 1e-12 && z.re > 0.0));
        assert!(c.points.windows(2).all(|w| w[1].re < w[0].re));
    }

    #[test]
    fn derivative_at_origin_is_exp_t() {
        for t in [0.5, 1.0] {
            let g = TimeGrid::uniform(t, 400).unwrap();
            let p = DrivingPath::brownian(8.0 / 3.0, &g, 0.0, &mut substream(3, 0)).unwrap();
            let h = 1e-4;
            let num = (forward_map_d(&p, Complex64::new(h, 0.0)).0 - forward_map_d(&p, Complex64::new(-h, 0.0)).0) / (2.0 * h);
            assert!((num.norm() / t.exp() - 1.0).abs() < 1e-4, "{num}");
        }
    }

    #[test]
    fn full_plane_start_and_rotation_invariance() {
        let mut rng = substream(4, 0);
        let mut angles = Vec::new();
        for _ in 0..400 {
            let c = full_plane_trace(8.0 / 3.0, -5.0, 0.0, 100, &mut rng).unwrap();
            assert!(c.points[0].norm() <= (-4.0f64).exp());
            angles.push(c.points.last().unwrap().arg().rem_euclid(2.0 * PI));
        }
        let r = ks_one_sample(&angles, |x| x / (2.0 * PI)).unwrap();
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn full_plane_start_time_stability() {
        let mut rng = substream(5, 0);
        let a: Vec<f64> = (0..300).map(|_| full_plane_trace(8.0 / 3.0, -5.0, 0.0, 100, &mut rng).unwrap().points[100].norm()).collect();
        let b: Vec<f64> = (0..300).map(|_| full_plane_trace(8.0 / 3.0, -7.0, 0.0, 140, &mut rng).unwrap().points[140].norm()).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert!(r.p_value > 0.01, "{r:?}");
    }
}
