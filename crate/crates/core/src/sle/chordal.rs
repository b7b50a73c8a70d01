// SPDX-License-Identifier: Apache-2.0

//! Chordal Loewner evolution with piecewise-constant driving.
//!
//! Over a step of length `dt` with driving `U` the Loewner flow is the
//! vertical-slit map `g(z) = U + sqrt((z - U)^2 + 4 dt)`, so each step is
//! exact and the only error comes from freezing the driving function.

use num_complex::Complex64;
use rand::Rng;

use super::driving::{DrivingPath, TimeGrid};
use crate::conformal::sqrt_upper;
use crate::curve::{Geometry, PlanarCurve};
use crate::error::{Error, Result};

/// Forward step of capacity `dt` at `u`.
#[inline]
pub fn forward_step(z: Complex64, u: f64, dt: f64) -> Complex64 {
    let v = z - u;
    u + sqrt_upper(v * v + 4.0 * dt, v.re)
}

/// Forward step together with its derivative.
#[inline]
pub fn forward_step_d(z: Complex64, u: f64, dt: f64) -> (Complex64, Complex64) {
    let v = z - u;
    let s = sqrt_upper(v * v + 4.0 * dt, v.re);
    (u + s, v / s)
}

/// Inverse step: grows a vertical slit of height `2 sqrt(dt)` at `u`.
#[inline]
pub fn inverse_step(w: Complex64, u: f64, dt: f64) -> Complex64 {
    let v = w - u;
    u + sqrt_upper(v * v - 4.0 * dt, v.re)
}

/// `gamma(t_k) = f_1 o ... o f_k (U_k)`.
fn tip(path: &DrivingPath, k: usize) -> Complex64 {
    let (_, u) = path.step(k);
    let mut w = Complex64::new(u, 0.0);
    for j in (1..=k).rev() {
        let (dt, uj) = path.step(j);
        w = inverse_step(w, uj, dt);
    }
    w
}

/// Trace of the zipper curve at every grid time (O(N^2)).
pub fn trace_from_driving(path: &DrivingPath) -> Result<PlanarCurve> {
    trace_until(path, |_| false).map(|(c, _)| c)
}

/// As [`trace_from_driving`], stopping after the first point where `stop`
/// holds; also reports whether it did.
pub fn trace_until(path: &DrivingPath, stop: impl Fn(Complex64) -> bool) -> Result<(PlanarCurve, bool)> {
    let mut pts = vec![Complex64::new(path.values[0], 0.0)];
    let mut times = vec![0.0];
    let mut stopped = false;
    for k in 1..=path.steps() {
        let z = tip(path, k);
        if !z.re.is_finite() || !z.im.is_finite() || z.im < -1e-9 {
            return Err(Error::Numeric(format!("trace left the half-plane at step {k}")));
        }
        pts.push(Complex64::new(z.re, z.im.max(0.0)));
        times.push(path.times[k]);
        if stop(z) {
            stopped = true;
            break;
        }
    }
    Ok((PlanarCurve::with_times(pts, times, Geometry::HalfPlane)?, stopped))
}

pub fn chordal_trace<R: Rng + ?Sized>(kappa: f64, t_end: f64, n: usize, rng: &mut R) -> Result<PlanarCurve> {
    let grid = TimeGrid::uniform(t_end, n)?;
    let path = DrivingPath::brownian(kappa, &grid, 0.0, rng)?;
    trace_from_driving(&path)
}

/// Composed forward map `g_T` (defined off the hull, reflected below the axis).
pub fn forward_map(path: &DrivingPath, z: Complex64) -> Complex64 {
    let flip = z.im < 0.0;
    let mut w = if flip { z.conj() } else { z };
    for j in 1..=path.steps() {
        let (dt, u) = path.step(j);
        w = forward_step(w, u, dt);
    }
    if flip {
        w.conj()
    } else {
        w
    }
}

/// Coefficient `a` in `g_T(z) = z + a/z + ...`, by a contour integral on a
/// circle enclosing the hull; it should equal `2T`.
pub fn capacity_coefficient(path: &DrivingPath, radius: f64, nodes: usize) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..nodes {
        let th = (m as f64 + 0.5) * 2.0 * std::f64::consts::PI / nodes as f64;
        let z = Complex64::from_polar(radius, th);
        acc += (forward_map(path, z) - z) * z;
    }
    (acc / nodes as f64).re
}
