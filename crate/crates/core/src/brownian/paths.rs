// SPDX-License-Identifier: Apache-2.0

//! Half-plane excursions and Brownian loops.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::SlitMap;
use crate::curve::{Geometry, PlanarCurve};
use crate::error::{invalid, Result};
use crate::rng::substream;
use crate::sle::restriction::proportion;
use crate::stats::EstimateWithError;

/// Excursion from 0 into the upper half-plane on a uniform grid: the real
/// part is a Brownian motion, the imaginary part the norm of an independent
/// three-dimensional Brownian motion.
pub fn excursion<R: Rng + ?Sized>(t_end: f64, n: usize, rng: &mut R) -> Result<PlanarCurve> {
    if n == 0 || !(t_end > 0.0) {
        return Err(invalid("excursion needs N >= 1 and T > 0"));
    }
    let s = (t_end / n as f64).sqrt();
    let mut x = 0.0;
    let mut b = [0.0f64; 3];
    let mut pts = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    pts.push(Complex64::new(0.0, 0.0));
    times.push(0.0);
    for k in 1..=n {
        x += s * rng.sample::<f64, _>(StandardNormal);
        for c in &mut b {
            *c += s * rng.sample::<f64, _>(StandardNormal);
        }
        pts.push(Complex64::new(x, (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt()));
        times.push(t_end * k as f64 / n as f64);
    }
    PlanarCurve::with_times(pts, times, Geometry::HalfPlane)
}

/// Settings for the walk-on-spheres hitting test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkOnSpheres {
    /// Declared hit within this distance of an obstacle.
    pub hit_tol: f64,
    /// Declared escape beyond this multiple of the obstacle reach.
    pub escape_factor: f64,
    pub max_steps: usize,
}

impl Default for WalkOnSpheres {
    fn default() -> Self {
        Self { hit_tol: 1e-6, escape_factor: 1000.0, max_steps: 1_000_000 }
    }
}

/// Whether a full excursion from 0 avoids every obstacle.
///
/// The excursion is the image of a Brownian motion in `R^4` under
/// `(x, b) -> x + i|b|`, so it meets an obstacle exactly when the
/// four-dimensional motion meets the rotated copy of it. That motion is
/// advanced by walk on spheres: from a point at distance `d` from the
/// obstacle it jumps to a uniform point of the sphere of radius `d`, which is
/// the law of its exit position. A motion that leaves the ball of radius
/// `escape_factor * reach` returns with probability at most `escape_factor^-2`.
pub fn excursion_avoids<R: Rng + ?Sized>(obstacles: &[SlitMap], wos: &WalkOnSpheres, rng: &mut R) -> bool {
    if obstacles.is_empty() {
        return true;
    }
    let reach = obstacles.iter().map(SlitMap::reach).fold(0.0, f64::max);
    let escape2 = (wos.escape_factor * reach).powi(2);
    let mut p = [0.0f64; 4];
    for _ in 0..wos.max_steps {
        let y = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        let z = Complex64::new(p[0], y);
        let d = obstacles.iter().map(|m| m.distance(z)).fold(f64::INFINITY, f64::min);
        if d < wos.hit_tol {
            return false;
        }
        if p.iter().map(|c| c * c).sum::<f64>() > escape2 {
            return true;
        }
        let mut g = [0.0f64; 4];
        for c in &mut g {
            *c = rng.sample(StandardNormal);
        }
        let norm = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        for (c, gc) in p.iter_mut().zip(g) {
            *c += d * gc / norm;
        }
    }
    true
}

pub fn excursion_outcomes(obstacles: &[SlitMap], count: usize, seed: u64, wos: &WalkOnSpheres) -> Vec<bool> {
    (0..count)
        .into_par_iter()
        .map(|i| excursion_avoids(obstacles, wos, &mut substream(seed, i as u64)))
        .collect()
}

/// Fraction of groups of `group` excursions that jointly avoid.
pub fn joint_excursion_avoidance(outcomes: &[bool], group: usize) -> Result<EstimateWithError> {
    if group == 0 || outcomes.len() < group {
        return Err(invalid("not enough excursions for one group"));
    }
    let groups = outcomes.len() / group;
    let ok = outcomes.chunks_exact(group).filter(|c| c.iter().all(|&b| b)).count();
    Ok(proportion(ok, groups))
}

/// Rooted loop of duration `t_dur`: `B_t - (t / t_dur) B_{t_dur}` for a planar
/// Brownian motion `B`, closed exactly.
pub fn rooted_loop<R: Rng + ?Sized>(t_dur: f64, n: usize, rng: &mut R) -> Result<PlanarCurve> {
    if n == 0 || !(t_dur > 0.0) {
        return Err(invalid("loop needs N >= 1 and positive duration"));
    }
    let s = (t_dur / n as f64).sqrt();
    let mut raw = Vec::with_capacity(n + 1);
    let mut b = Complex64::new(0.0, 0.0);
    raw.push(b);
    for _ in 0..n {
        b += s * Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        raw.push(b);
    }
    let end = raw[n];
    let mut pts: Vec<Complex64> = raw.iter().enumerate().map(|(k, &z)| z - end * (k as f64 / n as f64)).collect();
    pts[n] = pts[0];
    let times = (0..=n).map(|k| t_dur * k as f64 / n as f64).collect();
    PlanarCurve::with_times(pts, times, Geometry::Plane)
}

/// Duration with density proportional to `1/t` on `[t_min, t_max]`, and the
/// weight `1/t` that turns rooted into unrooted loop measure.
pub fn loop_duration_sampler<R: Rng + ?Sized>(t_min: f64, t_max: f64, rng: &mut R) -> Result<(f64, f64)> {
    if !(t_min > 0.0) || !(t_max > t_min) || !t_max.is_finite() {
        return Err(invalid("need 0 < t_min < t_max"));
    }
    let t = (t_min.ln() + rng.gen::<f64>() * (t_max / t_min).ln()).exp();
    Ok((t, 1.0 / t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, mean_with_error};

    #[test]
    fn excursion_positivity_and_second_moment() {
        let mut rng = substream(1, 0);
        let mut y2 = Vec::new();
        for _ in 0..20_000 {
            let c = excursion(1.0, 4, &mut rng).unwrap();
            assert_eq!(c.points[0], Complex64::new(0.0, 0.0));
            assert!(c.points[1..].iter().all(|z| z.im > 0.0));
            y2.push(c.points[4].im.powi(2));
        }
        let m = mean_with_error(&y2);
        assert!((m.value - 3.0).abs() < 3.0 * m.std_error, "{m:?}");
    }

    #[test]
    fn loop_closure_and_midpoint_variance() {
        let mut rng = substream(2, 0);
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for _ in 0..20_000 {
            let c = rooted_loop(1.0, 8, &mut rng).unwrap();
            assert_eq!(c.points[0], c.points[8]);
            xs.push(c.points[4].re);
            vs.push(c.points[4].re.powi(2));
        }
        let m = mean_with_error(&xs);
        assert!(m.value.abs() < 3.0 * m.std_error);
        let v = mean_with_error(&vs);
        assert!((v.value - 0.25).abs() < 3.0 * v.std_error, "{v:?}");
    }

    #[test]
    fn durations_are_log_uniform() {
        let mut rng = substream(3, 0);
        let logs: Vec<f64> = (0..20_000).map(|_| loop_duration_sampler(0.1, 10.0, &mut rng).unwrap().0.ln()).collect();
        let (a, b) = (0.1f64.ln(), 10f64.ln());
        let r = ks_one_sample(&logs, |x| ((x - a) / (b - a)).clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value > 0.01, "{r:?}");
        assert!(loop_duration_sampler(1.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn unrooted_weighting_is_dilation_invariant() {
        // The t^{-1} dt law weighted by 1/t, applied to a functional of
        // t / r^2, matches the same functional after rescaling the window.
        let f = |t: f64| (-t).exp();
        let est = |lo: f64, hi: f64, seed: u64| {
            let mut rng = substream(seed, 0);
            let v: Vec<f64> = (0..40_000)
                .map(|_| {
                    let (t, w) = loop_duration_sampler(lo, hi, &mut rng).unwrap();
                    w * f(t) * t * (hi / lo).ln()
                })
                .collect();
            mean_with_error(&v)
        };
        let a = est(0.5, 2.0, 4);
        let b = est(0.5 * 4.0, 2.0 * 4.0, 5);
        // Under t -> 4t the integrand f(t/4) on the shifted window equals f(t) on the original.
        let c = {
            let mut rng = substream(5, 0);
            let v: Vec<f64> = (0..40_000)
                .map(|_| {
                    let (t, w) = loop_duration_sampler(2.0, 8.0, &mut rng).unwrap();
                    w * f(t / 4.0) * t * 4f64.ln()
                })
                .collect();
            mean_with_error(&v)
        };
        assert!((a.value - c.value).abs() < 3.0 * (a.std_error.hypot(c.std_error)), "{a:?} {c:?}");
        assert!(b.value < a.value);
    }

    #[test]
    fn excursion_cr1_small_sample() {
        let slit = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        let outs = excursion_outcomes(&[slit], 4000, 9, &WalkOnSpheres::default());
        let e = joint_excursion_avoidance(&outs, 1).unwrap();
        assert!((e.value - 0.5f64.sqrt()).abs() < 3.0 * e.std_error + 0.02, "{e:?}");
    }
}
