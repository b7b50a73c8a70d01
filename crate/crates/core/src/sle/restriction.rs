// SPDX-License-Identifier: Apache-2.0

//! Avoidance probabilities of boundary obstacles.
//!
//! Rather than drawing whole traces, the obstacle is carried forward by the
//! Loewner flow. For a tracked point `z` with image `w = g_t(z)` the quantity
//! `rho = Im w / |g_t'(z)|` (in the disk: `(1 - |w|^2) / |g_t'(z)|`) is within a
//! factor 4 of the distance from `z` to the hull and the boundary, so the
//! curve is declared to hit the obstacle once `rho` drops below `eta` times its
//! initial value. Sample points are refined wherever their spacing exceeds a
//! fraction of `rho`, the step size shrinks with the mapped distance between
//! the driving point and the obstacle, and the run ends once the obstacle's
//! image is small compared with its distance to the driving point.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chordal, radial};
use crate::conformal::{RadialRestrictionMap, SlitMap};
use crate::curve::PlanarCurve;
use crate::error::{invalid, Result};
use crate::rng::substream;
use crate::stats::EstimateWithError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowParams {
    /// Hit threshold on `rho / rho_0`.
    pub eta: f64,
    /// Refine when spacing exceeds `refine * rho`.
    pub refine: f64,
    /// Slit height per step at most `resolve` times the mapped distance.
    pub resolve: f64,
    /// Steps at most `ratio * t` (chordal) once past `t_start`.
    pub ratio: f64,
    pub t_start: f64,
    pub dt_min: f64,
    /// Largest step in the disk.
    pub dt_max_radial: f64,
    /// Stop once `(size / distance)^(8/kappa - 1)` is below this.
    pub tail_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    pub max_points: usize,
    /// Lowest tracked point on a slit, as a fraction of its height.
    pub foot_gap: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            eta: 1e-3,
            refine: 0.5,
            resolve: 0.2,
            ratio: 0.05,
            t_start: 1e-4,
            dt_min: 1e-12,
            dt_max_radial: 0.01,
            tail_tol: 1e-3,
            max_time: 1e4,
            max_steps: 200_000,
            max_points: 4096,
            foot_gap: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum FlowOutcome {
    Hit { time: f64 },
    Avoided { time: f64 },
    /// Ran out of time, steps or points; counted as avoidance and flagged.
    Undecided { time: f64 },
}

impl FlowOutcome {
    pub fn avoided(&self) -> bool {
        !matches!(self, FlowOutcome::Hit { .. })
    }
}

/// A boundary-attached obstacle curve `s -> z(s)`, `s` in `[0, 1]`.
trait Shape: Sync {
    fn point(&self, s: f64) -> Complex64;
    fn initial(&self, foot_gap: f64, refine: f64) -> Vec<f64>;
}

impl Shape for SlitMap {
    fn point(&self, s: f64) -> Complex64 {
        match *self {
            SlitMap::VerticalSlit { x0, h } => Complex64::new(x0, s * h),
            SlitMap::HalfDisk { x, rho } => x + Complex64::from_polar(rho, std::f64::consts::PI * (1.0 - s)),
        }
    }

    fn initial(&self, foot_gap: f64, refine: f64) -> Vec<f64> {
        let grow = 1.0 + 0.9 * refine;
        let mut left = vec![];
        let mut s = foot_gap;
        while s < 0.5 {
            left.push(s);
            s *= grow;
        }
        match self {
            SlitMap::VerticalSlit { .. } => {
                let mut v = left;
                let mut s = 0.5;
                while s < 1.0 {
                    v.push(s);
                    s += 0.1;
                }
                v.push(1.0);
                v
            }
            SlitMap::HalfDisk { .. } => {
                let mut v = left.clone();
                v.push(0.5);
                v.extend(left.iter().rev().map(|s| 1.0 - s));
                v
            }
        }
    }
}

/// The cap's inner arc.
struct CapArc {
    center: Complex64,
    radius: f64,
    b1: f64,
    b2: f64,
}

impl CapArc {
    fn new(m: &RadialRestrictionMap) -> Self {
        let phi = m.foot_angle();
        let center = Complex64::from_polar(1.0 / phi.cos(), m.theta);
        let radius = phi.tan();
        let f1 = Complex64::from_polar(1.0, m.theta - phi);
        let f2 = Complex64::from_polar(1.0, m.theta + phi);
        let b1 = (f1 - center).arg();
        let mut b2 = (f2 - center).arg();
        // Sweep through the direction of the origin.
        let mid = (-center).arg();
        let inside = |b: f64| {
            let lo = b1.min(b);
            let hi = b1.max(b);
            let mut m = mid;
            while m < lo {
                m += 2.0 * std::f64::consts::PI;
            }
            m <= hi
        };
        if !inside(b2) {
            b2 += if b2 > b1 { -2.0 * std::f64::consts::PI } else { 2.0 * std::f64::consts::PI };
        }
        Self { center, radius, b1, b2 }
    }
}

impl Shape for CapArc {
    fn point(&self, s: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, self.b1 + s * (self.b2 - self.b1))
    }

    fn initial(&self, foot_gap: f64, refine: f64) -> Vec<f64> {
        SlitMap::HalfDisk { x: 2.0, rho: 1.0 }.initial(foot_gap, refine)
    }
}

/// The domain-specific half of the flow.
trait Domain {
    fn step_d(&self, z: Complex64, u: f64, dt: f64) -> (Complex64, Complex64);
    fn rho(&self, w: Complex64, d: Complex64) -> f64;
    fn rho0(&self, z: Complex64) -> f64;
    fn anchor(&self, u: f64) -> Complex64;
    fn dt_cap(&self, t: f64, p: &FlowParams) -> f64;
    /// `(size, distance)` of the obstacle image relative to the driving point.
    fn spread(&self, ws: &[Complex64], u: f64) -> (f64, f64);
}

struct Chordal;

impl Domain for Chordal {
    fn step_d(&self, z: Complex64, u: f64, dt: f64) -> (Complex64, Complex64) {
        chordal::forward_step_d(z, u, dt)
    }
    fn rho(&self, w: Complex64, d: Complex64) -> f64 {
        w.im.max(0.0) / d.norm()
    }
    fn rho0(&self, z: Complex64) -> f64 {
        z.im
    }
    fn anchor(&self, u: f64) -> Complex64 {
        Complex64::new(u, 0.0)
    }
    fn dt_cap(&self, t: f64, p: &FlowParams) -> f64 {
        p.ratio * t.max(p.t_start)
    }
    fn spread(&self, ws: &[Complex64], u: f64) -> (f64, f64) {
        let lo = ws.iter().map(|w| w.re).fold(f64::INFINITY, f64::min);
        let hi = ws.iter().map(|w| w.re).fold(f64::NEG_INFINITY, f64::max);
        let c = 0.5 * (lo + hi);
        let r = ws.iter().map(|w| (w - c).norm()).fold(0.0, f64::max);
        (r, (c - u).abs())
    }
}

struct Radial;

impl Domain for Radial {
    fn step_d(&self, z: Complex64, u: f64, dt: f64) -> (Complex64, Complex64) {
        radial::forward_step_d(z, u, dt)
    }
    fn rho(&self, w: Complex64, d: Complex64) -> f64 {
        (1.0 - w.norm_sqr()).max(0.0) / d.norm()
    }
    fn rho0(&self, z: Complex64) -> f64 {
        1.0 - z.norm_sqr()
    }
    fn anchor(&self, u: f64) -> Complex64 {
        Complex64::from_polar(1.0, u)
    }
    fn dt_cap(&self, t: f64, p: &FlowParams) -> f64 {
        (p.ratio * t.max(p.t_start)).min(p.dt_max_radial)
    }
    fn spread(&self, ws: &[Complex64], u: f64) -> (f64, f64) {
        let mean: Complex64 = ws.iter().map(|w| w / w.norm().max(1e-300)).sum();
        let dir = Complex64::from_polar(1.0, mean.arg());
        let r = ws.iter().map(|w| (w - dir).norm()).fold(0.0, f64::max);
        (r, (dir - Complex64::from_polar(1.0, u)).norm())
    }
}

#[derive(Clone, Copy)]
struct Tracked {
    part: usize,
    s: f64,
    z: Complex64,
    w: Complex64,
    d: Complex64,
    rho0: f64,
}

fn run_flow<D: Domain, R: Rng + ?Sized>(
    dom: &D,
    shapes: &[&dyn Shape],
    kappa: f64,
    w0: f64,
    p: &FlowParams,
    rng: &mut R,
) -> FlowOutcome {
    if shapes.is_empty() {
        return FlowOutcome::Avoided { time: 0.0 };
    }
    let mut pts: Vec<Tracked> = Vec::new();
    for (part, sh) in shapes.iter().enumerate() {
        for s in sh.initial(p.foot_gap, p.refine) {
            let z = sh.point(s);
            pts.push(Tracked { part, s, z, w: z, d: Complex64::new(1.0, 0.0), rho0: dom.rho0(z) });
        }
    }
    let tail_exp = 8.0 / kappa.max(1e-9) - 1.0;
    let sk = kappa.sqrt();
    let mut history: Vec<(f64, f64)> = Vec::new();
    let (mut t, mut u) = (0.0f64, w0);
    let mut steps = 0usize;
    loop {
        let anchor = dom.anchor(u);
        let near = pts.iter().map(|q| (q.w - anchor).norm()).fold(f64::INFINITY, f64::min);
        let dt = dom.dt_cap(t, p).min((0.5 * p.resolve * near).powi(2)).max(p.dt_min);
        u += sk * dt.sqrt() * rng.sample::<f64, _>(StandardNormal);
        t += dt;
        steps += 1;
        history.push((dt, u));
        for q in pts.iter_mut() {
            let (w, d) = dom.step_d(q.w, u, dt);
            q.w = w;
            q.d *= d;
        }
        // Refine and test for hits.
        let mut i = 0;
        while i < pts.len() {
            let r = dom.rho(pts[i].w, pts[i].d);
            if !(r >= p.eta * pts[i].rho0) {
                return FlowOutcome::Hit { time: t };
            }
            if i + 1 < pts.len() && pts[i + 1].part == pts[i].part && pts.len() < p.max_points {
                let r2 = dom.rho(pts[i + 1].w, pts[i + 1].d);
                if (pts[i + 1].z - pts[i].z).norm() > p.refine * r.min(r2) {
                    let part = pts[i].part;
                    let s = 0.5 * (pts[i].s + pts[i + 1].s);
                    let z = shapes[part].point(s);
                    let (mut w, mut d) = (z, Complex64::new(1.0, 0.0));
                    for &(dt, uu) in &history {
                        let (nw, dd) = dom.step_d(w, uu, dt);
                        w = nw;
                        d *= dd;
                    }
                    pts.insert(i + 1, Tracked { part, s, z, w, d, rho0: dom.rho0(z) });
                    continue;
                }
            }
            i += 1;
        }
        let ws: Vec<Complex64> = pts.iter().map(|q| q.w).collect();
        let (size, dist) = dom.spread(&ws, u);
        if dist > size && tail_exp > 0.0 && (1.1 * size / dist).powf(tail_exp) < p.tail_tol {
            return FlowOutcome::Avoided { time: t };
        }
        if t > p.max_time || steps >= p.max_steps || pts.len() >= p.max_points {
            return FlowOutcome::Undecided { time: t };
        }
    }
}

/// One chordal run against a set of half-plane obstacles.
pub fn chordal_avoids<R: Rng + ?Sized>(obstacles: &[SlitMap], kappa: f64, p: &FlowParams, rng: &mut R) -> FlowOutcome {
    let shapes: Vec<&dyn Shape> = obstacles.iter().map(|m| m as &dyn Shape).collect();
    run_flow(&Chordal, &shapes, kappa, 0.0, p, rng)
}

/// One radial run from 1 toward 0 against a boundary cap.
pub fn radial_avoids<R: Rng + ?Sized>(m: &RadialRestrictionMap, kappa: f64, p: &FlowParams, rng: &mut R) -> FlowOutcome {
    let arc = CapArc::new(m);
    run_flow(&Radial, &[&arc as &dyn Shape], kappa, 0.0, p, rng)
}

/// Outcomes of `count` independent runs, run `i` on substream `i`.
pub fn chordal_outcomes(obstacles: &[SlitMap], kappa: f64, count: usize, seed: u64, p: &FlowParams) -> Vec<FlowOutcome> {
    (0..count)
        .into_par_iter()
        .map(|i| chordal_avoids(obstacles, kappa, p, &mut substream(seed, i as u64)))
        .collect()
}

pub fn radial_outcomes(m: &RadialRestrictionMap, kappa: f64, count: usize, seed: u64, p: &FlowParams) -> Vec<FlowOutcome> {
    (0..count)
        .into_par_iter()
        .map(|i| radial_avoids(m, kappa, p, &mut substream(seed, i as u64)))
        .collect()
}

/// Fraction of groups of `group` consecutive runs that all avoid.
pub fn joint_avoidance(outcomes: &[FlowOutcome], group: usize) -> Result<EstimateWithError> {
    if group == 0 || outcomes.len() < group {
        return Err(invalid("not enough runs for one group"));
    }
    let groups = outcomes.len() / group;
    let hits = outcomes
        .chunks_exact(group)
        .filter(|c| c.iter().all(FlowOutcome::avoided))
        .count();
    let mut est = proportion(hits, groups);
    let undecided = outcomes.iter().filter(|o| matches!(o, FlowOutcome::Undecided { .. })).count();
    if undecided > 0 {
        est.flag(format!("{undecided} runs undecided, counted as avoiding"));
    }
    Ok(est)
}

/// Binomial proportion with its standard error.
pub fn proportion(successes: usize, trials: usize) -> EstimateWithError {
    let p = successes as f64 / trials.max(1) as f64;
    EstimateWithError::new(p, (p * (1.0 - p) / trials.max(1) as f64).sqrt(), trials)
}

/// Avoidance estimate from explicit traces: a trace hits when one of its
/// points comes within `tube` of an obstacle or one of its segments crosses a
/// slit. Returns `(raw, tube)` where `raw` uses crossings only.
pub fn avoidance_probability(traces: &[PlanarCurve], obstacles: &[SlitMap], tube: f64) -> Result<(EstimateWithError, EstimateWithError)> {
    if traces.is_empty() {
        return Err(invalid("no traces"));
    }
    let crosses = |c: &PlanarCurve, m: &SlitMap| -> bool {
        c.points.windows(2).any(|w| match *m {
            SlitMap::VerticalSlit { x0, h } => {
                let (a, b) = (w[0], w[1]);
                if (a.re - x0) * (b.re - x0) > 0.0 || a.re == b.re {
                    return false;
                }
                let s = (x0 - a.re) / (b.re - a.re);
                let y = a.im + s * (b.im - a.im);
                (0.0..=h).contains(&y)
            }
            SlitMap::HalfDisk { .. } => m.contains(w[0]) || m.contains(w[1]),
        })
    };
    let mut raw = 0;
    let mut tubed = 0;
    let mut short = 0;
    let reach = obstacles.iter().map(SlitMap::reach).fold(0.0, f64::max);
    for c in traces {
        let hit = obstacles.iter().any(|m| crosses(c, m));
        if !hit {
            raw += 1;
            if !obstacles.iter().any(|m| c.points.iter().any(|&z| m.distance(z) < tube)) {
                tubed += 1;
            }
        }
        if c.max_abs() < 5.0 * reach {
            short += 1;
        }
    }
    let mut a = proportion(raw, traces.len());
    let mut b = proportion(tubed, traces.len());
    if short > 0 {
        let msg = format!("{short} traces end within 5x the obstacle reach");
        a.flag(msg.clone());
        b.flag(msg);
    }
    Ok((a, b))
}

/// Flow-based estimate with its prediction `Phi'(0)^{5/8}`.
pub fn restriction_test(obstacle: &SlitMap, kappa: f64, count: usize, seed: u64, p: &FlowParams) -> (EstimateWithError, f64) {
    let outs = chordal_outcomes(std::slice::from_ref(obstacle), kappa, count, seed, p);
    (joint_avoidance(&outs, 1).expect("count >= 1"), obstacle.dprime_at_zero().powf(5.0 / 8.0))
}

pub fn radial_avoidance_probability(m: &RadialRestrictionMap, kappa: f64, count: usize, seed: u64, p: &FlowParams) -> (EstimateWithError, f64) {
    let outs = radial_outcomes(m, kappa, count, seed, p);
    (joint_avoidance(&outs, 1).expect("count >= 1"), m.factors().probability)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sle::chordal::chordal_trace;

    #[test]
    fn no_obstacle_always_avoids() {
        let o = chordal_avoids(&[], 8.0 / 3.0, &FlowParams::default(), &mut substream(1, 0));
        assert_eq!(o, FlowOutcome::Avoided { time: 0.0 });
    }

    #[test]
    fn kappa_zero_threshold() {
        // W = 0 grows the imaginary axis; a slit at x0 never gets hit.
        let slit = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        let o = chordal_avoids(&[slit], 0.0, &FlowParams { max_time: 50.0, ..Default::default() }, &mut substream(1, 0));
        assert!(o.avoided());
        // Passing at distance 0.05 from a unit slit stays above the threshold,
        // passing at 1e-4 counts as a hit.
        let p = FlowParams { max_time: 50.0, ..Default::default() };
        let far = SlitMap::vertical_slit(0.05, 1.0).unwrap();
        assert!(chordal_avoids(&[far], 0.0, &p, &mut substream(1, 0)).avoided());
        let close = SlitMap::vertical_slit(1e-4, 1.0).unwrap();
        assert!(!chordal_avoids(&[close], 0.0, &p, &mut substream(1, 0)).avoided());
    }

    #[test]
    fn cap_arc_lies_inside_disk() {
        let m = RadialRestrictionMap::new(std::f64::consts::PI, 0.3).unwrap();
        let arc = CapArc::new(&m);
        for k in 0..=20 {
            let z = arc.point(k as f64 / 20.0);
            assert!(z.norm() <= 1.0 + 1e-12);
            assert!(z.re < 0.0);
        }
        assert!((arc.point(0.0).norm() - 1.0).abs() < 1e-12);
        assert!((arc.point(0.5).norm() - (1.0 / m.foot_angle().cos() - m.foot_angle().tan())).abs() < 1e-12);
    }

    #[test]
    fn small_sample_restriction_is_plausible() {
        let slit = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        let (est, pred) = restriction_test(&slit, 8.0 / 3.0, 400, 7, &FlowParams::default());
        assert!((est.value - pred).abs() < 4.0 * est.std_error + 0.03, "{est:?} vs {pred}");
    }

    #[test]
    fn trace_based_estimate_flags_short_traces() {
        let slit = SlitMap::vertical_slit(-1.0, 1.0).unwrap();
        let mut rng = substream(3, 0);
        let traces: Vec<_> = (0..5).map(|_| chordal_trace(8.0 / 3.0, 0.01, 20, &mut rng).unwrap()).collect();
        let (raw, tube) = avoidance_probability(&traces, &[slit], 0.05).unwrap();
        assert_eq!(raw.value, 1.0);
        assert_eq!(tube.value, 1.0);
        assert!(!raw.flags.is_empty());
    }
}
