// SPDX-License-Identifier: Apache-2.0

//! Capacity time grids and Brownian driving functions.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn uniform(t_end: f64, n: usize) -> Result<Self> {
        if n == 0 || !(t_end > 0.0) || !t_end.is_finite() {
            return Err(invalid("time grid needs N >= 1 and T > 0"));
        }
        Ok(Self { times: (0..=n).map(|k| t_end * k as f64 / n as f64).collect() })
    }

    /// Steps `max(dt_min, ratio * t)`: uniform at first, then geometric.
    pub fn graded(t_end: f64, dt_min: f64, ratio: f64) -> Result<Self> {
        if !(t_end > 0.0) || !(dt_min > 0.0) || !(ratio > 0.0) {
            return Err(invalid("graded grid needs positive T, dt_min and ratio"));
        }
        let mut times = vec![0.0];
        let mut t = 0.0f64;
        while t < t_end {
            let dt = dt_min.max(ratio * t);
            t = (t + dt).min(t_end);
            if t_end - t < 1e-12 * t_end {
                t = t_end;
            }
            times.push(t);
        }
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("times must start at 0 and increase strictly"));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }
}

/// `W_{t_i} = W_0 + sqrt(kappa) B_{t_i}` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingPath {
    pub kappa: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl DrivingPath {
    pub fn brownian<R: Rng + ?Sized>(kappa: f64, grid: &TimeGrid, w0: f64, rng: &mut R) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(invalid("kappa must be finite and nonnegative"));
        }
        let sk = kappa.sqrt();
        let times = grid.times().to_vec();
        let mut values = Vec::with_capacity(times.len());
        let mut w = w0;
        values.push(w);
        for win in times.windows(2) {
            let z: f64 = rng.sample(StandardNormal);
            w += sk * (win[1] - win[0]).sqrt() * z;
            values.push(w);
        }
        Ok(Self { kappa, times, values })
    }

    /// Constant driving `W = w0`.
    pub fn constant(grid: &TimeGrid, w0: f64) -> Self {
        Self { kappa: 0.0, times: grid.times().to_vec(), values: vec![w0; grid.times().len()] }
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// `(dt_j, U_j)` for step `j = 1..=N`, driving held at the right endpoint.
    pub fn step(&self, j: usize) -> (f64, f64) {
        (self.times[j] - self.times[j - 1], self.values[j])
    }
}

/// Parses `8/3`, `6` or `2.5`.
pub fn parse_kappa(s: &str) -> Result<f64> {
    let r = crate::saw::exponents::parse_rational(s)?;
    let v = *r.numer() as f64 / *r.denom() as f64;
    if !(0.0..8.0).contains(&v) {
        return Err(invalid("kappa must lie in [0, 8)"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn grids() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        assert_eq!(g.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = TimeGrid::graded(10.0, 1e-3, 0.1).unwrap();
        assert_eq!(g.end(), 10.0);
        assert!(g.steps() < 200, "{}", g.steps());
        assert!(TimeGrid::from_times(vec![0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn driving_is_deterministic_and_scaled() {
        let g = TimeGrid::uniform(1.0, 1000).unwrap();
        let a = DrivingPath::brownian(8.0 / 3.0, &g, 0.0, &mut substream(1, 3)).unwrap();
        let b = DrivingPath::brownian(8.0 / 3.0, &g, 0.0, &mut substream(1, 3)).unwrap();
        assert_eq!(a, b);
        // Quadratic variation ~ kappa T.
        let qv: f64 = a.values.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        assert!((qv - 8.0 / 3.0).abs() < 0.4, "{qv}");
    }

    #[test]
    fn kappa_parsing() {
        assert!((parse_kappa("8/3").unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(parse_kappa("9").is_err());
    }
}
