// SPDX-License-Identifier: Apache-2.0

//! The experiment catalog: one runner per cross-check, each turning typed
//! parameters and a seed into a [`ComparisonReport`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::compare::{compare_functionals, saw_exit_samples, sle_exit_samples, SawSampling};
use super::config::{field_error, parse_params, positive, ExperimentConfig, Params};
use super::functionals::{exit_functionals, ExitFunctionals};
use super::output::write_artifacts;
use super::report::{ComparisonReport, Table};
use crate::brownian::{
    box_dimension, box_dimension_cells, excursion_outcomes, frontier, hull_fill, joint_excursion_avoidance,
    non_disconnecting_pair, rooted_loop, DisconnectParams, ScaleGrid, WalkOnSpheres,
};
use crate::conformal::{RadialRestrictionMap, SlitMap};
use crate::curve::{Geometry, PlanarCurve};
use crate::error::{invalid, Result};
use crate::lattice::{count_half_space, first_renewal_histogram, saw_counts, BridgeTable, HalfSpaceSampler};
use crate::rng::substream;
use crate::saw::{estimate_nu, exponent_algebra, parse_rational, pivot_uniformity, EstimateConfig, ExponentSet};
use crate::sle::chordal::{chordal_trace, trace_from_driving};
use crate::sle::driving::{DrivingPath, TimeGrid};
use crate::sle::restriction::{
    chordal_outcomes, joint_avoidance, radial_avoidance_probability, restriction_test, FlowParams,
};
use crate::stats::{binomial_upper_tail, ks_two_sample, weighted_linear_fit, EstimateWithError, TestResult};

const AGREE: f64 = 0.01;
const DISCRIMINATE: f64 = 1e-3;

pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
}

pub const CATALOG: &[ExperimentInfo] = &[
    ExperimentInfo { id: "exact-counts", summary: "SAW counts C_n, half-space counts and submultiplicativity" },
    ExperimentInfo { id: "connective-constant", summary: "ratio estimates (C_{n+2}/C_n)^(1/2) of the connective constant" },
    ExperimentInfo { id: "kesten", summary: "irreducible bridges, Kesten estimates and the first-renewal identity" },
    ExperimentInfo { id: "exponent-algebra", summary: "exact scaling exponents from (nu, gamma, rho)" },
    ExperimentInfo { id: "chordal-restriction", summary: "SLE avoidance of a slit versus Phi'(0)^(5/8)" },
    ExperimentInfo { id: "excursion-cr1", summary: "Brownian excursion avoidance of a slit versus Phi'(0)" },
    ExperimentInfo { id: "radial-restriction", summary: "radial SLE avoidance versus the closed form; kappa = 0 trace" },
    ExperimentInfo { id: "eight-vs-five", summary: "eight SLE_8/3 traces against five excursions against Phi'(0)^5" },
    ExperimentInfo { id: "frontier-dimension", summary: "box dimension of Brownian loop frontiers and SLE_8/3 traces" },
    ExperimentInfo { id: "nondisconnection", summary: "exponent of P(V_eps) for two Brownian paths" },
    ExperimentInfo { id: "nu-pivot", summary: "nu from pivot-sampled SAWs and pivot uniformity at n = 6" },
    ExperimentInfo { id: "saw-vs-sle", summary: "KS comparison of half-plane SAW and chordal SLE exit functionals" },
    ExperimentInfo { id: "schwarzian-bubble", summary: "symbolic versus finite-difference Schwarzian and bubble mass" },
    ExperimentInfo { id: "ks-null", summary: "uniformity of KS p-values on split halves of i.i.d. samples" },
];

pub fn catalog() -> &'static [ExperimentInfo] {
    CATALOG
}

macro_rules! experiments {
    ($($id:literal => $p:ty, $run:ident;)*) => {
        /// Parses and validates the parameters of `cfg` without running.
        pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
            match cfg.experiment.as_str() {
                $($id => parse_params::<$p>(&cfg.params).map(|_| ()),)*
                other => Err(unknown(other)),
            }
        }

        /// Default parameters of an experiment as JSON.
        pub fn default_params(id: &str) -> Result<Value> {
            match id {
                $($id => Ok(serde_json::to_value(<$p>::default())?),)*
                other => Err(unknown(other)),
            }
        }

        /// Runs an experiment; deterministic in `(config, seed)`.
        pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
            let mut report = match cfg.experiment.as_str() {
                $($id => $run(&parse_params::<$p>(&cfg.params)?, cfg.seed)?,)*
                other => return Err(unknown(other)),
            };
            report.config_hash = cfg.hash();
            Ok(report)
        }
    };
}

experiments! {
    "exact-counts" => CountsParams, run_counts;
    "connective-constant" => ConnectiveParams, run_connective;
    "kesten" => KestenParams, run_kesten;
    "exponent-algebra" => ExponentParams, run_exponents;
    "chordal-restriction" => ChordalParams, run_chordal;
    "excursion-cr1" => ExcursionParams, run_excursion;
    "radial-restriction" => RadialParams, run_radial;
    "eight-vs-five" => EightFiveParams, eight_vs_five;
    "frontier-dimension" => FrontierParams, run_frontier;
    "nondisconnection" => NondisconnectParams, run_nondisconnection;
    "nu-pivot" => NuParams, run_nu;
    "saw-vs-sle" => SawVsSleParams, saw_vs_sle_comparison;
    "schwarzian-bubble" => SchwarzianParams, run_schwarzian;
    "ks-null" => KsNullParams, run_ks_null;
}

fn unknown(id: &str) -> crate::error::Error {
    let ids: Vec<&str> = CATALOG.iter().map(|e| e.id).collect();
    invalid(format!("unknown experiment `{id}`; known: {}", ids.join(", ")))
}

/// Runs the experiment and writes its artifacts under `dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<(ComparisonReport, Vec<PathBuf>)> {
    let report = run_experiment(cfg)?;
    let written = write_artifacts(&report, dir)?;
    Ok((report, written))
}

fn slit(field: &str, x0: f64, h: f64) -> Result<SlitMap> {
    SlitMap::vertical_slit(x0, h).map_err(|e| field_error(field, e.to_string()))
}

// ---------------------------------------------------------------- lattice

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountsParams {
    pub max_n: usize,
}

impl Default for CountsParams {
    fn default() -> Self {
        Self { max_n: 10 }
    }
}

impl Params for CountsParams {
    fn validate(&self) -> Result<()> {
        if !(1..=20).contains(&self.max_n) {
            return Err(field_error("max_n", "must lie in 1..=20"));
        }
        Ok(())
    }
}

fn run_counts(p: &CountsParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("exact-counts", seed);
    let c = saw_counts(p.max_n, 2)?;
    let mut t = Table::new("counts", &["n", "saws", "half_space"]);
    for (n, &cn) in c.iter().enumerate().skip(1) {
        t.push([n.to_string(), cn.to_string(), count_half_space(n, 2)?.to_string()]);
    }
    r.table(t);
    r.check("C_1 = 4", c[1] == 4);
    let mut sub = true;
    for m in 1..=p.max_n {
        for n in 1..=p.max_n - m {
            sub &= c[m + n] as u128 <= c[m] as u128 * c[n] as u128;
        }
    }
    r.check("C_{m+n} <= C_m C_n", sub);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectiveParams {
    pub max_n: usize,
    /// Accepted band for the ratio estimates at the three largest `n`.
    pub band: [f64; 2],
}

impl Default for ConnectiveParams {
    fn default() -> Self {
        Self { max_n: 20, band: [2.55, 2.75] }
    }
}

impl Params for ConnectiveParams {
    fn validate(&self) -> Result<()> {
        if !(6..=20).contains(&self.max_n) {
            return Err(field_error("max_n", "must lie in 6..=20"));
        }
        if !(self.band[0] < self.band[1]) {
            return Err(field_error("band", "must be an increasing pair"));
        }
        Ok(())
    }
}

fn run_connective(p: &ConnectiveParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("connective-constant", seed);
    let c = saw_counts(p.max_n, 2)?;
    let mut t = Table::new("ratios", &["n", "c_n", "c_n_plus_2", "ratio_estimate"]);
    for n in 1..=p.max_n - 2 {
        let est = (c[n + 2] as f64 / c[n] as f64).sqrt();
        t.push([n.to_string(), c[n].to_string(), c[n + 2].to_string(), format!("{est:.6}")]);
        if n + 4 >= p.max_n {
            r.within(&format!("ratio n={n}"), &EstimateWithError::new(est, 0.0, 1), p.band[0], p.band[1]);
        }
    }
    r.table(t);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KestenParams {
    pub max_k: usize,
    pub beta_bound: f64,
}

impl Default for KestenParams {
    fn default() -> Self {
        Self { max_k: 14, beta_bound: 2.7 }
    }
}

impl Params for KestenParams {
    fn validate(&self) -> Result<()> {
        if !(2..=18).contains(&self.max_k) {
            return Err(field_error("max_k", "must lie in 2..=18"));
        }
        Ok(())
    }
}

fn run_kesten(p: &KestenParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("kesten", seed);
    let table = BridgeTable::build(p.max_k, 2)?;
    let mut t = Table::new("kesten", &["k", "lambda_k", "upsilon_k", "beta_k"]);
    let mut betas = Vec::new();
    for k in 1..=p.max_k {
        let b = table.kesten_beta(k)?;
        betas.push(b);
        t.push([
            k.to_string(),
            table.irreducible_counts[k - 1].to_string(),
            table.half_counts[k - 1].to_string(),
            format!("{b:.8}"),
        ]);
    }
    r.table(t);
    r.check("beta_K strictly increasing for K >= 2", betas[1..].windows(2).all(|w| w[1] > w[0]));
    r.check(&format!("beta_K < {}", p.beta_bound), betas.iter().all(|&b| b < p.beta_bound));
    let mut identity = true;
    let mut h = Table::new("first_renewal", &["n", "k", "count", "lambda_k_upsilon_n_minus_k"]);
    for n in 2..=p.max_k {
        let hist = first_renewal_histogram(n, 2)?;
        for (k, &count) in hist.iter().enumerate().take(n).skip(1) {
            let rhs = table.irreducible_counts[k - 1] * table.half_counts[n - k - 1];
            identity &= count == rhs;
            h.push([n, k, count as usize, rhs as usize]);
        }
    }
    r.table(h);
    r.check("first-renewal identity", identity);
    r.record("beta_K", &EstimateWithError::new(table.beta_estimate, 0.0, 1));
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentParams {
    pub nu: String,
    pub gamma: String,
    pub rho: String,
}

impl Default for ExponentParams {
    fn default() -> Self {
        Self { nu: "3/4".into(), gamma: "43/32".into(), rho: "25/64".into() }
    }
}

impl Params for ExponentParams {
    fn validate(&self) -> Result<()> {
        for (f, v) in [("nu", &self.nu), ("gamma", &self.gamma), ("rho", &self.rho)] {
            parse_rational(v).map_err(|e| field_error(f, e.to_string()))?;
        }
        Ok(())
    }
}

fn run_exponents(p: &ExponentParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("exponent-algebra", seed);
    let (nu, gamma, rho) = (parse_rational(&p.nu)?, parse_rational(&p.gamma)?, parse_rational(&p.rho)?);
    let e = exponent_algebra(nu, gamma, rho)?;
    let mut t = Table::new("exponents", &["name", "value"]);
    for (name, v) in [("a", e.a), ("b", e.b), ("a_prime", e.a_prime), ("b_prime", e.b_prime), ("alpha", e.alpha)] {
        t.push([name.to_string(), v.to_string()]);
    }
    r.table(t);
    let two = crate::saw::Rational::from_integer(2);
    r.check("a + b = 2 + (rho - gamma) / nu", e.a + e.b == two + (rho - gamma) / nu);
    let planar = ExponentSet::planar();
    if (nu, gamma, rho) == (planar.nu, planar.gamma, planar.rho) {
        r.check("planar values", e == planar);
    }
    Ok(r)
}

// ---------------------------------------------------------------- restriction

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChordalParams {
    pub samples: usize,
    pub kappa: f64,
    pub x0: f64,
    pub h: f64,
    pub flow: FlowParams,
}

impl Default for ChordalParams {
    fn default() -> Self {
        Self { samples: 10_000, kappa: 8.0 / 3.0, x0: -1.0, h: 1.0, flow: FlowParams::default() }
    }
}

impl Params for ChordalParams {
    fn validate(&self) -> Result<()> {
        positive("samples", self.samples)?;
        if !(self.kappa > 0.0 && self.kappa <= 4.0) {
            return Err(field_error("kappa", "restriction needs 0 < kappa <= 4"));
        }
        slit("x0", self.x0, self.h).map(|_| ())
    }
}

fn run_chordal(p: &ChordalParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("chordal-restriction", seed);
    let a = slit("x0", p.x0, p.h)?;
    let (est, pred) = restriction_test(&a, p.kappa, p.samples, seed, &p.flow);
    r.convention("prediction Phi'(0)^((6 - kappa) / (2 kappa)); tolerance 3 SE + 0.02");
    r.compare("avoidance", &est, pred, 3.0, 0.02);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcursionParams {
    pub samples: usize,
    pub x0: f64,
    pub h: f64,
    pub walk: WalkOnSpheres,
}

impl Default for ExcursionParams {
    fn default() -> Self {
        Self { samples: 10_000, x0: -1.0, h: 1.0, walk: WalkOnSpheres::default() }
    }
}

impl Params for ExcursionParams {
    fn validate(&self) -> Result<()> {
        positive("samples", self.samples)?;
        slit("x0", self.x0, self.h).map(|_| ())
    }
}

fn run_excursion(p: &ExcursionParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("excursion-cr1", seed);
    let a = slit("x0", p.x0, p.h)?;
    let outs = excursion_outcomes(&[a], p.samples, seed, &p.walk);
    let est = joint_excursion_avoidance(&outs, 1)?;
    r.compare("avoidance", &est, a.dprime_at_zero(), 3.0, 0.02);
    r.raw("outcomes", outs.iter().map(|&b| serde_json::json!({ "avoided": b })));
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialParams {
    pub samples: usize,
    pub kappa: f64,
    pub theta: f64,
    pub delta: f64,
    pub flow: FlowParams,
    /// Steps of the deterministic kappa = 0 trace.
    pub zero_kappa_steps: usize,
}

impl Default for RadialParams {
    fn default() -> Self {
        Self { samples: 10_000, kappa: 8.0 / 3.0, theta: PI, delta: 0.3, flow: FlowParams::default(), zero_kappa_steps: 1000 }
    }
}

impl Params for RadialParams {
    fn validate(&self) -> Result<()> {
        positive("samples", self.samples)?;
        positive("zero_kappa_steps", self.zero_kappa_steps)?;
        RadialRestrictionMap::new(self.theta, self.delta).map_err(|e| field_error("delta", e.to_string()))?;
        Ok(())
    }
}

fn run_radial(p: &RadialParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("radial-restriction", seed);
    let m = RadialRestrictionMap::new(p.theta, p.delta)?;
    let (est, pred) = radial_avoidance_probability(&m, p.kappa, p.samples, seed, &p.flow);
    let f = m.factors();
    let mut t = Table::new("factors", &["dprime_at_one", "dprime_at_zero", "probability"]);
    t.push([f.dprime_at_one, f.dprime_at_zero, f.probability]);
    r.table(t);
    r.compare("avoidance", &est, pred, 3.0, 0.02);
    let grid = TimeGrid::uniform(1.0, p.zero_kappa_steps)?;
    let c = trace_from_driving(&DrivingPath::constant(&grid, 0.0))?;
    let err = c
        .points
        .iter()
        .zip(grid.times())
        .map(|(z, &t)| (z - Complex64::new(0.0, 2.0 * t.sqrt())).norm())
        .fold(0.0, f64::max);
    r.record("kappa=0 max deviation from 2i sqrt(t)", &EstimateWithError::new(err, 0.0, c.points.len()));
    r.check("kappa = 0 trace equals 2i sqrt(t) to 1e-9", err <= 1e-9);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EightFiveParams {
    /// Groups of eight traces and of five excursions.
    pub groups: usize,
    pub x0: f64,
    pub h: f64,
    pub flow: FlowParams,
    pub walk: WalkOnSpheres,
}

impl Default for EightFiveParams {
    fn default() -> Self {
        Self { groups: 4000, x0: -1.0, h: 1.0, flow: FlowParams::default(), walk: WalkOnSpheres::default() }
    }
}

impl Params for EightFiveParams {
    fn validate(&self) -> Result<()> {
        positive("groups", self.groups)?;
        slit("x0", self.x0, self.h).map(|_| ())
    }
}

/// Joint avoidance of a slit by eight SLE_8/3 traces, by five excursions and
/// the closed form `Phi'(0)^5`, compared pairwise.
pub fn eight_vs_five(p: &EightFiveParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("eight-vs-five", seed);
    let a = slit("x0", p.x0, p.h)?;
    let sle = chordal_outcomes(&[a], 8.0 / 3.0, 8 * p.groups, substream_seed(seed, 0), &p.flow);
    let eight = joint_avoidance(&sle, 8)?;
    let exc = excursion_outcomes(&[a], 5 * p.groups, substream_seed(seed, 1), &p.walk);
    let five = joint_excursion_avoidance(&exc, 5)?;
    let closed = a.dprime_at_zero().powi(5);
    r.convention("pairwise tolerance: 3 joint SE + 0.03");
    r.compare("eight SLE_8/3 vs closed form", &eight, closed, 3.0, 0.03);
    r.compare("five excursions vs closed form", &five, closed, 3.0, 0.03);
    let diff = EstimateWithError::new(eight.value - five.value, eight.std_error.hypot(five.std_error), p.groups);
    r.compare("eight SLE_8/3 - five excursions", &diff, 0.0, 3.0, 0.03);
    let mut t = Table::new("estimates", &["route", "value", "std_error"]);
    t.push(["sle8".to_string(), eight.value.to_string(), eight.std_error.to_string()]);
    t.push(["excursion5".to_string(), five.value.to_string(), five.std_error.to_string()]);
    t.push(["closed_form".to_string(), closed.to_string(), "0".to_string()]);
    r.table(t);
    Ok(r)
}

/// Derived seed for an independent sub-experiment.
fn substream_seed(seed: u64, k: u64) -> u64 {
    use rand::RngCore;
    substream(seed, 1 << 40 | k).next_u64()
}

// ---------------------------------------------------------------- brownian

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontierParams {
    pub loops: usize,
    pub loop_steps: usize,
    /// Grid cells across the loop diameter.
    pub loop_cells: usize,
    /// Box sizes `2^k` cells.
    pub loop_scales: ScaleGrid,
    pub traces: usize,
    pub trace_points: usize,
    /// Box sizes `diameter * 2^-k`.
    pub trace_scales: ScaleGrid,
}

impl Default for FrontierParams {
    fn default() -> Self {
        Self {
            loops: 4,
            loop_steps: 1 << 22,
            loop_cells: 1024,
            loop_scales: ScaleGrid { k_min: 2, k_max: 9 },
            traces: 4,
            trace_points: 20_000,
            trace_scales: ScaleGrid { k_min: 2, k_max: 9 },
        }
    }
}

impl Params for FrontierParams {
    fn validate(&self) -> Result<()> {
        positive("loops", self.loops)?;
        positive("traces", self.traces)?;
        positive("loop_steps", self.loop_steps)?;
        positive("trace_points", self.trace_points)?;
        if self.loop_cells < 64 {
            return Err(field_error("loop_cells", "must be at least 64"));
        }
        self.loop_scales.validate().map_err(|e| field_error("loop_scales", e.to_string()))?;
        self.trace_scales.validate().map_err(|e| field_error("trace_scales", e.to_string()))?;
        if (1usize << self.loop_scales.k_max) > self.loop_cells {
            return Err(field_error("loop_scales", "largest box exceeds the grid"));
        }
        Ok(())
    }
}

fn combine(es: &[EstimateWithError]) -> EstimateWithError {
    let v: Vec<f64> = es.iter().map(|e| e.value).collect();
    let mut m = crate::stats::mean_with_error(&v);
    if es.len() < 2 {
        m.std_error = es[0].std_error;
    }
    m
}

fn run_frontier(p: &FrontierParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("frontier-dimension", seed);
    let mut t = Table::new("dimensions", &["source", "index", "dimension", "fit_se"]);
    let loops: Vec<Result<EstimateWithError>> = (0..p.loops)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let l = rooted_loop(1.0, p.loop_steps, &mut rng)?;
            let h = hull_fill(std::slice::from_ref(&l), l.diameter() / p.loop_cells as f64)?;
            let f = frontier(&h.region)?;
            box_dimension_cells(&f.cells, p.loop_scales)
        })
        .collect();
    let loops = loops.into_iter().collect::<Result<Vec<_>>>()?;
    let traces: Vec<Result<EstimateWithError>> = (0..p.traces)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, (1 << 32) + i as u64);
            let c = chordal_trace(8.0 / 3.0, 1.0, p.trace_points, &mut rng)?;
            box_dimension(&c, p.trace_scales)
        })
        .collect();
    let traces = traces.into_iter().collect::<Result<Vec<_>>>()?;
    for (i, e) in loops.iter().enumerate() {
        t.push(["loop".to_string(), i.to_string(), e.value.to_string(), e.std_error.to_string()]);
    }
    for (i, e) in traces.iter().enumerate() {
        t.push(["sle".to_string(), i.to_string(), e.value.to_string(), e.std_error.to_string()]);
    }
    r.table(t);
    let seg = PlanarCurve::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], Geometry::Plane);
    let seg_dim = box_dimension(&seg, p.trace_scales)?;
    r.compare("segment calibration", &seg_dim, 1.0, 0.0, 0.02);
    let (ld, sd) = (combine(&loops), combine(&traces));
    r.compare("loop frontier dimension", &ld, 4.0 / 3.0, 0.0, 0.1);
    r.compare("SLE_8/3 trace dimension", &sd, 4.0 / 3.0, 0.0, 0.1);
    let joint = (ld.value - sd.value).abs() <= 2.0 * ld.std_error.hypot(sd.std_error);
    if !joint {
        r.flag("loop and SLE dimension estimates differ by more than two joint SE");
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NondisconnectParams {
    pub eps: Vec<f64>,
    pub target_accepts: usize,
    pub grid: DisconnectParams,
}

impl Default for NondisconnectParams {
    fn default() -> Self {
        Self { eps: vec![0.2, 0.1, 0.05], target_accepts: 400, grid: DisconnectParams::default() }
    }
}

impl Params for NondisconnectParams {
    fn validate(&self) -> Result<()> {
        positive("target_accepts", self.target_accepts)?;
        if self.eps.len() < 2 || self.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(field_error("eps", "need at least two values in (0, 1)"));
        }
        Ok(())
    }
}

fn run_nondisconnection(p: &NondisconnectParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("nondisconnection", seed);
    let mut t = Table::new("probabilities", &["eps", "p_hat", "se", "trials", "accepts"]);
    let (mut xs, mut ys, mut ss) = (Vec::new(), Vec::new(), Vec::new());
    let mut ps = Vec::new();
    for (i, &eps) in p.eps.iter().enumerate() {
        let nd = non_disconnecting_pair(eps, p.target_accepts, substream_seed(seed, i as u64), &p.grid)?;
        let e = &nd.probability;
        t.push([eps.to_string(), e.value.to_string(), e.std_error.to_string(), nd.trials.to_string(), nd.accepts.to_string()]);
        xs.push(eps.ln());
        ys.push(e.value.ln());
        ss.push(e.std_error / e.value);
        ps.push((eps, e.value));
    }
    r.table(t);
    let mut sorted = ps.clone();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    r.check("P(V_eps) decreasing as eps shrinks", sorted.windows(2).all(|w| w[1].1 < w[0].1));
    let fit = weighted_linear_fit(&xs, &ys, &ss)?;
    let lo = p.eps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p.eps.iter().copied().fold(0.0, f64::max);
    let slope = EstimateWithError::new(fit.slope, fit.slope_se, xs.len()).with_window(lo, hi);
    r.compare("exponent of P(V_eps)", &slope, 4.0 / 3.0, 0.0, 0.15);
    let eta = EstimateWithError::new(fit.slope / 2.0, fit.slope_se / 2.0, xs.len());
    r.record("2-disconnection exponent eta = slope / 2", &eta);
    Ok(r)
}

// ---------------------------------------------------------------- SAW

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NuParams {
    pub lengths: Vec<usize>,
    pub samples: usize,
    pub uniformity_draws: usize,
}

impl Default for NuParams {
    fn default() -> Self {
        Self { lengths: vec![100, 200, 400, 800], samples: 2000, uniformity_draws: 200_000 }
    }
}

impl Params for NuParams {
    fn validate(&self) -> Result<()> {
        if self.lengths.len() < 3 || self.lengths.iter().any(|&n| n < 2) {
            return Err(field_error("lengths", "need at least three lengths >= 2"));
        }
        if self.samples < 32 {
            return Err(field_error("samples", "need at least 32"));
        }
        if self.uniformity_draws < 5 * 780 {
            return Err(field_error("uniformity_draws", "need at least 3900"));
        }
        Ok(())
    }
}

fn run_nu(p: &NuParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("nu-pivot", seed);
    let est = estimate_nu(&EstimateConfig::new(p.lengths.clone(), p.samples, seed))?;
    let mut t = Table::new("lengths", &["n", "mean_r2", "mean_r2_se", "acceptance"]);
    for row in &est.rows {
        t.push([row.n.to_string(), row.mean_r2.value.to_string(), row.mean_r2.std_error.to_string(), row.acceptance.to_string()]);
    }
    r.table(t);
    r.compare("nu (end-to-end)", &est.end_to_end, 0.75, 0.0, 0.03);
    r.record("nu (diameter)", &est.diameter);
    let (chi, seen) = pivot_uniformity(6, p.uniformity_draws, 5, substream_seed(seed, 7))?;
    r.check("pivot visits all 780 six-step walks", seen == 780);
    r.test("pivot uniformity chi-square (n = 6)", &chi, AGREE, true);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SawVsSleParams {
    pub saw: SawSampling,
    pub samples: usize,
    pub sle_points: usize,
    pub kappa: f64,
    pub alt_kappa: f64,
}

impl Default for SawVsSleParams {
    fn default() -> Self {
        Self {
            saw: SawSampling::default(),
            samples: 10_000,
            sle_points: 1000,
            kappa: 8.0 / 3.0,
            alt_kappa: 6.0,
        }
    }
}

impl Params for SawVsSleParams {
    fn validate(&self) -> Result<()> {
        self.saw.validate().map_err(|e| field_error("saw", e.to_string()))?;
        if self.samples < 100 {
            return Err(field_error("samples", "need at least 100"));
        }
        if self.sle_points < 50 {
            return Err(field_error("sle_points", "need at least 50"));
        }
        for (f, k) in [("kappa", self.kappa), ("alt_kappa", self.alt_kappa)] {
            if !(k > 0.0 && k < 8.0) {
                return Err(field_error(f, "must lie in (0, 8)"));
            }
        }
        Ok(())
    }
}

fn functional_rows(r: &mut ComparisonReport, label: &str, tests: &[TestResult; 3], agree: bool) -> Vec<f64> {
    let mut ps = Vec::new();
    for (name, t) in ExitFunctionals::NAMES.iter().zip(tests) {
        if agree {
            r.test(&format!("{label}: {name}"), t, AGREE, true);
        } else {
            r.inform(&format!("{label}: {name}"), t);
        }
        ps.push(t.p_value);
    }
    ps
}

/// Half-plane SAWs against chordal SLE traces through three scale-invariant
/// functionals of the path up to its exit from a half-disk: exit angle,
/// rightmost extent and the side of the point `(R/2) e^{i pi/3}`.
pub fn saw_vs_sle_comparison(p: &SawVsSleParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("saw-vs-sle", seed);
    r.convention("agreement: KS p > 0.01; discrimination: some KS p < 0.001");
    r.convention("SLE rightmost extent rounded to the walk's lattice spacing 1/R");
    let (saw, saw_missed) = saw_exit_samples(&p.saw, p.samples, substream_seed(seed, 0))?;
    let (sle, sle_missed) = sle_exit_samples(p.kappa, p.samples, p.sle_points, substream_seed(seed, 1))?;
    let (alt, _) = sle_exit_samples(p.alt_kappa, p.samples, p.sle_points, substream_seed(seed, 2))?;
    r.flag(format!(
        "finite-size: walks of {} steps on a half-disk of radius {} lattice units; SLE with {} capacity steps",
        p.saw.length, p.saw.radius, p.sle_points
    ));
    if saw_missed + sle_missed > 0 {
        r.flag(format!("{saw_missed} walks and {sle_missed} traces never left the half-disk"));
    }
    if saw.len() < p.samples / 2 || sle.len() < p.samples / 2 {
        r.flag("insufficient samples after exit filtering");
        r.passed = false;
    }
    let q = |v: &[ExitFunctionals]| v.iter().map(|f| f.on_lattice(p.saw.radius)).collect::<Vec<_>>();
    let (sle, alt) = (q(&sle), q(&alt));
    let half = saw.len() / 2;
    let null = compare_functionals(&saw[..half], &saw[half..])?;
    functional_rows(&mut r, "SAW split halves", &null, false);
    let main = compare_functionals(&saw, &sle)?;
    functional_rows(&mut r, "SAW vs SLE_8/3", &main, true);
    let other = compare_functionals(&saw, &alt)?;
    let ps = functional_rows(&mut r, "SAW vs SLE_alt", &other, false);
    let min_p = ps.iter().copied().fold(1.0, f64::min);
    let min_t = TestResult { statistic: other.iter().map(|t| t.statistic).fold(0.0, f64::max), p_value: min_p };
    r.test("SAW vs SLE_alt: smallest p over functionals", &min_t, DISCRIMINATE, false);
    let mut t = Table::new("means", &["functional", "saw", "sle", "sle_alt"]);
    for k in 0..3 {
        let m = |v: &[ExitFunctionals]| v.iter().map(|f| f.values()[k]).sum::<f64>() / v.len() as f64;
        t.push([ExitFunctionals::NAMES[k].to_string(), m(&saw).to_string(), m(&sle).to_string(), m(&alt).to_string()]);
    }
    r.table(t);
    r.raw("saw", &saw);
    r.raw("sle", &sle);
    r.raw("sle_alt", &alt);
    Ok(r)
}

// ---------------------------------------------------------------- conformal

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchwarzianParams {
    pub x0: f64,
    pub h: f64,
    pub step: f64,
    /// Points `[re, im]` where both routes are compared.
    pub probes: Vec<[f64; 2]>,
}

impl Default for SchwarzianParams {
    fn default() -> Self {
        Self {
            x0: -1.0,
            h: 1.0,
            step: crate::conformal::schwarzian::DEFAULT_FD_STEP,
            probes: vec![[0.0, 0.0], [0.5, 0.0], [2.0, 0.5], [-3.0, 1.0], [0.0, 2.0]],
        }
    }
}

impl Params for SchwarzianParams {
    fn validate(&self) -> Result<()> {
        slit("x0", self.x0, self.h)?;
        if !(self.step > 0.0) {
            return Err(field_error("step", "must be positive"));
        }
        if self.probes.is_empty() {
            return Err(field_error("probes", "need at least one point"));
        }
        Ok(())
    }
}

fn run_schwarzian(p: &SchwarzianParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("schwarzian-bubble", seed);
    let m = slit("x0", p.x0, p.h)?;
    let mut t = Table::new("schwarzian", &["re", "im", "symbolic_re", "symbolic_im", "fd_re", "fd_im", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for &[re, im] in &p.probes {
        let z = Complex64::new(re, im);
        let s = m.schwarzian(z)?;
        let f = m.schwarzian_fd(z, p.step)?;
        worst = worst.max((s - f).norm());
        t.push([re, im, s.re, s.im, f.re, f.im, (s - f).norm()]);
    }
    r.table(t);
    r.check("symbolic and finite-difference Schwarzian agree to 1e-6", worst <= 1e-6);
    let symbolic = m.bubble_mass()?;
    let fd = -5.0 / 48.0 * m.schwarzian_fd(Complex64::new(0.0, 0.0), p.step)?.re;
    r.compare("bubble mass (symbolic)", &EstimateWithError::new(symbolic, 0.0, 1), 15.0 / 128.0, 0.0, 1e-9);
    r.compare("bubble mass (finite differences)", &EstimateWithError::new(fd, 0.0, 1), 15.0 / 128.0, 0.0, 1e-6);
    Ok(r)
}

// ---------------------------------------------------------------- statistics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KsNullParams {
    pub repetitions: usize,
    /// Walks per half.
    pub samples: usize,
    pub steps: usize,
    pub truncation: usize,
    pub radius: f64,
}

impl Default for KsNullParams {
    fn default() -> Self {
        Self { repetitions: 100, samples: 500, steps: 200, truncation: 12, radius: 10.0 }
    }
}

impl Params for KsNullParams {
    fn validate(&self) -> Result<()> {
        positive("repetitions", self.repetitions)?;
        positive("samples", self.samples)?;
        if !(1..=16).contains(&self.truncation) {
            return Err(field_error("truncation", "must lie in 1..=16"));
        }
        if !(self.radius >= 2.0) || self.steps < 2 * self.radius as usize {
            return Err(field_error("radius", "need radius >= 2 and steps >= 2 radius"));
        }
        Ok(())
    }
}

/// Split-halves KS tests on i.i.d. half-space walks from the bridge sampler;
/// the rejection count at level 0.01 is binomial under the null.
fn run_ks_null(p: &KsNullParams, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new("ks-null", seed);
    let sampler = HalfSpaceSampler::new(BridgeTable::build(p.truncation, 2)?)?;
    let pvals: Vec<Result<f64>> = (0..p.repetitions)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let mut angles = Vec::with_capacity(2 * p.samples);
            while angles.len() < 2 * p.samples {
                let w = sampler.sample(p.steps, &mut rng);
                // Rotate the x > 0 half-space onto the upper half-plane.
                let pts: Vec<Complex64> =
                    w.points().iter().map(|q| Complex64::new(-q.coords()[1] as f64, q.coords()[0] as f64)).collect();
                if let Some(f) = exit_functionals(&pts, p.radius) {
                    angles.push(f.exit_angle);
                }
            }
            Ok(ks_two_sample(&angles[..p.samples], &angles[p.samples..])?.p_value)
        })
        .collect();
    let pvals = pvals.into_iter().collect::<Result<Vec<_>>>()?;
    let rejections = pvals.iter().filter(|&&q| q < AGREE).count();
    let mut t = Table::new("p_values", &["repetition", "p_value"]);
    for (i, q) in pvals.iter().enumerate() {
        t.push([i.to_string(), q.to_string()]);
    }
    r.table(t);
    let bound = 5usize.max((p.repetitions as f64 * AGREE + 3.0 * (p.repetitions as f64 * AGREE).sqrt()).ceil() as usize);
    let tail = binomial_upper_tail(p.repetitions as u64, AGREE, bound as u64 + 1);
    r.record("rejections at level 0.01", &EstimateWithError::new(rejections as f64, 0.0, p.repetitions));
    r.record("P(Binomial(reps, 0.01) > bound)", &EstimateWithError::new(tail, 0.0, p.repetitions));
    r.check(&format!("at most {bound} rejections"), rejections <= bound);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_covers_every_runner() {
        assert!(CATALOG.len() >= 13);
        for e in CATALOG {
            let v = default_params(e.id).unwrap();
            let cfg = ExperimentConfig { experiment: e.id.into(), seed: 1, params: v.as_object().unwrap().clone() };
            validate(&cfg).unwrap();
        }
        assert!(default_params("nope").is_err());
    }

    #[test]
    fn malformed_params_name_the_field() {
        let cfg = ExperimentConfig::new("chordal-restriction", 1).with_param("samples", 0);
        match validate(&cfg) {
            Err(crate::error::Error::Config { field, .. }) => assert_eq!(field, "params.samples"),
            other => panic!("{other:?}"),
        }
        let cfg = ExperimentConfig::new("saw-vs-sle", 1).with_param("saw", serde_json::json!({"lenght": 5}));
        match validate(&cfg) {
            Err(crate::error::Error::Config { field, .. }) => assert!(field.starts_with("params.saw"), "{field}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_runs_are_deterministic() {
        let cfg = ExperimentConfig::new("excursion-cr1", 3).with_param("samples", 200);
        let a = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
