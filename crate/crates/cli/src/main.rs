// SPDX-License-Identifier: Apache-2.0

//! `sawlab`: command-line front end to the laboratory.

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use sawlab_core::brownian::{
    box_dimension, box_dimension_cells, excursion, frontier, hull_fill, non_disconnecting_pair, rooted_loop,
    DisconnectParams, ScaleGrid,
};
use sawlab_core::conformal::{RadialRestrictionMap, SlitMap};
use sawlab_core::curve::{Geometry, PlanarCurve};
use sawlab_core::harness::{self, ExperimentConfig};
use sawlab_core::lattice::bridge::{count_irreducible_bridges, BridgeConvention};
use sawlab_core::lattice::{count_half_space, count_saps, count_saws, BridgeTable, HalfSpaceSampler};
use sawlab_core::rng::{default_parallelism, substream};
use sawlab_core::saw::{estimate_nu, estimate_rho, exponent_algebra, parse_rational, EstimateConfig, Rational};
use sawlab_core::sle::restriction::restriction_test;
use sawlab_core::sle::{chordal_trace, full_plane_trace, parse_kappa, radial_trace, FlowParams};
use sawlab_core::stats::EstimateWithError;

#[derive(Parser)]
#[command(name = "sawlab", version, about = "Self-avoiding walks, SLE and Brownian paths")]
struct Cli {
    /// Worker threads; defaults to SAWLAB_THREADS or the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact count of walks (or half-space walks, irreducible bridges,
    /// polygons) of length n.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with_all = ["bridges", "saps"])]
        half: bool,
        #[arg(long, conflicts_with = "saps")]
        bridges: bool,
        #[arg(long)]
        saps: bool,
    },
    /// Irreducible bridge counts and the Kesten estimate of mu.
    Kesten {
        #[arg(long = "K")]
        k: usize,
        /// Also evaluate the truncated renewal sum at this beta.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Half-space SAWs from the bridge-concatenation sampler, one per line.
    SampleSaw {
        #[arg(long)]
        steps: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Monte Carlo estimate of nu or rho from pivot-sampled walks.
    Estimate {
        #[arg(long, value_enum)]
        exponent: Exponent,
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact scaling exponents derived from (nu, gamma, rho).
    Exponents {
        #[arg(long, default_value = "3/4")]
        nu: String,
        #[arg(long, default_value = "43/32")]
        gamma: String,
        #[arg(long, default_value = "25/64")]
        rho: String,
    },
    /// Evaluate a normalized conformal map.
    Map {
        /// Vertical slit from x0 to x0 + ih.
        #[arg(long, value_name = "X0,H", conflicts_with = "radial", allow_hyphen_values = true)]
        slit: Option<String>,
        /// Radial obstacle at angle theta of half-width delta.
        #[arg(long, value_name = "THETA,DELTA", allow_hyphen_values = true)]
        radial: Option<String>,
        /// Point `re,im` where the slit map is evaluated.
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        eval: Option<String>,
        /// Schwarzian of the slit map at 0, symbolic and finite-difference.
        #[arg(long)]
        schwarzian0: bool,
        /// Derivative factors of the radial map.
        #[arg(long)]
        factors: bool,
    },
    /// SLE traces as JSONL arrays of [re, im].
    SleTrace {
        #[arg(long, value_enum, default_value = "chordal")]
        mode: Mode,
        #[arg(long, default_value = "8/3")]
        kappa: String,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long = "N", default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Log-radius where full-plane traces start.
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        k_start: f64,
    },
    /// Chordal SLE avoidance of a slit against Phi'(0)^alpha.
    RestrictionTest {
        #[arg(long, value_name = "X0,H", allow_hyphen_values = true)]
        slit: String,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value = "8/3")]
        kappa: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brownian excursions in the upper half-plane as JSONL.
    Excursion {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long = "N", default_value_t = 1000)]
        n: usize,
    },
    /// Rooted Brownian loops as JSONL, or their filled hulls as RLE rows.
    Loop {
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long = "N", default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the filled hull on a grid with this many cells across.
        #[arg(long)]
        hull_cells: Option<usize>,
    },
    /// Box-counting dimension over dyadic scales 1..=k.
    FrontierDim {
        #[arg(long, value_enum)]
        source: Source,
        #[arg(long, default_value_t = 8)]
        scales: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Loop steps or SLE capacity steps.
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Probability that two Brownian paths do not disconnect 0 from infinity.
    Nondisconnect {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        target_accepts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a catalog experiment and write report.json, tables/ and raw/.
    Run {
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List catalog experiments, or print one experiment's default config.
    Experiments {
        #[arg(long)]
        defaults: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Exponent {
    Nu,
    Rho,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Chordal,
    Radial,
    Fullplane,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Loop,
    Sle,
    Segment,
}

fn pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("{what}: expected two comma-separated numbers, got `{s}`");
    }
    let a = parts[0].parse().with_context(|| format!("{what}: bad number `{}`", parts[0]))?;
    let b = parts[1].parse().with_context(|| format!("{what}: bad number `{}`", parts[1]))?;
    Ok((a, b))
}

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn rational(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn estimate_json(exponent: &str, e: &EstimateWithError) -> Value {
    json!({
        "exponent": exponent,
        "value": e.value,
        "std_error": e.std_error,
        "window": e.window.map(|w| [w.lo, w.hi]),
    })
}

fn print(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

/// Writes `count` lines produced in parallel, in index order.
fn lines(count: usize, f: impl Fn(usize) -> Result<String> + Sync) -> Result<()> {
    let out = io::stdout();
    let mut w = BufWriter::new(out.lock());
    const CHUNK: usize = 64;
    for start in (0..count).step_by(CHUNK) {
        let chunk: Vec<Result<String>> = (start..count.min(start + CHUNK)).into_par_iter().map(&f).collect();
        for line in chunk {
            writeln!(w, "{}", line?)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or_else(default_parallelism);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    match cli.cmd {
        Cmd::Enumerate { n, half, bridges, saps } => {
            if saps {
                let s = count_saps(n)?;
                print(&json!({ "n": n, "count": s.classes, "rooted": s.rooted, "kind": "polygon" }))
            } else if bridges {
                let count = count_irreducible_bridges(n, 2, BridgeConvention::Standard)?;
                print(&json!({ "n": n, "count": count, "kind": "irreducible-bridge" }))
            } else if half {
                print(&json!({ "n": n, "count": count_half_space(n, 2)?, "kind": "half-space" }))
            } else {
                print(&json!({ "n": n, "count": count_saws(n, 2)?, "kind": "saw" }))
            }
        }
        Cmd::Kesten { k, beta } => {
            let t = BridgeTable::build(k, 2)?;
            let betas = (1..=k).map(|j| t.kesten_beta(j)).collect::<sawlab_core::Result<Vec<_>>>()?;
            let mut v = json!({
                "K": k,
                "lambda": t.irreducible_counts,
                "upsilon": t.half_counts,
                "beta": betas,
                "beta_K": t.beta_estimate,
            });
            if let Some(b) = beta {
                v["partial_sum"] = json!(t.kesten_partial_sum(k, b)?);
            }
            print(&v)
        }
        Cmd::SampleSaw { steps, k, seed, count } => {
            let sampler = HalfSpaceSampler::new(BridgeTable::build(k, 2)?)?;
            lines(count, |i| Ok(sampler.sample(steps, &mut substream(seed, i as u64)).prefix(steps).to_json_line()))
        }
        Cmd::Estimate { exponent, lengths, samples, seed } => {
            let cfg = EstimateConfig::new(lengths, samples, seed);
            match exponent {
                Exponent::Nu => print(&estimate_json("nu", &estimate_nu(&cfg)?.end_to_end)),
                Exponent::Rho => print(&estimate_json("rho", &estimate_rho(&cfg)?.0)),
            }
        }
        Cmd::Exponents { nu, gamma, rho } => {
            let e = exponent_algebra(parse_rational(&nu)?, parse_rational(&gamma)?, parse_rational(&rho)?)?;
            print(&json!({
                "nu": rational(e.nu), "gamma": rational(e.gamma), "rho": rational(e.rho),
                "a": rational(e.a), "b": rational(e.b), "a_prime": rational(e.a_prime),
                "b_prime": rational(e.b_prime), "alpha": rational(e.alpha),
            }))
        }
        Cmd::Map { slit, radial, eval, schwarzian0, factors } => {
            if let Some(s) = slit {
                let (x0, h) = pair(&s, "--slit")?;
                let m = SlitMap::vertical_slit(x0, h)?;
                if let Some(z) = eval {
                    let (re, im) = pair(&z, "--eval")?;
                    let z = Complex64::new(re, im);
                    print(&json!({ "z": c(z), "value": c(m.eval(z)?), "dprime_at_zero": m.dprime_at_zero() }))
                } else if schwarzian0 {
                    let z = Complex64::new(0.0, 0.0);
                    print(&json!({
                        "schwarzian": c(m.schwarzian(z)?),
                        "schwarzian_fd": c(m.schwarzian_fd(z, sawlab_core::conformal::schwarzian::DEFAULT_FD_STEP)?),
                        "bubble_mass": m.bubble_mass()?,
                    }))
                } else {
                    bail!("--slit needs --eval or --schwarzian0");
                }
            } else if let Some(r) = radial {
                if !factors {
                    bail!("--radial needs --factors");
                }
                let (theta, delta) = pair(&r, "--radial")?;
                print(&serde_json::to_value(RadialRestrictionMap::new(theta, delta)?.factors())?)
            } else {
                bail!("map needs --slit or --radial");
            }
        }
        Cmd::SleTrace { mode, kappa, t, n, count, seed, k_start } => {
            let kappa = parse_kappa(&kappa)?;
            lines(count, |i| {
                let rng = &mut substream(seed, i as u64);
                let c = match mode {
                    Mode::Chordal => chordal_trace(kappa, t, n, rng)?,
                    Mode::Radial => radial_trace(kappa, t, n, Some(0.0), rng)?,
                    Mode::Fullplane => full_plane_trace(kappa, k_start, t, n, rng)?,
                };
                Ok(c.to_json_line())
            })
        }
        Cmd::RestrictionTest { slit, count, kappa, seed } => {
            let (x0, h) = pair(&slit, "--slit")?;
            let m = SlitMap::vertical_slit(x0, h)?;
            let (e, pred) = restriction_test(&m, parse_kappa(&kappa)?, count, seed, &FlowParams::default());
            print(&json!({ "p_hat": e.value, "se": e.std_error, "prediction": pred }))
        }
        Cmd::Excursion { count, seed, t, n } => {
            lines(count, |i| Ok(excursion(t, n, &mut substream(seed, i as u64))?.to_json_line()))
        }
        Cmd::Loop { duration, count, n, seed, hull_cells } => lines(count, |i| {
            let l = rooted_loop(duration, n, &mut substream(seed, i as u64))?;
            match hull_cells {
                None => Ok(l.to_json_line()),
                Some(cells) => {
                    let h = hull_fill(std::slice::from_ref(&l), l.diameter() / cells.max(1) as f64)?;
                    Ok(serde_json::to_string(&h.region.to_rle())?)
                }
            }
        }),
        Cmd::FrontierDim { source, scales, seed, n } => {
            let grid = ScaleGrid { k_min: 1, k_max: scales };
            grid.validate()?;
            let e = match source {
                Source::Segment => {
                    let seg = PlanarCurve::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], Geometry::Plane);
                    box_dimension(&seg, grid)?
                }
                Source::Sle => {
                    let c = chordal_trace(8.0 / 3.0, 1.0, n.unwrap_or(20_000), &mut substream(seed, 0))?;
                    box_dimension(&c, grid)?
                }
                Source::Loop => {
                    let l = rooted_loop(1.0, n.unwrap_or(1 << 22), &mut substream(seed, 0))?;
                    // Boxes up to 2^k cells need a grid a few times wider.
                    let cells = (1usize << (scales + 3)).max(1024);
                    let h = hull_fill(std::slice::from_ref(&l), l.diameter() / cells as f64)?;
                    box_dimension_cells(&frontier(&h.region)?.cells, grid)?
                }
            };
            print(&estimate_json("box_dimension", &e))
        }
        Cmd::Nondisconnect { eps, target_accepts, seed } => {
            let r = non_disconnecting_pair(eps, target_accepts, seed, &DisconnectParams::default())?;
            print(&json!({
                "p_hat": r.probability.value,
                "se": r.probability.std_error,
                "prediction": eps.powf(4.0 / 3.0),
                "trials": r.trials,
                "accepts": r.accepts,
            }))
        }
        Cmd::Run { experiment, config, seed, out } => {
            let mut cfg = match &config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    ExperimentConfig::from_json(&text)?
                }
                None => ExperimentConfig::new(experiment.as_deref().context("--experiment or --config is required")?, 0),
            };
            if let Some(id) = experiment {
                if config.is_some() && id != cfg.experiment {
                    bail!("--experiment `{id}` does not match config experiment `{}`", cfg.experiment);
                }
                cfg.experiment = id;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            harness::validate(&cfg)?;
            let (report, written) = harness::run_to_dir(&cfg, &out)?;
            for t in &report.tests {
                eprintln!("{} {}", if t.passed { "PASS" } else { "FAIL" }, t.name);
            }
            print(&json!({
                "experiment": report.experiment,
                "passed": report.passed,
                "files": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            }))?;
            if !report.passed {
                std::process::exit(2);
            }
            Ok(())
        }
        Cmd::Experiments { defaults } => match defaults {
            Some(id) => {
                let cfg = json!({ "experiment": id, "seed": 0, "params": harness::default_params(&id)? });
                println!("{}", serde_json::to_string_pretty(&cfg)?);
                Ok(())
            }
            None => {
                for e in harness::catalog() {
                    println!("{:<22} {}", e.id, e.summary);
                }
                Ok(())
            }
        },
    }
}
