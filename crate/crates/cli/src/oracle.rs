use std::path::PathBuf;

use loyd_core::puzzle::TorusPoint;
use loyd_core::rng::RNG_ALGORITHM;
use loyd_core::tilde::{
    conductance_profile, exit_side_exact, gambler_ruin_exact, gambler_ruin_strip, heat_kernel_curve,
    hk2_sufficient_time, martingale_check, uniform_relative_error, ExitSide, MartingaleCheck, TildeGraph,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::manifest::Seeds;
use crate::output::OutDir;

fn default_ns() -> Vec<usize> {
    vec![5, 8, 16, 32]
}

fn default_t_factor() -> u64 {
    50
}

fn default_k_max() -> u32 {
    30
}

fn default_width() -> usize {
    11
}

fn default_exit_k_max() -> u32 {
    20
}

fn default_four() -> usize {
    4
}

fn default_eps() -> Vec<f64> {
    vec![0.5, 0.1, 0.01]
}

fn default_walks() -> usize {
    20_000
}

fn default_walk_t_max() -> u64 {
    4096
}

fn default_mart_ks() -> Vec<u32> {
    vec![3, 10]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "job", rename_all = "snake_case", deny_unknown_fields)]
pub enum Job {
    /// `m(t)` up to `t_factor n^2` from (1, 0) and (n/2, n/2).
    HeatKernel {
        #[serde(default = "default_ns")]
        ns: Vec<usize>,
        #[serde(default = "default_t_factor")]
        t_factor: u64,
    },
    /// Profile `(r, Phi(r))`; exhaustive when small enough.
    Conductance {
        #[serde(default = "default_four")]
        n: usize,
        #[serde(default)]
        budget: usize,
    },
    Gambler {
        #[serde(default = "default_k_max")]
        k_max: u32,
        #[serde(default = "default_width")]
        width: usize,
    },
    ExitSide {
        #[serde(default = "default_exit_k_max")]
        k_max: u32,
    },
    /// Sufficient times from the conductance profile, checked by iteration.
    Hk2 {
        #[serde(default = "default_four")]
        n: usize,
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
    },
    Martingale {
        #[serde(default = "default_mart_ks")]
        ks: Vec<u32>,
        #[serde(default = "default_walks")]
        walks: usize,
        #[serde(default = "default_walk_t_max")]
        t_max: u64,
    },
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::HeatKernel { .. } => "heat_kernel",
            Job::Conductance { .. } => "conductance",
            Job::Gambler { .. } => "gambler",
            Job::ExitSide { .. } => "exit_side",
            Job::Hk2 { .. } => "hk2",
            Job::Martingale { .. } => "martingale",
        }
    }

    pub fn default_for(name: &str) -> Option<Job> {
        serde_json::from_value(json!({ "job": name })).ok()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleManifest {
    pub schema_version: u32,
    pub seeds: Seeds,
    pub jobs: Vec<Job>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct HeatRow {
    n: usize,
    start_x: u32,
    start_y: u32,
    t: u64,
    m: f64,
}

#[derive(Serialize)]
struct PhiRow {
    r: usize,
    phi: f64,
    exact: bool,
}

#[derive(Serialize)]
struct GamblerRow {
    k: u32,
    exact: String,
    value: f64,
    strip_value: f64,
    strip_error: f64,
    residual: f64,
}

#[derive(Serialize)]
struct ExitRow {
    k: u32,
    lower: f64,
    upper: f64,
    value: f64,
    bound: f64,
}

#[derive(Serialize)]
struct MartingaleRow {
    k: u32,
    t: u64,
    mean_y: f64,
    se_y: f64,
    mean_q: f64,
    se_q: f64,
}

/// Runs one job, writes its files and returns its summary and verdict.
fn run_job(job: &Job, seed: u64, out: &mut OutDir) -> CliResult<(Value, bool)> {
    Ok(match job {
        Job::HeatKernel { ns, t_factor } => {
            let mut rows = Vec::new();
            let mut table = Vec::new();
            let mut ok = true;
            for &n in ns {
                let g = TildeGraph::new(n)?;
                let half = (n / 2) as i64;
                for start in [TorusPoint::new(1, 0, n), TorusPoint::new(half, half, n)] {
                    let t_max = t_factor * (n * n) as u64;
                    let c = heat_kernel_curve(&g, start, t_max)?;
                    ok &= c.non_increasing(1e-15) && c.mass_error <= 1e-12;
                    rows.extend(c.deviation.iter().enumerate().map(|(i, &m)| HeatRow {
                        n,
                        start_x: start.x,
                        start_y: start.y,
                        t: i as u64 + 1,
                        m,
                    }));
                    table.push(json!({
                        "n": n,
                        "start": [start.x, start.y],
                        "t_max": t_max,
                        "a_hat": c.a_hat,
                        "argmax": c.argmax,
                        "mass_error": c.mass_error,
                    }));
                }
            }
            out.csv("heat_kernel.csv", rows)?;
            let a_hat = table.iter().filter_map(|r| r["a_hat"].as_f64()).fold(0.0, f64::max);
            (json!({ "a_hat": a_hat, "table": table }), ok)
        }
        Job::Conductance { n, budget } => {
            let g = TildeGraph::new(*n)?;
            let prof = conductance_profile(&g, *budget, seed)?;
            out.csv(
                "conductance.csv",
                prof.best.iter().enumerate().map(|(i, &phi)| PhiRow {
                    r: i + 1,
                    phi,
                    exact: prof.exact,
                }),
            )?;
            let iso = prof.iso_constant();
            (
                json!({
                    "n": n,
                    "states": prof.states,
                    "method": prof.method,
                    "exact": prof.exact,
                    "iso_constant": iso,
                }),
                iso > 0.0,
            )
        }
        Job::Gambler { k_max, width } => {
            let mut rows = Vec::new();
            let mut ok = true;
            for k in 1..=*k_max {
                let exact = gambler_ruin_exact(k)?;
                let value = *exact.numer() as f64 / *exact.denom() as f64;
                let strip = gambler_ruin_strip(k, *width)?;
                let err = (strip.value - value).abs();
                ok &= *exact.numer() == 1 && *exact.denom() == k as i128 && err <= 1e-10;
                rows.push(GamblerRow {
                    k,
                    exact: exact.to_string(),
                    value,
                    strip_value: strip.value,
                    strip_error: err,
                    residual: strip.residual,
                });
            }
            let worst = rows.iter().map(|r| r.strip_error).fold(0.0, f64::max);
            out.csv("gambler.csv", rows)?;
            (json!({ "k_max": k_max, "width": width, "max_strip_error": worst }), ok)
        }
        Job::ExitSide { k_max } => {
            let all: Vec<ExitSide> = (1..=*k_max).map(exit_side_exact).collect::<loyd_core::Result<_>>()?;
            let ok = all.iter().all(|e| e.value <= 2.0 / e.k as f64);
            out.csv(
                "exit_side.csv",
                all.iter().map(|e| ExitRow {
                    k: e.k,
                    lower: e.lower,
                    upper: e.upper,
                    value: e.value,
                    bound: 2.0 / e.k as f64,
                }),
            )?;
            let gap = all.iter().map(|e| e.upper - e.lower).fold(0.0, f64::max);
            (json!({ "k_max": k_max, "max_bracket_gap": gap }), ok)
        }
        Job::Hk2 { n, eps } => {
            let g = TildeGraph::new(*n)?;
            let prof = conductance_profile(&g, 0, seed)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for &e in eps {
                let t = hk2_sufficient_time(&prof, prof.pi_min(), e)?;
                let err = uniform_relative_error(&g, t);
                ok &= err <= e;
                rows.push(json!({ "eps": e, "t": t, "uniform_relative_error": err }));
            }
            (json!({ "n": n, "exact_profile": prof.exact, "rows": rows }), ok)
        }
        Job::Martingale { ks, walks, t_max } => {
            let checks: Vec<MartingaleCheck> = ks
                .iter()
                .map(|&k| martingale_check(k, *walks, *t_max, seed))
                .collect::<loyd_core::Result<_>>()?;
            let ok = checks.iter().all(|c| c.passes(4.0));
            out.csv(
                "martingale.csv",
                checks.iter().flat_map(|c| {
                    c.points.iter().map(move |p| MartingaleRow {
                        k: c.k,
                        t: p.t,
                        mean_y: p.mean_y,
                        se_y: p.se_y,
                        mean_q: p.mean_q,
                        se_q: p.se_q,
                    })
                }),
            )?;
            (json!({ "ks": ks, "walks": walks, "z": 4.0 }), ok)
        }
    })
}

pub fn run(m: &OracleManifest, out: &mut OutDir) -> CliResult<()> {
    let seeds = m.seeds.expand()?;
    let mut jobs = Vec::new();
    let mut failed = Vec::new();
    for job in &m.jobs {
        let (summary, ok) = run_job(job, seeds[0], out)?;
        if !ok {
            failed.push(job.name());
        }
        jobs.push(json!({ "job": job.name(), "passed": ok, "summary": summary }));
    }
    out.json(
        "oracle.json",
        &json!({ "rng": RNG_ALGORITHM, "seeds": seeds, "jobs": jobs, "failed": failed }),
    )?;
    if !failed.is_empty() {
        return Err(CliError::Failed(format!("jobs failed: {}", failed.join(", "))));
    }
    Ok(())
}
