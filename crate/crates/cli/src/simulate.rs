use std::path::PathBuf;

use loyd_core::lower_bound::{
    chi_square_test, choose_parameters, count_concentration, coupled_holes, reference_statistic_w, run_traced_loyd,
    tv_separation, CouplingVariant, ExperimentParams, TvEstimate, LAZY_STEP_LAW,
};
use loyd_core::rng::{worker_rng, RNG_ALGORITHM};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::Seeds;
use crate::output::OutDir;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    Wilson,
    Concentration,
    Coupling,
}

fn default_bootstrap() -> usize {
    200
}

fn default_distances() -> Vec<u32> {
    vec![1, 2, 4, 8, 16]
}

fn default_variants() -> Vec<CouplingVariant> {
    vec![CouplingVariant::Horizontal, CouplingVariant::Vertical]
}

fn default_trials() -> usize {
    1000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateManifest {
    pub schema_version: u32,
    pub seeds: Seeds,
    #[serde(default)]
    pub experiment: Experiment,
    pub n: usize,
    /// Scale of the `eps n^2 ln n` term; also lifts the `n >= 5` restriction.
    #[serde(default)]
    pub c_user: Option<f64>,
    /// Steps to run; defaults to `T`.
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub traces: bool,
    /// Concentration: largest time of the grid.
    #[serde(default)]
    pub t: Option<u64>,
    /// Concentration: fail unless the fitted constants stay below these.
    #[serde(default)]
    pub bounds: Option<(f64, f64)>,
    /// Coupling: the column `C`.
    #[serde(default)]
    pub column: u32,
    #[serde(default = "default_distances")]
    pub distances: Vec<u32>,
    #[serde(default = "default_variants")]
    pub variants: Vec<CouplingVariant>,
    /// Coupling: runs per seed for each (variant, d).
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl SimulateManifest {
    pub fn new(seeds: Seeds, n: usize) -> Self {
        SimulateManifest {
            schema_version: 1,
            seeds,
            experiment: Experiment::Wilson,
            n,
            c_user: None,
            horizon: None,
            checkpoints: Vec::new(),
            bootstrap: default_bootstrap(),
            traces: false,
            t: None,
            bounds: None,
            column: 0,
            distances: default_distances(),
            variants: default_variants(),
            trials: default_trials(),
            out: None,
        }
    }
}

#[derive(Serialize)]
struct SeedRow {
    seed: u64,
    w_dist: f64,
    w_ref: f64,
    z: Option<f64>,
    /// Visits right of tracked tiles up to `T`: total, least and most per tile.
    visits_total: u64,
    visits_min: u64,
    visits_max: u64,
}

#[derive(Serialize)]
struct CountRow {
    seed: u64,
    t: u64,
    label: usize,
    count: u64,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    seed: u64,
    tile: u32,
    visits: &'a [u64],
    columns: &'a [u32],
}

/// Reference draws use the first word of stream 1 of each run seed.
fn reference_seed(seed: u64) -> u64 {
    worker_rng(seed, 1).next_u64()
}

pub fn params_for(m: &SimulateManifest) -> CliResult<ExperimentParams> {
    Ok(choose_parameters(m.n, m.c_user)?)
}

pub fn run(m: &SimulateManifest, out: &mut OutDir) -> CliResult<()> {
    let seeds = m.seeds.expand()?;
    match m.experiment {
        Experiment::Wilson => wilson(m, &seeds, out),
        Experiment::Concentration => concentration(m, &seeds, out),
        Experiment::Coupling => coupling(m, &seeds, out),
    }
}

fn wilson(m: &SimulateManifest, seeds: &[u64], out: &mut OutDir) -> CliResult<()> {
    let params = params_for(m)?;
    let horizon = m.horizon.unwrap_or(params.t);
    let k = params.tiles.len();
    let runs = seeds
        .par_iter()
        .map(|&s| {
            let run = run_traced_loyd(&params.clone().with_seed(s), horizon, &m.checkpoints)?;
            let w_ref = reference_statistic_w(m.n, k, reference_seed(s))?;
            Ok((run, w_ref))
        })
        .collect::<loyd_core::Result<Vec<_>>>()?;

    let rows = runs.iter().map(|(run, w_ref)| {
        let counts: Vec<u64> = run.traces.iter().map(|tr| tr.count_at(params.t)).collect();
        SeedRow {
            seed: run.params.seed,
            w_dist: run.w_dist(),
            w_ref: *w_ref,
            z: run.z(),
            visits_total: counts.iter().sum(),
            visits_min: counts.iter().copied().min().unwrap_or(0),
            visits_max: counts.iter().copied().max().unwrap_or(0),
        }
    });
    out.csv("runs.csv", rows)?;

    if !m.checkpoints.is_empty() {
        let rows = runs.iter().flat_map(|(run, _)| {
            let seed = run.params.seed;
            run.snapshots.iter().flat_map(move |snap| {
                snap.counts.iter().enumerate().skip(1).map(move |(label, &count)| CountRow {
                    seed,
                    t: snap.t,
                    label,
                    count,
                })
            })
        });
        out.csv("counts.csv", rows)?;
    }
    if m.traces {
        let lines = runs.iter().flat_map(|(run, _)| {
            run.traces.iter().map(|tr| TraceLine {
                seed: run.params.seed,
                tile: tr.tile,
                visits: &tr.visits,
                columns: &tr.columns,
            })
        });
        out.jsonl("traces.jsonl", lines)?;
    }

    let dist: Vec<f64> = runs.iter().map(|(r, _)| r.w_dist()).collect();
    let reference: Vec<f64> = runs.iter().map(|(_, w)| *w).collect();
    let separation: Option<TvEstimate> = if seeds.len() >= 200 {
        Some(tv_separation(&dist, &reference, m.bootstrap, seeds[0])?)
    } else {
        None
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut base = params.clone();
    base.seed = 0;
    out.json(
        "summary.json",
        &json!({
            "experiment": "wilson",
            "rng": RNG_ALGORITHM,
            "seeds": seeds,
            "params": base,
            "horizon": horizon,
            "mean_w_dist": mean(&dist),
            "mean_w_ref": mean(&reference),
            "tv_separation": separation,
        }),
    )
}

#[derive(Serialize)]
struct ConcentrationRow {
    t: u64,
    max_mean_deviation: f64,
    min_variance: f64,
    max_variance: f64,
    a_hat: f64,
    c_hat: f64,
}

fn concentration(m: &SimulateManifest, seeds: &[u64], out: &mut OutDir) -> CliResult<()> {
    let t = m
        .t
        .ok_or_else(|| CliError::Schema("concentration needs field `t`".into()))?;
    let r = count_concentration(m.n, t, seeds)?;
    out.csv(
        "concentration.csv",
        r.checkpoints.iter().map(|c| ConcentrationRow {
            t: c.t,
            max_mean_deviation: c.max_mean_deviation,
            min_variance: c.min_variance,
            max_variance: c.max_variance,
            a_hat: c.a_hat,
            c_hat: c.c_hat,
        }),
    )?;
    let within = m.bounds.map(|(a, c)| r.within(a, c));
    out.json(
        "summary.json",
        &json!({
            "experiment": "concentration",
            "rng": RNG_ALGORITHM,
            "seeds": seeds,
            "n": m.n,
            "t": t,
            "a_hat": r.a_hat,
            "c_hat": r.c_hat,
            "bounds": m.bounds,
            "within_bounds": within,
        }),
    )?;
    if within == Some(false) {
        return Err(CliError::Failed(format!(
            "fitted constants ({}, {}) exceed the bounds {:?}",
            r.a_hat, r.c_hat, m.bounds
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CouplingRow {
    variant: CouplingVariant,
    d: u32,
    trials: usize,
    e_count: usize,
    p_e: f64,
    scaled: f64,
    primary_p_value: f64,
    secondary_p_value: f64,
}

fn coupling(m: &SimulateManifest, seeds: &[u64], out: &mut OutDir) -> CliResult<()> {
    let mut rows = Vec::new();
    for (vi, &variant) in m.variants.iter().enumerate() {
        for (di, &d) in m.distances.iter().enumerate() {
            let stream = (vi * m.distances.len() + di) as u64;
            let per_seed = seeds
                .par_iter()
                .map(|&s| {
                    let mut rng = worker_rng(s, stream);
                    let mut hits = 0;
                    let mut prim = [0u64; 5];
                    let mut sec = [0u64; 5];
                    for _ in 0..m.trials {
                        let r = coupled_holes(m.n, m.column, d, variant, false, &mut rng)?;
                        hits += r.e_occurred as usize;
                        for i in 0..5 {
                            prim[i] += r.primary_moves[i];
                            sec[i] += r.secondary_moves[i];
                        }
                    }
                    Ok((hits, prim, sec))
                })
                .collect::<loyd_core::Result<Vec<_>>>()?;
            let mut hits = 0;
            let mut prim = [0u64; 5];
            let mut sec = [0u64; 5];
            for (h, p, s) in per_seed {
                hits += h;
                for i in 0..5 {
                    prim[i] += p[i];
                    sec[i] += s[i];
                }
            }
            let trials = m.trials * seeds.len();
            let p_e = hits as f64 / trials as f64;
            rows.push(CouplingRow {
                variant,
                d,
                trials,
                e_count: hits,
                p_e,
                scaled: p_e * (d + 1) as f64,
                primary_p_value: chi_square_test(&prim, &LAZY_STEP_LAW).1,
                secondary_p_value: chi_square_test(&sec, &LAZY_STEP_LAW).1,
            });
        }
    }
    let worst = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    out.csv("coupling.csv", &rows)?;
    out.json(
        "summary.json",
        &json!({
            "experiment": "coupling",
            "rng": RNG_ALGORITHM,
            "seeds": seeds,
            "n": m.n,
            "column": m.column,
            "max_scaled": worst,
        }),
    )
}
