//! `loyd`: seeded experiment runner for the torus fifteen-puzzle chains.
//!
//! Every subcommand is driven by a JSON manifest (`--manifest`) or, for
//! quick runs, by flags that are turned into the same manifest. The
//! resolved manifest is written next to the outputs as `manifest.json`.

mod error;
mod manifest;
mod oracle;
mod output;
mod represent;
mod simulate;
mod spectral;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loyd_core::represent::LayerTag;
use loyd_core::walks::ChainTag;
use serde::Serialize;
use serde_json::json;

use error::{CliError, CliResult};
use manifest::Seeds;
use output::OutDir;

#[derive(Parser)]
#[command(name = "loyd", version, about = "Experiments on the sliding puzzle of the n x n torus")]
struct Cli {
    /// JSON manifest describing the run.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Master seed for flag-driven runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory [default: out, or the manifest's `out`].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Traced lower-bound runs, count concentration and hole couplings.
    Simulate(SimulateArgs),
    /// Rewrite random moves of one chain in another and check them.
    Represent(RepresentArgs),
    /// Gaps, log-Sobolev estimates, exact mixing and chain lemma checks.
    Spectral(SpectralArgs),
    /// Heat kernel, conductance and walk oracles on the relative graph.
    Oracle(OracleArgs),
    /// Print the parameters a simulation would use.
    Params(ParamsArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "wilson")]
    experiment: simulate::Experiment,
    #[arg(long)]
    n: Option<usize>,
    /// Number of seeds derived from `--seed`.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long)]
    c_user: Option<f64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<u64>,
    /// Concentration: largest time.
    #[arg(long)]
    t: Option<u64>,
    /// Coupling: runs per seed for each distance.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    traces: bool,
}

#[derive(Args)]
struct RepresentArgs {
    #[arg(long)]
    layer: Option<LayerTag>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, value_enum, default_value = "none")]
    comparison: represent::Comparison,
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    traces: bool,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    chains: Vec<ChainTag>,
    #[arg(long, value_enum, value_delimiter = ',')]
    suites: Vec<spectral::Suite>,
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Jobs to run with default settings.
    #[arg(long, value_delimiter = ',')]
    jobs: Vec<String>,
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    c_user: Option<f64>,
}

fn need<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required without --manifest")))
}

fn flag_seeds(seed: Option<u64>, runs: usize) -> CliResult<Seeds> {
    let master = need(seed, "seed")?;
    if runs == 0 {
        return Err(CliError::Usage("--runs must be positive".into()));
    }
    Ok(Seeds::derived(master, runs))
}

/// Output directory: the flag, then the manifest, then `out`.
fn out_dir(flag: &Option<PathBuf>, manifest: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| manifest.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn finish<M: Serialize>(
    out: &Option<PathBuf>,
    m_out: &Option<PathBuf>,
    m: &M,
    run: impl FnOnce(&mut OutDir) -> CliResult<()>,
) -> CliResult<()> {
    let mut dir = OutDir::create(&out_dir(out, m_out))?;
    dir.json("manifest.json", m)?;
    let res = run(&mut dir);
    let status = match &res {
        Ok(()) => "ok",
        Err(_) => "failed",
    };
    println!(
        "{}",
        json!({ "status": status, "out": dir.root(), "files": dir.written() })
    );
    res
}

fn load<T: serde::de::DeserializeOwned>(path: &Path, sub: &str) -> CliResult<T> {
    manifest::load(path, sub)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate(a) => {
            let m = match &cli.manifest {
                Some(p) => load(p, "simulate")?,
                None => {
                    let mut m = simulate::SimulateManifest::new(flag_seeds(cli.seed, a.runs)?, need(a.n, "n")?);
                    m.experiment = a.experiment;
                    m.c_user = a.c_user;
                    m.horizon = a.horizon;
                    m.checkpoints = a.checkpoints;
                    m.t = a.t;
                    m.traces = a.traces;
                    if let Some(t) = a.trials {
                        m.trials = t;
                    }
                    m
                }
            };
            manifest::check_version(m.schema_version)?;
            finish(&cli.out, &m.out, &m, |d| simulate::run(&m, d))
        }
        Command::Represent(a) => {
            let m: represent::RepresentManifest = match &cli.manifest {
                Some(p) => load(p, "represent")?,
                None => represent::RepresentManifest {
                    schema_version: manifest::SCHEMA_VERSION,
                    seeds: flag_seeds(cli.seed, a.runs)?,
                    layer: need(a.layer, "layer")?,
                    n: need(a.n, "n")?,
                    count: a.count,
                    comparison: a.comparison,
                    mc_samples: a.mc_samples.unwrap_or(100_000),
                    traces: a.traces,
                    out: None,
                },
            };
            manifest::check_version(m.schema_version)?;
            finish(&cli.out, &m.out, &m, |d| represent::run(&m, d))
        }
        Command::Spectral(a) => {
            let m: spectral::SpectralManifest = match &cli.manifest {
                Some(p) => load(p, "spectral")?,
                None => {
                    let mut v = json!({
                        "schema_version": manifest::SCHEMA_VERSION,
                        "seeds": flag_seeds(cli.seed, 1)?,
                        "n": need(a.n, "n")?,
                    });
                    if !a.chains.is_empty() {
                        v["chains"] = json!(a.chains);
                    }
                    if !a.suites.is_empty() {
                        v["suites"] = json!(a.suites);
                    }
                    if let Some(r) = a.restarts {
                        v["restarts"] = json!(r);
                    }
                    serde_json::from_value(v).map_err(|e| CliError::Usage(e.to_string()))?
                }
            };
            manifest::check_version(m.schema_version)?;
            finish(&cli.out, &m.out, &m, |d| spectral::run(&m, d))
        }
        Command::Oracle(a) => {
            let m: oracle::OracleManifest = match &cli.manifest {
                Some(p) => load(p, "oracle")?,
                None => {
                    if a.jobs.is_empty() {
                        return Err(CliError::Usage("--jobs is required without --manifest".into()));
                    }
                    let jobs = a
                        .jobs
                        .iter()
                        .map(|j| oracle::Job::default_for(j).ok_or_else(|| CliError::Usage(format!("unknown job {j:?}"))))
                        .collect::<CliResult<Vec<_>>>()?;
                    oracle::OracleManifest {
                        schema_version: manifest::SCHEMA_VERSION,
                        seeds: flag_seeds(cli.seed, 1)?,
                        jobs,
                        out: None,
                    }
                }
            };
            manifest::check_version(m.schema_version)?;
            finish(&cli.out, &m.out, &m, |d| oracle::run(&m, d))
        }
        Command::Params(a) => {
            let m: simulate::SimulateManifest = match &cli.manifest {
                Some(p) => load(p, "simulate")?,
                None => {
                    let mut m = simulate::SimulateManifest::new(Seeds::List(vec![cli.seed.unwrap_or(0)]), need(a.n, "n")?);
                    m.c_user = a.c_user;
                    m
                }
            };
            manifest::check_version(m.schema_version)?;
            let p = simulate::params_for(&m)?;
            let text = serde_json::to_string_pretty(&p).map_err(|e| CliError::Io(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
