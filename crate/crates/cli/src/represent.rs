use std::collections::BTreeMap;
use std::path::PathBuf;

use loyd_core::represent::{
    comparison_constant_exact, comparison_constant_mc, ComparisonReport, Layer, LayerTag, RtHcLayer, TorusLayer,
};
use loyd_core::rng::{master_rng, RNG_ALGORITHM};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::manifest::Seeds;
use crate::output::OutDir;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    #[default]
    None,
    Exact,
    MonteCarlo,
}

fn default_mc_samples() -> u64 {
    100_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentManifest {
    pub schema_version: u32,
    pub seeds: Seeds,
    pub layer: LayerTag,
    pub n: usize,
    /// Source moves drawn per seed.
    pub count: usize,
    #[serde(default)]
    pub comparison: Comparison,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub traces: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Witness {
    seed: u64,
    index: usize,
    source_move: Value,
    target_string: Value,
}

#[derive(Serialize)]
struct TraceLine {
    seed: u64,
    source_move: Value,
    target_string: Value,
}

struct SeedResult {
    lengths: Vec<usize>,
    witness: Option<Witness>,
    failures: usize,
    traces: Vec<TraceLine>,
}

fn sample_seed<L: Layer>(layer: &L, seed: u64, count: usize, keep: bool) -> loyd_core::Result<SeedResult> {
    let mut rng = master_rng(seed);
    let mut res = SeedResult {
        lengths: Vec::with_capacity(count),
        witness: None,
        failures: 0,
        traces: Vec::new(),
    };
    for index in 0..count {
        let y = layer.sample_source(&mut rng)?;
        let rep = layer.represent(&y, &mut rng)?;
        res.lengths.push(rep.len());
        let ok = layer.verify(&y, &rep);
        if keep || (!ok && res.witness.is_none()) {
            let source_move = serde_json::to_value(&y).expect("moves serialize");
            let target_string = serde_json::to_value(&rep).expect("moves serialize");
            if !ok && res.witness.is_none() {
                res.witness = Some(Witness {
                    seed,
                    index,
                    source_move: source_move.clone(),
                    target_string: target_string.clone(),
                });
            }
            if keep {
                res.traces.push(TraceLine {
                    seed,
                    source_move,
                    target_string,
                });
            }
        }
        if !ok {
            res.failures += 1;
        }
    }
    Ok(res)
}

fn run_layer<L: Layer>(layer: &L, m: &RepresentManifest, seeds: &[u64], out: &mut OutDir) -> CliResult<()> {
    let results = seeds
        .par_iter()
        .map(|&s| sample_seed(layer, s, m.count, m.traces))
        .collect::<loyd_core::Result<Vec<_>>>()?;
    let comparison: Option<ComparisonReport> = match m.comparison {
        Comparison::None => None,
        Comparison::Exact => Some(comparison_constant_exact(layer)?),
        Comparison::MonteCarlo => Some(comparison_constant_mc(layer, m.mc_samples, seeds[0])?),
    };

    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total = 0usize;
    let mut failures = 0;
    for r in &results {
        for &l in &r.lengths {
            *histogram.entry(l).or_insert(0) += 1;
            total += l;
        }
        failures += r.failures;
    }
    let samples = m.count * seeds.len();
    let witness = results.iter().find_map(|r| r.witness.as_ref());
    if m.traces {
        out.jsonl("traces.jsonl", results.iter().flat_map(|r| &r.traces))?;
    }
    out.json(
        "report.json",
        &json!({
            "layer": m.layer,
            "n": m.n,
            "rng": RNG_ALGORITHM,
            "seeds": seeds,
            "samples": samples,
            "failures": failures,
            "max_length": histogram.keys().next_back(),
            "mean_length": total as f64 / samples.max(1) as f64,
            "length_bound": layer.max_length(),
            "length_histogram": histogram,
            "comparison": comparison,
            "witness": witness,
        }),
    )?;
    if let Some(w) = witness {
        return Err(CliError::Failed(format!(
            "{failures} of {samples} representations evaluate wrongly; first at seed {} index {}",
            w.seed, w.index
        )));
    }
    Ok(())
}

pub fn run(m: &RepresentManifest, out: &mut OutDir) -> CliResult<()> {
    let seeds = m.seeds.expand()?;
    match m.layer {
        LayerTag::RtHc => run_layer(&RtHcLayer::new(m.n)?, m, &seeds, out),
        tag => run_layer(&TorusLayer::new(tag, m.n)?, m, &seeds, out),
    }
}
