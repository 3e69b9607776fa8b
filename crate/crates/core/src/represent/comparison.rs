use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layer::{Layer, LayerTag};
use crate::error::{invalid, Result};
use crate::rng::{worker_rng, master_rng};
use crate::spectral::{dirichlet_form, FiniteChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonMethod {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub key: String,
    pub a: f64,
    pub standard_error: Option<f64>,
}

/// `A = max_z E(N(Y, z) |Y|) / p(z)` with the per-key table behind it.
/// Exact reports key by generator; Monte-Carlo reports key by the layer's
/// symmetry classes, where the ratio is constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub layer: LayerTag,
    pub n: usize,
    pub a: f64,
    pub argmax: String,
    pub method: ComparisonMethod,
    pub samples: Option<u64>,
    pub standard_error: Option<f64>,
    pub low_confidence: bool,
    pub max_length: Option<usize>,
    pub table: Vec<ComparisonRow>,
}

const MC_CHUNKS: u64 = 64;

fn finish<L: Layer>(layer: &L, rows: Vec<ComparisonRow>, method: ComparisonMethod, samples: Option<u64>) -> ComparisonReport {
    let best = rows
        .iter()
        .max_by(|a, b| a.a.total_cmp(&b.a).then_with(|| b.key.cmp(&a.key)))
        .cloned();
    let (a, argmax, se) = best.map(|r| (r.a, r.key, r.standard_error)).unwrap_or((0.0, String::new(), None));
    let low_confidence = matches!(se, Some(s) if s > 0.01 * a);
    ComparisonReport {
        layer: layer.tag(),
        n: layer.n(),
        a,
        argmax,
        method,
        samples,
        standard_error: se,
        low_confidence,
        max_length: layer.max_length(),
        table: rows,
    }
}

pub fn comparison_constant_exact<L: Layer>(layer: &L) -> Result<ComparisonReport> {
    let weights = layer.exact_weights()?;
    let mut p: BTreeMap<L::Gen, f64> = BTreeMap::new();
    for (z, w) in layer.target_support()? {
        *p.entry(z).or_insert(0.0) += w;
    }
    let mut rows = Vec::new();
    for (z, w) in &weights {
        let pz = p.get(z).copied().unwrap_or(0.0);
        if pz <= 0.0 {
            return invalid(format!("representation uses {z:?}, which the target chain never proposes"));
        }
        rows.push(ComparisonRow {
            key: layer.class_of(z),
            a: w / pz,
            standard_error: None,
        });
    }
    rows.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(finish(layer, rows, ComparisonMethod::Exact, None))
}

/// Monte-Carlo estimate over `samples` source moves, split into a fixed
/// number of seeded chunks so the result does not depend on thread count.
pub fn comparison_constant_mc<L: Layer>(layer: &L, samples: u64, seed: u64) -> Result<ComparisonReport> {
    if samples == 0 {
        return invalid("need at least one sample");
    }
    let mut p: BTreeMap<String, f64> = BTreeMap::new();
    for (z, w) in layer.target_support()? {
        *p.entry(layer.class_of(&z)).or_insert(0.0) += w;
    }
    let per = samples.div_ceil(MC_CHUNKS);
    let parts: Vec<Result<BTreeMap<String, (f64, f64)>>> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let lo = c * per;
            let hi = ((c + 1) * per).min(samples);
            let mut rng = worker_rng(seed, c);
            let mut acc: BTreeMap<String, (f64, f64)> = BTreeMap::new();
            let mut counts: BTreeMap<String, f64> = BTreeMap::new();
            for _ in lo..hi {
                let y = layer.sample_source(&mut rng)?;
                let rep = layer.represent(&y, &mut rng)?;
                counts.clear();
                for z in &rep {
                    *counts.entry(layer.class_of(z)).or_insert(0.0) += 1.0;
                }
                let len = rep.len() as f64;
                for (k, c) in &counts {
                    let e = acc.entry(k.clone()).or_insert((0.0, 0.0));
                    e.0 += c * len;
                    e.1 += (c * len) * (c * len);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for part in parts {
        for (k, (s, s2)) in part? {
            let e = total.entry(k).or_insert((0.0, 0.0));
            e.0 += s;
            e.1 += s2;
        }
    }
    let nf = samples as f64;
    let mut rows = Vec::new();
    for (key, (s, s2)) in total {
        let pk = p.get(&key).copied().unwrap_or(0.0);
        if pk <= 0.0 {
            return invalid(format!("representation uses class {key}, which the target chain never proposes"));
        }
        let mean = s / nf;
        let var = (s2 / nf - mean * mean).max(0.0);
        rows.push(ComparisonRow {
            key,
            a: mean / pk,
            standard_error: Some((var / nf).sqrt() / pk),
        });
    }
    Ok(finish(layer, rows, ComparisonMethod::MonteCarlo, Some(samples)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirichletCheck {
    pub layer: LayerTag,
    pub n: usize,
    pub states: usize,
    pub a: f64,
    pub trials: usize,
    pub failures: usize,
    pub worst_ratio: f64,
}

/// Walks of the source and target laws on the group they generate.
pub fn layer_chains<L: Layer>(layer: &L) -> Result<(FiniteChain, FiniteChain)> {
    let src = layer.source_elements()?;
    let tgt = layer.target_elements()?;
    let mut all: Vec<L::Elem> = src.iter().chain(&tgt).map(|(e, _)| e.clone()).collect();
    all.sort();
    all.dedup();
    let w = 1.0 / all.len() as f64;
    let all: Vec<(L::Elem, f64)> = all.into_iter().map(|e| (e, w)).collect();
    let (_, states) = FiniteChain::from_group_walk(&all, layer.identity(), |a, b| layer.mul(a, b))?;
    let index: BTreeMap<L::Elem, usize> = states.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let k = states.len();
    let build = |law: &[(L::Elem, f64)]| -> Result<FiniteChain> {
        let mut p = vec![0.0; k * k];
        for (i, x) in states.iter().enumerate() {
            for (g, w) in law {
                p[i * k + index[&layer.mul(x, g)]] += w;
            }
        }
        FiniteChain::new(k, p, vec![1.0 / k as f64; k])
    };
    Ok((build(&src)?, build(&tgt)?))
}

/// Checks `E~(f, f) <= A E(f, f)` for random functions on the generated group.
pub fn dirichlet_comparison_check<L: Layer>(layer: &L, a: f64, trials: usize, seed: u64, rel_tol: f64) -> Result<DirichletCheck> {
    let (src, tgt) = layer_chains(layer)?;
    let mut rng = master_rng(seed);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f: Vec<f64> = (0..src.len()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let es = dirichlet_form(&src, &f);
        let et = dirichlet_form(&tgt, &f);
        if et > 0.0 {
            worst = worst.max(es / et);
        }
        if es > a * et * (1.0 + rel_tol) + 1e-15 {
            failures += 1;
        }
    }
    Ok(DirichletCheck {
        layer: layer.tag(),
        n: layer.n(),
        states: src.len(),
        a,
        trials,
        failures,
        worst_ratio: worst,
    })
}
