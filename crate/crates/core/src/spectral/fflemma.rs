use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chain::{dirichlet_form, harmonic_extension, restrict_chain, FiniteChain};
use crate::error::Result;
use crate::rng::master_rng;

/// One random instance of the comparison between a chain and the chain
/// watched off a set where the test function is harmonic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FflemmaInstance {
    pub states: usize,
    pub weights: Vec<f64>,
    pub harmonic: Vec<usize>,
    pub boundary: Vec<f64>,
    pub full: f64,
    pub restricted: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FflemmaReport {
    pub trials: usize,
    pub failures: usize,
    /// Largest `E(f, f) / E~(f, f)` seen.
    pub worst_ratio: f64,
    pub counterexample: Option<FflemmaInstance>,
}

impl FflemmaReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random_connected_weights<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut w = vec![0.0; k * k];
    // random spanning tree, then extra edges
    for x in 1..k {
        let y = rng.random_range(0..x);
        let v = rng.random::<f64>() + 0.01;
        w[x * k + y] += v;
        w[y * k + x] += v;
    }
    for x in 0..k {
        for y in x..k {
            if rng.random_bool(0.3) {
                let v = rng.random::<f64>();
                w[x * k + y] += v;
                if x != y {
                    w[y * k + x] += v;
                }
            }
        }
    }
    w
}

/// Checks `E(f, f) <= E~(f, f)` on random reversible chains with at most 12
/// states, where `f` is harmonic on a random set `S` and `E~` is the Dirichlet
/// form of the chain watched on the complement of `S`.
pub fn verify_fflemma(trials: usize, seed: u64) -> Result<FflemmaReport> {
    let mut rng = master_rng(seed);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    let mut counterexample = None;
    for _ in 0..trials {
        let k = rng.random_range(2..=12);
        let w = random_connected_weights(k, &mut rng);
        let c = FiniteChain::from_weights(k, &w)?;
        let size = rng.random_range(0..k);
        let mut harmonic = sample(&mut rng, k, size).into_vec();
        harmonic.sort_unstable();
        let keep: Vec<usize> = (0..k).filter(|x| !harmonic.contains(x)).collect();
        let mut boundary = vec![0.0; k];
        for &x in &keep {
            boundary[x] = rng.random::<f64>() * 2.0 - 1.0;
        }
        let f = harmonic_extension(&c, &harmonic, &boundary)?;
        let r = restrict_chain(&c, &keep)?;
        let g: Vec<f64> = keep.iter().map(|&x| f[x]).collect();
        let full = dirichlet_form(&c, &f);
        let restricted = dirichlet_form(&r, &g);
        if restricted > 0.0 {
            worst = worst.max(full / restricted);
        }
        if full > restricted + 1e-9 {
            failures += 1;
            if counterexample.is_none() {
                counterexample = Some(FflemmaInstance {
                    states: k,
                    weights: w,
                    harmonic,
                    boundary,
                    full,
                    restricted,
                });
            }
        }
    }
    Ok(FflemmaReport {
        trials,
        failures,
        worst_ratio: worst,
        counterexample,
    })
}
