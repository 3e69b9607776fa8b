use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::start_configuration;
use super::trace::lazy_hole_step;
use crate::error::{invalid, Result};
use crate::puzzle::Direction;
use crate::rng::master_rng;

const CHECKPOINTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub t: u64,
    /// Largest `|mean N_t(s) - t/(n^2-1)|` over tiles.
    pub max_mean_deviation: f64,
    pub max_variance: f64,
    pub min_variance: f64,
    /// `max_mean_deviation / ln t`.
    pub a_hat: f64,
    /// `max_variance * n^2 / (t ln t)`.
    pub c_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub t: u64,
    pub seeds: usize,
    pub checkpoints: Vec<CheckpointStats>,
    pub a_hat: f64,
    pub c_hat: f64,
}

impl ConcentrationReport {
    pub fn within(&self, a_bound: f64, c_bound: f64) -> bool {
        self.a_hat <= a_bound && self.c_hat <= c_bound
    }
}

/// Geometric grid from `n^2 ln n` to `t`, both ends included.
pub fn concentration_checkpoints(n: usize, t: u64) -> Vec<u64> {
    let lo = ((n * n) as f64 * (n as f64).ln()).ceil().max(2.0);
    let hi = t as f64;
    let mut v: Vec<u64> = (0..CHECKPOINTS)
        .map(|i| (lo * (hi / lo).powf(i as f64 / (CHECKPOINTS - 1) as f64)).round() as u64)
        .collect();
    v.push(t);
    v.sort_unstable();
    v.dedup();
    v
}

fn counts_for_seed(n: usize, cps: &[u64], seed: u64) -> Vec<Vec<u64>> {
    let mut rng = master_rng(seed);
    let (mut config, _) = start_configuration(n);
    let left = Direction::Left.point(n);
    let mut counts = vec![0u64; n * n];
    let mut out = Vec::with_capacity(cps.len());
    let mut next = 0;
    let horizon = *cps.last().expect("non-empty grid");
    for t in 0..=horizon {
        if t > 0 {
            if let Some(d) = lazy_hole_step(&mut rng) {
                config.apply_move(d);
            }
        }
        counts[config.label_at(config.hole().add(left, n)) as usize] += 1;
        if cps[next] == t {
            out.push(counts.clone());
            next += 1;
        }
    }
    out
}

/// Per-tile mean and variance across seeds of the visit counts `N_t(s)` at
/// a grid of times up to `t`, with the fitted constants of the
/// `A ln t` mean bound and the `C n^-2 t ln t` variance bound.
pub fn count_concentration(n: usize, t: u64, seeds: &[u64]) -> Result<ConcentrationReport> {
    if n < 2 {
        return invalid("board side must be at least 2");
    }
    let nf = n as f64;
    let lo = nf * nf * nf.ln();
    if (t as f64) < lo || t > (n as u64).pow(5) {
        return invalid(format!(
            "t = {t} is outside the window [n^2 ln n, n^5] = [{lo:.1}, {}]",
            (n as u64).pow(5)
        ));
    }
    if seeds.len() < 2 {
        return invalid("need at least two seeds for a variance");
    }
    let cps = concentration_checkpoints(n, t);
    let per_seed: Vec<Vec<Vec<u64>>> = seeds.par_iter().map(|&s| counts_for_seed(n, &cps, s)).collect();

    let m = seeds.len() as f64;
    let mut checkpoints = Vec::with_capacity(cps.len());
    for (ci, &tc) in cps.iter().enumerate() {
        let target = tc as f64 / (nf * nf - 1.0);
        let mut dev: f64 = 0.0;
        let mut vmax: f64 = 0.0;
        let mut vmin = f64::INFINITY;
        for s in 1..n * n {
            let xs = per_seed.iter().map(|r| r[ci][s] as f64);
            let mean = xs.clone().sum::<f64>() / m;
            let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            dev = dev.max((mean - target).abs());
            vmax = vmax.max(var);
            vmin = vmin.min(var);
        }
        let lt = (tc as f64).ln();
        checkpoints.push(CheckpointStats {
            t: tc,
            max_mean_deviation: dev,
            max_variance: vmax,
            min_variance: vmin,
            a_hat: dev / lt,
            c_hat: vmax * nf * nf / (tc as f64 * lt),
        });
    }
    let a_hat = checkpoints.iter().map(|c| c.a_hat).fold(0.0, f64::max);
    let c_hat = checkpoints.iter().map(|c| c.c_hat).fold(0.0, f64::max);
    Ok(ConcentrationReport {
        n,
        t,
        seeds: seeds.len(),
        checkpoints,
        a_hat,
        c_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_enforced() {
        let seeds: Vec<u64> = (0..4).collect();
        assert!(count_concentration(5, 10_000, &seeds).is_err());
        assert!(count_concentration(5, 30, &seeds).is_err());
        let r = count_concentration(5, 3125, &seeds).unwrap();
        assert_eq!(r.checkpoints.last().unwrap().t, 3125);
        assert!(r.checkpoints.iter().all(|c| c.min_variance >= 0.0));
    }
}
