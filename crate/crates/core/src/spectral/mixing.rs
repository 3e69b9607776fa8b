use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::FiniteChain;
use crate::error::{invalid, Error, Result};
use crate::puzzle::{perm, Configuration, Direction};

/// Push-forward of a distribution by one step of a chain with a uniform
/// stationary law.
pub trait StepOperator: Sync {
    fn size(&self) -> usize;
    fn push(&self, src: &[f64], dst: &mut [f64]);
}

impl StepOperator for FiniteChain {
    fn size(&self) -> usize {
        self.len()
    }

    fn push(&self, src: &[f64], dst: &mut [f64]) {
        let k = self.len();
        dst.fill(0.0);
        for x in 0..k {
            let m = src[x];
            if m == 0.0 {
                continue;
            }
            let row = &self.kernel()[x * k..(x + 1) * k];
            for y in 0..k {
                dst[y] += m * row[y];
            }
        }
    }
}

/// Lazy unit-move chain on all `9!` placements of the `3 x 3` torus, indexed
/// by Lehmer rank. The kernel is symmetric, so each entry of the next
/// distribution pulls from the four neighbours of its own state.
pub struct Loyd3Operator {
    neighbours: Vec<[u32; 4]>,
}

impl Loyd3Operator {
    pub fn new() -> Self {
        let total = perm::factorial(9) as usize;
        let neighbours = (0..total)
            .into_par_iter()
            .map(|r| {
                let c = Configuration::from_labels(3, perm::unrank(9, r as u64)).expect("valid rank");
                let mut out = [0u32; 4];
                for (i, d) in Direction::ALL.iter().enumerate() {
                    let mut next = c.clone();
                    next.apply_move(*d);
                    out[i] = perm::rank(next.labels()) as u32;
                }
                out
            })
            .collect();
        Loyd3Operator { neighbours }
    }

    pub fn solved_state() -> usize {
        0
    }
}

impl Default for Loyd3Operator {
    fn default() -> Self {
        Self::new()
    }
}

impl StepOperator for Loyd3Operator {
    fn size(&self) -> usize {
        self.neighbours.len()
    }

    fn push(&self, src: &[f64], dst: &mut [f64]) {
        dst.par_chunks_mut(4096).enumerate().for_each(|(chunk, out)| {
            let base = chunk * 4096;
            for (i, v) in out.iter_mut().enumerate() {
                let y = base + i;
                let nb = &self.neighbours[y];
                let around = src[nb[0] as usize] + src[nb[1] as usize] + src[nb[2] as usize] + src[nb[3] as usize];
                *v = 0.5 * src[y] + 0.125 * around;
            }
        });
    }
}

pub fn tv_to_uniform(mu: &[f64]) -> f64 {
    let u = 1.0 / mu.len() as f64;
    0.5 * mu.iter().map(|v| (v - u).abs()).sum::<f64>()
}

pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Which starting states the worst case is taken over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartSet {
    All,
    /// A single state, valid when the chain is a walk on a group (the
    /// distance to stationarity does not depend on the start).
    Transitive(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingResult {
    /// First `t` with worst-case distance at most `eps`.
    pub t: usize,
    pub eps: f64,
    /// `curve[s]` is the worst-case distance after `s` steps, `s = 0..=t`.
    pub curve: Vec<f64>,
    pub starts: StartSet,
}

/// Exact mixing time of a chain whose stationary law is uniform, by
/// iterating the distribution from each start.
pub fn mixing_time_exact<K: StepOperator>(k: &K, eps: f64, starts: StartSet, t_max: usize) -> Result<MixingResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid("eps must lie in (0, 1)");
    }
    let size = k.size();
    let list: Vec<usize> = match starts {
        StartSet::All => (0..size).collect(),
        StartSet::Transitive(x) => {
            if x >= size {
                return invalid("start state out of range");
            }
            vec![x]
        }
    };
    let mut dists: Vec<Vec<f64>> = list
        .iter()
        .map(|&x| {
            let mut v = vec![0.0; size];
            v[x] = 1.0;
            v
        })
        .collect();
    let mut scratch = vec![0.0; size];
    let worst = |d: &[Vec<f64>]| d.iter().map(|v| tv_to_uniform(v)).fold(0.0, f64::max);
    let mut curve = vec![worst(&dists)];
    while *curve.last().expect("non-empty") > eps {
        if curve.len() > t_max {
            return Err(Error::NotConverged(format!("distance still above {eps} after {t_max} steps")));
        }
        for d in dists.iter_mut() {
            k.push(d, &mut scratch);
            std::mem::swap(d, &mut scratch);
        }
        curve.push(worst(&dists));
    }
    Ok(MixingResult {
        t: curve.len() - 1,
        eps,
        curve,
        starts,
    })
}

/// `(4 + log log(1 / pi_*)) / (4 alpha)`.
pub fn log_sobolev_mixing_bound(alpha: f64, pi_min: f64) -> f64 {
    (4.0 + (1.0 / pi_min).ln().ln()) / (4.0 * alpha)
}
