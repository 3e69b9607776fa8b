use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::{heat_kernel_row, TildeGraph};
use crate::error::{invalid, Result};
use crate::rng::master_rng;

/// Largest vertex count enumerated exhaustively (`n = 4`).
const EXHAUSTIVE_LIMIT: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConductanceMethod {
    Exhaustive,
    Annealing,
}

/// Smallest conductance found among sets of each size `k <= |V|/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductanceProfile {
    pub n: usize,
    pub states: usize,
    pub method: ConductanceMethod,
    pub exact: bool,
    /// `best[k - 1]`: least `Phi_S` over the sets of size `k` examined.
    pub best: Vec<f64>,
}

impl ConductanceProfile {
    pub fn pi_min(&self) -> f64 {
        1.0 / self.states as f64
    }

    /// `Phi(r) = min over |S| <= r |V|` of the best conductance, for
    /// `r >= pi_min`; constant beyond `1/2`.
    pub fn at(&self, r: f64) -> f64 {
        let k = ((r.min(0.5) * self.states as f64 + 1e-9).floor() as usize).clamp(1, self.best.len());
        self.best[..k].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(r, Phi(r))` at each size breakpoint `r = k / |V|`.
    pub fn envelope(&self) -> Vec<(f64, f64)> {
        (1..=self.best.len())
            .map(|k| {
                let r = k as f64 / self.states as f64;
                (r, self.at(r))
            })
            .collect()
    }

    /// `min over breakpoints of Phi(r) n sqrt(r)`.
    pub fn iso_constant(&self) -> f64 {
        let n = self.n as f64;
        self.envelope()
            .into_iter()
            .map(|(r, p)| p * n * r.sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    /// The same profile with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        ConductanceProfile {
            best: self.best.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

fn boundary_ends(g: &TildeGraph, members: &[bool], v: usize) -> i64 {
    g.neighbours(v).iter().filter(|&&u| !members[u as usize]).count() as i64
}

fn exhaustive(g: &TildeGraph) -> Vec<f64> {
    let size = g.len();
    let half = size / 2;
    let mut best = vec![f64::INFINITY; half];
    let masks: Vec<u32> = (0..size)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut members = vec![false; size];
    for set in 1u32..(1 << size) {
        let k = set.count_ones() as usize;
        if k > half {
            continue;
        }
        for (v, m) in members.iter_mut().enumerate() {
            *m = set >> v & 1 == 1;
        }
        let mut ends = 0;
        for v in 0..size {
            if members[v] && masks[v] & !set != 0 {
                ends += boundary_ends(g, &members, v);
            }
        }
        let phi = ends as f64 / (8.0 * k as f64);
        if phi < best[k - 1] {
            best[k - 1] = phi;
        }
    }
    best
}

fn anneal_size<R: Rng>(g: &TildeGraph, k: usize, iters: usize, rng: &mut R) -> f64 {
    let size = g.len();
    // Start from a breadth-first ball around a random vertex.
    let mut members = vec![false; size];
    let mut order = vec![rng.random_range(0..size)];
    members[order[0]] = true;
    let mut head = 0;
    while order.len() < k {
        if head == order.len() {
            let v = (0..size).find(|&v| !members[v]).expect("room for more");
            members[v] = true;
            order.push(v);
            continue;
        }
        for u in g.neighbours(order[head]) {
            if order.len() < k && !members[u as usize] {
                members[u as usize] = true;
                order.push(u as usize);
            }
        }
        head += 1;
    }
    let mut inside: Vec<usize> = order;
    let mut ends: i64 = inside.iter().map(|&v| boundary_ends(g, &members, v)).sum();
    let mut best = ends;
    let t0 = 2.0;
    for it in 0..iters {
        let temp = t0 * (1.0 - it as f64 / iters as f64) + 1e-3;
        let i = rng.random_range(0..inside.len());
        let out = inside[i];
        // Candidate to add: a random outside neighbour of a random member.
        let anchor = inside[rng.random_range(0..inside.len())];
        let add = g.neighbours(anchor)[rng.random_range(0..4)] as usize;
        if members[add] || add == out {
            continue;
        }
        let before = edge_contrib(g, &members, out) + edge_contrib(g, &members, add);
        members[out] = false;
        members[add] = true;
        let after = edge_contrib(g, &members, out) + edge_contrib(g, &members, add);
        let delta = after - before;
        if delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temp).exp() {
            inside[i] = add;
            ends += delta;
            best = best.min(ends);
        } else {
            members[out] = true;
            members[add] = false;
        }
    }
    best as f64 / (8.0 * k as f64)
}

/// Cut edges at `v`.
fn edge_contrib(g: &TildeGraph, members: &[bool], v: usize) -> i64 {
    g.neighbours(v).iter().filter(|&&u| members[u as usize] != members[v]).count() as i64
}

/// Conductance profile of the lazy walk on the graph. Enumerates every set
/// when `|V| <= 15`, otherwise anneals within each set size using `budget`
/// proposals in total.
pub fn conductance_profile(g: &TildeGraph, budget: usize, seed: u64) -> Result<ConductanceProfile> {
    let size = g.len();
    if size < 2 {
        return invalid("graph too small for a profile");
    }
    if size <= EXHAUSTIVE_LIMIT {
        return Ok(ConductanceProfile {
            n: g.n(),
            states: size,
            method: ConductanceMethod::Exhaustive,
            exact: true,
            best: exhaustive(g),
        });
    }
    Ok(annealed_profile(g, budget, seed))
}

/// The annealing heuristic regardless of graph size.
pub fn annealed_profile(g: &TildeGraph, budget: usize, seed: u64) -> ConductanceProfile {
    let half = g.len() / 2;
    let per_size = (budget / half.max(1)).max(1);
    let mut rng = master_rng(seed);
    let best = (1..=half)
        .map(|k| {
            if k == 1 {
                0.5
            } else {
                anneal_size(g, k, per_size, &mut rng)
            }
        })
        .collect();
    ConductanceProfile {
        n: g.n(),
        states: g.len(),
        method: ConductanceMethod::Annealing,
        exact: false,
        best,
    }
}

/// The edge-boundary conductance of an explicit set.
pub fn set_conductance(g: &TildeGraph, set: &[usize]) -> f64 {
    let mut members = vec![false; g.len()];
    for &v in set {
        members[v] = true;
    }
    let ends: i64 = set.iter().map(|&v| boundary_ends(g, &members, v)).sum();
    ends as f64 / (8.0 * set.len() as f64)
}

/// `integral from lo to hi of 4 / (u Phi(u)^2) du` for the step profile.
pub fn profile_integral(profile: &ConductanceProfile, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    // Breakpoints where Phi can change, then the flat tail past 1/2.
    let mut cuts: Vec<f64> = (1..=profile.best.len())
        .map(|k| k as f64 / profile.states as f64)
        .chain([0.5])
        .filter(|&r| r > lo && r < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let mut a = lo;
    for b in cuts.into_iter().chain([hi]) {
        let phi = profile.at(a);
        total += 4.0 / (phi * phi) * (b / a).ln();
        a = b;
    }
    total
}

/// `ceil(1 + integral from pi_min to 4/eps of 4 du / (u Phi(u)^2))`.
pub fn hk2_sufficient_time(profile: &ConductanceProfile, pi_min: f64, eps: f64) -> Result<u64> {
    if !(eps > 0.0) || !(pi_min > 0.0) {
        return invalid("pi_min and eps must be positive");
    }
    if pi_min < profile.pi_min() - 1e-15 {
        return invalid("profile does not cover values below its smallest set");
    }
    if profile.best.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return invalid("profile has gaps");
    }
    Ok((1.0 + profile_integral(profile, pi_min, 4.0 / eps)).ceil() as u64)
}

/// Largest `|p^t(x,y) - pi(y)| / pi(y)` over all pairs.
pub fn uniform_relative_error(g: &TildeGraph, t: u64) -> f64 {
    let pi = 1.0 / g.len() as f64;
    (0..g.len())
        .map(|v| {
            heat_kernel_row(g, v, t)
                .iter()
                .map(|p| (p - pi).abs() / pi)
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_conductance_is_half() {
        for n in [3, 5, 9] {
            let g = TildeGraph::new(n).unwrap();
            for v in 0..g.len() {
                assert_eq!(set_conductance(&g, &[v]), 0.5);
            }
        }
    }

    #[test]
    fn exhaustive_profile_is_monotone() {
        let g = TildeGraph::new(4).unwrap();
        let p = conductance_profile(&g, 0, 0).unwrap();
        assert!(p.exact);
        let env = p.envelope();
        assert!(env.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(env[0].1, 0.5);
        assert!(p.iso_constant() > 0.0);
    }

    #[test]
    fn integral_scaling_and_empty_range() {
        let g = TildeGraph::new(4).unwrap();
        let p = conductance_profile(&g, 0, 0).unwrap();
        let a = profile_integral(&p, p.pi_min(), 20.0);
        let b = profile_integral(&p.scaled(2.0), p.pi_min(), 20.0);
        assert!((a - 4.0 * b).abs() < 1e-12 * a);
        assert_eq!(hk2_sufficient_time(&p, p.pi_min(), 4.0 / p.pi_min()).unwrap(), 1);
    }
}
