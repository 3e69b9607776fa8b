use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lower_bound::{chi_square_test, lazy_hole_step, step_index, LAZY_STEP_LAW};
use crate::puzzle::{Configuration, Direction, TorusPoint};
use crate::rng::worker_rng;

/// The torus with the origin removed and its opposite neighbours joined:
/// `(-1,0)` to `(1,0)` and `(0,-1)` to `(0,1)`. Vertices are the points
/// other than the origin, indexed by row-major index minus one.
///
/// This is the walk of the hole seen from a fixed tile: the hole moving
/// onto the tile's cell lands on the opposite side of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeGraph {
    n: usize,
    adj: Vec<[u32; 4]>,
}

impl TildeGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n <= 2 {
            return invalid(format!(
                "n = {n}: the joined neighbours of the origin coincide, so the graph degenerates"
            ));
        }
        let adj = (1..n * n)
            .map(|i| {
                let v = TorusPoint::from_index(i, n);
                let mut row = [0u32; 4];
                for (slot, d) in row.iter_mut().zip(Direction::ALL) {
                    *slot = Self::index_of(Self::neighbour(v, d, n), n) as u32;
                }
                row
            })
            .collect();
        Ok(TildeGraph { n, adj })
    }

    fn neighbour(v: TorusPoint, d: Direction, n: usize) -> TorusPoint {
        let w = v.add(d.point(n), n);
        if w.is_origin() {
            w.add(d.point(n), n)
        } else {
            w
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn index_of(p: TorusPoint, n: usize) -> usize {
        assert!(!p.is_origin(), "the origin is not a vertex");
        p.index(n) - 1
    }

    pub fn point(&self, v: usize) -> TorusPoint {
        TorusPoint::from_index(v + 1, self.n)
    }

    /// Neighbour of `v` in direction `d`.
    pub fn step(&self, v: usize, d: Direction) -> usize {
        self.adj[v][step_index(Some(d))] as usize
    }

    /// Neighbours with multiplicity, one per direction.
    pub fn neighbours(&self, v: usize) -> [u32; 4] {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Lazy kernel: 1/2 to stay, 1/8 per incident edge.
    pub fn kernel(&self, v: usize, w: usize) -> f64 {
        let edges = self.adj[v].iter().filter(|&&u| u as usize == w).count();
        edges as f64 / 8.0 + if v == w { 0.5 } else { 0.0 }
    }

    /// One step of the lazy walk applied to a distribution.
    pub fn push(&self, src: &[f64], dst: &mut [f64]) {
        // The kernel is symmetric, so pulling from neighbours is pushing.
        for (v, out) in dst.iter_mut().enumerate() {
            let a = &self.adj[v];
            *out = 0.5 * src[v]
                + 0.125 * (src[a[0] as usize] + src[a[1] as usize] + src[a[2] as usize] + src[a[3] as usize]);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelCurve {
    pub n: usize,
    pub start: TorusPoint,
    /// `m(t) = max_y |p^t(x, y) - pi(y)|` for `t = 1..=t_max`.
    pub deviation: Vec<f64>,
    /// `max_t t * m(t)`.
    pub a_hat: f64,
    pub argmax: u64,
    /// Largest `|sum_y p^t(x, y) - 1|` seen.
    pub mass_error: f64,
}

impl HeatKernelCurve {
    pub fn at(&self, t: u64) -> f64 {
        self.deviation[t as usize - 1]
    }

    /// True when `m` never increases by more than `tol`.
    pub fn non_increasing(&self, tol: f64) -> bool {
        self.deviation.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Iterates the lazy walk from `start` and records the sup-deviation from
/// the uniform law at each time.
pub fn heat_kernel_curve(g: &TildeGraph, start: TorusPoint, t_max: u64) -> Result<HeatKernelCurve> {
    if g.n > 64 {
        return invalid("heat kernel iteration is limited to n <= 64");
    }
    if start.is_origin() || start.x as usize >= g.n || start.y as usize >= g.n {
        return invalid(format!("{start:?} is not a vertex"));
    }
    let size = g.len();
    let pi = 1.0 / size as f64;
    let mut p = vec![0.0; size];
    p[TildeGraph::index_of(start, g.n)] = 1.0;
    let mut q = vec![0.0; size];
    let mut deviation = Vec::with_capacity(t_max as usize);
    let mut mass_error: f64 = 0.0;
    let (mut a_hat, mut argmax) = (0.0, 0);
    for t in 1..=t_max {
        g.push(&p, &mut q);
        std::mem::swap(&mut p, &mut q);
        let m = p.iter().map(|v| (v - pi).abs()).fold(0.0, f64::max);
        mass_error = mass_error.max((p.iter().sum::<f64>() - 1.0).abs());
        if t as f64 * m > a_hat {
            a_hat = t as f64 * m;
            argmax = t;
        }
        deviation.push(m);
    }
    Ok(HeatKernelCurve {
        n: g.n,
        start,
        deviation,
        a_hat,
        argmax,
        mass_error,
    })
}

/// Distribution of the lazy walk after `t` steps from vertex `v`.
pub fn heat_kernel_row(g: &TildeGraph, v: usize, t: u64) -> Vec<f64> {
    let mut p = vec![0.0; g.len()];
    p[v] = 1.0;
    let mut q = vec![0.0; g.len()];
    for _ in 0..t {
        g.push(&p, &mut q);
        std::mem::swap(&mut p, &mut q);
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeWalkReport {
    pub n: usize,
    pub steps: u64,
    pub segments: usize,
    pub segment_len: u64,
    /// Steps where the relative position did not follow the graph edge.
    pub mismatches: u64,
    /// Times the hole and the tracked tile shared a cell.
    pub origin_hits: u64,
    /// Steps taken from `(1,0)` that swapped the hole with the tile.
    pub swaps_from_right: u64,
    /// Those swaps that landed the relative position on `(-1,0)`.
    pub swaps_landing_left: u64,
    pub transition_p: f64,
    /// Goodness of fit of segment endpoints against the exact heat kernel.
    pub loyd_endpoint_p: f64,
    pub tilde_endpoint_p: f64,
}

impl RelativeWalkReport {
    pub fn passes(&self, level: f64) -> bool {
        self.mismatches == 0
            && self.origin_hits == 0
            && self.swaps_landing_left == self.swaps_from_right
            && self.transition_p >= level
            && self.loyd_endpoint_p >= level
            && self.tilde_endpoint_p >= level
    }
}

const TRACKED_TILE: u32 = 1;

fn endpoint_p(counts: &[u64], exact: &[f64]) -> f64 {
    // Pool cells with small expectation into one so the chi-square
    // approximation holds.
    let total: u64 = counts.iter().sum();
    let (mut obs, mut probs) = (Vec::new(), Vec::new());
    let (mut rest_o, mut rest_p) = (0u64, 0.0);
    for (&c, &p) in counts.iter().zip(exact) {
        if p * total as f64 >= 5.0 {
            obs.push(c);
            probs.push(p);
        } else {
            rest_o += c;
            rest_p += p;
        }
    }
    if rest_p > 0.0 {
        obs.push(rest_o);
        probs.push(rest_p);
    }
    chi_square_test(&obs, &probs).1
}

/// Runs the Loyd process tracking the hole's position relative to one tile
/// alongside an independent lazy walk on the graph, in segments of
/// `segment_len` steps restarted from the same state, and tests both
/// against the graph's step law and exact heat kernel.
pub fn relative_walk_equivalence(n: usize, steps: u64, segment_len: u64, seed: u64) -> Result<RelativeWalkReport> {
    let g = TildeGraph::new(n)?;
    if segment_len == 0 || steps < segment_len {
        return invalid("need at least one segment of positive length");
    }
    let segments = (steps / segment_len) as usize;
    let start_board = Configuration::solved(n);
    let rel = |c: &Configuration| c.hole().sub(c.position_of(TRACKED_TILE), n);
    let v0 = TildeGraph::index_of(rel(&start_board), n);

    struct Seg {
        mismatches: u64,
        origin_hits: u64,
        swaps_from_right: u64,
        swaps_landing_left: u64,
        moves: [u64; 5],
        loyd_end: usize,
        tilde_end: usize,
    }
    let right = TildeGraph::index_of(TorusPoint::new(1, 0, n), n);
    let left = TildeGraph::index_of(TorusPoint::new(-1, 0, n), n);
    let segs: Vec<Seg> = (0..segments as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = worker_rng(seed, i);
            let mut board = start_board.clone();
            let mut v = v0;
            let mut w = v0;
            let mut s = Seg {
                mismatches: 0,
                origin_hits: 0,
                swaps_from_right: 0,
                swaps_landing_left: 0,
                moves: [0; 5],
                loyd_end: 0,
                tilde_end: 0,
            };
            for _ in 0..segment_len {
                let d = lazy_hole_step(&mut rng);
                s.moves[step_index(d)] += 1;
                let before = board.position_of(TRACKED_TILE);
                if let Some(d) = d {
                    board.apply_move(d);
                }
                let r = rel(&board);
                if r.is_origin() {
                    s.origin_hits += 1;
                    continue;
                }
                let next = TildeGraph::index_of(r, n);
                let expect = d.map_or(v, |d| g.step(v, d));
                s.mismatches += (next != expect) as u64;
                if v == right && board.position_of(TRACKED_TILE) != before {
                    s.swaps_from_right += 1;
                    s.swaps_landing_left += (next == left) as u64;
                }
                v = next;
                if let Some(d) = lazy_hole_step(&mut rng) {
                    w = g.step(w, d);
                }
            }
            s.loyd_end = v;
            s.tilde_end = w;
            s
        })
        .collect();

    let mut moves = [0u64; 5];
    let mut loyd_counts = vec![0u64; g.len()];
    let mut tilde_counts = vec![0u64; g.len()];
    let (mut mismatches, mut origin_hits, mut sr, mut sl) = (0, 0, 0, 0);
    for s in &segs {
        for (m, c) in moves.iter_mut().zip(s.moves) {
            *m += c;
        }
        loyd_counts[s.loyd_end] += 1;
        tilde_counts[s.tilde_end] += 1;
        mismatches += s.mismatches;
        origin_hits += s.origin_hits;
        sr += s.swaps_from_right;
        sl += s.swaps_landing_left;
    }
    let exact = heat_kernel_row(&g, v0, segment_len);
    Ok(RelativeWalkReport {
        n,
        steps: segments as u64 * segment_len,
        segments,
        segment_len,
        mismatches,
        origin_hits,
        swaps_from_right: sr,
        swaps_landing_left: sl,
        transition_p: chi_square_test(&moves, &LAZY_STEP_LAW).1,
        loyd_endpoint_p: endpoint_p(&loyd_counts, &exact),
        tilde_endpoint_p: endpoint_p(&tilde_counts, &exact),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surgery_edges() {
        let g = TildeGraph::new(5).unwrap();
        assert_eq!(g.len(), 24);
        let v = TildeGraph::index_of(TorusPoint::new(1, 0, 5), 5);
        let w = TildeGraph::index_of(TorusPoint::new(-1, 0, 5), 5);
        assert_eq!(g.step(v, Direction::Left), w);
        assert_eq!(g.step(w, Direction::Right), v);
        let up = TildeGraph::index_of(TorusPoint::new(0, 1, 5), 5);
        let down = TildeGraph::index_of(TorusPoint::new(0, -1, 5), 5);
        assert_eq!(g.step(up, Direction::Down), down);
        assert!(TildeGraph::new(2).is_err());
    }

    #[test]
    fn kernel_rows_sum_to_one_and_are_symmetric() {
        for n in [3, 4, 7] {
            let g = TildeGraph::new(n).unwrap();
            for v in 0..g.len() {
                let row: f64 = (0..g.len()).map(|w| g.kernel(v, w)).sum();
                assert!((row - 1.0).abs() < 1e-15);
                for w in 0..g.len() {
                    assert_eq!(g.kernel(v, w), g.kernel(w, v));
                }
            }
        }
        let g = TildeGraph::new(3).unwrap();
        let a = TildeGraph::index_of(TorusPoint::new(1, 0, 3), 3);
        let b = TildeGraph::index_of(TorusPoint::new(2, 0, 3), 3);
        assert_eq!(g.kernel(a, b), 0.25);
    }
}
