use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::{column_cosine, ExperimentParams};
use crate::error::{invalid, Error, Result};
use crate::puzzle::{Configuration, Direction, TorusPoint};
use crate::rng::master_rng;

/// One step of the lazy hole walk: hold with probability 1/2, otherwise
/// one of the four directions uniformly.
#[inline]
pub fn lazy_hole_step<R: Rng + ?Sized>(rng: &mut R) -> Option<Direction> {
    match rng.random_range(0..8u32) {
        4 => Some(Direction::Up),
        5 => Some(Direction::Down),
        6 => Some(Direction::Left),
        7 => Some(Direction::Right),
        _ => None,
    }
}

/// Visits of the hole to the cell immediately right of one tile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileTrace {
    pub tile: u32,
    /// Times `tau_1 < tau_2 < ...` at which the hole sits right of the tile.
    pub visits: Vec<u64>,
    /// Column of the tile at each visit.
    pub columns: Vec<u32>,
}

impl TileTrace {
    /// `N_t`: visits at times `<= t`.
    pub fn count_at(&self, t: u64) -> u64 {
        self.visits.partition_point(|&v| v <= t) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSnapshot {
    pub t: u64,
    /// `N_t(s)` indexed by label; entry 0 (the hole) stays 0.
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracedRun {
    pub params: ExperimentParams,
    pub horizon: u64,
    pub traces: Vec<TileTrace>,
    pub snapshots: Vec<CountSnapshot>,
    /// Board at time `params.t`.
    pub at_t: Configuration,
    /// Board at the horizon.
    pub last: Configuration,
}

impl TracedRun {
    pub fn w_dist(&self) -> f64 {
        wilson_statistic(&self.at_t, &self.params.tiles)
    }

    /// The proof's intermediate statistic, when every tile reached `t_hat` visits.
    pub fn z(&self) -> Option<f64> {
        z_statistic(&self.traces, self.params.t_hat, self.params.n)
    }
}

/// Runs the lazy Loyd process from the experiment's start board for
/// `horizon` steps, recording visits for the tracked tiles and all counts at
/// each checkpoint. Time 0 is the start board.
pub fn run_traced_loyd(
    params: &ExperimentParams,
    horizon: u64,
    checkpoints: &[u64],
) -> Result<TracedRun> {
    if horizon < params.t {
        return invalid(format!("horizon {horizon} is shorter than T = {}", params.t));
    }
    let n = params.n;
    let mut rng = master_rng(params.seed);
    let mut config = params.start_configuration();
    let mut cps: Vec<u64> = checkpoints.iter().copied().filter(|&c| c <= horizon).collect();
    cps.sort_unstable();
    cps.dedup();

    let mut slot = vec![usize::MAX; n * n];
    for (i, &s) in params.tiles.iter().enumerate() {
        slot[s as usize] = i;
    }
    let mut traces: Vec<TileTrace> = params
        .tiles
        .iter()
        .map(|&tile| TileTrace {
            tile,
            visits: Vec::new(),
            columns: Vec::new(),
        })
        .collect();
    let mut counts = vec![0u64; n * n];
    let mut snapshots = Vec::with_capacity(cps.len());
    let mut next_cp = 0;
    let mut at_t = None;
    let left = Direction::Left.point(n);

    for t in 0..=horizon {
        if t > 0 {
            if let Some(d) = lazy_hole_step(&mut rng) {
                config.apply_move(d);
            }
        }
        let cell = config.hole().add(left, n);
        let s = config.label_at(cell) as usize;
        counts[s] += 1;
        if slot[s] != usize::MAX {
            let tr = &mut traces[slot[s]];
            tr.visits.push(t);
            tr.columns.push(cell.x);
        }
        if t == params.t {
            at_t = Some(config.clone());
        }
        while next_cp < cps.len() && cps[next_cp] == t {
            snapshots.push(CountSnapshot {
                t,
                counts: counts.clone(),
            });
            next_cp += 1;
        }
    }

    let total: u64 = counts.iter().sum();
    if total != horizon + 1 || counts[0] != 0 {
        return Err(Error::Verification(format!(
            "visit counts sum to {total}, expected {}",
            horizon + 1
        )));
    }
    Ok(TracedRun {
        params: params.clone(),
        horizon,
        traces,
        snapshots,
        at_t: at_t.expect("T is within the horizon"),
        last: config,
    })
}

/// Successive column changes of a tile between visits, in `{-1, 0, 1}`.
pub fn s_walk_extract(trace: &TileTrace, n: usize) -> Result<Vec<i8>> {
    trace
        .columns
        .windows(2)
        .map(|w| {
            let d = TorusPoint::new(w[1] as i64 - w[0] as i64, 0, n).signed(n).0;
            match d {
                -1 | 0 | 1 => Ok(d as i8),
                _ => Err(Error::Verification(format!(
                    "tile {} jumped {d} columns between visits",
                    trace.tile
                ))),
            }
        })
        .collect()
}

/// `W_dist = sum over s of f(column of s)` on a board.
pub fn wilson_statistic(config: &Configuration, tiles: &[u32]) -> f64 {
    let n = config.n();
    tiles
        .iter()
        .map(|&s| column_cosine(config.position_of(s).x, n))
        .sum()
}

/// `Z = sum over s of f(X at the t_hat-th visit)`.
pub fn z_statistic(traces: &[TileTrace], t_hat: u64, n: usize) -> Option<f64> {
    let k = t_hat.checked_sub(1)? as usize;
    traces
        .iter()
        .map(|tr| tr.columns.get(k).map(|&x| column_cosine(x, n)))
        .sum()
}

/// Least-squares slope through the origin of `f(X_{k+1})` on `f(X_k)`,
/// pooled over traces, with its standard error.
pub fn multiplier_slope<'a>(traces: impl IntoIterator<Item = &'a TileTrace>, n: usize) -> (f64, f64) {
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut pairs = Vec::new();
    for tr in traces {
        for w in tr.columns.windows(2) {
            let (a, b) = (column_cosine(w[0], n), column_cosine(w[1], n));
            sxx += a * a;
            sxy += a * b;
            pairs.push((a, b));
        }
    }
    if pairs.len() < 2 || sxx == 0.0 {
        return (f64::NAN, f64::INFINITY);
    }
    let slope = sxy / sxx;
    let rss: f64 = pairs.iter().map(|&(a, b)| (b - slope * a).powi(2)).sum();
    let se = (rss / (pairs.len() - 1) as f64 / sxx).sqrt();
    (slope, se)
}
