use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::puzzle::{Configuration, Direction, HOLE};

/// Largest side scanned when computing `mu`. The scanned function decreases
/// towards `2 pi^2` well before this.
const MU_SCAN_LIMIT: usize = 4096;

/// The test function `f(x) = cos(2 pi x / n)` on column coordinates.
pub fn column_cosine(x: u32, n: usize) -> f64 {
    (2.0 * PI * x as f64 / n as f64).cos()
}

fn mu_term(n: usize) -> f64 {
    -((n * n) as f64) * (2.0 * PI / n as f64).cos().ln()
}

/// `mu = max over n >= 5 of -n^2 ln cos(2 pi / n)`, so that
/// `cos(2 pi / n)^(n^2) >= e^-mu` for every `n >= 5`.
pub fn mu() -> f64 {
    static MU: OnceLock<f64> = OnceLock::new();
    *MU.get_or_init(|| {
        (5..=MU_SCAN_LIMIT)
            .map(mu_term)
            .fold(2.0 * PI * PI, f64::max)
    })
}

/// Parameters of one lower-bound experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub n: usize,
    pub mu: f64,
    pub eps: f64,
    /// Number of visits per tile at which the proof's statistic is read.
    pub t_hat: u64,
    /// Horizon `(n^2 - 1) * t_hat` at which the distinguishing statistic is read.
    pub t: u64,
    /// Tiles whose column starts with `f > 1/2`, ascending.
    pub tiles: Vec<u32>,
    pub seed: u64,
    pub c_user: f64,
    /// Hole steps to the right taken before the clock starts.
    pub start_offset: usize,
}

impl ExperimentParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn start_configuration(&self) -> Configuration {
        start_configuration(self.n).0
    }
}

/// The solved board with the hole walked `floor(n/2)` cells to the right,
/// so that it is away from column 0. Returns the board and the offset.
pub fn start_configuration(n: usize) -> (Configuration, usize) {
    let mut c = Configuration::solved(n);
    let offset = n / 2;
    for _ in 0..offset {
        c.apply_move(Direction::Right);
    }
    (c, offset)
}

/// Picks `mu`, `eps`, `t_hat`, `T` and the tile set `S` for side `n`.
///
/// Without `c_user` the constants are used as is and `n >= 5` is required.
/// With `c_user = c` the `eps n^2 ln n` term of `t_hat` is multiplied by `c`.
pub fn choose_parameters(n: usize, c_user: Option<f64>) -> Result<ExperimentParams> {
    let c = match c_user {
        None => {
            if n < 5 {
                return invalid(format!(
                    "n = {n}: cos(2 pi / n) = {:.3} is not positive, so mu is undefined below n = 5; pass a scale override",
                    (2.0 * PI / n as f64).cos()
                ));
            }
            1.0
        }
        Some(c) => {
            if !(c.is_finite() && c > 0.0) {
                return invalid(format!("scale override must be positive, got {c}"));
            }
            if n < 4 {
                return invalid(format!(
                    "n = {n}: every cell is adjacent to a tile whose column has f > 1/2"
                ));
            }
            c
        }
    };
    let mu = mu();
    let eps = 1.0 / (8.0 * mu);
    let nf = n as f64;
    let t_hat = (1.0 + c * eps * nf * nf * nf.ln()).floor() as u64;
    let t = (n * n - 1) as u64 * t_hat;

    let (start, start_offset) = start_configuration(n);
    let mut tiles: Vec<u32> = (1..(n * n) as u32)
        .filter(|&s| column_cosine(start.position_of(s).x, n) > 0.5)
        .collect();
    tiles.sort_unstable();

    let h = start.hole();
    for d in Direction::ALL {
        let s = start.label_at(h.add(d.point(n), n));
        if s != HOLE && tiles.binary_search(&s).is_ok() {
            return invalid(format!("hole starts next to tile {s} of the tracked set"));
        }
    }
    Ok(ExperimentParams {
        n,
        mu,
        eps,
        t_hat,
        t,
        tiles,
        seed: 0,
        c_user: c,
        start_offset,
    })
}
