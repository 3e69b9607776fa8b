use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::banded::BandedSystem;
use crate::error::{invalid, Error, Result};
use crate::rng::worker_rng;

/// Probability that simple random walk on Z^2 from `(0,1)` reaches the
/// line `y = k` before `y = 0`. Only the height matters; it moves to each
/// side with equal chance whenever it moves, so the answer is the exact
/// tridiagonal solve for the height alone.
pub fn gambler_ruin_exact(k: u32) -> Result<Ratio<i128>> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if k == 1 {
        return Ok(Ratio::from_integer(1));
    }
    // h(y) = (h(y-1) + h(y+1)) / 2 on 1..k-1, h(0) = 0, h(k) = 1.
    // Forward sweep writing h(y) = c_y h(y+1) + d_y.
    let half = Ratio::new(1, 2);
    let (mut c, mut d) = (Ratio::from_integer(0), Ratio::from_integer(0));
    let mut cs = Vec::with_capacity(k as usize);
    let mut ds = Vec::with_capacity(k as usize);
    for _ in 1..k {
        let denom = Ratio::from_integer(1) - half * c;
        c = half / denom;
        d = half * d / denom;
        cs.push(c);
        ds.push(d);
    }
    let mut h = Ratio::from_integer(1);
    for y in (0..cs.len()).rev() {
        h = cs[y] * h + ds[y];
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripSolve {
    pub k: u32,
    pub width: usize,
    pub unknowns: usize,
    pub value: f64,
    pub residual: f64,
}

/// The same probability from the full two-dimensional harmonic system on a
/// strip of `width` columns with periodic sides.
pub fn gambler_ruin_strip(k: u32, width: usize) -> Result<StripSolve> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if width < 3 {
        return invalid("strip needs at least 3 columns");
    }
    if k == 1 {
        return Ok(StripSolve {
            k,
            width,
            unknowns: 0,
            value: 1.0,
            residual: 0.0,
        });
    }
    let rows = k as usize - 1;
    let size = rows * width;
    let id = |x: usize, y: usize| (y - 1) * width + x;
    let mut a = BandedSystem::new(size, width);
    let mut b = vec![0.0; size];
    for y in 1..=rows {
        for x in 0..width {
            let i = id(x, y);
            a.add(i, i, 1.0);
            a.add(i, id((x + 1) % width, y), -0.25);
            a.add(i, id((x + width - 1) % width, y), -0.25);
            if y > 1 {
                a.add(i, id(x, y - 1), -0.25);
            }
            if y < rows {
                a.add(i, id(x, y + 1), -0.25);
            } else {
                b[i] += 0.25;
            }
        }
    }
    let (h, residual) = a.solve(&b)?;
    Ok(StripSolve {
        k,
        width,
        unknowns: size,
        value: h[id(0, 1)],
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitSide {
    pub k: u32,
    /// Ceiling counted as a miss.
    pub lower: f64,
    /// Ceiling counted as a hit.
    pub upper: f64,
    pub value: f64,
    pub ceiling: usize,
    pub unknowns: usize,
    pub residual: f64,
}

const EXIT_TOL: f64 = 1e-10;
const MAX_CEILING: usize = 1 << 16;

fn exit_solve(k: u32, ceiling: usize, ceiling_value: f64) -> Result<(f64, usize, f64)> {
    let width = 2 * k as usize - 1;
    let rows = ceiling - 1;
    let size = width * rows;
    let off = k as i64 - 1;
    let id = |x: i64, y: usize| (y - 1) * width + (x + off) as usize;
    let mut a = BandedSystem::new(size, width);
    let mut b = vec![0.0; size];
    for y in 1..=rows {
        for x in -off..=off {
            let i = id(x, y);
            a.add(i, i, 1.0);
            for nx in [x - 1, x + 1] {
                if nx.abs() == k as i64 {
                    b[i] += 0.25;
                } else {
                    a.add(i, id(nx, y), -0.25);
                }
            }
            if y > 1 {
                a.add(i, id(x, y - 1), -0.25);
            }
            if y < rows {
                a.add(i, id(x, y + 1), -0.25);
            } else {
                b[i] += 0.25 * ceiling_value;
            }
        }
    }
    let (h, residual) = a.solve(&b)?;
    Ok((h[id(0, 1)], size, residual))
}

/// Probability that simple random walk from `(0,1)` reaches `|x| = k`
/// before `y = 0`. The unbounded region is cut at a ceiling, solved once
/// with the ceiling as a hit and once as a miss; the ceiling is raised
/// until the two agree to 1e-10.
pub fn exit_side_exact(k: u32) -> Result<ExitSide> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let mut ceiling = (8 * k as usize).max(16);
    loop {
        let (lower, unknowns, r1) = exit_solve(k, ceiling, 0.0)?;
        let (upper, _, r2) = exit_solve(k, ceiling, 1.0)?;
        if upper - lower <= EXIT_TOL {
            return Ok(ExitSide {
                k,
                lower,
                upper,
                value: 0.5 * (lower + upper),
                ceiling,
                unknowns,
                residual: r1.max(r2),
            });
        }
        if ceiling >= MAX_CEILING {
            return Err(Error::NotConverged(format!(
                "exit-side brackets [{lower}, {upper}] at ceiling {ceiling}"
            )));
        }
        ceiling *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingalePoint {
    pub t: u64,
    pub mean_y: f64,
    pub se_y: f64,
    pub mean_q: f64,
    pub se_q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleCheck {
    pub k: u32,
    pub walks: usize,
    pub points: Vec<MartingalePoint>,
}

impl MartingaleCheck {
    /// Both stopped processes stay at their start value 1 within `z`
    /// standard errors at every recorded time.
    pub fn passes(&self, z: f64) -> bool {
        self.points.iter().all(|p| {
            (p.mean_y - 1.0).abs() <= z * p.se_y.max(1e-12) && (p.mean_q - 1.0).abs() <= z * p.se_q.max(1e-12)
        })
    }
}

/// Samples walks from `(0,1)` stopped on `y = 0`, `y = k` or `|x| = k`, and
/// records the means of `Y` and `Y^2 - X^2` at times `0, 1, 2, 4, ...`.
pub fn martingale_check(k: u32, walks: usize, t_max: u64, seed: u64) -> Result<MartingaleCheck> {
    if k < 2 || walks < 2 {
        return invalid("need k >= 2 and at least two walks");
    }
    let mut times = vec![0u64];
    let mut t = 1;
    while t <= t_max {
        times.push(t);
        t *= 2;
    }
    let k = k as i64;
    let mut sy = vec![0.0; times.len()];
    let mut syy = vec![0.0; times.len()];
    let mut sq = vec![0.0; times.len()];
    let mut sqq = vec![0.0; times.len()];
    let mut rng = worker_rng(seed, 0);
    for _ in 0..walks {
        let (mut x, mut y) = (0i64, 1i64);
        let mut now = 0;
        for (i, &ti) in times.iter().enumerate() {
            while now < ti && !(y == 0 || y == k || x.abs() == k) {
                match rng.random_range(0..4u32) {
                    0 => x += 1,
                    1 => x -= 1,
                    2 => y += 1,
                    _ => y -= 1,
                }
                now += 1;
            }
            now = ti;
            let q = (y * y - x * x) as f64;
            sy[i] += y as f64;
            syy[i] += (y * y) as f64;
            sq[i] += q;
            sqq[i] += q * q;
        }
    }
    let m = walks as f64;
    let se = |s: f64, ss: f64| ((ss / m - (s / m).powi(2)).max(0.0) * m / (m - 1.0) / m).sqrt();
    let points = times
        .iter()
        .enumerate()
        .map(|(i, &t)| MartingalePoint {
            t,
            mean_y: sy[i] / m,
            se_y: se(sy[i], syy[i]),
            mean_q: sq[i] / m,
            se_q: se(sq[i], sqq[i]),
        })
        .collect();
    Ok(MartingaleCheck {
        k: k as u32,
        walks,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gambler_small_cases() {
        assert_eq!(gambler_ruin_exact(1).unwrap(), Ratio::from_integer(1));
        assert_eq!(gambler_ruin_exact(2).unwrap(), Ratio::new(1, 2));
        assert!(gambler_ruin_exact(0).is_err());
        let s = gambler_ruin_strip(7, 15).unwrap();
        assert!((s.value - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn exit_side_k1_closed_form() {
        // Only column 0 is interior; the miss probability decays like (2 - sqrt 3)^y.
        let e = exit_side_exact(1).unwrap();
        assert!((e.value - (3f64.sqrt() - 1.0)).abs() < 1e-10);
    }
}
