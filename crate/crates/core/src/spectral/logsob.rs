use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::chain::{dirichlet_form, entropy, FiniteChain};
use super::gap::spectrum;
use crate::error::{Error, Result};
use crate::rng::master_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMethod {
    GridMinimization,
    RandomRestarts,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogSobolevEstimate {
    /// Smallest ratio found; an upper bound on the true constant.
    pub alpha: f64,
    pub argmin: Vec<f64>,
    pub method: AlphaMethod,
    pub restarts: usize,
    pub gap: f64,
}

/// `E(f, f) / ENT(f^2)`, or `None` when `f^2` is (numerically) constant.
pub fn log_sobolev_ratio(c: &FiniteChain, f: &[f64]) -> Option<f64> {
    let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
    let ent = entropy(c.pi(), &sq);
    let mean: f64 = c.pi().iter().zip(&sq).map(|(p, v)| p * v).sum();
    if !(ent > 1e-13 * mean) {
        return None;
    }
    Some(dirichlet_form(c, f) / ent)
}

fn gradient(c: &FiniteChain, f: &[f64], r: f64) -> Vec<f64> {
    let k = c.len();
    let pi = c.pi();
    let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
    let mean: f64 = pi.iter().zip(&sq).map(|(p, v)| p * v).sum();
    let ent = entropy(pi, &sq);
    (0..k)
        .map(|x| {
            let mut de = 0.0;
            for y in 0..k {
                let d = f[x] - f[y];
                de += d * (pi[x] * c.p(x, y) + pi[y] * c.p(y, x));
            }
            let dent = if sq[x] > 0.0 { 2.0 * f[x] * pi[x] * (sq[x] / mean).ln() } else { 0.0 };
            (de - r * dent) / ent
        })
        .collect()
}

fn normalize(c: &FiniteChain, f: &mut [f64]) {
    let norm: f64 = c.pi().iter().zip(f.iter()).map(|(p, v)| p * v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in f.iter_mut() {
            *v /= norm;
        }
    }
}

/// Quasi-Newton descent of the log-Sobolev ratio from `f`.
fn descend(c: &FiniteChain, mut f: Vec<f64>, tol: f64) -> Option<(f64, Vec<f64>)> {
    let k = c.len();
    normalize(c, &mut f);
    let mut r = log_sobolev_ratio(c, &f)?;
    let mut g = gradient(c, &f, r);
    let mut h = vec![0.0; k * k];
    for i in 0..k {
        h[i * k + i] = 1.0;
    }
    for _ in 0..3000 {
        let gnorm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < tol * 1e-3 {
            break;
        }
        let mut d: Vec<f64> = (0..k).map(|i| -(0..k).map(|j| h[i * k + j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            for i in 0..k {
                for j in 0..k {
                    h[i * k + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            d = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let cand: Vec<f64> = f.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            if let Some(rc) = log_sobolev_ratio(c, &cand) {
                if rc <= r + 1e-4 * step * slope {
                    accepted = Some((cand, rc));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((next, rn)) = accepted else { break };
        let gn = gradient(c, &next, rn);
        let s: Vec<f64> = next.iter().zip(&f).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        let improvement = r - rn;
        f = next;
        r = rn;
        g = gn;
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..k).map(|i| (0..k).map(|j| h[i * k + j] * yv[j]).sum()).collect();
            let yhy: f64 = yv.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..k {
                for j in 0..k {
                    h[i * k + j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        if improvement.abs() < tol * 1e-4 * r.abs() {
            break;
        }
    }
    normalize(c, &mut f);
    let r = log_sobolev_ratio(c, &f)?;
    Some((r, f))
}

/// Estimates the log-Sobolev constant `inf E(f,f) / ENT(f^2)` by local
/// minimization from random positive starts and from perturbations of the
/// constant function along the slowest eigenvector. The result is an upper
/// bound on the constant; `argmin` re-evaluates to `alpha`.
pub fn log_sobolev_estimate(c: &FiniteChain, restarts: usize, seed: u64, tol: f64) -> Result<LogSobolevEstimate> {
    let k = c.len();
    if k < 2 {
        return Err(Error::InvalidInput("need at least two states".into()));
    }
    let spec = spectrum(c)?;
    let gap = 1.0 - spec.values[1];
    let phi = &spec.vectors[1];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let consider = |cand: Option<(f64, Vec<f64>)>, best: &mut Option<(f64, Vec<f64>)>| {
        if let Some((r, f)) = cand {
            if best.as_ref().is_none_or(|b| r < b.0) {
                *best = Some((r, f));
            }
        }
    };
    let near_const: Vec<f64> = phi.iter().map(|v| 1.0 + 1e-3 * v).collect();
    consider(log_sobolev_ratio(c, &near_const).map(|r| (r, near_const.clone())), &mut best);
    // the second eigenvalue is often degenerate, so use its whole eigenspace
    let slow: Vec<&Vec<f64>> = (1..k)
        .filter(|&i| (spec.values[i] - spec.values[1]).abs() < 1e-9)
        .map(|i| &spec.vectors[i])
        .collect();
    let amps = [0.3, 1.0, 3.0];
    for v in &slow {
        for amp in amps {
            let f: Vec<f64> = v.iter().map(|x| (1.0 + amp * x).abs()).collect();
            consider(descend(c, f, tol), &mut best);
        }
    }
    let mut rng = master_rng(seed);
    let scales = [0.25, 0.5, 1.0, 2.0, 4.0];
    for i in 0..restarts {
        let f: Vec<f64> = if i % 4 == 3 {
            let coef: Vec<f64> = slow.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = coef.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
            let amp = amps[(i / 4) % amps.len()];
            (0..k)
                .map(|x| {
                    let v: f64 = slow.iter().zip(&coef).map(|(s, a)| a * s[x]).sum::<f64>() / norm;
                    (1.0 + amp * v).abs()
                })
                .collect()
        } else if i % 4 == 2 {
            (0..k).map(|_| if rng.random_bool(0.5) { 1.0 + 4.0 * rng.random::<f64>() } else { 1e-2 }).collect()
        } else {
            let s = scales[i % scales.len()];
            (0..k)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (s * z).exp()
                })
                .collect()
        };
        consider(descend(c, f, tol), &mut best);
    }
    let (alpha, argmin) = best.ok_or_else(|| Error::NotConverged("no start produced a finite ratio".into()))?;
    Ok(LogSobolevEstimate {
        alpha,
        argmin,
        method: AlphaMethod::RandomRestarts,
        restarts,
        gap,
    })
}
