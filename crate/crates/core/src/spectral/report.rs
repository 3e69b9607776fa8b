use serde::{Deserialize, Serialize};

use super::chain::FiniteChain;
use super::logsob::{log_sobolev_estimate, AlphaMethod};
use super::mixing::{log_sobolev_mixing_bound, mixing_time_exact, StartSet};
use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralReport {
    pub chain: String,
    pub n: usize,
    pub states: usize,
    pub gap: f64,
    pub alpha_estimate: f64,
    pub alpha_method: AlphaMethod,
    pub alpha_restarts: usize,
    pub mixing_eps: f64,
    pub mixing_time: usize,
    pub mixing_bound_logsob: f64,
}

/// Gap, log-Sobolev estimate and exact `e^{-1}` mixing time of a walk on a
/// group (uniform stationary law, so a single start suffices).
pub fn spectral_report(name: &str, n: usize, c: &FiniteChain, restarts: usize, seed: u64) -> Result<SpectralReport> {
    let ls = log_sobolev_estimate(c, restarts, seed, 1e-9)?;
    let eps = (-1.0f64).exp();
    let mix = mixing_time_exact(c, eps, StartSet::Transitive(0), 1_000_000)?;
    let pi_min = c.pi().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SpectralReport {
        chain: name.to_string(),
        n,
        states: c.len(),
        gap: ls.gap,
        alpha_estimate: ls.alpha,
        alpha_method: ls.method,
        alpha_restarts: restarts,
        mixing_eps: eps,
        mixing_time: mix.t,
        mixing_bound_logsob: log_sobolev_mixing_bound(ls.alpha, pi_min),
    })
}
