use std::collections::BTreeMap;
use std::path::PathBuf;

use loyd_core::represent::{
    comparison_constant_exact, dirichlet_comparison_check, DirichletCheck, Layer, LayerTag, RtHcLayer, TorusLayer,
};
use loyd_core::rng::{master_rng, RNG_ALGORITHM};
use loyd_core::spectral::{
    eliminate_state, log_sobolev_estimate, log_sobolev_mixing_bound, mixing_time_exact, restrict_chain,
    spectral_report, verify_fflemma, FiniteChain, FflemmaReport, Loyd3Operator, MixingResult, SpectralReport,
    StartSet,
};
use loyd_core::walks::{ChainTag, GroupElement, MoveDistribution};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::Seeds;
use crate::output::OutDir;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Report,
    Fflemma,
    Hcor,
    Gt,
    Mixing,
}

fn default_chains() -> Vec<ChainTag> {
    vec![ChainTag::Loyd]
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::Report, Suite::Fflemma, Suite::Hcor, Suite::Gt, Suite::Mixing]
}

fn default_restarts() -> usize {
    32
}

fn default_trials() -> usize {
    500
}

fn default_gt_trials() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-10
}

fn default_t_max() -> usize {
    100_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralManifest {
    pub schema_version: u32,
    pub seeds: Seeds,
    pub n: usize,
    #[serde(default = "default_chains")]
    pub chains: Vec<ChainTag>,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    /// Restarts of the log-Sobolev minimisation.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Stopping tolerance of the log-Sobolev minimisation.
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_trials")]
    pub fflemma_trials: usize,
    #[serde(default = "default_gt_trials")]
    pub gt_trials: usize,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn group_chain(tag: ChainTag, n: usize) -> loyd_core::Result<(FiniteChain, Vec<GroupElement>)> {
    let law = MoveDistribution::new(tag, n)?.element_distribution()?;
    FiniteChain::from_group_walk(&law, GroupElement::identity(n), |a, b| a.mul(b))
}

#[derive(Serialize)]
struct PtidCheck {
    trials: usize,
    max_error: f64,
}

/// Removing a state without holding from a random reversible chain against
/// `p(i, j) + p(i, x) p(x, j)`.
fn ptid_check(trials: usize, seed: u64) -> loyd_core::Result<PtidCheck> {
    let mut rng = master_rng(seed);
    let mut max_error: f64 = 0.0;
    for _ in 0..trials {
        let k = rng.random_range(3..=12);
        let x = rng.random_range(0..k);
        let mut w = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                if a != x || b != x {
                    let v = rng.random::<f64>() + 0.05;
                    w[a * k + b] = v;
                    w[b * k + a] = v;
                }
            }
        }
        let c = FiniteChain::from_weights(k, &w)?;
        let e = eliminate_state(&c, x)?;
        let keep: Vec<usize> = (0..k).filter(|&y| y != x).collect();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                let direct = c.p(i, j) + c.p(i, x) * c.p(x, j);
                max_error = max_error.max((e.p(a, b) - direct).abs());
            }
        }
    }
    Ok(PtidCheck { trials, max_error })
}

#[derive(Serialize)]
struct HcorCheck {
    states: usize,
    construction_error: f64,
    alpha_hc: f64,
    alpha_or: f64,
    tolerance: f64,
    passed: bool,
}

fn hcor_check(m: &SpectralManifest, seed: u64) -> loyd_core::Result<HcorCheck> {
    let (hc, states) = group_chain(ChainTag::Hc, m.n)?;
    let keep: Vec<usize> = (0..states.len()).filter(|&i| states[i].in_omega()).collect();
    let restricted = restrict_chain(&hc, &keep)?;
    let or_law = MoveDistribution::new(ChainTag::Or, m.n)?.element_distribution()?;
    let index: BTreeMap<&GroupElement, usize> = keep.iter().enumerate().map(|(a, &i)| (&states[i], a)).collect();
    let k = keep.len();
    let mut direct = vec![0.0; k * k];
    for (a, &i) in keep.iter().enumerate() {
        for (g, w) in &or_law {
            direct[a * k + index[&states[i].mul(g)]] += w;
        }
    }
    let construction_error = restricted
        .kernel()
        .iter()
        .zip(&direct)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    let alpha_hc = log_sobolev_estimate(&hc, m.restarts, seed, m.tolerance)?.alpha;
    let alpha_or = log_sobolev_estimate(&restricted, m.restarts, seed, m.tolerance)?.alpha;
    Ok(HcorCheck {
        states: k,
        construction_error,
        alpha_hc,
        alpha_or,
        tolerance: m.tolerance,
        passed: construction_error <= 1e-10 && alpha_or >= 0.5 * alpha_hc - 2.0 * m.tolerance,
    })
}

fn gt_layer<L: Layer>(layer: &L, trials: usize, seed: u64) -> loyd_core::Result<DirichletCheck> {
    let a = comparison_constant_exact(layer)?.a;
    dirichlet_comparison_check(layer, a, trials, seed, 1e-9)
}

/// Every layer defined at this `n`.
fn gt_checks(n: usize, trials: usize, seed: u64) -> loyd_core::Result<Vec<DirichletCheck>> {
    let mut out = vec![gt_layer(&RtHcLayer::new(n)?, trials, seed)?];
    for tag in LayerTag::ALL {
        if tag == LayerTag::RtHc {
            continue;
        }
        if let Ok(layer) = TorusLayer::new(tag, n) {
            out.push(gt_layer(&layer, trials, seed)?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct MixingSummary {
    chain: ChainTag,
    states: usize,
    starts: StartSet,
    t: usize,
    eps: f64,
    non_increasing: bool,
    logsob_bound: Option<f64>,
}

#[derive(Serialize)]
struct CurveRow {
    chain: ChainTag,
    t: usize,
    tv: f64,
}

fn non_increasing(curve: &[f64]) -> bool {
    curve.windows(2).all(|w| w[1] <= w[0] + 1e-15)
}

pub fn run(m: &SpectralManifest, out: &mut OutDir) -> CliResult<()> {
    let seeds = m.seeds.expand()?;
    let seed = seeds[0];
    let mut suites = m.suites.clone();
    suites.sort();
    suites.dedup();
    let mut failed: Vec<&str> = Vec::new();
    let mut report = serde_json::Map::new();
    report.insert("n".into(), json!(m.n));
    report.insert("rng".into(), json!(RNG_ALGORITHM));
    report.insert("seeds".into(), json!(seeds));

    let mut alphas: BTreeMap<ChainTag, f64> = BTreeMap::new();
    for suite in &suites {
        match suite {
            Suite::Report => {
                let mut reports: Vec<SpectralReport> = Vec::new();
                for &tag in &m.chains {
                    let (c, _) = group_chain(tag, m.n)?;
                    let r = spectral_report(tag.name(), m.n, &c, m.restarts, seed)?;
                    alphas.insert(tag, r.alpha_estimate);
                    reports.push(r);
                }
                report.insert("report".into(), json!(reports));
            }
            Suite::Fflemma => {
                let f: FflemmaReport = verify_fflemma(m.fflemma_trials, seed)?;
                let p = ptid_check(m.fflemma_trials, seed)?;
                if !f.passed() {
                    failed.push("fflemma");
                }
                if p.max_error > 1e-12 {
                    failed.push("ptid");
                }
                report.insert("fflemma".into(), json!(f));
                report.insert("ptid".into(), json!(p));
            }
            Suite::Hcor => {
                let h = hcor_check(m, seed)?;
                if !h.passed {
                    failed.push("hcor");
                }
                report.insert("hcor".into(), json!(h));
            }
            Suite::Gt => {
                let checks = gt_checks(m.n, m.gt_trials, seed)?;
                if checks.iter().any(|c| c.failures > 0) {
                    failed.push("gt");
                }
                report.insert("gt".into(), json!(checks));
            }
            Suite::Mixing => {
                let eps = (-1.0f64).exp();
                let mut summaries = Vec::new();
                let mut rows = Vec::new();
                for &tag in &m.chains {
                    let (res, states, bound): (MixingResult, usize, Option<f64>) = if m.n == 3 && tag == ChainTag::Loyd {
                        let op = Loyd3Operator::new();
                        let res = mixing_time_exact(&op, eps, StartSet::Transitive(Loyd3Operator::solved_state()), m.t_max)?;
                        (res, 362_880, None)
                    } else {
                        let (c, _) = group_chain(tag, m.n)?;
                        let res = mixing_time_exact(&c, eps, StartSet::All, m.t_max)?;
                        let alpha = match alphas.get(&tag) {
                            Some(&a) => a,
                            None => log_sobolev_estimate(&c, m.restarts, seed, m.tolerance)?.alpha,
                        };
                        let bound = log_sobolev_mixing_bound(alpha, 1.0 / c.len() as f64);
                        (res, c.len(), Some(bound))
                    };
                    let mono = non_increasing(&res.curve);
                    if !mono || bound.is_some_and(|b| b < res.t as f64) {
                        failed.push("mixing");
                    }
                    rows.extend(res.curve.iter().enumerate().map(|(t, &tv)| CurveRow { chain: tag, t, tv }));
                    summaries.push(MixingSummary {
                        chain: tag,
                        states,
                        starts: res.starts,
                        t: res.t,
                        eps,
                        non_increasing: mono,
                        logsob_bound: bound,
                    });
                }
                out.csv("mixing.csv", rows)?;
                report.insert("mixing".into(), json!(summaries));
            }
        }
    }
    failed.dedup();
    report.insert("failed".into(), json!(failed));
    out.json("spectral.json", &report)?;
    if !failed.is_empty() {
        return Err(CliError::Failed(format!("suites failed: {}", failed.join(", "))));
    }
    Ok(())
}
