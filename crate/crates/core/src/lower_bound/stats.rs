use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use super::params::column_cosine;
use crate::error::{invalid, Result};
use crate::rng::master_rng;

/// Sum of `cos(2 pi x / n)` over `k` cells drawn without replacement.
pub fn reference_statistic_w(n: usize, k: usize, seed: u64) -> Result<f64> {
    if k > n * n {
        return invalid(format!("cannot draw {k} cells from {}", n * n));
    }
    let mut rng = master_rng(seed);
    Ok(sample(&mut rng, n * n, k)
        .into_iter()
        .map(|i| column_cosine((i % n) as u32, n))
        .sum())
}

/// Hoeffding's tail bound `exp(-2 a^2 / (k (b - a)^2))` for a sum of `k`
/// draws valued in an interval of length `range`.
pub fn hoeffding_bound(alpha: f64, k: usize, range: f64) -> f64 {
    (-2.0 * alpha * alpha / (k as f64 * range * range)).exp()
}

/// Two-sided exact binomial p-value for `successes` out of `trials` at `p = 1/2`.
pub fn binomial_two_sided(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let b = Binomial::new(0.5, trials).expect("valid binomial");
    let low = successes.min(trials - successes);
    (2.0 * b.cdf(low)).min(1.0)
}

/// Pearson chi-square statistic and upper-tail p-value of observed counts
/// against expected probabilities.
pub fn chi_square_test(observed: &[u64], probs: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p > 0.0 {
            let e = p * total as f64;
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if cells < 2 || total == 0 {
        return (stat, 1.0);
    }
    let chi = ChiSquared::new((cells - 1) as f64).expect("positive dof");
    (stat, chi.sf(stat))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bins: usize,
    pub bootstrap: usize,
}

const MAX_BINS: usize = 10_000;
const MIN_SAMPLES: usize = 200;

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

enum Binning {
    Point,
    Distinct(Vec<f64>),
    Uniform { lo: f64, width: f64, bins: usize },
}

impl Binning {
    fn bins(&self) -> usize {
        match self {
            Binning::Point => 1,
            Binning::Distinct(v) => v.len(),
            Binning::Uniform { bins, .. } => *bins,
        }
    }

    fn bin(&self, v: f64) -> usize {
        match self {
            Binning::Point => 0,
            Binning::Distinct(vals) => vals.partition_point(|&u| u < v).min(vals.len() - 1),
            Binning::Uniform { lo, width, bins } => (((v - lo) / width) as usize).min(bins - 1),
        }
    }

    fn tv(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut ha = vec![0u64; self.bins()];
        let mut hb = vec![0u64; self.bins()];
        for &v in a {
            ha[self.bin(v)] += 1;
        }
        for &v in b {
            hb[self.bin(v)] += 1;
        }
        let (na, nb) = (a.len() as f64, b.len() as f64);
        0.5 * ha
            .iter()
            .zip(&hb)
            .map(|(&x, &y)| (x as f64 / na - y as f64 / nb).abs())
            .sum::<f64>()
    }
}

fn binning(pooled: &mut [f64]) -> Binning {
    pooled.sort_by(f64::total_cmp);
    let (lo, hi) = (pooled[0], pooled[pooled.len() - 1]);
    if hi == lo {
        return Binning::Point;
    }
    let iqr = quantile(pooled, 0.75) - quantile(pooled, 0.25);
    if iqr == 0.0 {
        // Mostly tied data: compare the empirical laws value by value.
        let mut vals = pooled.to_vec();
        vals.dedup();
        return Binning::Distinct(vals);
    }
    let width = 2.0 * iqr / (pooled.len() as f64).cbrt();
    let bins = (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS);
    Binning::Uniform {
        lo,
        width: (hi - lo) / bins as f64,
        bins,
    }
}

/// Histogram estimate of the total variation distance between the laws of
/// two real samples, with a percentile bootstrap interval. Bins follow the
/// Freedman-Diaconis rule on the pooled sample and are kept fixed across
/// bootstrap replicates.
pub fn tv_separation(a: &[f64], b: &[f64], bootstrap: usize, seed: u64) -> Result<TvEstimate> {
    if a.len() < MIN_SAMPLES || b.len() < MIN_SAMPLES {
        return invalid(format!("need at least {MIN_SAMPLES} samples on each side"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return invalid("samples must be finite");
    }
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let rule = binning(&mut pooled);
    let estimate = rule.tv(a, b);

    let mut rng = master_rng(seed);
    let mut reps = Vec::with_capacity(bootstrap);
    let mut ra = vec![0.0; a.len()];
    let mut rb = vec![0.0; b.len()];
    for _ in 0..bootstrap {
        for v in ra.iter_mut() {
            *v = a[rng.random_range(0..a.len())];
        }
        for v in rb.iter_mut() {
            *v = b[rng.random_range(0..b.len())];
        }
        reps.push(rule.tv(&ra, &rb));
    }
    reps.sort_by(f64::total_cmp);
    let (ci_low, ci_high) = if reps.is_empty() {
        (estimate, estimate)
    } else {
        (quantile(&reps, 0.025), quantile(&reps, 0.975))
    };
    Ok(TvEstimate {
        estimate,
        ci_low,
        ci_high,
        bins: rule.bins(),
        bootstrap,
    })
}
