use std::f64::consts::PI;

use loyd_core::lower_bound::*;
use loyd_core::puzzle::{Configuration, Direction, HOLE};
use loyd_core::rng::master_rng;
use proptest::prelude::*;

fn scan_mu(limit: usize) -> f64 {
    (5..=limit)
        .map(|n| -((n * n) as f64) * (2.0 * PI / n as f64).cos().ln())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn mu_is_attained_at_five() {
    let scanned = scan_mu(1_000_000);
    assert!((mu() - scanned).abs() < 1e-12);
    let at_five = -25.0 * (72.0f64.to_radians()).cos().ln();
    assert!((mu() - at_five).abs() < 1e-12);
    // the scanned function decreases to 2 pi^2
    let tail = -(1e6f64 * 1e6) * (2.0 * PI / 1e6).cos().ln();
    assert!((tail - 2.0 * PI * PI).abs() < 1e-3);
    assert!(mu() > tail);
}

#[test]
fn eps_times_mu_is_an_eighth() {
    let p = choose_parameters(8, None).unwrap();
    assert_eq!(p.eps * p.mu, 0.125);
}

#[test]
fn t_hat_by_plug_in() {
    let p = choose_parameters(8, None).unwrap();
    let eps = 1.0 / (8.0 * scan_mu(10_000));
    let expected = (1.0 + eps * 64.0 * 8f64.ln()).floor() as u64;
    assert_eq!(p.t_hat, expected);
    assert_eq!(p.t, 63 * expected);
    let scaled = choose_parameters(8, Some(64.0)).unwrap();
    assert_eq!(scaled.t_hat, (1.0 + 64.0 * eps * 64.0 * 8f64.ln()).floor() as u64);
}

#[test]
fn small_boards_need_an_override() {
    for n in 2..5 {
        let err = choose_parameters(n, None).unwrap_err().to_string();
        assert!(err.contains("cos"), "{err}");
    }
    assert!(choose_parameters(3, Some(1.0)).is_err());
    assert!(choose_parameters(4, Some(1.0)).is_ok());
    assert!(choose_parameters(6, Some(0.0)).is_err());
}

#[test]
fn tracked_tiles_start_in_the_bright_columns_away_from_the_hole() {
    for n in [4usize, 5, 8, 11] {
        let p = choose_parameters(n, Some(1.0)).unwrap();
        let start = p.start_configuration();
        assert!(!p.tiles.is_empty());
        for s in 1..(n * n) as u32 {
            let inside = column_cosine(start.position_of(s).x, n) > 0.5;
            assert_eq!(inside, p.tiles.contains(&s));
        }
        let h = start.hole();
        for d in Direction::ALL {
            let s = start.label_at(h.add(d.point(n), n));
            assert!(!p.tiles.contains(&s));
        }
        let w0 = wilson_statistic(&start, &p.tiles);
        assert!(w0 >= p.tiles.len() as f64 / 2.0);
    }
}

#[test]
fn traced_run_invariants() {
    let n = 6;
    let p = choose_parameters(n, Some(8.0)).unwrap().with_seed(12);
    let horizon = 20 * p.t;
    let cps: Vec<u64> = (0..=10).map(|i| i * horizon / 10).collect();
    let run = run_traced_loyd(&p, horizon, &cps).unwrap();
    for snap in &run.snapshots {
        assert_eq!(snap.counts.iter().sum::<u64>(), snap.t + 1);
        assert_eq!(snap.counts[HOLE as usize], 0);
    }
    for w in run.snapshots.windows(2) {
        assert!(w[0].counts.iter().zip(&w[1].counts).all(|(a, b)| a <= b));
    }
    for tr in &run.traces {
        assert!(tr.visits.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(tr.visits.len(), tr.columns.len());
        assert!(tr.visits.first().is_none_or(|&t| t > 0));
        assert_eq!(tr.count_at(horizon), tr.visits.len() as u64);
        let inc = s_walk_extract(tr, n).unwrap();
        assert_eq!(inc.len(), tr.visits.len().saturating_sub(1));
    }
    // W_dist is a function of the serialized board alone
    let json = serde_json::to_string(&run.at_t).unwrap();
    let back: Configuration = serde_json::from_str(&json).unwrap();
    let w = wilson_statistic(&back, &p.tiles);
    assert_eq!(w, run.w_dist());
    assert!(w.abs() <= p.tiles.len() as f64);
    assert!(run_traced_loyd(&p, p.t - 1, &[]).is_err());
}

#[test]
fn visit_rate_matches_uniform_share() {
    let n = 5;
    let p = choose_parameters(n, None).unwrap();
    let horizon = 100_000;
    let rates: Vec<f64> = (0..50u64)
        .map(|seed| {
            let run = run_traced_loyd(&p.clone().with_seed(1000 + seed), horizon, &[]).unwrap();
            let total: usize = run.traces.iter().map(|t| t.visits.len()).sum();
            total as f64 / run.traces.len() as f64 / horizon as f64
        })
        .collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rates.len() - 1) as f64;
    let se = (var / rates.len() as f64).sqrt();
    assert!((mean - 1.0 / 24.0).abs() <= 3.0 * se, "{mean} vs {} (se {se})", 1.0 / 24.0);
}

#[test]
fn column_walk_is_symmetric_lazy_and_contracting() {
    let n = 5;
    let p = choose_parameters(n, None).unwrap();
    let mut up = 0u64;
    let mut down = 0u64;
    let mut hold = 0u64;
    let mut traces = Vec::new();
    for seed in 0..50u64 {
        let run = run_traced_loyd(&p.clone().with_seed(500 + seed), 100_000, &[]).unwrap();
        for tr in &run.traces {
            for d in s_walk_extract(tr, n).unwrap() {
                match d {
                    1 => up += 1,
                    -1 => down += 1,
                    _ => hold += 1,
                }
            }
        }
        traces.extend(run.traces);
    }
    assert!(binomial_two_sided(up, up + down) > 1e-3);
    assert!(hold > 0);
    let (slope, se) = multiplier_slope(&traces, n);
    assert!(slope >= (2.0 * PI / n as f64).cos() - 3.0 * se);
    let z = z_statistic(&traces, 1, n).unwrap();
    assert!(z.is_finite());
}

#[test]
fn reference_statistic_examples() {
    let n = 6;
    assert!(reference_statistic_w(n, n * n, 1).unwrap().abs() < 1e-9);
    assert!(reference_statistic_w(n, n * n + 1, 1).is_err());
    let k = 12;
    let draws: Vec<f64> = (0..10_000u64).map(|s| reference_statistic_w(n, k, s).unwrap()).collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let sd = (draws.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
    assert!(mean.abs() <= 3.0 * sd / (draws.len() as f64).sqrt());
    for alpha in [(k as f64).sqrt(), 2.0 * (k as f64).sqrt()] {
        let tail = draws.iter().filter(|&&w| w >= alpha).count() as f64 / draws.len() as f64;
        assert!(tail <= hoeffding_bound(alpha, k, 2.0), "alpha {alpha}: {tail}");
    }
}

#[test]
fn tv_separation_extremes() {
    let a: Vec<f64> = (0..400).map(|i| (i as f64 * 0.37).sin()).collect();
    let same = tv_separation(&a, &a, 200, 1).unwrap();
    assert!(same.estimate < 1e-12);
    let b: Vec<f64> = a.iter().map(|v| v + 10.0).collect();
    let apart = tv_separation(&a, &b, 200, 1).unwrap();
    assert!((apart.estimate - 1.0).abs() < 1e-12);
    assert!(apart.ci_low <= apart.estimate && apart.estimate <= apart.ci_high);
    assert!(tv_separation(&a[..100], &b, 10, 1).is_err());
    let flat = vec![1.0; 300];
    assert_eq!(tv_separation(&flat, &flat, 50, 2).unwrap().estimate, 0.0);
}

#[test]
fn separation_shrinks_with_longer_runs() {
    let n = 8;
    let seeds = 500u64;
    let mut ests = Vec::new();
    for c in [1.0, 4.0, 16.0, 64.0] {
        let p = choose_parameters(n, Some(c)).unwrap();
        let k = p.tiles.len();
        let dist: Vec<f64> = (0..seeds)
            .map(|s| run_traced_loyd(&p.clone().with_seed(s), p.t, &[]).unwrap().w_dist())
            .collect();
        let reference: Vec<f64> = (0..seeds).map(|s| reference_statistic_w(n, k, 1_000_000 + s).unwrap()).collect();
        ests.push(tv_separation(&dist, &reference, 200, 7).unwrap());
    }
    for w in ests.windows(2) {
        assert!(w[1].estimate <= w[0].ci_high, "{:?}", ests);
    }
    assert!(ests[0].estimate > 0.5);
}

#[test]
fn coupling_marginals_are_lazy_walks() {
    let mut rng = master_rng(2024);
    for variant in [CouplingVariant::Horizontal, CouplingVariant::Vertical] {
        let mut prim = [0u64; 5];
        let mut sec = [0u64; 5];
        let mut steps = 0;
        while steps < 1_000_000 {
            let run = coupled_holes(64, 0, 8, variant, false, &mut rng).unwrap();
            for i in 0..5 {
                prim[i] += run.primary_moves[i];
                sec[i] += run.secondary_moves[i];
            }
            steps += run.steps;
        }
        assert!(chi_square_test(&prim, &LAZY_STEP_LAW).1 > 1e-3);
        assert!(chi_square_test(&sec, &LAZY_STEP_LAW).1 > 1e-3);
        let total = prim.iter().sum::<u64>() as f64;
        for (o, q) in prim.iter().zip(LAZY_STEP_LAW) {
            let sd = (total * q * (1.0 - q)).sqrt();
            assert!((*o as f64 - total * q).abs() <= 4.0 * sd);
        }
    }
}

#[test]
fn coupled_holes_stay_together() {
    let mut rng = master_rng(5);
    let mut c = CoupledHoles::new(16, 0, 8, CouplingVariant::Horizontal).unwrap();
    let mut guard = 0;
    while !c.coupled() {
        c.step(&mut rng);
        guard += 1;
        assert!(guard < 1_000_000);
    }
    for _ in 0..1000 {
        c.step(&mut rng);
        assert_eq!(c.primary, c.secondary);
    }
    assert!(CoupledHoles::new(3, 0, 1, CouplingVariant::Vertical).is_err());
}

#[test]
fn coupling_failure_decays_like_inverse_distance() {
    let trials = 20_000;
    for variant in [CouplingVariant::Horizontal, CouplingVariant::Vertical] {
        let mut rng = master_rng(77);
        for d in [1u32, 2, 4, 8, 16] {
            let hits = (0..trials)
                .filter(|_| coupled_holes(64, 0, d, variant, false, &mut rng).unwrap().e_occurred)
                .count();
            let scaled = hits as f64 / trials as f64 * (d + 1) as f64;
            assert!(scaled <= 2.5, "{variant:?} d={d}: {scaled}");
        }
    }
}

#[test]
fn concentration_fits_stay_below_fixtures() {
    let seeds: Vec<u64> = (0..200).collect();
    let r = count_concentration(5, 3125, &seeds).unwrap();
    assert!(r.within(1.5, 3.0), "A {} C {}", r.a_hat, r.c_hat);
    assert!(r.checkpoints.iter().all(|c| c.min_variance > 0.0));
    assert!(count_concentration(5, 10_000, &seeds).is_err());
    assert!(count_concentration(5, 10, &seeds).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cosine_is_periodic(x in 0u32..1000, n in 2usize..50) {
        let a = column_cosine(x % n as u32, n);
        let b = column_cosine(x, n);
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn partition_identity_holds_for_every_seed(seed in 0u64..1_000_000, c in 1.0f64..20.0) {
        let p = choose_parameters(5, Some(c)).unwrap().with_seed(seed);
        let horizon = 3 * p.t + 17;
        let run = run_traced_loyd(&p, horizon, &[horizon]).unwrap();
        prop_assert_eq!(run.snapshots[0].counts.iter().sum::<u64>(), horizon + 1);
    }

    #[test]
    fn hoeffding_bound_is_a_probability(alpha in 0.0f64..50.0, k in 1usize..100) {
        let b = hoeffding_bound(alpha, k, 2.0);
        prop_assert!((0.0..=1.0).contains(&b));
    }
}
