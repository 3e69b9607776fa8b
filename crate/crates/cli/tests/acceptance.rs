//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any check outside the known deviations fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use loyd_core::lower_bound::*;
use loyd_core::puzzle::TorusPoint;
use loyd_core::represent::*;
use loyd_core::rng::master_rng;
use loyd_core::spectral::*;
use loyd_core::tilde::*;
use loyd_core::walks::{ChainTag, GroupElement, MoveDistribution};
use num_rational::Ratio;
use rand::Rng;

// frozen fixtures
const PC_LOYD_PER_N2: f64 = 120.0;
const HEAT_A_HAT: f64 = 1.0;
const COUPLING_SCALED: f64 = 2.5;
const CONC_A: f64 = 1.5;
const CONC_C: f64 = 3.0;
const MIN_TOL: f64 = 1e-10;

struct Check {
    name: String,
    passed: bool,
    detail: String,
    /// Recorded deviation: reported, not enforced.
    known: bool,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known: false,
        });
    }

    fn known(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known: true,
        });
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn enforced_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.known)
    }
}

fn group_chain(tag: ChainTag, n: usize) -> (FiniteChain, Vec<GroupElement>) {
    let law = MoveDistribution::new(tag, n).unwrap().element_distribution().unwrap();
    FiniteChain::from_group_walk(&law, GroupElement::identity(n), |a, b| a.mul(b)).unwrap()
}

fn layers_at(n: usize) -> Vec<LayerTag> {
    LayerTag::ALL
        .into_iter()
        .filter(|&t| t == LayerTag::RtHc || TorusLayer::new(t, n).is_ok())
        .collect()
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::default();
    let six = [
        LayerTag::RtHc,
        LayerTag::OrBgb,
        LayerTag::BgbPc,
        LayerTag::PcNl,
        LayerTag::NlLoyd,
        LayerTag::HcLoyd,
    ];
    for tag in six {
        let ns: [usize; 3] = if tag == LayerTag::HcLoyd { [3, 5, 7] } else { [4, 6, 8] };
        for n in ns {
            let mut rng = master_rng(1000 + n as u64);
            let s = if tag == LayerTag::RtHc {
                verify_layer(&RtHcLayer::new(n).unwrap(), 10_000, &mut rng).unwrap()
            } else {
                verify_layer(&TorusLayer::new(tag, n).unwrap(), 10_000, &mut rng).unwrap()
            };
            c.check(
                format!("{} n={n}", tag.name()),
                s.failures == 0 && s.samples == 10_000,
                format!("{} failures, max length {}", s.failures, s.max_length),
            );
        }
    }
    c
}

// Counts hole-swap occurrences in (h,i)(h,j)(h,i) for every tile pair.
fn rt_hc_count(m: usize) -> f64 {
    let pairs = (m * (m - 1) / 2) as f64;
    let p_src = 0.5 / pairs;
    let p_tgt = 0.5 / (m - 1) as f64;
    (1..m)
        .map(|z| {
            let mut acc = 0.0;
            for i in 0..m {
                for j in i + 1..m {
                    let word: Vec<usize> = if i == 0 { vec![j] } else { vec![i, j, i] };
                    let hits = word.iter().filter(|&&w| w == z).count() as f64;
                    acc += p_src * hits * word.len() as f64;
                }
            }
            acc / p_tgt
        })
        .fold(0.0, f64::max)
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::default();
    for n in [2usize, 3, 4] {
        let m = n * n;
        let a = comparison_constant_exact(&RtHcLayer::new(n).unwrap()).unwrap().a;
        let oracle = rt_hc_count(m);
        let stated = 12.0 * (m - 1) as f64 / m as f64;
        c.check(format!("rt-hc n={n} counting oracle"), (a - oracle).abs() < 1e-9, format!("A={a:.6} oracle={oracle:.6}"));
        c.check(format!("rt-hc n={n} below 12(m-1)/m"), a <= stated + 1e-12 && a < 12.0, format!("A={a:.6} bound={stated:.6}"));
        c.known(
            format!("rt-hc n={n} equals 12(m-1)/m"),
            (a - stated).abs() < 1e-9,
            format!("A={a:.6} vs stated {stated:.6}; exact value is 2(6m-11)/m"),
        );
    }
    for n in [2usize, 4, 6] {
        let r = comparison_constant_exact(&TorusLayer::new(LayerTag::BgbPc, n).unwrap()).unwrap();
        c.check(format!("bgb-pc n={n}"), r.a <= 196.0, format!("A={:.4}", r.a));
    }
    let or = comparison_constant_mc(&TorusLayer::new(LayerTag::OrBgb, 10).unwrap(), 1_000_000, 42).unwrap();
    c.check(
        "or-bgb n=10 monte-carlo",
        (4.0..=5.0).contains(&or.a),
        format!("A={:.4} se={:?}", or.a, or.standard_error),
    );
    for n in [4usize, 6, 8] {
        let r = comparison_constant_exact(&TorusLayer::new(LayerTag::PcLoyd, n).unwrap()).unwrap();
        let per = r.a / (n * n) as f64;
        c.check(format!("pc-loyd n={n}"), per <= PC_LOYD_PER_N2, format!("A/n^2={per:.3}"));
    }
    c
}

fn gt_one<L: Layer>(c: &mut Criterion, layer: &L) {
    let a = comparison_constant_exact(layer).unwrap().a;
    let r = dirichlet_comparison_check(layer, a, 1000, 17, 1e-9).unwrap();
    c.check(
        format!("{} n=2", layer.tag().name()),
        r.failures == 0 && r.trials == 1000,
        format!("A={a:.4} worst ratio {:.4}, {} violations", r.worst_ratio, r.failures),
    );
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::default();
    for tag in layers_at(2) {
        if tag == LayerTag::RtHc {
            gt_one(&mut c, &RtHcLayer::new(2).unwrap());
        } else {
            gt_one(&mut c, &TorusLayer::new(tag, 2).unwrap());
        }
    }
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::default();
    let f = verify_fflemma(500, 2024).unwrap();
    c.check("fflemma 500 chains", f.passed() && f.trials == 500, format!("{} failures, worst ratio {:.6}", f.failures, f.worst_ratio));
    let mut rng = master_rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
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
        let ch = FiniteChain::from_weights(k, &w).unwrap();
        let e = eliminate_state(&ch, x).unwrap();
        let keep: Vec<usize> = (0..k).filter(|&y| y != x).collect();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                worst = worst.max((e.p(a, b) - (ch.p(i, j) + ch.p(i, x) * ch.p(x, j))).abs());
            }
        }
    }
    c.check("single-state elimination", worst <= 1e-12, format!("max entry error {worst:.2e}"));
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::default();
    let (hc, states) = group_chain(ChainTag::Hc, 2);
    let keep: Vec<usize> = (0..states.len()).filter(|&i| states[i].in_omega()).collect();
    let restricted = restrict_chain(&hc, &keep).unwrap();
    let law = MoveDistribution::new(ChainTag::Or, 2).unwrap().element_distribution().unwrap();
    let index: BTreeMap<&GroupElement, usize> = keep.iter().enumerate().map(|(a, &i)| (&states[i], a)).collect();
    let k = keep.len();
    let mut direct = vec![0.0; k * k];
    for (a, &i) in keep.iter().enumerate() {
        for (g, w) in &law {
            direct[a * k + index[&states[i].mul(g)]] += w;
        }
    }
    let err = restricted.kernel().iter().zip(&direct).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    c.check("two constructions agree", err <= 1e-10, format!("max entry gap {err:.2e}"));
    let a_hc = log_sobolev_estimate(&hc, 32, 5, MIN_TOL).unwrap().alpha;
    let a_or = log_sobolev_estimate(&restricted, 32, 5, MIN_TOL).unwrap().alpha;
    c.check(
        "alpha_or >= alpha_hc / 2",
        a_or >= 0.5 * a_hc - 2.0 * MIN_TOL,
        format!("alpha_or={a_or:.6} alpha_hc={a_hc:.6}"),
    );
    c
}

fn dense_tau(ch: &FiniteChain, eps: f64) -> usize {
    let k = ch.len();
    let p = ch.kernel();
    let mut m: Vec<f64> = (0..k * k).map(|i| if i / k == i % k { 1.0 } else { 0.0 }).collect();
    let u = 1.0 / k as f64;
    for t in 0.. {
        let worst = (0..k)
            .map(|x| 0.5 * (0..k).map(|y| (m[x * k + y] - u).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        if worst <= eps {
            return t;
        }
        let mut next = vec![0.0; k * k];
        for x in 0..k {
            for z in 0..k {
                let v = m[x * k + z];
                for y in 0..k {
                    next[x * k + y] += v * p[z * k + y];
                }
            }
        }
        m = next;
    }
    unreachable!()
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::default();
    let eps = (-1.0f64).exp();
    let (loyd, _) = group_chain(ChainTag::Loyd, 2);
    let exact = mixing_time_exact(&loyd, eps, StartSet::All, 10_000).unwrap();
    let oracle = dense_tau(&loyd, eps);
    c.check("n=2 tau vs dense oracle", exact.t == oracle && loyd.len() == 12, format!("t={} oracle={oracle}", exact.t));
    let op = Loyd3Operator::new();
    let r = mixing_time_exact(&op, eps, StartSet::Transitive(Loyd3Operator::solved_state()), 100_000).unwrap();
    let mono = r.curve.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    c.check(
        "n=3 tv curve",
        mono && *r.curve.last().unwrap() <= eps && op.size() == 362_880,
        format!("t={} final tv {:.4}", r.t, r.curve.last().unwrap()),
    );
    let alpha = log_sobolev_estimate(&loyd, 32, 3, MIN_TOL).unwrap().alpha;
    let bound = log_sobolev_mixing_bound(alpha, 1.0 / loyd.len() as f64);
    c.check("log-Sobolev bound", bound >= exact.t as f64, format!("bound {bound:.3} vs tau {}", exact.t));
    c
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::default();

    // partition identity on traced runs with checkpoints
    let mut partition_ok = true;
    let mut runs = 0;
    for n in [5usize, 8] {
        let p = choose_parameters(n, None).unwrap();
        let horizon = 20 * p.t.max(100);
        let cps: Vec<u64> = (0..=10).map(|i| i * horizon / 10).collect();
        for s in 0..20u64 {
            let run = run_traced_loyd(&p.clone().with_seed(s), horizon, &cps).unwrap();
            runs += 1;
            partition_ok &= run.snapshots.len() == cps.len()
                && run.snapshots.iter().all(|sn| sn.counts.iter().sum::<u64>() == sn.t + 1);
        }
    }
    c.check("partition identity", partition_ok, format!("{runs} runs"));

    // column walk increments, pre-registered seeds 500..550
    let n = 5;
    let p = choose_parameters(n, None).unwrap();
    let (mut up, mut down) = (0u64, 0u64);
    for s in 500..550u64 {
        let run = run_traced_loyd(&p.clone().with_seed(s), 100_000, &[]).unwrap();
        for tr in &run.traces {
            for d in s_walk_extract(tr, n).unwrap() {
                match d {
                    1 => up += 1,
                    -1 => down += 1,
                    _ => {}
                }
            }
        }
    }
    let pv = binomial_two_sided(up, up + down);
    c.check("increment symmetry", pv > 1e-3, format!("{up} up / {down} down, p={pv:.4}"));

    let seeds: Vec<u64> = (0..200).collect();
    let r = count_concentration(5, 3125, &seeds).unwrap();
    c.check(
        "count concentration",
        r.within(CONC_A, CONC_C),
        format!("A_hat={:.4} C_hat={:.4} (fixtures {CONC_A}, {CONC_C})", r.a_hat, r.c_hat),
    );

    let n = 8;
    let k = choose_parameters(n, None).unwrap().tiles.len();
    let draws: Vec<f64> = (0..10_000u64).map(|s| reference_statistic_w(n, k, s).unwrap()).collect();
    let mut worst = f64::NEG_INFINITY;
    for alpha in [0.5, 1.0, 1.5, 2.0].map(|f| f * (k as f64).sqrt()) {
        let tail = draws.iter().filter(|&&w| w >= alpha).count() as f64 / draws.len() as f64;
        worst = worst.max(tail - hoeffding_bound(alpha, k, 2.0));
    }
    c.check("Hoeffding tail", worst <= 0.0, format!("largest excess {worst:.4}"));

    let mut ests = Vec::new();
    for cu in [1.0, 4.0, 16.0, 64.0] {
        let p = choose_parameters(n, Some(cu)).unwrap();
        let dist: Vec<f64> = (0..500u64)
            .map(|s| run_traced_loyd(&p.clone().with_seed(s), p.t, &[]).unwrap().w_dist())
            .collect();
        let refs: Vec<f64> = (0..500u64).map(|s| reference_statistic_w(n, k, 1_000_000 + s).unwrap()).collect();
        ests.push(tv_separation(&dist, &refs, 200, 7).unwrap());
    }
    let mono = ests.windows(2).all(|w| w[1].estimate <= w[0].ci_high);
    let shown: Vec<String> = ests.iter().map(|e| format!("{:.3}", e.estimate)).collect();
    c.check("separation over c_user", mono, format!("TV {}", shown.join(" ")));
    c
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::default();
    for variant in [CouplingVariant::Horizontal, CouplingVariant::Vertical] {
        let mut rng = master_rng(2024);
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
        let (pa, pb) = (chi_square_test(&prim, &LAZY_STEP_LAW).1, chi_square_test(&sec, &LAZY_STEP_LAW).1);
        c.check(format!("{variant:?} marginals"), pa > 1e-3 && pb > 1e-3, format!("p={pa:.4}, {pb:.4}"));

        let mut rng = master_rng(77);
        let mut scaled = Vec::new();
        for d in [1u32, 2, 4, 8, 16] {
            let hits = (0..100_000)
                .filter(|_| coupled_holes(64, 0, d, variant, false, &mut rng).unwrap().e_occurred)
                .count();
            scaled.push(hits as f64 / 1e5 * (d + 1) as f64);
        }
        let worst = scaled.iter().copied().fold(0.0, f64::max);
        c.check(format!("{variant:?} P(E)(d+1)"), worst <= COUPLING_SCALED, format!("max {worst:.3}"));
    }
    c
}

fn criterion_9() -> Criterion {
    let mut c = Criterion::default();
    let exact_ok = (1..=30u32).all(|k| gambler_ruin_exact(k).unwrap() == Ratio::new(1, k as i128));
    c.check("gambler exact 1/k", exact_ok, "k <= 30");
    let strip_err = (1..=30u32)
        .map(|k| (gambler_ruin_strip(k, 11).unwrap().value - 1.0 / k as f64).abs())
        .fold(0.0, f64::max);
    c.check("gambler strip solve", strip_err <= 1e-10, format!("max error {strip_err:.2e}"));
    let exit_ok = (1..=20u32).all(|k| exit_side_exact(k).unwrap().value <= 2.0 / k as f64);
    c.check("exit side <= 2/k", exit_ok, "k = 1..20");

    let mut a_hat: f64 = 0.0;
    for n in [5usize, 8, 16, 32] {
        let g = TildeGraph::new(n).unwrap();
        let h = (n / 2) as i64;
        for start in [TorusPoint::new(1, 0, n), TorusPoint::new(h, h, n)] {
            a_hat = a_hat.max(heat_kernel_curve(&g, start, (50 * n * n) as u64).unwrap().a_hat);
        }
    }
    c.check("heat kernel A_hat", a_hat <= HEAT_A_HAT, format!("max A_hat {a_hat:.4}"));

    let g = TildeGraph::new(4).unwrap();
    let prof = conductance_profile(&g, 0, 0).unwrap();
    let iso = prof.iso_constant();
    let env_ok = prof.envelope().iter().all(|&(u, phi)| phi * 4.0 * u.sqrt() >= iso - 1e-12);
    c.check("conductance n=4", prof.exact && iso > 0.0 && env_ok, format!("C={iso:.4}"));
    let mut rows = Vec::new();
    let mut ok = true;
    for eps in [0.5, 0.1, 0.01] {
        let t = hk2_sufficient_time(&prof, prof.pi_min(), eps).unwrap();
        let e = uniform_relative_error(&g, t);
        ok &= e <= eps;
        rows.push(format!("eps {eps}: t={t} err={e:.2e}"));
    }
    c.check("hk2 cross-check", ok, rows.join("; "));
    c
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn criterion_10(start: Instant) -> Criterion {
    let mut c = Criterion::default();
    let tmp = tempfile::tempdir().unwrap();
    let manifests = [
        (
            "simulate",
            r#"{"schema_version":1,"seeds":{"master":11,"count":40},"n":8,"c_user":4.0,"checkpoints":[100,1000],"traces":true}"#,
        ),
        (
            "simulate",
            r#"{"schema_version":1,"seeds":[1,2,3],"experiment":"coupling","n":32,"distances":[1,4],"trials":200}"#,
        ),
        (
            "represent",
            r#"{"schema_version":1,"seeds":[5,6],"layer":"or-bgb","n":6,"count":500,"comparison":"exact","traces":true}"#,
        ),
        ("spectral", r#"{"schema_version":1,"seeds":[3],"n":2,"chains":["loyd","hc"]}"#),
        (
            "oracle",
            r#"{"schema_version":1,"seeds":[4],"jobs":[{"job":"gambler"},{"job":"exit_side","k_max":8},{"job":"conductance","n":5,"budget":20000}]}"#,
        ),
    ];
    for (i, (sub, body)) in manifests.iter().enumerate() {
        let path = tmp.path().join(format!("m{i}.json"));
        fs::write(&path, body).unwrap();
        let mut outs = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("out{i}_{rep}"));
            let o = Command::new(env!("CARGO_BIN_EXE_loyd"))
                .arg(sub)
                .arg("--manifest")
                .arg(&path)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
            outs.push(tree(&out));
        }
        let files = outs[0].len();
        c.check(format!("{sub} manifest {i} replay"), outs[0] == outs[1], format!("{files} files identical"));
    }
    let secs = start.elapsed().as_secs_f64();
    c.check("suite runtime", secs < 45.0 * 60.0, format!("{secs:.1}s"));
    c
}

fn main() {
    let start = Instant::now();
    let runs: [(u8, fn() -> Criterion); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut all_ok = true;
    let mut report = |id: u8, c: Criterion| {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        let known = c.checks.iter().filter(|k| !k.passed && k.known).count();
        let note = if !c.passed() && c.enforced_ok() {
            format!(" ({known} known deviation(s))")
        } else {
            String::new()
        };
        println!("criterion {id}: {verdict}{note}");
        for k in &c.checks {
            let mark = match (k.passed, k.known) {
                (true, _) => "ok",
                (false, true) => "KNOWN",
                (false, false) => "FAIL",
            };
            println!("    [{mark}] {}: {}", k.name, k.detail);
        }
        all_ok &= c.enforced_ok();
    };
    for (id, f) in runs {
        report(id, f());
    }
    report(10, criterion_10(start));
    if !all_ok {
        eprintln!("acceptance: unexpected failures");
        std::process::exit(1);
    }
}
