use std::collections::{BTreeMap, BTreeSet, VecDeque};

use loyd_core::puzzle::{perm, reachable_set, Configuration, Direction, TorusPoint};
use loyd_core::rng::master_rng;
use loyd_core::walks::*;
use proptest::prelude::*;
use rand::Rng;

fn board(n: usize, rows: &[&[u32]]) -> Configuration {
    let mut labels: Vec<u32> = Vec::new();
    for r in rows {
        labels.extend_from_slice(r);
    }
    let used: BTreeSet<u32> = labels.iter().copied().collect();
    labels.extend((0..(n * n) as u32).filter(|l| !used.contains(l)));
    Configuration::from_labels(n, labels).unwrap()
}

fn random_config(n: usize, seed: u64) -> Configuration {
    let mut rng = master_rng(seed);
    let mut c = Configuration::solved(n);
    for _ in 0..20 * n * n {
        let a = TorusPoint::from_index(rng.random_range(0..n * n), n);
        let b = TorusPoint::from_index(rng.random_range(0..n * n), n);
        c.swap_cells(a, b);
    }
    c
}

fn dir() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

fn opposite(d: Direction) -> Direction {
    match d {
        Direction::Up => Direction::Down,
        Direction::Down => Direction::Up,
        Direction::Left => Direction::Right,
        Direction::Right => Direction::Left,
    }
}

#[test]
fn right_move_on_two_by_two() {
    let mut c = Configuration::solved(2);
    c.apply_move(Direction::Right);
    assert_eq!(c.hole(), TorusPoint { x: 1, y: 0 });
    assert_eq!(c.label_at(TorusPoint::ORIGIN), 1);
}

#[test]
fn omega_membership_examples() {
    let solved = Configuration::solved(4);
    assert!(solved.in_omega());
    let mut one = solved.clone();
    one.apply_move(Direction::Up);
    assert!(one.in_omega());
    let mut swapped = solved.clone();
    swapped.swap_cells(TorusPoint { x: 1, y: 0 }, TorusPoint { x: 2, y: 0 });
    assert!(!swapped.in_omega());
}

#[test]
fn parity_examples() {
    assert_eq!(perm::parity(&[0, 1, 2, 3]), 0);
    assert_eq!(perm::parity(&[1, 0, 2, 3]), 1);
    for n in [2, 3, 4, 5] {
        for i in 1..n * n {
            let y = TorusPoint::from_index(i, n);
            let g = translation_move(y, n);
            assert_eq!(perm::parity(g.rel()), 1, "pi_y for y={y:?}, n={n}");
        }
    }
}

#[test]
fn reachable_sets_match_closed_forms() {
    let two = reachable_set(2).unwrap();
    assert_eq!(two.len(), 12);
    assert!(two.iter().all(|c| c.in_omega()));
    // Independent count: all 24 placements, half of them in the parity class.
    let all: Vec<Vec<u32>> = (0..24).map(|r| perm::unrank(4, r)).collect();
    let omega = all
        .iter()
        .filter(|l| Configuration::from_labels(2, l.to_vec()).unwrap().in_omega())
        .count();
    assert_eq!(omega, 12);
    assert_eq!(reachable_set(3).unwrap().len(), 362_880);
    assert!(reachable_set(4).is_err());
}

#[test]
fn translation_move_examples() {
    assert_eq!(translation_move(TorusPoint::ORIGIN, 4), GroupElement::identity(4));
    let g = translation_move(TorusPoint { x: 0, y: 1 }, 4);
    assert_eq!(g.rel()[TorusPoint { x: 0, y: 1 }.index(4)] as usize, TorusPoint { x: 0, y: 3 }.index(4));
    let mut rng = master_rng(1);
    for _ in 0..100 {
        let n = rng.random_range(2..9);
        let y = TorusPoint::from_index(rng.random_range(0..n * n), n);
        let e = translation_move(y, n).mul(&translation_move(y.neg(n), n));
        assert_eq!(e, GroupElement::identity(n));
    }
}

#[test]
fn classification_examples() {
    assert_eq!(classify_move_on(TorusPoint::ORIGIN, 4).unwrap(), MoveClass::Good);
    assert_eq!(classify_move_on(TorusPoint { x: 1, y: 0 }, 4).unwrap(), MoveClass::Good);
    assert_eq!(classify_move_on(TorusPoint { x: 1, y: 1 }, 4).unwrap(), MoveClass::Bad);
    assert!(classify_move_on(TorusPoint { x: 1, y: 1 }, 5).is_err());
}

#[test]
fn evaluation_examples() {
    assert_eq!(evaluate(&MoveString::default(), 5), GroupElement::identity(5));
    let n = 5;
    let u = |d: Direction| d.point(n);
    // Right, up, left, down cycles the three plaquette tiles around the hole.
    let s = MoveString(vec![u(Direction::Right), u(Direction::Up), u(Direction::Left), u(Direction::Down)]);
    let c = evaluate(&s, n).to_configuration();
    assert_eq!(c.hole(), TorusPoint::ORIGIN);
    let cell = |x, y| TorusPoint { x, y };
    let moved: Vec<_> = (0..n * n)
        .map(|i| TorusPoint::from_index(i, n))
        .filter(|&p| c.label_at(p) != p.index(n) as u32)
        .collect();
    assert_eq!(moved, vec![cell(1, 0), cell(0, 1), cell(1, 1)]);
    assert_eq!(c.label_at(cell(1, 0)), cell(1, 1).index(n) as u32);
    assert_eq!(c.label_at(cell(1, 1)), cell(0, 1).index(n) as u32);
    assert_eq!(c.label_at(cell(0, 1)), cell(1, 0).index(n) as u32);
    assert!(evaluate_checked(&MoveString(vec![cell(7, 0)]), 5).is_err());
}

#[test]
fn strip_figures_playback() {
    let n = 5;
    let fig1 = board(n, &[&[0, 9, 8, 7, 6], &[1, 2, 3, 4, 5]]);
    let fig2 = board(n, &[&[1, 8, 3, 6, 5], &[2, 9, 4, 7, 0]]);
    let fig3 = board(n, &[&[1, 8, 3, 5, 0], &[2, 9, 4, 6, 7]]);
    let fig4 = board(n, &[&[5, 0, 9, 4, 7], &[1, 2, 8, 3, 6]]);
    let fig5 = board(n, &[&[5, 9, 8, 7, 6], &[1, 2, 3, 4, 0]]);

    // The first phase alone, replayed from its description.
    let mut c = fig1.clone();
    'cycle: loop {
        for d in [Direction::Up, Direction::Right, Direction::Down, Direction::Right] {
            let before = c.position_of(5);
            c.apply_move(d);
            if c.position_of(5) != before {
                break 'cycle;
            }
        }
    }
    assert_eq!(c, fig2);

    // The full procedure passes through every figure in order.
    let path = loyd_core::represent::strip_hole_path(4);
    let mut c = fig1.clone();
    let mut seen = vec![];
    for w in path.windows(2) {
        let d = match (w[1].0 - w[0].0, w[1].1 - w[0].1) {
            (0, 1) => Direction::Up,
            (0, -1) => Direction::Down,
            (1, 0) => Direction::Right,
            _ => Direction::Left,
        };
        c.apply_move(d);
        for (i, f) in [&fig2, &fig3, &fig4, &fig5].iter().enumerate() {
            if c == **f {
                seen.push(i);
            }
        }
    }
    assert_eq!(c, fig5);
    assert_eq!(seen, vec![0, 1, 2, 3]);
}

#[test]
fn or_form_frequency_at_ten() {
    let d = MoveDistribution::new(ChainTag::Or, 10).unwrap().with_holding(false);
    let mut rng = master_rng(77);
    let draws = 100_000;
    let mut g = 0;
    for _ in 0..draws {
        let s = d.sample(&mut rng).unwrap();
        assert!(evaluate(&s, 10).in_omega());
        if or_form(&s).unwrap() == OrForm::G {
            g += 1;
        }
    }
    let p = 50.0 / 99.0;
    let sigma = (p * (1.0 - p) / draws as f64).sqrt();
    assert!((g as f64 / draws as f64 - p).abs() < 3.0 * sigma);
}

#[test]
fn loyd_support_is_four_eighths() {
    let d = MoveDistribution::new(ChainTag::Loyd, 5).unwrap();
    let s = d.support().unwrap();
    assert_eq!(s.len(), 5);
    assert_eq!(s[0], (MoveString::default(), 0.5));
    assert!(s[1..].iter().all(|(_, p)| *p == 0.125));
}

#[test]
fn enumerable_supports_are_symmetric_and_normalised() {
    for n in [2usize, 4] {
        for tag in [ChainTag::Loyd, ChainTag::Hc, ChainTag::Pc, ChainTag::Bgb, ChainTag::Nl] {
            let s = MoveDistribution::new(tag, n).unwrap().support().unwrap();
            let total: f64 = s.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12, "{tag:?} n={n}");
            assert!(is_symmetric(&s, n, 1e-12), "{tag:?} n={n}");
        }
    }
    for tag in [ChainTag::Pc, ChainTag::Bgb] {
        for (s, _) in MoveDistribution::new(tag, 4).unwrap().support().unwrap() {
            assert!(evaluate(&s, 4).in_omega());
        }
    }
}

#[test]
fn uniform_law_is_stationary_on_two_by_two() {
    let states: Vec<Configuration> =
        (0..24).map(|r| Configuration::from_labels(2, perm::unrank(4, r)).unwrap()).collect();
    let index: BTreeMap<Vec<u32>, usize> = states.iter().enumerate().map(|(i, c)| (c.labels().to_vec(), i)).collect();
    for tag in [ChainTag::Loyd, ChainTag::Hc, ChainTag::Pc, ChainTag::Bgb, ChainTag::Nl, ChainTag::Or] {
        let law = MoveDistribution::new(tag, 2).unwrap().element_distribution().unwrap();
        let mut inflow = vec![0.0; states.len()];
        for c in &states {
            let g = GroupElement::from_configuration(c);
            for (e, p) in &law {
                let next = g.mul(e).to_configuration();
                inflow[index[next.labels()]] += p / states.len() as f64;
            }
        }
        for v in inflow {
            assert!((v - 1.0 / 24.0).abs() < 1e-12, "{tag:?}");
        }
    }
}

#[test]
fn unit_moves_generate_everything_at_three() {
    let gens: Vec<GroupElement> = loyd_moves(3).iter().map(|&y| translation_move(y, 3)).collect();
    let start = GroupElement::identity(3);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        for h in &gens {
            let next = g.mul(h);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    assert_eq!(seen.len(), 9 * 40_320);
}

#[test]
fn or_sampler_reports_cap() {
    let d = MoveDistribution::new(ChainTag::Or, 4).unwrap().with_or_cap(1);
    let mut rng = master_rng(2);
    let mut capped = false;
    for _ in 0..1000 {
        if let Err(loyd_core::Error::CappedSample { cap }) = d.sample(&mut rng) {
            assert_eq!(cap, 1);
            capped = true;
        }
    }
    assert!(capped);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn move_then_back_is_identity(seed in any::<u64>(), n in 2usize..7, d in dir()) {
        let c = random_config(n, seed);
        let mut m = c.clone();
        m.apply_move(d);
        m.apply_move(opposite(d));
        prop_assert_eq!(m, c);
    }

    #[test]
    fn moves_preserve_omega_on_even_sides(seed in any::<u64>(), half in 1usize..4, d in dir()) {
        let n = 2 * half;
        let c = random_config(n, seed);
        let mut m = c.clone();
        m.apply_move(d);
        prop_assert_eq!(m.in_omega(), c.in_omega());
    }

    #[test]
    fn moves_are_injective(a in any::<u64>(), b in any::<u64>(), n in 2usize..6, d in dir()) {
        let (ca, cb) = (random_config(n, a), random_config(n, b));
        prop_assume!(ca != cb);
        let (mut ma, mut mb) = (ca, cb);
        ma.apply_move(d);
        mb.apply_move(d);
        prop_assert_ne!(ma, mb);
    }

    #[test]
    fn parity_is_a_homomorphism(seed in any::<u64>(), m in 1usize..12) {
        let mut rng = master_rng(seed);
        let p = perm::unrank(m, rng.random_range(0..perm::factorial(m)));
        let q = perm::unrank(m, rng.random_range(0..perm::factorial(m)));
        prop_assert_eq!(perm::parity(&perm::compose(&p, &q)), perm::parity(&p) ^ perm::parity(&q));
    }

    #[test]
    fn configuration_json_round_trips(seed in any::<u64>(), n in 2usize..7) {
        let c = random_config(n, seed);
        let back: Configuration = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn playback_matches_group_law(seed in any::<u64>(), n in 2usize..7, len in 0usize..30) {
        let mut rng = master_rng(seed);
        let s = MoveString((0..len).map(|_| TorusPoint::from_index(rng.random_range(0..n * n), n)).collect());
        let c = random_config(n, seed ^ 1);
        let mut played = c.clone();
        s.apply_to(&mut played);
        let predicted = GroupElement::from_configuration(&c).mul(&evaluate_by_product(&s, n));
        prop_assert_eq!(GroupElement::from_configuration(&played), predicted);
        prop_assert_eq!(evaluate(&s, n), evaluate_by_product(&s, n));
        let inv = s.inverse(n);
        prop_assert_eq!(evaluate_all(&[s, inv], n), GroupElement::identity(n));
    }

    #[test]
    fn group_law_is_associative(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = master_rng(seed);
        let mut pick = || {
            let k = rng.random_range(0..6);
            evaluate_by_product(&MoveString((0..k).map(|_| TorusPoint::from_index(rng.random_range(0..n * n), n)).collect()), n)
        };
        let (a, b, c) = (pick(), pick(), pick());
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&a.inverse()), GroupElement::identity(n));
    }

    #[test]
    fn parity_chain_samples_stay_in_omega(seed in any::<u64>(), half in 1usize..5) {
        let n = 2 * half;
        let mut rng = master_rng(seed);
        for tag in [ChainTag::Pc, ChainTag::Or, ChainTag::Bgb] {
            let s = MoveDistribution::new(tag, n).unwrap().sample(&mut rng).unwrap();
            prop_assert!(evaluate(&s, n).in_omega());
        }
    }
}
