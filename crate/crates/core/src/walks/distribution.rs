use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::group::{classify_move, evaluate, GroupElement, MoveClass, MoveString, SymGen};
use crate::error::{invalid, Error, Result};
use crate::puzzle::{Direction, TorusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainTag {
    Loyd,
    Hc,
    Rt,
    Pc,
    Or,
    Bgb,
    Nl,
}

impl ChainTag {
    pub const ALL: [ChainTag; 7] = [
        ChainTag::Loyd,
        ChainTag::Hc,
        ChainTag::Rt,
        ChainTag::Pc,
        ChainTag::Or,
        ChainTag::Bgb,
        ChainTag::Nl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChainTag::Loyd => "loyd",
            ChainTag::Hc => "hc",
            ChainTag::Rt => "rt",
            ChainTag::Pc => "pc",
            ChainTag::Or => "or",
            ChainTag::Bgb => "bgb",
            ChainTag::Nl => "nl",
        }
    }
}

impl std::str::FromStr for ChainTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ChainTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown chain tag {s:?}")))
    }
}

/// Where the holding step of the odd-run chain comes from.
///
/// `Counted`: the letters are drawn from the lazy hole-chain, so a zero letter
/// is a good move (and a zero first letter ends the word).
/// `Skipped`: letters are drawn from the non-lazy hole-chain and an outer
/// fair coin produces the empty word.
///
/// Both give the same law on group elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrHolding {
    #[default]
    Counted,
    Skipped,
}

pub const DEFAULT_OR_CAP: usize = 1_000_000;
const BGB_SUPPORT_LIMIT: usize = 2_000_000;
const SERIES_ELEMENT_LIMIT: usize = 1_000_000;

/// Law of a single step of one of the seven chains.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveDistribution {
    pub tag: ChainTag,
    pub n: usize,
    pub holding: bool,
    pub or_holding: OrHolding,
    pub or_cap: usize,
}

/// Nonzero odd translations.
pub fn good_moves(n: usize) -> Vec<TorusPoint> {
    (1..n * n).map(|i| TorusPoint::from_index(i, n)).filter(|y| y.is_odd()).collect()
}

/// Nonzero even translations.
pub fn bad_moves(n: usize) -> Vec<TorusPoint> {
    (1..n * n).map(|i| TorusPoint::from_index(i, n)).filter(|y| !y.is_odd()).collect()
}

pub fn hc_moves(n: usize) -> Vec<TorusPoint> {
    (1..n * n).map(|i| TorusPoint::from_index(i, n)).collect()
}

/// Some integer representative `(a, b)` has `|a| + |b|` equal to 1 or 3.
pub fn nl_legal(y: TorusPoint, n: usize) -> bool {
    nl_representative(y, n).is_some()
}

/// A representative with `|a| + |b|` in {1, 3}, preferring the smallest
/// `max(|a|, |b|)` and then the lexicographically smallest pair.
pub fn nl_representative(y: TorusPoint, n: usize) -> Option<(i64, i64)> {
    let reps = |u: u32| -> Vec<i64> {
        (-3i64..=3).filter(|a| a.rem_euclid(n as i64) == u as i64).collect()
    };
    let mut best: Option<(i64, i64)> = None;
    for a in reps(y.x) {
        for b in reps(y.y) {
            let s = a.abs() + b.abs();
            if s != 1 && s != 3 {
                continue;
            }
            let key = |p: (i64, i64)| (p.0.abs().max(p.1.abs()), p);
            if best.is_none_or(|q| key((a, b)) < key(q)) {
                best = Some((a, b));
            }
        }
    }
    best
}

pub fn nl_moves(n: usize) -> Vec<TorusPoint> {
    (1..n * n)
        .map(|i| TorusPoint::from_index(i, n))
        .filter(|&y| nl_legal(y, n))
        .collect()
}

pub fn loyd_moves(n: usize) -> Vec<TorusPoint> {
    Direction::ALL.iter().map(|d| d.point(n)).collect()
}

/// Structural form of an odd-run word once identity letters are dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrForm {
    Identity,
    G,
    Bb,
    Bgb,
}

pub fn or_form(s: &MoveString) -> Result<OrForm> {
    let core = s.without_identities();
    let letters = &core.0;
    let bad = |y: &TorusPoint| classify_move(*y) == MoveClass::Bad;
    match letters.len() {
        0 => Ok(OrForm::Identity),
        1 if !bad(&letters[0]) => Ok(OrForm::G),
        2 if bad(&letters[0]) && bad(&letters[1]) => Ok(OrForm::Bb),
        k if k >= 3
            && bad(&letters[0])
            && bad(&letters[k - 1])
            && letters[1..k - 1].iter().all(|y| !bad(y)) =>
        {
            Ok(OrForm::Bgb)
        }
        _ => invalid("word is not of the form g, b b or b g..g b"),
    }
}

impl MoveDistribution {
    pub fn new(tag: ChainTag, n: usize) -> Result<Self> {
        if n < 2 {
            return invalid("board side must be at least 2");
        }
        if tag == ChainTag::Pc && n % 2 == 1 {
            return invalid("the parity chain needs an even board side");
        }
        Ok(MoveDistribution {
            tag,
            n,
            holding: true,
            or_holding: OrHolding::Counted,
            or_cap: DEFAULT_OR_CAP,
        })
    }

    pub fn with_holding(mut self, holding: bool) -> Self {
        self.holding = holding;
        self
    }

    pub fn with_or_holding(mut self, h: OrHolding) -> Self {
        self.or_holding = h;
        self
    }

    pub fn with_or_cap(mut self, cap: usize) -> Self {
        self.or_cap = cap;
        self
    }

    fn letters(&self) -> Vec<TorusPoint> {
        let n = self.n;
        match self.tag {
            ChainTag::Loyd => loyd_moves(n),
            ChainTag::Hc | ChainTag::Or => hc_moves(n),
            ChainTag::Pc => good_moves(n),
            ChainTag::Nl => nl_moves(n),
            ChainTag::Rt | ChainTag::Bgb => Vec::new(),
        }
    }

    fn hold<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        self.holding && rng.random_bool(0.5)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MoveString> {
        let n = self.n;
        match self.tag {
            ChainTag::Rt => invalid("the transposition chain lives on labels; use sample_rt"),
            ChainTag::Or => self.sample_or(rng),
            ChainTag::Bgb => {
                if self.hold(rng) {
                    return Ok(MoveString::default());
                }
                let good = good_moves(n);
                let bad = bad_moves(n);
                let b = |rng: &mut R| bad[rng.random_range(0..bad.len())];
                let g = |rng: &mut R| good[rng.random_range(0..good.len())];
                Ok(match rng.random_range(0..3) {
                    0 => MoveString(vec![g(rng)]),
                    1 => MoveString(vec![b(rng), b(rng)]),
                    _ => {
                        let b1 = b(rng);
                        let g1 = g(rng);
                        MoveString(vec![b1, g1, b(rng)])
                    }
                })
            }
            _ => {
                if self.hold(rng) {
                    return Ok(MoveString::default());
                }
                let letters = self.letters();
                Ok(MoveString::single(letters[rng.random_range(0..letters.len())]))
            }
        }
    }

    fn sample_or<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MoveString> {
        let n = self.n;
        let letters = hc_moves(n);
        let lazy_inner = self.holding && self.or_holding == OrHolding::Counted;
        if self.holding && self.or_holding == OrHolding::Skipped && rng.random_bool(0.5) {
            return Ok(MoveString::default());
        }
        let mut word = Vec::new();
        let mut bad = 0usize;
        loop {
            if word.len() >= self.or_cap {
                return Err(Error::CappedSample { cap: self.or_cap });
            }
            let y = if lazy_inner && rng.random_bool(0.5) {
                TorusPoint::ORIGIN
            } else {
                letters[rng.random_range(0..letters.len())]
            };
            if classify_move(y) == MoveClass::Bad {
                bad += 1;
            }
            word.push(y);
            if bad % 2 == 0 {
                return Ok(MoveString(word));
            }
        }
    }

    pub fn sample_rt<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SymGen> {
        if self.tag != ChainTag::Rt {
            return invalid("sample_rt is only defined for the transposition chain");
        }
        if self.hold(rng) {
            return Ok(SymGen::Identity);
        }
        let m = (self.n * self.n) as u32;
        let a = rng.random_range(0..m);
        let mut b = rng.random_range(0..m - 1);
        if b >= a {
            b += 1;
        }
        Ok(SymGen::swap(a, b))
    }

    /// Exact law as a list of words with probabilities (words may repeat at
    /// tiny `n`, where distinct letters coincide).
    pub fn support(&self) -> Result<Vec<(MoveString, f64)>> {
        let n = self.n;
        let scale = if self.holding { 0.5 } else { 1.0 };
        let mut out = Vec::new();
        if self.holding {
            out.push((MoveString::default(), 0.5));
        }
        match self.tag {
            ChainTag::Rt => return invalid("the transposition chain lives on labels; use rt_support"),
            ChainTag::Or => return invalid("the odd-run chain has infinite support"),
            ChainTag::Bgb => {
                let good = good_moves(n);
                let bad = bad_moves(n);
                let size = good.len() + bad.len() * bad.len() * (1 + good.len());
                if size > BGB_SUPPORT_LIMIT {
                    return Err(Error::Capacity(format!("{size} words in the support")));
                }
                let w = scale / 3.0;
                for &g in &good {
                    out.push((MoveString(vec![g]), w / good.len() as f64));
                }
                let pb = w / (bad.len() * bad.len()) as f64;
                for &b1 in &bad {
                    for &b2 in &bad {
                        out.push((MoveString(vec![b1, b2]), pb));
                    }
                }
                let pbgb = w / (bad.len() * bad.len() * good.len()) as f64;
                for &b1 in &bad {
                    for &g in &good {
                        for &b2 in &bad {
                            out.push((MoveString(vec![b1, g, b2]), pbgb));
                        }
                    }
                }
            }
            _ => {
                let letters = self.letters();
                let p = scale / letters.len() as f64;
                out.extend(letters.into_iter().map(|y| (MoveString::single(y), p)));
            }
        }
        Ok(out)
    }

    pub fn rt_support(&self) -> Result<Vec<(SymGen, f64)>> {
        if self.tag != ChainTag::Rt {
            return invalid("rt_support is only defined for the transposition chain");
        }
        let m = (self.n * self.n) as u32;
        let scale = if self.holding { 0.5 } else { 1.0 };
        let pairs = (m * (m - 1) / 2) as f64;
        let mut out = Vec::new();
        if self.holding {
            out.push((SymGen::Identity, 0.5));
        }
        for a in 0..m {
            for b in a + 1..m {
                out.push((SymGen::Swap(a, b), scale / pairs));
            }
        }
        Ok(out)
    }

    /// Law of the evaluated step as a distribution on G, sorted by element.
    pub fn element_distribution(&self) -> Result<Vec<(GroupElement, f64)>> {
        if self.tag == ChainTag::Or {
            return self.or_element_distribution();
        }
        let mut acc: BTreeMap<GroupElement, f64> = BTreeMap::new();
        for (s, p) in self.support()? {
            *acc.entry(evaluate(&s, self.n)).or_insert(0.0) += p;
        }
        Ok(acc.into_iter().collect())
    }

    /// Sums the series over the number of middle good letters until the
    /// remaining mass is below 1e-17.
    fn or_element_distribution(&self) -> Result<Vec<(GroupElement, f64)>> {
        let n = self.n;
        let m1 = (n * n - 1) as f64;
        let good: Vec<GroupElement> = good_moves(n).iter().map(|&y| evaluate(&MoveString::single(y), n)).collect();
        let bad: Vec<GroupElement> = bad_moves(n).iter().map(|&y| evaluate(&MoveString::single(y), n)).collect();
        let qg = good.len() as f64 / m1;
        let qb = bad.len() as f64 / m1;
        let uniform = |v: &[GroupElement]| -> HashMap<GroupElement, f64> {
            let mut h = HashMap::new();
            for e in v {
                *h.entry(e.clone()).or_insert(0.0) += 1.0 / v.len() as f64;
            }
            h
        };
        let convolve = |a: &HashMap<GroupElement, f64>, b: &HashMap<GroupElement, f64>| -> Result<HashMap<GroupElement, f64>> {
            let mut out: HashMap<GroupElement, f64> = HashMap::new();
            for (x, px) in a {
                for (y, py) in b {
                    *out.entry(x.mul(y)).or_insert(0.0) += px * py;
                }
            }
            if out.len() > SERIES_ELEMENT_LIMIT {
                return Err(Error::Capacity("odd-run element law has too many atoms".into()));
            }
            Ok(out)
        };
        let ug = uniform(&good);
        let ub = uniform(&bad);
        // sum_k qg^k U_good^{*k}
        let mut term: HashMap<GroupElement, f64> = HashMap::from([(GroupElement::identity(n), 1.0)]);
        let mut series: HashMap<GroupElement, f64> = term.clone();
        let mut mass = 1.0;
        while mass > 1e-17 {
            term = convolve(&term, &ug)?;
            for v in term.values_mut() {
                *v *= qg;
            }
            mass *= qg;
            for (e, p) in &term {
                *series.entry(e.clone()).or_insert(0.0) += p;
            }
        }
        let middle = convolve(&convolve(&ub, &series)?, &ub)?;
        let outer = if self.holding { 0.5 } else { 1.0 };
        let mut acc: BTreeMap<GroupElement, f64> = BTreeMap::new();
        if self.holding {
            acc.insert(GroupElement::identity(n), 0.5);
        }
        for (e, p) in ug {
            *acc.entry(e).or_insert(0.0) += outer * qg * p;
        }
        for (e, p) in middle {
            *acc.entry(e).or_insert(0.0) += outer * qb * qb * p;
        }
        Ok(acc.into_iter().collect())
    }
}

/// Exact symmetry check `p(s) = p(s^{-1})` on a finite support.
pub fn is_symmetric(support: &[(MoveString, f64)], n: usize, tol: f64) -> bool {
    let mut p: BTreeMap<MoveString, f64> = BTreeMap::new();
    for (s, w) in support {
        *p.entry(s.clone()).or_insert(0.0) += w;
    }
    p.iter()
        .all(|(s, w)| (p.get(&s.inverse(n)).copied().unwrap_or(0.0) - w).abs() <= tol)
}
