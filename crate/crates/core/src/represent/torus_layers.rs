use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::layer::{Layer, LayerTag};
use super::strip::swap_plan;
use super::window::window_swap;
use crate::error::{invalid, Error, Result};
use crate::puzzle::TorusPoint;
use crate::rng::SimRng;
use crate::walks::{
    bad_moves, classify_move, evaluate, good_moves, hc_moves, loyd_moves, nl_legal, nl_moves, nl_representative,
    or_form, ChainTag, GroupElement, MoveClass, MoveDistribution, MoveString, OrForm,
};

/// The six layers whose moves are translation words on the torus.
pub struct TorusLayer {
    tag: LayerTag,
    n: usize,
    source: MoveDistribution,
    target: MoveDistribution,
    /// Swap plans (in norm-1/norm-3 letters) indexed by target cell.
    plans: Vec<Option<Vec<TorusPoint>>>,
}

/// `e1 o e2 = (e1+o)(-o)(o+e2)(-e1-o-e2)(e1+o)(-o)(o+e2)`.
pub fn bgb_word(e1: TorusPoint, o: TorusPoint, e2: TorusPoint, n: usize) -> [TorusPoint; 7] {
    let a = e1.add(o, n);
    let b = o.neg(n);
    let c = o.add(e2, n);
    let d = e1.add(o, n).add(e2, n).neg(n);
    [a, b, c, d, a, b, c]
}

/// Unit-move word swapping the hole with the tile at offset `y`
/// (`y` must have a representative of norm 1 or 3).
pub fn nl_letter_as_unit_moves(y: TorusPoint, n: usize) -> Result<Vec<TorusPoint>> {
    let (a, b) = nl_representative(y, n).ok_or_else(|| Error::InvalidInput(format!("{y:?} is not a norm 1 or 3 move")))?;
    if a.abs() + b.abs() == 1 {
        return Ok(vec![y]);
    }
    let (w, h) = if a.abs() == 3 {
        (4, 2)
    } else if b.abs() == 3 {
        (2, 4)
    } else {
        (3, 3)
    };
    if w > n || h > n {
        return invalid(format!("a {w}x{h} window does not fit on the {n}-torus"));
    }
    let (ox, oy) = (a.min(0), b.min(0));
    let hole = ((-ox) as usize, (-oy) as usize);
    let target = ((a - ox) as usize, (b - oy) as usize);
    let dirs = window_swap(w, h, hole, target)
        .ok_or_else(|| Error::Verification(format!("window search found no swap for {y:?}")))?;
    Ok(dirs.into_iter().map(|d| d.point(n)).collect())
}

fn singles(v: Vec<TorusPoint>) -> Vec<MoveString> {
    v.into_iter().map(MoveString::single).collect()
}

fn letters_string(z: &MoveString) -> String {
    z.0.iter().map(|p| format!("({},{})", p.x, p.y)).collect()
}

impl TorusLayer {
    pub fn new(tag: LayerTag, n: usize) -> Result<Self> {
        let need_even = !matches!(tag, LayerTag::HcLoyd);
        if n < 2 {
            return invalid("board side must be at least 2");
        }
        if need_even && n % 2 == 1 {
            return invalid(format!("layer {} needs an even board side", tag.name()));
        }
        if tag == LayerTag::HcLoyd && (n % 2 == 0 || n < 3) {
            return invalid("layer hc-loyd is defined for odd n >= 3");
        }
        let (s, t) = match tag {
            LayerTag::RtHc => return invalid("rt-hc acts on labels; use RtHcLayer"),
            LayerTag::OrBgb => (ChainTag::Or, ChainTag::Bgb),
            LayerTag::BgbPc => (ChainTag::Bgb, ChainTag::Pc),
            LayerTag::PcNl => (ChainTag::Pc, ChainTag::Nl),
            LayerTag::NlLoyd => (ChainTag::Nl, ChainTag::Loyd),
            LayerTag::HcLoyd => (ChainTag::Hc, ChainTag::Loyd),
            LayerTag::PcLoyd => (ChainTag::Pc, ChainTag::Loyd),
        };
        let mut layer = TorusLayer {
            tag,
            n,
            source: MoveDistribution::new(s, n)?,
            target: MoveDistribution::new(t, n)?,
            plans: Vec::new(),
        };
        if matches!(tag, LayerTag::PcNl | LayerTag::HcLoyd | LayerTag::PcLoyd) {
            let sources: BTreeSet<TorusPoint> = match tag {
                LayerTag::HcLoyd => hc_moves(n).into_iter().collect(),
                _ => good_moves(n).into_iter().collect(),
            };
            layer.plans = (0..n * n)
                .map(|i| {
                    let t = TorusPoint::from_index(i, n);
                    if sources.contains(&t) {
                        swap_plan(t, n)
                    } else {
                        None
                    }
                })
                .collect();
            for t in &sources {
                if layer.plans[t.index(n)].is_none() {
                    return Err(Error::Verification(format!("no swap plan for {t:?} at n = {n}")));
                }
            }
        }
        Ok(layer)
    }

    pub fn source_distribution(&self) -> &MoveDistribution {
        &self.source
    }

    pub fn target_distribution(&self) -> &MoveDistribution {
        &self.target
    }

    fn single_letter(&self, y: &MoveString) -> Result<Option<TorusPoint>> {
        match y.0.as_slice() {
            [] => Ok(None),
            [t] => Ok(Some(*t)),
            _ => invalid("expected a single-letter move"),
        }
    }

    fn plan(&self, t: TorusPoint) -> Result<&Vec<TorusPoint>> {
        self.plans
            .get(t.index(self.n))
            .and_then(|p| p.as_ref())
            .ok_or_else(|| Error::InvalidInput(format!("{t:?} is not a move of the source chain")))
    }

    fn or_to_bgb(&self, y: &MoveString, rng: &mut SimRng) -> Result<Vec<MoveString>> {
        let n = self.n;
        let core = y.without_identities();
        match or_form(y)? {
            OrForm::Identity => Ok(Vec::new()),
            OrForm::G | OrForm::Bb => Ok(vec![core]),
            OrForm::Bgb => {
                let letters = &core.0;
                let k = letters.len() - 2;
                if k == 1 {
                    return Ok(vec![core]);
                }
                let bad = bad_moves(n);
                let mut out = Vec::with_capacity(k);
                let mut left = letters[0];
                for i in 0..k {
                    let right = if i + 1 == k {
                        letters[k + 1]
                    } else {
                        bad[rng.random_range(0..bad.len())]
                    };
                    out.push(MoveString(vec![left, letters[i + 1], right]));
                    left = right.neg(n);
                }
                Ok(out)
            }
        }
    }

    fn bb_expansion(&self, b1: TorusPoint, b2: TorusPoint, g: TorusPoint, b: TorusPoint) -> Vec<MoveString> {
        let n = self.n;
        let mut v: Vec<TorusPoint> = bgb_word(b1, g, b, n).to_vec();
        v.extend(bgb_word(b.neg(n), g.neg(n), b2, n));
        singles(v)
    }

    fn check_bgb(&self, y: &MoveString) -> Result<()> {
        let bad = |p: &TorusPoint| classify_move(*p) == MoveClass::Bad && !p.is_origin();
        let good = |p: &TorusPoint| p.is_odd();
        let ok = match y.0.as_slice() {
            [] => true,
            [g] => good(g),
            [b1, b2] => bad(b1) && bad(b2),
            [b1, g, b2] => bad(b1) && good(g) && bad(b2),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            invalid("not a move of the BGB chain")
        }
    }

    fn bgb_to_pc(&self, y: &MoveString, rng: &mut SimRng) -> Result<Vec<MoveString>> {
        self.check_bgb(y)?;
        let n = self.n;
        Ok(match y.0.as_slice() {
            [] => Vec::new(),
            [g] => vec![MoveString::single(*g)],
            [b1, b2] => {
                let good = good_moves(n);
                let bad = bad_moves(n);
                let g = good[rng.random_range(0..good.len())];
                let b = bad[rng.random_range(0..bad.len())];
                self.bb_expansion(*b1, *b2, g, b)
            }
            [b1, g, b2] => singles(bgb_word(*b1, *g, *b2, n).to_vec()),
            _ => unreachable!(),
        })
    }

    fn expand_to_loyd(&self, letters: &[TorusPoint]) -> Result<Vec<MoveString>> {
        let mut out = Vec::new();
        for &l in letters {
            out.extend(singles(nl_letter_as_unit_moves(l, self.n)?));
        }
        Ok(out)
    }

    fn deterministic(&self, y: &MoveString) -> Result<Vec<MoveString>> {
        let n = self.n;
        let Some(t) = self.single_letter(y)? else {
            return Ok(Vec::new());
        };
        match self.tag {
            LayerTag::PcNl => Ok(singles(self.plan(t)?.clone())),
            LayerTag::NlLoyd => {
                if !nl_legal(t, n) {
                    return invalid(format!("{t:?} is not a norm 1 or 3 move"));
                }
                Ok(singles(nl_letter_as_unit_moves(t, n)?))
            }
            LayerTag::HcLoyd | LayerTag::PcLoyd => {
                let plan = self.plan(t)?.clone();
                self.expand_to_loyd(&plan)
            }
            _ => unreachable!("randomized layers are handled separately"),
        }
    }

    fn or_exact_weights(&self) -> Result<BTreeMap<MoveString, f64>> {
        let n = self.n;
        let good = good_moves(n);
        let bad = bad_moves(n);
        let m1 = (n * n - 1) as f64;
        let qg = good.len() as f64 / m1;
        let qb = bad.len() as f64 / m1;
        let outer = if self.source.holding { 0.5 } else { 1.0 };
        let uniform = |v: &[TorusPoint]| -> BTreeMap<TorusPoint, f64> {
            v.iter().map(|&p| (p, 1.0 / v.len() as f64)).collect()
        };
        let bad_law = uniform(&bad);
        let neg_bad_law: BTreeMap<TorusPoint, f64> = bad.iter().map(|&p| (p.neg(n), 1.0 / bad.len() as f64)).collect();
        let good_law = uniform(&good);
        // k = 1 uses (b1, g, b2); for k >= 2 factor 1 is (b1, g, B), the last
        // is (-B, g, b2) and the k - 2 middle ones are (-B, g, B).
        let (mut c_single, mut c_end, mut c_mid) = (0.0, 0.0, 0.0);
        let mut pk = qg;
        let mut k = 1.0f64;
        while pk * k * k > 1e-20 || k < 3.0 {
            if k == 1.0 {
                c_single += pk;
            } else {
                c_end += pk * k;
                c_mid += pk * k * (k - 2.0);
            }
            pk *= qg;
            k += 1.0;
        }
        let mut acc = BTreeMap::new();
        for &g in &good {
            acc.insert(MoveString::single(g), outer * qg * good_law[&g]);
        }
        for &b1 in &bad {
            for &b2 in &bad {
                acc.insert(MoveString(vec![b1, b2]), outer * qb * qb * bad_law[&b1] * bad_law[&b2]);
            }
        }
        let get = |law: &BTreeMap<TorusPoint, f64>, p: &TorusPoint| law.get(p).copied().unwrap_or(0.0);
        for &l in &bad {
            for &g in &good {
                for &r in &bad {
                    let pg = good_law[&g];
                    let single = get(&bad_law, &l) * pg * get(&bad_law, &r);
                    let first = get(&bad_law, &l) * pg * get(&bad_law, &r);
                    let last = get(&neg_bad_law, &l) * pg * get(&bad_law, &r);
                    let mid = get(&neg_bad_law, &l) * pg * get(&bad_law, &r);
                    let w = c_single * single + c_end * (first + last) + c_mid * mid;
                    acc.insert(MoveString(vec![l, g, r]), outer * qb * qb * w);
                }
            }
        }
        Ok(acc)
    }
}

impl Layer for TorusLayer {
    type Gen = MoveString;
    type Elem = GroupElement;

    fn tag(&self) -> LayerTag {
        self.tag
    }

    fn n(&self) -> usize {
        self.n
    }

    fn sample_source(&self, rng: &mut SimRng) -> Result<MoveString> {
        self.source.sample(rng)
    }

    fn represent(&self, y: &MoveString, rng: &mut SimRng) -> Result<Vec<MoveString>> {
        match self.tag {
            LayerTag::OrBgb => self.or_to_bgb(y, rng),
            LayerTag::BgbPc => self.bgb_to_pc(y, rng),
            _ => self.deterministic(y),
        }
    }

    fn represent_all(&self, y: &MoveString) -> Result<Vec<(Vec<MoveString>, f64)>> {
        let n = self.n;
        match self.tag {
            LayerTag::OrBgb => Err(Error::Capacity(
                "odd-run representations are not enumerable; use exact_weights".into(),
            )),
            LayerTag::BgbPc => {
                self.check_bgb(y)?;
                if let [b1, b2] = y.0.as_slice() {
                    let good = good_moves(n);
                    let bad = bad_moves(n);
                    let w = 1.0 / (good.len() * bad.len()) as f64;
                    let mut out = Vec::with_capacity(good.len() * bad.len());
                    for &g in &good {
                        for &b in &bad {
                            out.push((self.bb_expansion(*b1, *b2, g, b), w));
                        }
                    }
                    Ok(out)
                } else {
                    let mut rng = crate::rng::master_rng(0);
                    Ok(vec![(self.bgb_to_pc(y, &mut rng)?, 1.0)])
                }
            }
            _ => Ok(vec![(self.deterministic(y)?, 1.0)]),
        }
    }

    fn source_support(&self) -> Result<Vec<(MoveString, f64)>> {
        self.source.support()
    }

    fn target_support(&self) -> Result<Vec<(MoveString, f64)>> {
        self.target.support()
    }

    fn is_target_generator(&self, z: &MoveString) -> bool {
        let n = self.n;
        match self.target.tag {
            ChainTag::Bgb => self.check_bgb(z).is_ok() && !z.is_empty(),
            ChainTag::Pc => matches!(z.0.as_slice(), [y] if y.is_odd()),
            ChainTag::Nl => matches!(z.0.as_slice(), [y] if nl_legal(*y, n)),
            ChainTag::Loyd => matches!(z.0.as_slice(), [y] if loyd_moves(n).contains(y)),
            _ => false,
        }
    }

    fn eval(&self, word: &[MoveString]) -> GroupElement {
        evaluate(&MoveString::concat(word), self.n)
    }

    fn identity(&self) -> GroupElement {
        GroupElement::identity(self.n)
    }

    fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        a.mul(b)
    }

    fn class_of(&self, z: &MoveString) -> String {
        if self.tag == LayerTag::OrBgb {
            match z.len() {
                0 => "id".into(),
                1 => "g".into(),
                2 => "bb".into(),
                _ => "bgb".into(),
            }
        } else {
            letters_string(z)
        }
    }

    fn max_length(&self) -> Option<usize> {
        let n = self.n;
        match self.tag {
            LayerTag::OrBgb => None,
            LayerTag::BgbPc => Some(14),
            LayerTag::PcNl => self.plans.iter().flatten().map(|p| p.len()).max(),
            LayerTag::NlLoyd => nl_moves(n)
                .into_iter()
                .filter_map(|y| nl_letter_as_unit_moves(y, n).ok().map(|v| v.len()))
                .max(),
            LayerTag::HcLoyd | LayerTag::PcLoyd => self
                .plans
                .iter()
                .flatten()
                .filter_map(|p| self.expand_to_loyd(p).ok().map(|v| v.len()))
                .max(),
            LayerTag::RtHc => Some(3),
        }
    }

    fn exact_weights(&self) -> Result<BTreeMap<MoveString, f64>> {
        if self.tag == LayerTag::OrBgb {
            return self.or_exact_weights();
        }
        let mut acc: BTreeMap<MoveString, f64> = BTreeMap::new();
        for (y, py) in self.source_support()? {
            for (rep, q) in self.represent_all(&y)? {
                let len = rep.len() as f64;
                for z in rep {
                    *acc.entry(z).or_insert(0.0) += py * q * len;
                }
            }
        }
        Ok(acc)
    }

    fn source_elements(&self) -> Result<Vec<(GroupElement, f64)>> {
        self.source.element_distribution()
    }

    fn target_elements(&self) -> Result<Vec<(GroupElement, f64)>> {
        self.target.element_distribution()
    }
}
