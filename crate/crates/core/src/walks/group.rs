use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::puzzle::{perm, Configuration, TorusPoint, HOLE};

/// Element `(x, f)` of G: `x` is the hole offset and `f` sends each tile label
/// `z != 0` to its position relative to the hole (as a row-major index).
///
/// Product: `(x, f)(y, g) = (x + y, g ∘ f)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    n: usize,
    hole: TorusPoint,
    rel: Vec<u32>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement {
            n,
            hole: TorusPoint::ORIGIN,
            rel: (0..(n * n) as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> TorusPoint {
        self.hole
    }

    /// `rel()[z]` for `z >= 1`; entry 0 is always 0.
    pub fn rel(&self) -> &[u32] {
        &self.rel
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.n, other.n);
        GroupElement {
            n: self.n,
            hole: self.hole.add(other.hole, self.n),
            rel: perm::compose(&other.rel, &self.rel),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            n: self.n,
            hole: self.hole.neg(self.n),
            rel: perm::inverse(&self.rel),
        }
    }

    /// Membership in Ω: parity of the offset equals the parity of `f`.
    pub fn in_omega(&self) -> bool {
        self.hole.is_odd() as u32 == perm::parity(&self.rel)
    }

    pub fn from_configuration(c: &Configuration) -> Self {
        let n = c.n();
        let h = c.hole();
        let rel = (0..(n * n) as u32)
            .map(|z| {
                if z == HOLE {
                    0
                } else {
                    c.position_of(z).sub(h, n).index(n) as u32
                }
            })
            .collect();
        GroupElement { n, hole: h, rel }
    }

    pub fn to_configuration(&self) -> Configuration {
        let n = self.n;
        let mut labels = vec![0u32; n * n];
        labels[self.hole.index(n)] = HOLE;
        for z in 1..(n * n) {
            let p = TorusPoint::from_index(self.rel[z] as usize, n).add(self.hole, n);
            labels[p.index(n)] = z as u32;
        }
        Configuration::from_labels(n, labels).expect("group element encodes a permutation")
    }
}

/// The generator `(y, π_y)` with `π_y(z) = z - y` for `z != y` and `π_y(y) = -y`.
pub fn translation_move(y: TorusPoint, n: usize) -> GroupElement {
    if y.is_origin() {
        return GroupElement::identity(n);
    }
    let neg_y = y.neg(n);
    let rel = (0..(n * n))
        .map(|i| {
            if i == 0 {
                return 0;
            }
            let z = TorusPoint::from_index(i, n);
            if z == y {
                neg_y.index(n) as u32
            } else {
                z.sub(y, n).index(n) as u32
            }
        })
        .collect();
    GroupElement { n, hole: y, rel }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveClass {
    Good,
    Bad,
}

/// Odd translations and the identity are good; nonzero even ones are bad.
pub fn classify_move(y: TorusPoint) -> MoveClass {
    if y.is_origin() || y.is_odd() {
        MoveClass::Good
    } else {
        MoveClass::Bad
    }
}

/// `classify_move` for a board of side `n`; only meaningful when `n` is even,
/// where the two classes are the two cosets of the parity subgroup.
pub fn classify_move_on(y: TorusPoint, n: usize) -> Result<MoveClass> {
    if n % 2 == 1 {
        return invalid(format!("good and bad moves are not defined for odd n = {n}"));
    }
    Ok(classify_move(y))
}

/// A word in translation generators. The empty word is the holding step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveString(pub Vec<TorusPoint>);

impl MoveString {
    pub fn single(y: TorusPoint) -> Self {
        MoveString(vec![y])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed word with every letter negated; evaluates to the inverse.
    pub fn inverse(&self, n: usize) -> MoveString {
        MoveString(self.0.iter().rev().map(|y| y.neg(n)).collect())
    }

    /// Drops identity letters.
    pub fn without_identities(&self) -> MoveString {
        MoveString(self.0.iter().copied().filter(|y| !y.is_origin()).collect())
    }

    pub fn concat(parts: &[MoveString]) -> MoveString {
        MoveString(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn apply_to(&self, c: &mut Configuration) {
        for &y in &self.0 {
            c.apply_translation(y);
        }
    }
}

/// Product of the generators, computed by playing the word on the solved board.
pub fn evaluate(s: &MoveString, n: usize) -> GroupElement {
    let mut c = Configuration::solved(n);
    s.apply_to(&mut c);
    GroupElement::from_configuration(&c)
}

/// Product of the generators, computed with the group law.
pub fn evaluate_by_product(s: &MoveString, n: usize) -> GroupElement {
    s.0.iter()
        .fold(GroupElement::identity(n), |acc, &y| acc.mul(&translation_move(y, n)))
}

/// `evaluate` after checking every letter is a point of the side-`n` torus.
pub fn evaluate_checked(s: &MoveString, n: usize) -> Result<GroupElement> {
    if let Some(y) = s.0.iter().find(|y| y.x as usize >= n || y.y as usize >= n) {
        return invalid(format!("letter {y:?} does not belong to the torus of side {n}"));
    }
    Ok(evaluate(s, n))
}

pub fn evaluate_all(parts: &[MoveString], n: usize) -> GroupElement {
    evaluate(&MoveString::concat(parts), n)
}

/// A permutation of labels by position: `perm()[j]` is the label at cell `j`.
/// The symmetric-group presentation of the puzzle state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymElement(Vec<u32>);

impl SymElement {
    pub fn identity(m: usize) -> Self {
        SymElement((0..m as u32).collect())
    }

    pub fn from_perm(p: Vec<u32>) -> Result<Self> {
        if !perm::is_permutation(&p) {
            return invalid("not a permutation");
        }
        Ok(SymElement(p))
    }

    pub fn perm(&self) -> &[u32] {
        &self.0
    }

    pub fn from_configuration(c: &Configuration) -> Self {
        SymElement(c.labels().to_vec())
    }

    pub fn to_configuration(&self, n: usize) -> Result<Configuration> {
        Configuration::from_labels(n, self.0.clone())
    }

    /// Exchanges the cells holding labels `a` and `b`.
    pub fn apply(&mut self, g: SymGen) {
        if let SymGen::Swap(a, b) = g {
            let ia = self.0.iter().position(|&v| v == a).expect("label present");
            let ib = self.0.iter().position(|&v| v == b).expect("label present");
            self.0.swap(ia, ib);
        }
    }
}

/// A generator of the symmetric-group presentation: a transposition of two
/// labels or the identity (holding).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymGen {
    Identity,
    Swap(u32, u32),
}

impl SymGen {
    /// Normalized transposition; `(a, a)` is the identity.
    pub fn swap(a: u32, b: u32) -> SymGen {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => SymGen::Identity,
            std::cmp::Ordering::Less => SymGen::Swap(a, b),
            std::cmp::Ordering::Greater => SymGen::Swap(b, a),
        }
    }

    pub fn involves(&self, label: u32) -> bool {
        matches!(*self, SymGen::Swap(a, b) if a == label || b == label)
    }
}

pub fn evaluate_sym(word: &[SymGen], m: usize) -> SymElement {
    let mut e = SymElement::identity(m);
    for &g in word {
        e.apply(g);
    }
    e
}

/// The label transposition that realises the translation move `y` from `c`.
pub fn translation_as_label_swap(c: &Configuration, y: TorusPoint) -> SymGen {
    let n = c.n();
    let target = c.hole().add(y, n);
    SymGen::swap(HOLE, c.label_at(target))
}
