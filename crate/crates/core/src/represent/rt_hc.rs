use super::layer::{Layer, LayerTag};
use crate::error::{invalid, Result};
use crate::puzzle::HOLE;
use crate::rng::SimRng;
use crate::walks::{evaluate_sym, ChainTag, MoveDistribution, SymElement, SymGen};

/// Transpositions of labels written with transpositions through the hole.
///
/// Labels are ordered by home index, so the hole (label 0) comes first.
/// `(i, j)` with `0 < i < j` becomes `(h i)(h j)(h i)`; `(h, j)` is already a
/// generator of the hole chain and stands for itself.
pub struct RtHcLayer {
    n: usize,
    source: MoveDistribution,
    target_holding: bool,
}

impl RtHcLayer {
    pub fn new(n: usize) -> Result<Self> {
        Ok(RtHcLayer {
            n,
            source: MoveDistribution::new(ChainTag::Rt, n)?,
            target_holding: true,
        })
    }

    pub fn with_target_holding(mut self, holding: bool) -> Self {
        self.target_holding = holding;
        self
    }

    fn m(&self) -> u32 {
        (self.n * self.n) as u32
    }

    pub fn canonical(&self, y: SymGen) -> Vec<SymGen> {
        match y {
            SymGen::Identity => Vec::new(),
            SymGen::Swap(a, b) if a == HOLE || b == HOLE => vec![y],
            SymGen::Swap(i, j) => vec![SymGen::swap(HOLE, i), SymGen::swap(HOLE, j), SymGen::swap(HOLE, i)],
        }
    }
}

impl Layer for RtHcLayer {
    type Gen = SymGen;
    type Elem = SymElement;

    fn tag(&self) -> LayerTag {
        LayerTag::RtHc
    }

    fn n(&self) -> usize {
        self.n
    }

    fn sample_source(&self, rng: &mut SimRng) -> Result<SymGen> {
        self.source.sample_rt(rng)
    }

    fn represent(&self, y: &SymGen, _rng: &mut SimRng) -> Result<Vec<SymGen>> {
        if let SymGen::Swap(a, b) = *y {
            if a == b || a >= self.m() || b >= self.m() {
                return invalid("transposition needs two distinct labels on the board");
            }
        }
        Ok(self.canonical(*y))
    }

    fn represent_all(&self, y: &SymGen) -> Result<Vec<(Vec<SymGen>, f64)>> {
        Ok(vec![(self.canonical(*y), 1.0)])
    }

    fn source_support(&self) -> Result<Vec<(SymGen, f64)>> {
        self.source.rt_support()
    }

    fn target_support(&self) -> Result<Vec<(SymGen, f64)>> {
        let m = self.m();
        let scale = if self.target_holding { 0.5 } else { 1.0 };
        let mut out = Vec::new();
        if self.target_holding {
            out.push((SymGen::Identity, 0.5));
        }
        for i in 1..m {
            out.push((SymGen::swap(HOLE, i), scale / (m - 1) as f64));
        }
        Ok(out)
    }

    fn is_target_generator(&self, z: &SymGen) -> bool {
        match z {
            SymGen::Identity => self.target_holding,
            _ => z.involves(HOLE),
        }
    }

    fn eval(&self, word: &[SymGen]) -> SymElement {
        evaluate_sym(word, self.m() as usize)
    }

    fn identity(&self) -> SymElement {
        SymElement::identity(self.m() as usize)
    }

    /// Words act on labels, so the product of `a` then `b` is `b ∘ a`.
    fn mul(&self, a: &SymElement, b: &SymElement) -> SymElement {
        let pb = b.perm();
        SymElement::from_perm(a.perm().iter().map(|&l| pb[l as usize]).collect()).expect("permutation")
    }

    fn class_of(&self, z: &SymGen) -> String {
        match z {
            SymGen::Identity => "id".into(),
            SymGen::Swap(a, b) => format!("({a} {b})"),
        }
    }

    fn max_length(&self) -> Option<usize> {
        Some(3)
    }
}
