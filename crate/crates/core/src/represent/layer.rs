use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerTag {
    #[serde(rename = "rt-hc")]
    RtHc,
    #[serde(rename = "or-bgb")]
    OrBgb,
    #[serde(rename = "bgb-pc")]
    BgbPc,
    #[serde(rename = "pc-nl")]
    PcNl,
    #[serde(rename = "nl-loyd")]
    NlLoyd,
    #[serde(rename = "hc-loyd")]
    HcLoyd,
    #[serde(rename = "pc-loyd")]
    PcLoyd,
}

impl LayerTag {
    pub const ALL: [LayerTag; 7] = [
        LayerTag::RtHc,
        LayerTag::OrBgb,
        LayerTag::BgbPc,
        LayerTag::PcNl,
        LayerTag::NlLoyd,
        LayerTag::HcLoyd,
        LayerTag::PcLoyd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LayerTag::RtHc => "rt-hc",
            LayerTag::OrBgb => "or-bgb",
            LayerTag::BgbPc => "bgb-pc",
            LayerTag::PcNl => "pc-nl",
            LayerTag::NlLoyd => "nl-loyd",
            LayerTag::HcLoyd => "hc-loyd",
            LayerTag::PcLoyd => "pc-loyd",
        }
    }
}

impl std::str::FromStr for LayerTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LayerTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown layer {s:?}")))
    }
}

/// Rewrites each move of a source chain as a word in the generators of a
/// target chain with the same evaluation.
pub trait Layer: Sync {
    /// Source moves and target generators share one type.
    type Gen: Clone + Ord + Hash + Debug + Serialize + Send + Sync;
    type Elem: Clone + Ord + Hash + Debug;

    fn tag(&self) -> LayerTag;
    fn n(&self) -> usize;

    fn sample_source(&self, rng: &mut SimRng) -> Result<Self::Gen>;
    fn represent(&self, y: &Self::Gen, rng: &mut SimRng) -> Result<Vec<Self::Gen>>;
    /// Every representation of `y` with its probability under the layer's
    /// auxiliary randomness.
    fn represent_all(&self, y: &Self::Gen) -> Result<Vec<(Vec<Self::Gen>, f64)>>;

    fn source_support(&self) -> Result<Vec<(Self::Gen, f64)>>;
    fn target_support(&self) -> Result<Vec<(Self::Gen, f64)>>;
    fn is_target_generator(&self, z: &Self::Gen) -> bool;

    fn eval(&self, word: &[Self::Gen]) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn class_of(&self, z: &Self::Gen) -> String;
    fn max_length(&self) -> Option<usize>;

    /// `E(N(Y, z) |Y|)` for every target generator `z` hit with positive
    /// probability, computed exactly.
    fn exact_weights(&self) -> Result<BTreeMap<Self::Gen, f64>> {
        let mut acc: BTreeMap<Self::Gen, f64> = BTreeMap::new();
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

    fn source_elements(&self) -> Result<Vec<(Self::Elem, f64)>> {
        aggregate(self, self.source_support()?)
    }

    fn target_elements(&self) -> Result<Vec<(Self::Elem, f64)>> {
        aggregate(self, self.target_support()?)
    }

    /// Evaluation of `rep` equals that of `y` and every letter is a target generator.
    fn verify(&self, y: &Self::Gen, rep: &[Self::Gen]) -> bool {
        rep.iter().all(|z| self.is_target_generator(z)) && self.eval(std::slice::from_ref(y)) == self.eval(rep)
    }
}

fn aggregate<L: Layer + ?Sized>(l: &L, support: Vec<(L::Gen, f64)>) -> Result<Vec<(L::Elem, f64)>> {
    let mut acc: BTreeMap<L::Elem, f64> = BTreeMap::new();
    for (g, p) in support {
        *acc.entry(l.eval(std::slice::from_ref(&g))).or_insert(0.0) += p;
    }
    Ok(acc.into_iter().collect())
}
