use serde::{Deserialize, Serialize};

use super::perm;
use super::torus::{Direction, TorusPoint};
use crate::error::{invalid, Error, Result};

/// Label of the hole. Tile labels are the row-major index of their home cell,
/// so the hole's home is the origin.
pub const HOLE: u32 = 0;

/// A placement of `n^2` labels on the `n x n` torus.
///
/// Serializes as the flat row-major array of labels with the hole as 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ConfigurationRepr", into = "ConfigurationRepr")]
pub struct Configuration {
    n: usize,
    label_at: Vec<u32>,
    pos_of: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ConfigurationRepr(Vec<u32>);

impl TryFrom<ConfigurationRepr> for Configuration {
    type Error = Error;
    fn try_from(r: ConfigurationRepr) -> Result<Self> {
        let len = r.0.len();
        let n = (len as f64).sqrt().round() as usize;
        if n * n != len {
            return invalid(format!("{len} labels is not a square count"));
        }
        Configuration::from_labels(n, r.0)
    }
}

impl From<Configuration> for ConfigurationRepr {
    fn from(c: Configuration) -> Self {
        ConfigurationRepr(c.label_at)
    }
}

impl Configuration {
    pub fn solved(n: usize) -> Self {
        assert!(n >= 2, "board side must be at least 2");
        let ident: Vec<u32> = (0..(n * n) as u32).collect();
        Configuration {
            n,
            label_at: ident.clone(),
            pos_of: ident,
        }
    }

    /// `labels[i]` is the label sitting at row-major position `i`.
    pub fn from_labels(n: usize, labels: Vec<u32>) -> Result<Self> {
        if n < 2 {
            return invalid("board side must be at least 2");
        }
        if labels.len() != n * n {
            return invalid(format!("expected {} labels, got {}", n * n, labels.len()));
        }
        if !perm::is_permutation(&labels) {
            return invalid("labels are not a permutation of 0..n^2");
        }
        let pos_of = perm::inverse(&labels);
        Ok(Configuration {
            n,
            label_at: labels,
            pos_of,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[u32] {
        &self.label_at
    }

    pub fn positions(&self) -> &[u32] {
        &self.pos_of
    }

    pub fn hole(&self) -> TorusPoint {
        TorusPoint::from_index(self.pos_of[HOLE as usize] as usize, self.n)
    }

    pub fn position_of(&self, label: u32) -> TorusPoint {
        TorusPoint::from_index(self.pos_of[label as usize] as usize, self.n)
    }

    pub fn label_at(&self, p: TorusPoint) -> u32 {
        self.label_at[p.index(self.n)]
    }

    /// Moves the hole by `y`: the tile at `hole + y` jumps to the hole's cell.
    pub fn apply_translation(&mut self, y: TorusPoint) {
        if y.is_origin() {
            return;
        }
        let n = self.n;
        let h = self.pos_of[HOLE as usize] as usize;
        let t = self.hole().add(y, n).index(n);
        let tile = self.label_at[t];
        self.label_at.swap(h, t);
        self.pos_of[HOLE as usize] = t as u32;
        self.pos_of[tile as usize] = h as u32;
    }

    pub fn apply_move(&mut self, d: Direction) {
        self.apply_translation(d.point(self.n));
    }

    /// Swaps the hole with the tile labelled `label` wherever it sits.
    pub fn swap_with_hole(&mut self, label: u32) {
        let h = self.hole();
        let t = self.position_of(label);
        self.apply_translation(t.sub(h, self.n));
    }

    /// Swaps the contents of two cells.
    pub fn swap_cells(&mut self, a: TorusPoint, b: TorusPoint) {
        let (ia, ib) = (a.index(self.n), b.index(self.n));
        let (la, lb) = (self.label_at[ia], self.label_at[ib]);
        self.label_at.swap(ia, ib);
        self.pos_of[la as usize] = ib as u32;
        self.pos_of[lb as usize] = ia as u32;
    }

    /// Parity (0 even, 1 odd) of the placement viewed as a permutation of the cells.
    pub fn parity(&self) -> u32 {
        perm::parity(&self.label_at)
    }

    /// True when the placement parity equals the parity of the hole position.
    pub fn in_omega(&self) -> bool {
        self.parity() == self.hole().is_odd() as u32
    }
}

/// All configurations reachable from the solved one by unit moves, sorted.
/// Only `n <= 3` is accepted; beyond that the set has more than 10^12 elements.
pub fn reachable_set(n: usize) -> Result<Vec<Configuration>> {
    if n < 2 {
        return invalid("board side must be at least 2");
    }
    if n > 3 {
        return Err(Error::Capacity(format!("reachable set for n = {n} is too large to enumerate")));
    }
    let k = n * n;
    let total = perm::factorial(k) as usize;
    let mut seen = vec![false; total];
    let start = Configuration::solved(n);
    let mut queue = vec![start.clone()];
    seen[perm::rank(start.labels()) as usize] = true;
    let mut head = 0;
    while head < queue.len() {
        let c = queue[head].clone();
        head += 1;
        for d in Direction::ALL {
            let mut next = c.clone();
            next.apply_move(d);
            let r = perm::rank(next.labels()) as usize;
            if !seen[r] {
                seen[r] = true;
                queue.push(next);
            }
        }
    }
    queue.sort_by_key(|c| perm::rank(c.labels()));
    Ok(queue)
}
