//! Hole-tile swaps on a two-row strip, and their transport to the torus.

use crate::puzzle::TorusPoint;
use crate::walks::nl_legal;

type Cell = (i64, i64);

const UP: Cell = (0, 1);
const DOWN: Cell = (0, -1);
const LEFT: Cell = (-1, 0);
const RIGHT: Cell = (1, 0);

struct StripRun {
    hole: Cell,
    tile: Cell,
    path: Vec<Cell>,
}

impl StripRun {
    /// Moves the hole; returns true if it swapped with the tracked tile.
    fn step(&mut self, d: Cell) -> bool {
        let next = (self.hole.0 + d.0, self.hole.1 + d.1);
        let swapped = next == self.tile;
        if swapped {
            self.tile = self.hole;
        }
        self.hole = next;
        self.path.push(next);
        swapped
    }
}

/// Hole positions of the four-phase procedure that swaps the hole at `(0, 0)`
/// with the tile at `(e, 1)` on the strip `[0, e] x {0, 1}`, leaving every
/// other tile in place. `e` must be even.
pub fn strip_hole_path(e: usize) -> Vec<Cell> {
    assert!(e % 2 == 0, "strip swap needs an even offset");
    let e = e as i64;
    let mut run = StripRun {
        hole: (0, 0),
        tile: (e, 1),
        path: vec![(0, 0)],
    };
    if e == 0 {
        run.step(UP);
        return run.path;
    }
    'phase1: loop {
        for d in [UP, RIGHT, DOWN, RIGHT] {
            if run.step(d) {
                break 'phase1;
            }
        }
    }
    for d in [LEFT, DOWN, RIGHT] {
        run.step(d);
    }
    'phase3: loop {
        for d in [UP, LEFT, LEFT, DOWN, RIGHT] {
            run.step(d);
            if run.tile == (0, 0) {
                break 'phase3;
            }
        }
    }
    'phase4: loop {
        for d in [RIGHT, UP, RIGHT, DOWN] {
            run.step(d);
            if run.hole == (e, 1) {
                break 'phase4;
            }
        }
    }
    run.path
}

/// One of the eight linear symmetries of the square lattice.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Symmetry([[i64; 2]; 2]);

impl Symmetry {
    pub(crate) const ALL: [Symmetry; 8] = [
        Symmetry([[1, 0], [0, 1]]),
        Symmetry([[-1, 0], [0, 1]]),
        Symmetry([[1, 0], [0, -1]]),
        Symmetry([[-1, 0], [0, -1]]),
        Symmetry([[0, 1], [1, 0]]),
        Symmetry([[0, -1], [1, 0]]),
        Symmetry([[0, 1], [-1, 0]]),
        Symmetry([[0, -1], [-1, 0]]),
    ];

    fn apply(&self, p: Cell) -> Cell {
        let m = self.0;
        (m[0][0] * p.0 + m[0][1] * p.1, m[1][0] * p.0 + m[1][1] * p.1)
    }

    /// Every matrix here is orthogonal, so the inverse is the transpose.
    fn apply_inverse(&self, p: Cell) -> Cell {
        let m = self.0;
        (m[0][0] * p.0 + m[1][0] * p.1, m[0][1] * p.0 + m[1][1] * p.1)
    }
}

/// How strip cells are laid onto the torus for a target in the reduced frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Embedding {
    /// Target one row up at an even column.
    Straight { e: i64 },
    /// Target in the hole's row at an odd column: the strip target cell is
    /// moved diagonally down-right onto it.
    SameRow { e: i64 },
    /// Target at `(x, y)` with `x, y >= 2`: the strip turns upward at column `x - 1`.
    Bent { x: i64 },
}

impl Embedding {
    fn for_target(x: i64, y: i64) -> Option<(Embedding, usize)> {
        if y == 1 && x % 2 == 0 {
            Some((Embedding::Straight { e: x }, x as usize))
        } else if y == 0 && x % 2 == 1 {
            Some((Embedding::SameRow { e: x - 1 }, (x - 1) as usize))
        } else if x >= 2 && y >= 2 && (x + y) % 2 == 1 {
            Some((Embedding::Bent { x }, (x + y - 3) as usize))
        } else {
            None
        }
    }

    fn map(&self, (c, r): Cell) -> Cell {
        match *self {
            Embedding::Straight { .. } => (c, r),
            Embedding::SameRow { e } => {
                if (c, r) == (e, 1) {
                    (e + 1, 0)
                } else {
                    (c, r)
                }
            }
            Embedding::Bent { x } => {
                if c <= x - 2 {
                    (c, r)
                } else {
                    let row = 2 + c - (x - 1);
                    (x - 1 + r, row)
                }
            }
        }
    }
}

/// Translations, each with a representative of norm 1 or 3, whose product is
/// the translation move `t`. Tries every lattice symmetry and keeps the
/// shortest valid plan (earliest symmetry on ties). `None` if no symmetry
/// brings `t` to a supported frame.
pub fn swap_plan(t: TorusPoint, n: usize) -> Option<Vec<TorusPoint>> {
    if t.is_origin() {
        return Some(Vec::new());
    }
    let ni = n as i64;
    let mut best: Option<Vec<TorusPoint>> = None;
    for sym in Symmetry::ALL {
        let (rx, ry) = sym.apply_inverse((t.x as i64, t.y as i64));
        let (rx, ry) = (rx.rem_euclid(ni), ry.rem_euclid(ni));
        let Some((emb, e)) = Embedding::for_target(rx, ry) else {
            continue;
        };
        let cells: Vec<TorusPoint> = (0..=e as i64)
            .flat_map(|c| [(c, 0), (c, 1)])
            .map(|p| {
                let q = sym.apply(emb.map(p));
                TorusPoint::new(q.0, q.1, n)
            })
            .collect();
        let mut sorted = cells.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != cells.len() {
            continue;
        }
        let pts: Vec<TorusPoint> = strip_hole_path(e)
            .into_iter()
            .map(|p| {
                let q = sym.apply(emb.map(p));
                TorusPoint::new(q.0, q.1, n)
            })
            .collect();
        let moves: Vec<TorusPoint> = pts.windows(2).map(|w| w[1].sub(w[0], n)).collect();
        if !moves.iter().all(|&y| nl_legal(y, n)) {
            continue;
        }
        if best.as_ref().is_none_or(|b| moves.len() < b.len()) {
            best = Some(moves);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn play(e: usize) -> HashMap<Cell, u32> {
        let path = strip_hole_path(e);
        let mut board: HashMap<Cell, u32> = HashMap::new();
        let mut label = 1;
        for c in 0..=e as i64 {
            for r in 0..2 {
                board.insert((c, r), label);
                label += 1;
            }
        }
        board.insert((0, 0), 0);
        for w in path.windows(2) {
            assert!((w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs() == 1);
            assert!(board.contains_key(&w[1]), "left the strip at {:?}", w[1]);
            let t = board[&w[1]];
            board.insert(w[0], t);
            board.insert(w[1], 0);
        }
        board
    }

    #[test]
    fn strip_swap_fixes_everything_else() {
        for e in (0..=40).step_by(2) {
            let before = {
                let mut b: HashMap<Cell, u32> = HashMap::new();
                let mut label = 1;
                for c in 0..=e as i64 {
                    for r in 0..2 {
                        b.insert((c, r), label);
                        label += 1;
                    }
                }
                b.insert((0, 0), 0);
                b
            };
            let after = play(e);
            for (cell, l) in &before {
                let expect = match *cell {
                    (0, 0) => before[&(e as i64, 1)],
                    c if c == (e as i64, 1) => 0,
                    _ => *l,
                };
                assert_eq!(after[cell], expect, "e={e} cell={cell:?}");
            }
        }
    }

    #[test]
    fn four_tile_strip_takes_33_moves() {
        assert_eq!(strip_hole_path(4).len() - 1, 33);
    }
}
