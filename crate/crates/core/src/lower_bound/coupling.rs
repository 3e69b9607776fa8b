use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trace::lazy_hole_step;
use crate::error::{invalid, Result};
use crate::puzzle::{Direction, TorusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingVariant {
    /// The secondary hole starts one cell right of the primary.
    Horizontal,
    /// The secondary hole starts one cell below the primary.
    Vertical,
}

type Step = Option<Direction>;

/// Index of a step in move-count arrays: up, down, left, right, hold.
pub fn step_index(s: Step) -> usize {
    match s {
        Some(Direction::Up) => 0,
        Some(Direction::Down) => 1,
        Some(Direction::Left) => 2,
        Some(Direction::Right) => 3,
        None => 4,
    }
}

/// The lazy hole-step law in `step_index` order.
pub const LAZY_STEP_LAW: [f64; 5] = [0.125, 0.125, 0.125, 0.125, 0.5];

/// A joint law of (primary, secondary) steps.
#[derive(Clone, Debug)]
pub struct CouplingTable {
    rows: Vec<(Step, Step, f64)>,
}

impl CouplingTable {
    /// Panics unless the rows sum to one and both marginals are the lazy law.
    pub fn new(rows: Vec<(Step, Step, f64)>) -> Self {
        let total: f64 = rows.iter().map(|r| r.2).sum();
        assert!((total - 1.0).abs() < 1e-12, "coupling rows sum to {total}");
        let mut m = [[0.0; 5]; 2];
        for &(a, b, p) in &rows {
            m[0][step_index(a)] += p;
            m[1][step_index(b)] += p;
        }
        for side in m {
            for (got, want) in side.iter().zip(LAZY_STEP_LAW) {
                assert!((got - want).abs() < 1e-12, "coupling marginal is not lazy");
            }
        }
        CouplingTable { rows }
    }

    /// Moves apart or together along the reflection axis.
    pub fn reflected(variant: CouplingVariant) -> Self {
        use Direction::*;
        let e = 0.125;
        let rows = match variant {
            CouplingVariant::Horizontal => vec![
                (Some(Left), Some(Right), e),
                (Some(Right), Some(Left), e),
                (Some(Up), Some(Up), e),
                (Some(Down), Some(Down), e),
                (None, None, 0.5),
            ],
            CouplingVariant::Vertical => vec![
                (Some(Up), Some(Down), e),
                (Some(Down), Some(Up), e),
                (Some(Left), Some(Left), e),
                (Some(Right), Some(Right), e),
                (None, None, 0.5),
            ],
        };
        CouplingTable::new(rows)
    }

    /// Used when the holes are neighbours across the reflection axis.
    pub fn adjacent(variant: CouplingVariant) -> Self {
        use Direction::*;
        let e = 0.125;
        let rows = match variant {
            CouplingVariant::Horizontal => vec![
                (Some(Left), Some(Right), e),
                (Some(Right), None, e),
                (Some(Up), Some(Up), e),
                (Some(Down), Some(Down), e),
                (None, Some(Left), e),
                (None, None, 3.0 * e),
            ],
            CouplingVariant::Vertical => vec![
                (Some(Up), Some(Down), e),
                (Some(Down), None, e),
                (Some(Left), Some(Left), e),
                (Some(Right), Some(Right), e),
                (None, Some(Up), e),
                (None, None, 3.0 * e),
            ],
        };
        CouplingTable::new(rows)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Step, Step) {
        let mut u: f64 = rng.random();
        for &(a, b, p) in &self.rows {
            if u < p {
                return (a, b);
            }
            u -= p;
        }
        let last = self.rows.last().expect("non-empty table");
        (last.0, last.1)
    }
}

/// Two lazy hole walks coupled by reflection, with a target column `C`.
#[derive(Clone, Debug)]
pub struct CoupledHoles {
    pub n: usize,
    pub column: u32,
    pub variant: CouplingVariant,
    pub primary: TorusPoint,
    pub secondary: TorusPoint,
    adjacent: CouplingTable,
    reflected: CouplingTable,
}

impl CoupledHoles {
    /// Primary hole at distance `d` to the right of column `column`, row 0.
    pub fn new(n: usize, column: u32, d: u32, variant: CouplingVariant) -> Result<Self> {
        if n < 4 {
            return invalid("coupled holes need n >= 4");
        }
        if column as usize >= n {
            return invalid(format!("column {column} is off the board"));
        }
        let primary = TorusPoint::new(column as i64 + d as i64, 0, n);
        let shift = match variant {
            CouplingVariant::Horizontal => Direction::Right,
            CouplingVariant::Vertical => Direction::Down,
        };
        Ok(CoupledHoles {
            n,
            column,
            variant,
            primary,
            secondary: primary.add(shift.point(n), n),
            adjacent: CouplingTable::adjacent(variant),
            reflected: CouplingTable::reflected(variant),
        })
    }

    pub fn coupled(&self) -> bool {
        self.primary == self.secondary
    }

    /// True when `p` lies in column `C` or one of its two neighbours.
    pub fn near_column(&self, p: TorusPoint) -> bool {
        let dx = TorusPoint::new(p.x as i64 - self.column as i64, 0, self.n).signed(self.n).0;
        dx.abs() <= 1
    }

    fn across_axis(&self) -> bool {
        let n = self.n;
        match self.variant {
            CouplingVariant::Horizontal => self.primary.add(Direction::Right.point(n), n) == self.secondary,
            CouplingVariant::Vertical => self.secondary.add(Direction::Up.point(n), n) == self.primary,
        }
    }

    /// One coupled step; returns the steps taken by each hole.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Step, Step) {
        let (a, b) = if self.coupled() {
            let s = lazy_hole_step(rng);
            (s, s)
        } else if self.near_column(self.primary) || self.near_column(self.secondary) {
            (lazy_hole_step(rng), lazy_hole_step(rng))
        } else if self.across_axis() {
            self.adjacent.sample(rng)
        } else {
            self.reflected.sample(rng)
        };
        let n = self.n;
        if let Some(d) = a {
            self.primary = self.primary.add(d.point(n), n);
        }
        if let Some(d) = b {
            self.secondary = self.secondary.add(d.point(n), n);
        }
        (a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    /// The holes reached column `C` or a neighbour before coupling.
    pub e_occurred: bool,
    pub steps: u64,
    pub primary_moves: [u64; 5],
    pub secondary_moves: [u64; 5],
    /// Hole positions at times `0..=steps`, when recorded.
    pub primary_path: Vec<TorusPoint>,
    pub secondary_path: Vec<TorusPoint>,
}

/// Runs the coupling until the holes meet or either comes within one
/// column of `C`.
pub fn coupled_holes<R: Rng + ?Sized>(
    n: usize,
    column: u32,
    d: u32,
    variant: CouplingVariant,
    record: bool,
    rng: &mut R,
) -> Result<CoupledRun> {
    let mut c = CoupledHoles::new(n, column, d, variant)?;
    let mut run = CoupledRun {
        e_occurred: false,
        steps: 0,
        primary_moves: [0; 5],
        secondary_moves: [0; 5],
        primary_path: Vec::new(),
        secondary_path: Vec::new(),
    };
    loop {
        if record {
            run.primary_path.push(c.primary);
            run.secondary_path.push(c.secondary);
        }
        if c.coupled() {
            return Ok(run);
        }
        if c.near_column(c.primary) || c.near_column(c.secondary) {
            run.e_occurred = true;
            return Ok(run);
        }
        let (a, b) = c.step(rng);
        run.primary_moves[step_index(a)] += 1;
        run.secondary_moves[step_index(b)] += 1;
        run.steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;

    #[test]
    fn tables_are_lazy_couplings() {
        for v in [CouplingVariant::Horizontal, CouplingVariant::Vertical] {
            CouplingTable::adjacent(v);
            CouplingTable::reflected(v);
        }
    }

    #[test]
    #[should_panic]
    fn unbalanced_table_panics() {
        CouplingTable::new(vec![(None, None, 0.9)]);
    }

    #[test]
    fn coupled_holes_stay_together() {
        let mut rng = master_rng(5);
        for _ in 0..200 {
            let mut c = CoupledHoles::new(32, 0, 10, CouplingVariant::Horizontal).unwrap();
            let mut met = false;
            for _ in 0..2000 {
                c.step(&mut rng);
                if met {
                    assert!(c.coupled());
                }
                met |= c.coupled();
            }
        }
    }

    #[test]
    fn reflection_is_kept_before_stopping() {
        let mut rng = master_rng(9);
        let run = coupled_holes(64, 0, 16, CouplingVariant::Horizontal, true, &mut rng).unwrap();
        let axis2 = 2 * 16 + 1;
        for (p, s) in run.primary_path.iter().zip(&run.secondary_path) {
            if p == s {
                break;
            }
            assert_eq!(p.y, s.y);
            assert_eq!(p.x + s.x, axis2);
        }
    }
}
