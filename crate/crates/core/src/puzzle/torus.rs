use serde::{Deserialize, Serialize};

/// A point of Z_n x Z_n stored with coordinates in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: u32,
    pub y: u32,
}

impl TorusPoint {
    pub const ORIGIN: TorusPoint = TorusPoint { x: 0, y: 0 };

    /// Reduces arbitrary integer coordinates mod `n`.
    pub fn new(x: i64, y: i64, n: usize) -> Self {
        let n = n as i64;
        TorusPoint {
            x: x.rem_euclid(n) as u32,
            y: y.rem_euclid(n) as u32,
        }
    }

    pub fn from_index(i: usize, n: usize) -> Self {
        TorusPoint {
            x: (i % n) as u32,
            y: (i / n) as u32,
        }
    }

    /// Row-major index `y * n + x`.
    #[inline]
    pub fn index(self, n: usize) -> usize {
        self.y as usize * n + self.x as usize
    }

    #[inline]
    pub fn add(self, o: TorusPoint, n: usize) -> Self {
        let n = n as u32;
        TorusPoint {
            x: (self.x + o.x) % n,
            y: (self.y + o.y) % n,
        }
    }

    #[inline]
    pub fn neg(self, n: usize) -> Self {
        let n = n as u32;
        TorusPoint {
            x: (n - self.x) % n,
            y: (n - self.y) % n,
        }
    }

    #[inline]
    pub fn sub(self, o: TorusPoint, n: usize) -> Self {
        self.add(o.neg(n), n)
    }

    pub fn is_origin(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Torus norm |x| + |y| with |u| = min(u, n - u).
    pub fn norm(self, n: usize) -> u32 {
        coord_norm(self.x, n) + coord_norm(self.y, n)
    }

    /// Parity of `x + y` for the representative in `0..n`.
    pub fn is_odd(self) -> bool {
        (self.x + self.y) % 2 == 1
    }

    /// Signed representatives in `(-n/2, n/2]`.
    pub fn signed(self, n: usize) -> (i64, i64) {
        (signed_coord(self.x, n), signed_coord(self.y, n))
    }
}

pub fn coord_norm(u: u32, n: usize) -> u32 {
    u.min(n as u32 - u)
}

pub fn signed_coord(u: u32, n: usize) -> i64 {
    let u = u as i64;
    let n = n as i64;
    if 2 * u > n {
        u - n
    } else {
        u
    }
}

/// Unit moves of the hole. `Up` increases the row index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::Up => (0, 1),
            Direction::Down => (0, -1),
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
        }
    }

    pub fn point(self, n: usize) -> TorusPoint {
        let (dx, dy) = self.delta();
        TorusPoint::new(dx, dy, n)
    }

    pub fn arrow(self) -> char {
        match self {
            Direction::Up => '↑',
            Direction::Down => '↓',
            Direction::Left => '←',
            Direction::Right => '→',
        }
    }
}
