//! Breadth-first solutions of hole-tile swaps inside a small window.

use std::collections::{HashMap, VecDeque};
use std::sync::{Mutex, OnceLock};

use crate::puzzle::Direction;

type Key = (usize, usize, (usize, usize), (usize, usize));

fn cache() -> &'static Mutex<HashMap<Key, Vec<Direction>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Vec<Direction>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Board of at most 9 cells packed 4 bits per cell; bits 36.. hold the hole cell.
fn pack(cells: &[u8], hole: usize) -> u64 {
    cells.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | (v as u64) << (4 * i)) | (hole as u64) << 36
}

fn cell_of(state: u64, i: usize) -> u8 {
    ((state >> (4 * i)) & 0xF) as u8
}

/// Shortest sequence of unit moves inside a `w x h` window that swaps the
/// hole at `hole` with the tile at `target` and restores every other tile.
/// Results are memoized per process.
pub fn window_swap(w: usize, h: usize, hole: (usize, usize), target: (usize, usize)) -> Option<Vec<Direction>> {
    assert!(w * h <= 9 && hole.0 < w && target.0 < w && hole.1 < h && target.1 < h);
    let key = (w, h, hole, target);
    if let Some(v) = cache().lock().expect("cache lock").get(&key) {
        return Some(v.clone());
    }
    let idx = |p: (usize, usize)| p.1 * w + p.0;
    let k = w * h;
    let start_cells: Vec<u8> = (0..k as u8).collect();
    let mut goal_cells = start_cells.clone();
    goal_cells.swap(idx(hole), idx(target));
    let start = pack(&start_cells, idx(hole));
    let goal = pack(&goal_cells, idx(target));

    let mut parent: HashMap<u64, (u64, Direction)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    parent.insert(start, (start, Direction::Up));
    while let Some(s) = queue.pop_front() {
        if s == goal {
            break;
        }
        let hc = (s >> 36) as usize;
        let (hx, hy) = ((hc % w) as i64, (hc / w) as i64);
        for d in Direction::ALL {
            let (dx, dy) = d.delta();
            let (nx, ny) = (hx + dx, hy + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let nc = ny as usize * w + nx as usize;
            let t = cell_of(s, nc) as u64;
            let hv = cell_of(s, hc) as u64;
            let mut next = s & !(0xFu64 << (4 * hc)) & !(0xFu64 << (4 * nc)) & !(0xFu64 << 36);
            next |= t << (4 * hc) | hv << (4 * nc) | (nc as u64) << 36;
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(next) {
                v.insert((s, d));
                queue.push_back(next);
            }
        }
    }
    if !parent.contains_key(&goal) {
        return None;
    }
    let mut moves = Vec::new();
    let mut s = goal;
    while s != start {
        let (p, d) = parent[&s];
        moves.push(d);
        s = p;
    }
    moves.reverse();
    cache().lock().expect("cache lock").insert(key, moves.clone());
    Some(moves)
}
