//! Small permutation helpers. A permutation of `0..k` is a slice `p`
//! with `p[i]` the image of `i`.

pub fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    for &v in p {
        let v = v as usize;
        if v >= p.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// 1 for odd permutations, 0 for even.
pub fn parity(p: &[u32]) -> u32 {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0usize;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i] as usize;
            len += 1;
        }
        transpositions += len - 1;
    }
    (transpositions % 2) as u32
}

pub fn inverse(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

/// `(g ∘ f)(i) = g(f(i))`.
pub fn compose(g: &[u32], f: &[u32]) -> Vec<u32> {
    f.iter().map(|&v| g[v as usize]).collect()
}

/// Lehmer rank in `0..k!`. Only meaningful for `k <= 20`.
pub fn rank(p: &[u32]) -> u64 {
    let k = p.len();
    let mut r = 0u64;
    let mut used = 0u64;
    for (i, &v) in p.iter().enumerate() {
        let smaller_unused = v as u64 - (used & ((1u64 << v) - 1)).count_ones() as u64;
        r = r * (k - i) as u64 + smaller_unused;
        used |= 1u64 << v;
    }
    r
}

pub fn unrank(k: usize, mut r: u64) -> Vec<u32> {
    let mut digits = vec![0u64; k];
    for i in (0..k).rev() {
        let base = (k - i) as u64;
        digits[i] = r % base;
        r /= base;
    }
    let mut avail: Vec<u32> = (0..k as u32).collect();
    digits.iter().map(|&d| avail.remove(d as usize)).collect()
}

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}
