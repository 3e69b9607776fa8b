use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A finite Markov chain with a known stationary distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteChain {
    size: usize,
    p: Vec<f64>,
    pi: Vec<f64>,
}

const ROW_TOL: f64 = 1e-9;

impl FiniteChain {
    /// `p` is row-major `size x size`; rows must sum to one and `pi` must be
    /// a stationary probability vector.
    pub fn new(size: usize, p: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        if size == 0 || p.len() != size * size || pi.len() != size {
            return invalid("kernel and stationary vector have inconsistent sizes");
        }
        if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return invalid("kernel entries must be finite and non-negative");
        }
        for x in 0..size {
            let s: f64 = p[x * size..(x + 1) * size].iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return invalid(format!("row {x} sums to {s}"));
            }
        }
        let total: f64 = pi.iter().sum();
        if pi.iter().any(|&v| !(v > 0.0)) || (total - 1.0).abs() > ROW_TOL {
            return invalid("stationary vector must be a positive probability vector");
        }
        let c = FiniteChain { size, p, pi };
        for y in 0..size {
            let s: f64 = (0..size).map(|x| c.pi[x] * c.p(x, y)).sum();
            if (s - c.pi[y]).abs() > 1e-8 {
                return invalid(format!("pi is not stationary at state {y}"));
            }
        }
        Ok(c)
    }

    /// Chain of `w(x, y) / w(x)` for a symmetric non-negative weight matrix,
    /// reversible with respect to `w(x) / sum w`.
    pub fn from_weights(size: usize, w: &[f64]) -> Result<Self> {
        if w.len() != size * size {
            return invalid("weight matrix has the wrong size");
        }
        let row: Vec<f64> = (0..size).map(|x| w[x * size..(x + 1) * size].iter().sum()).collect();
        if row.iter().any(|&r| !(r > 0.0)) {
            return invalid("every state needs positive weight");
        }
        let total: f64 = row.iter().sum();
        let p = (0..size * size).map(|i| w[i] / row[i / size]).collect();
        FiniteChain::new(size, p, row.iter().map(|r| r / total).collect())
    }

    /// Right-invariant walk `x -> x g` on the subgroup generated by the
    /// support of `steps`, started from `identity`. Returns the chain (uniform
    /// stationary law) and its states in BFS order.
    pub fn from_group_walk<E: Ord + Clone>(
        steps: &[(E, f64)],
        identity: E,
        mul: impl Fn(&E, &E) -> E,
    ) -> Result<(FiniteChain, Vec<E>)> {
        let mut index: BTreeMap<E, usize> = BTreeMap::new();
        let mut states = vec![identity.clone()];
        index.insert(identity, 0);
        let mut head = 0;
        while head < states.len() {
            let x = states[head].clone();
            head += 1;
            for (g, _) in steps {
                let y = mul(&x, g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), states.len());
                    states.push(y);
                }
                if states.len() > 5000 {
                    return Err(Error::Capacity("group walk has more than 5000 states".into()));
                }
            }
        }
        let k = states.len();
        let mut p = vec![0.0; k * k];
        for (i, x) in states.iter().enumerate() {
            for (g, w) in steps {
                p[i * k + index[&mul(x, g)]] += w;
            }
        }
        Ok((FiniteChain::new(k, p, vec![1.0 / k as f64; k])?, states))
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.size + y]
    }

    pub fn kernel(&self) -> &[f64] {
        &self.p
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn is_reversible(&self, tol: f64) -> bool {
        (0..self.size).all(|x| {
            (0..self.size).all(|y| (self.pi[x] * self.p(x, y) - self.pi[y] * self.p(y, x)).abs() <= tol)
        })
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.p)
    }

    /// The same chain with states renamed by `perm` (old state `x` becomes `perm[x]`).
    pub fn relabel(&self, perm: &[usize]) -> FiniteChain {
        let k = self.size;
        let mut p = vec![0.0; k * k];
        let mut pi = vec![0.0; k];
        for x in 0..k {
            pi[perm[x]] = self.pi[x];
            for y in 0..k {
                p[perm[x] * k + perm[y]] = self.p(x, y);
            }
        }
        FiniteChain { size: k, p, pi }
    }
}

/// `E(f, f) = 1/2 sum_{x,y} (f(x) - f(y))^2 pi(x) p(x, y)`.
pub fn dirichlet_form(c: &FiniteChain, f: &[f64]) -> f64 {
    let k = c.len();
    let mut s = 0.0;
    for x in 0..k {
        let row = &c.p[x * k..(x + 1) * k];
        let mut r = 0.0;
        for y in 0..k {
            let d = f[x] - f[y];
            r += d * d * row[y];
        }
        s += r * c.pi[x];
    }
    0.5 * s
}

/// `ENT(g) = sum pi g log g - (sum pi g) log(sum pi g)` for `g >= 0`.
pub fn entropy(pi: &[f64], g: &[f64]) -> f64 {
    let xlogx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    let mean: f64 = pi.iter().zip(g).map(|(p, v)| p * v).sum();
    let s: f64 = pi.iter().zip(g).map(|(p, &v)| p * xlogx(v)).sum();
    (s - xlogx(mean)).max(0.0)
}

/// Chain watched only on `keep`: `P_KK + P_KB (I - P_BB)^{-1} P_BK`, with the
/// stationary law restricted and renormalized. States keep the order of `keep`.
pub fn restrict_chain(c: &FiniteChain, keep: &[usize]) -> Result<FiniteChain> {
    let k = c.len();
    if keep.is_empty() {
        return invalid("cannot restrict to the empty set");
    }
    let mut in_keep = vec![false; k];
    for &x in keep {
        if x >= k || in_keep[x] {
            return invalid("restriction set has out-of-range or repeated states");
        }
        in_keep[x] = true;
    }
    let rest: Vec<usize> = (0..k).filter(|&x| !in_keep[x]).collect();
    let a = keep.len();
    let b = rest.len();
    let mut out = DMatrix::from_fn(a, a, |i, j| c.p(keep[i], keep[j]));
    if b > 0 {
        let m = DMatrix::from_fn(b, b, |i, j| if i == j { 1.0 } else { 0.0 } - c.p(rest[i], rest[j]));
        let pbk = DMatrix::from_fn(b, a, |i, j| c.p(rest[i], keep[j]));
        let pkb = DMatrix::from_fn(a, b, |i, j| c.p(keep[i], rest[j]));
        let lu = m.lu();
        if lu.determinant().abs() < 1e-300 {
            return Err(Error::Singular("I - P_BB is singular; the removed set holds a closed class".into()));
        }
        let x = lu
            .solve(&pbk)
            .ok_or_else(|| Error::Singular("I - P_BB could not be inverted".into()))?;
        out += pkb * x;
    }
    let mass: f64 = keep.iter().map(|&x| c.pi[x]).sum();
    let pi: Vec<f64> = keep.iter().map(|&x| c.pi[x] / mass).collect();
    let mut p = Vec::with_capacity(a * a);
    for i in 0..a {
        let row_sum: f64 = (0..a).map(|j| out[(i, j)]).sum();
        for j in 0..a {
            p.push(out[(i, j)] / row_sum);
        }
    }
    FiniteChain::new(a, p, pi)
}

/// Removes one state `x` with `p~(i, j) = p(i, j) + p(i, x) p(x, j) / (1 - p(x, x))`.
pub fn eliminate_state(c: &FiniteChain, x: usize) -> Result<FiniteChain> {
    let k = c.len();
    if x >= k || k < 2 {
        return invalid("state out of range");
    }
    let stay = 1.0 - c.p(x, x);
    if stay <= 0.0 {
        return Err(Error::Singular(format!("state {x} is absorbing")));
    }
    let keep: Vec<usize> = (0..k).filter(|&y| y != x).collect();
    let mut p = Vec::with_capacity((k - 1) * (k - 1));
    for &i in &keep {
        for &j in &keep {
            p.push(c.p(i, j) + c.p(i, x) * c.p(x, j) / stay);
        }
    }
    let mass = 1.0 - c.pi[x];
    FiniteChain::new(k - 1, p, keep.iter().map(|&y| c.pi[y] / mass).collect())
}

/// Extends `boundary` (values on the complement of `harmonic`) to the function
/// that is harmonic (`f = P f`) on every state of `harmonic`.
pub fn harmonic_extension(c: &FiniteChain, harmonic: &[usize], boundary: &[f64]) -> Result<Vec<f64>> {
    let k = c.len();
    if boundary.len() != k {
        return invalid("boundary data must give a value for every state");
    }
    let mut is_h = vec![false; k];
    for &x in harmonic {
        if x >= k {
            return invalid("harmonic set out of range");
        }
        is_h[x] = true;
    }
    let hs: Vec<usize> = (0..k).filter(|&x| is_h[x]).collect();
    let mut f = boundary.to_vec();
    if hs.is_empty() {
        return Ok(f);
    }
    let h = hs.len();
    let m = DMatrix::from_fn(h, h, |i, j| if i == j { 1.0 } else { 0.0 } - c.p(hs[i], hs[j]));
    let rhs = DVector::from_fn(h, |i, _| {
        (0..k).filter(|&y| !is_h[y]).map(|y| c.p(hs[i], y) * boundary[y]).sum::<f64>()
    });
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("harmonic set contains a closed class".into()))?;
    for (i, &x) in hs.iter().enumerate() {
        f[x] = sol[i];
    }
    Ok(f)
}
