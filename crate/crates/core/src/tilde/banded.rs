use crate::error::{Error, Result};

/// A square system with non-zeros only within `bw` of the diagonal, solved
/// by Gaussian elimination without pivoting. Meant for diagonally dominant
/// harmonic systems, where that is stable.
#[derive(Clone, Debug)]
pub struct BandedSystem {
    size: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedSystem {
    pub fn new(size: usize, bw: usize) -> Self {
        BandedSystem {
            size,
            bw,
            band: vec![0.0; size * (2 * bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bw, "entry ({i}, {j}) outside the band");
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.at(i, j);
        self.band[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bw {
            0.0
        } else {
            self.band[self.at(i, j)]
        }
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw + 1).min(self.size);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b`; returns `x` and the max-norm residual.
    pub fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, f64)> {
        assert_eq!(b.len(), self.size);
        let (n, bw) = (self.size, self.bw);
        let mut a = self.clone();
        let mut x = b.to_vec();
        for i in 0..n {
            let piv = a.get(i, i);
            if piv.abs() < 1e-300 {
                return Err(Error::Singular(format!("zero pivot at row {i}")));
            }
            for r in i + 1..(i + bw + 1).min(n) {
                let f = a.get(r, i) / piv;
                if f == 0.0 {
                    continue;
                }
                for c in i..(i + bw + 1).min(n) {
                    let v = a.get(i, c);
                    if v != 0.0 {
                        a.add(r, c, -f * v);
                    }
                }
                x[r] -= f * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for c in i + 1..(i + bw + 1).min(n) {
                s -= a.get(i, c) * x[c];
            }
            x[i] = s / a.get(i, i);
        }
        let ax = self.mul(&x);
        let residual = ax.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        Ok((x, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let mut a = BandedSystem::new(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        let (x, res) = a.solve(&b).unwrap();
        assert!(res < 1e-12);
        for (i, v) in x.iter().enumerate() {
            assert!((v - (i + 1) as f64 / (n + 1) as f64).abs() < 1e-12);
        }
    }
}
