use nalgebra::{DMatrix, SymmetricEigen};

use super::chain::FiniteChain;
use crate::error::{invalid, Result};

/// Eigenpairs of a reversible chain, sorted by decreasing eigenvalue.
/// Vectors are right eigenvectors of `P`, normalized in `L^2(pi)`.
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn spectrum(c: &FiniteChain) -> Result<Spectrum> {
    if !c.is_reversible(1e-10) {
        return invalid("spectral decomposition needs a reversible chain");
    }
    let k = c.len();
    let sq: Vec<f64> = c.pi().iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(k, k, |x, y| {
        let v = sq[x] * c.p(x, y) / sq[y];
        let w = sq[y] * c.p(y, x) / sq[x];
        0.5 * (v + w)
    });
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..k).map(|x| eig.eigenvectors[(x, i)] / sq[x]).collect())
        .collect();
    Ok(Spectrum { values, vectors })
}

/// `1 - lambda_2` for a reversible chain.
pub fn spectral_gap(c: &FiniteChain) -> Result<f64> {
    let s = spectrum(c)?;
    Ok(if s.values.len() < 2 { 1.0 } else { 1.0 - s.values[1] })
}
