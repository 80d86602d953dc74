use crate::error::{Error, Result};
use crate::graph::strongly_connected_components;
use crate::numerics::{Matrix, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 1_000_000;

/// Spectral radius of a nonnegative square matrix, to within `tol`.
///
/// The radius of a reducible matrix is the largest radius of its irreducible
/// diagonal blocks, so each strongly connected component is handled on its
/// own. Inside a block, power iteration runs on `B + I`: the shift makes the
/// block primitive, so the iteration cannot oscillate, and the
/// Collatz-Wielandt ratios `min_i (Bx)_i / x_i <= rho(B) <= max_i (Bx)_i / x_i`
/// give a certified bracket that is iterated until it is narrower than `tol`.
pub fn spectral_radius<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("spectral radius of a non-square matrix".into()));
    }
    m.check_nonnegative()?;
    let f = m.to_f64();
    let blocks = irreducible_blocks(&f);
    let mut rho: f64 = 0.0;
    for block in blocks {
        let r = block_radius(&f.submatrix(&block, &block), tol)?;
        rho = rho.max(r);
    }
    Ok(rho)
}

/// Strongly connected components of the positive-entry support graph.
pub(crate) fn irreducible_blocks<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<usize>> {
    let n = m.rows();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| m.get(i, j).is_positive()).collect())
        .collect();
    strongly_connected_components(&succ)
}

fn block_radius(b: &Matrix<f64>, tol: f64) -> Result<f64> {
    let k = b.rows();
    if k == 1 {
        return Ok(*b.get(0, 0));
    }
    let shifted = b.add(&Matrix::identity(k));
    let mut x = vec![1.0; k];
    let mut best = (0.0, f64::INFINITY);
    for _ in 0..MAX_ITERATIONS {
        let y = shifted.mul_vec(&x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi - lo < best.1 - best.0 {
            best = (lo, hi);
        }
        if hi - lo <= 2.0 * tol {
            return Ok(0.5 * (lo + hi) - 1.0);
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        estimate: 0.5 * (best.0 + best.1) - 1.0,
    })
}
