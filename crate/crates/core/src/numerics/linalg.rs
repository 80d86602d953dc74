use crate::error::{Error, Result};
use crate::numerics::{Matrix, Scalar, Vector};

/// Solve `A x = b` by Gaussian elimination.
///
/// Rationals are eliminated exactly (first nonzero pivot); floats use partial
/// pivoting. Fails with [`Error::SingularMatrix`] when there is no unique
/// solution.
pub fn solve_linear<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Vector<S>> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let n = a.rows();
    let rhs = Matrix::from_vec(n, 1, b.to_vec())?;
    let x = gauss_jordan(a, rhs)?;
    Ok(x.entries().to_vec())
}

/// `A^{-1}` by Gauss-Jordan elimination.
pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    gauss_jordan(a, Matrix::identity(a.rows()))
}

/// Reduce `[A | B]` to `[I | A^{-1} B]`.
fn gauss_jordan<S: Scalar>(a: &Matrix<S>, b: Matrix<S>) -> Result<Matrix<S>> {
    let n = a.rows();
    let m = b.cols();
    let scale = a.max_abs_f64().max(1.0);
    let mut lhs: Vec<Vec<S>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut rhs: Vec<Vec<S>> = (0..n).map(|r| b.row(r).to_vec()).collect();

    for col in 0..n {
        let mut best = col;
        let mut best_score = lhs[col][col].pivot_score();
        for (r, row) in lhs.iter().enumerate().skip(col + 1) {
            if best_score > 0.0 && !S::is_exact() {
                let s = row[col].pivot_score();
                if s > best_score {
                    best = r;
                    best_score = s;
                }
            } else if best_score == 0.0 {
                let s = row[col].pivot_score();
                if s > 0.0 {
                    best = r;
                    best_score = s;
                }
            }
        }
        if lhs[best][col].is_negligible(scale) {
            return Err(Error::SingularMatrix);
        }
        lhs.swap(col, best);
        rhs.swap(col, best);

        let pivot = lhs[col][col].clone();
        for v in lhs[col].iter_mut().skip(col) {
            *v = v.clone() / &pivot;
        }
        for v in rhs[col].iter_mut() {
            *v = v.clone() / &pivot;
        }
        let pivot_lhs = lhs[col].clone();
        let pivot_rhs = rhs[col].clone();
        for r in 0..n {
            if r == col || lhs[r][col].is_zero() {
                continue;
            }
            let factor = lhs[r][col].clone();
            for c in col..n {
                if !pivot_lhs[c].is_zero() {
                    lhs[r][c] = lhs[r][c].clone() - &(factor.clone() * &pivot_lhs[c]);
                }
            }
            for c in 0..m {
                if !pivot_rhs[c].is_zero() {
                    rhs[r][c] = rhs[r][c].clone() - &(factor.clone() * &pivot_rhs[c]);
                }
            }
        }
    }
    Matrix::from_rows(rhs)
}

/// `(I - M)^{-1}` for a nonnegative square `M`, certified to be the sum of
/// the Neumann series.
///
/// For nonnegative `M`, `I - M` is nonsingular with an entrywise nonnegative
/// inverse exactly when `rho(M) < 1`. That check is exact on the rational
/// backend; on floats small negative round-off is tolerated.
pub fn neumann_inverse<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("Neumann inverse of a non-square matrix".into()));
    }
    m.check_nonnegative()?;
    let n = m.rows();
    let i_minus_m = Matrix::identity(n).sub(m);
    let inv = match inverse(&i_minus_m) {
        Ok(inv) => inv,
        Err(Error::SingularMatrix) => return Err(Error::MassDiverges),
        Err(e) => return Err(e),
    };
    let slack = if S::is_exact() {
        0.0
    } else {
        1e-9 * inv.max_abs_f64().max(1.0)
    };
    if inv.entries().iter().any(|v| v.is_negative() && -v.to_f64() > slack) {
        return Err(Error::MassDiverges);
    }
    // I + M (I-M)^{-1} = (I-M)^{-1} holds for the true inverse; a float
    // inverse of a nearly singular matrix can pass the sign test with huge
    // entries, so bound the residual of the identity too.
    if !S::is_exact() {
        let check = Matrix::identity(n).add(&m.mul(&inv));
        let scale = inv.max_abs_f64().max(1.0);
        let worst = check
            .entries()
            .iter()
            .zip(inv.entries())
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max);
        if !(worst <= 1e-8 * scale) || scale > 1e12 {
            return Err(Error::MassDiverges);
        }
    }
    Ok(inv)
}

/// Exact finiteness verdict: `rho(M) < 1`.
pub fn has_finite_mass<S: Scalar>(m: &Matrix<S>) -> bool {
    neumann_inverse(m).is_ok()
}

/// Determinant by Gaussian elimination. Exact on rationals.
pub fn determinant<S: Scalar>(a: &Matrix<S>) -> S {
    assert!(a.is_square());
    let n = a.rows();
    let scale = a.max_abs_f64().max(1.0);
    let mut rows: Vec<Vec<S>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut det = S::one();
    for col in 0..n {
        let Some(p) = (col..n)
            .filter(|&r| !rows[r][col].is_negligible(scale))
            .max_by(|&x, &y| {
                rows[x][col]
                    .pivot_score()
                    .partial_cmp(&rows[y][col].pivot_score())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        else {
            return S::zero();
        };
        if p != col {
            rows.swap(p, col);
            det = -det;
        }
        let pivot = rows[col][col].clone();
        det = det * &pivot;
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / &pivot;
            for c in col..n {
                let delta = factor.clone() * &rows[col][c];
                rows[r][c] = rows[r][c].clone() - &delta;
            }
        }
    }
    det
}
