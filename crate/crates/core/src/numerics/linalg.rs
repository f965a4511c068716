use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

/// Rank threshold: `σ_min < RANK_TOL · σ_max` is treated as rank collapse.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: DVector<f64>,
    /// `‖A x − b‖₂` at the solution.
    pub residual_norm: f64,
}

/// Minimizer of `‖A x − b‖₂` through the SVD of `A`.
///
/// Rank-deficient systems are an error rather than a silent pseudo-inverse.
pub fn least_squares_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LeastSquares> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidArgument(format!("underdetermined system: {m} rows, {n} columns")));
    }
    if b.len() != m {
        return Err(Error::InvalidArgument(format!("rhs has length {}, expected {m}", b.len())));
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    if sigma_max == 0.0 || sigma_min < RANK_TOL * sigma_max {
        return Err(Error::DegenerateSystem { sigma_min, sigma_max });
    }
    let solution = svd
        .solve(b, 0.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual_norm = (a * &solution - b).norm();
    Ok(LeastSquares { solution, residual_norm })
}

/// Smallest singular value with its unit right singular vector.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub vector: DVector<f64>,
}

/// Smallest singular value of `A` (counting the null space of a wide matrix).
pub fn min_singular_value(a: &DMatrix<f64>) -> SingularPair {
    let (m, n) = a.shape();
    assert!(m > 0 && n > 0, "empty matrix");
    let padded;
    let a = if m < n {
        padded = a.clone().resize_vertically(n, 0.0);
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, &sigma_min) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty");
    SingularPair {
        sigma_min,
        sigma_max: svd.singular_values.max(),
        vector: v_t.row(idx).transpose(),
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue_symmetric(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.min()
}
