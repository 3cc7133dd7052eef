//! Dense symmetric linear algebra: eigendecomposition and the Sylvester
//! solver behind bidirectional projection learning.
//!
//! Both operands of the projection equation `M1·W + W·M2 = R` are symmetric
//! positive semidefinite (a Gram matrix of attributes shifted by `λ4·I`, and
//! a Gram matrix of features), so the solver diagonalizes each side once and
//! divides elementwise in the joint eigenbasis instead of running
//! Bartels–Stewart on a Schur form.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Dense double-precision matrix used across the crate. Row/column counts
/// carry the semantic orientation documented at each call site (features are
/// `d×N`, attributes `k×N`, projections `k×d`).
pub type Matrix = DMatrix<f64>;

/// Elementwise asymmetry tolerated before an input is rejected as
/// non-symmetric. Inputs within the tolerance are symmetrized as
/// `(S + Sᵀ)/2` to strip accumulation noise.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric: |S - S^T| reaches {max_dev:.3e} at ({row},{col})")]
    NotSymmetric { row: usize, col: usize, max_dev: f64 },
    #[error(
        "singular Sylvester pair: eigenvalue sum theta1[{i}] + theta2[{j}] = {sum:.3e} \
         is not positive"
    )]
    SingularPair { i: usize, j: usize, sum: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains a non-finite entry at ({0},{1})")]
    NonFinite(usize, usize),
}

/// Eigendecomposition of a symmetric matrix: `S = V · diag(values) · Vᵀ`.
///
/// Eigenvalues are sorted ascending and each eigenvector's sign is fixed so
/// its first component of largest magnitude is positive, which makes the
/// decomposition reproducible across runs and platforms.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered to match `values`.
    pub vectors: Matrix,
}

fn check_finite(m: &Matrix) -> Result<(), MatError> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(MatError::NonFinite(i, j));
            }
        }
    }
    Ok(())
}

fn check_symmetric(s: &Matrix) -> Result<(), MatError> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(MatError::NotSquare(s.nrows(), s.ncols()));
    }
    let mut max_dev = 0.0;
    let mut at = (0, 0);
    for j in 0..n {
        for i in (j + 1)..n {
            let dev = (s[(i, j)] - s[(j, i)]).abs();
            if dev > max_dev {
                max_dev = dev;
                at = (i, j);
            }
        }
    }
    if max_dev > SYMMETRY_TOL {
        return Err(MatError::NotSymmetric { row: at.0, col: at.1, max_dev });
    }
    Ok(())
}

/// Fixes each eigenvector's sign: the first component of largest magnitude
/// is made positive.
fn fix_signs(vectors: &mut Matrix) {
    for mut col in vectors.column_iter_mut() {
        let mut lead = 0;
        let mut best = 0.0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                lead = i;
            }
        }
        if col[lead] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Rejects non-square or asymmetric (beyond [`SYMMETRY_TOL`]) input; within
/// tolerance the matrix is symmetrized before decomposition. Eigenvalues come
/// back ascending with orthonormal eigenvectors satisfying
/// `S·V = V·diag(values)`.
pub fn sym_eig(s: &Matrix) -> Result<EigenPair, MatError> {
    check_finite(s)?;
    check_symmetric(s)?;
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    fix_signs(&mut vectors);
    Ok(EigenPair { values, vectors })
}

/// Solves `M1·W + W·M2 = R` for symmetric `M1` (k×k) and `M2` (d×d) whose
/// spectra are jointly positive (`min eig(M1) + min eig(M2) > 0`).
///
/// Diagonalize `M1 = P·Θ1·Pᵀ` and `M2 = Q·Θ2·Qᵀ`; then `W̃ = PᵀWQ` solves the
/// equation elementwise, `w̃ᵢⱼ = r̃ᵢⱼ / (θ1ᵢ + θ2ⱼ)` with `R̃ = PᵀRQ`. A
/// non-positive eigenvalue-pair sum makes the equation singular and is
/// reported with the offending pair.
pub fn solve_sylvester(m1: &Matrix, m2: &Matrix, r: &Matrix) -> Result<Matrix, MatError> {
    let k = m1.nrows();
    let d = m2.nrows();
    if r.nrows() != k || r.ncols() != d {
        return Err(MatError::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {}x{}",
            r.nrows(),
            r.ncols(),
            k,
            d
        )));
    }
    check_finite(r)?;
    let e1 = sym_eig(m1)?;
    let e2 = sym_eig(m2)?;

    let scale = f64::max(
        1.0,
        f64::max(
            e1.values.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
            e2.values.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
        ),
    );
    let singular_tol = 1e-12 * scale;
    // Smallest pair sum decides well-posedness; eigenvalues are ascending.
    let min_sum = e1.values[0] + e2.values[0];
    if min_sum <= singular_tol {
        return Err(MatError::SingularPair { i: 0, j: 0, sum: min_sum });
    }

    let r_tilde = e1.vectors.transpose() * r * &e2.vectors;
    let mut w_tilde = Matrix::zeros(k, d);
    for i in 0..k {
        for j in 0..d {
            w_tilde[(i, j)] = r_tilde[(i, j)] / (e1.values[i] + e2.values[j]);
        }
    }
    Ok(&e1.vectors * w_tilde * e2.vectors.transpose())
}

/// Frobenius norm.
pub fn frob(m: &Matrix) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Entrywise L1 norm (sum of absolute values).
pub fn entry_l1(m: &Matrix) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

/// Residual `‖M1·W + W·M2 − R‖_F` of a candidate Sylvester solution.
pub fn sylvester_residual(m1: &Matrix, m2: &Matrix, r: &Matrix, w: &Matrix) -> f64 {
    frob(&(m1 * w + w * m2 - r))
}

/// Builds a matrix column by column.
pub fn from_columns(rows: usize, cols: &[DVector<f64>]) -> Matrix {
    let mut m = Matrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}
