//! Dense linear operators on R^n and the quadratic-form calculus behind
//! every representer formula.
//!
//! For a continuous linear operator the symmetric part is
//! `A_plus = (A + A^T)/2` and the antisymmetric part `A_circ = (A - A^T)/2`;
//! the quadratic form `q_A(x) = <x, Ax>/2` only sees `A_plus`. The operator
//! is maximal monotone exactly when `q_A` is convex, i.e. when `A_plus` is
//! positive semidefinite. The conjugate `q^*` is realized through the
//! pseudoinverse of the symmetric part together with a range indicator.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use thiserror::Error;

use crate::extreal::ExtReal;

/// Relative eigenvalue cutoff for building pseudoinverses.
pub const EIGEN_CUTOFF_REL: f64 = 1e-10;
/// Relative tolerance for deciding range membership of the symmetric part.
pub const RANGE_TOL_REL: f64 = 1e-8;
/// Default monotonicity certification tolerance.
pub const MONOTONE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LinopError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: operator dim {expected}, vector dim {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix rows are ragged: row {row} has {got} entries, expected {expected}")]
    RaggedRows { row: usize, got: usize, expected: usize },
    #[error("empty matrix")]
    Empty,
    #[error("failed to parse matrix entry {0:?}")]
    BadEntry(String),
    #[error("matrix is not antisymmetric (max |A + A^T| = {0:.3e})")]
    NotAntisymmetric(f64),
}

/// Symmetric PSD quadratic form `q(x) = <x, Sx>/2` with cached conjugate
/// machinery: pseudoinverse, range projector.
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    matrix: DMatrix<f64>,
    pinv: DMatrix<f64>,
    range_projector: DMatrix<f64>,
    eigen_cutoff: f64,
}

impl QuadraticForm {
    /// Builds the form from any square matrix; only the symmetric part
    /// enters. Eigenvalues below `EIGEN_CUTOFF_REL * max(lambda_max, 1)`
    /// are treated as zero when forming the pseudoinverse.
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self, LinopError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(LinopError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let n = matrix.nrows();
        let sym = (matrix + matrix.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cutoff = EIGEN_CUTOFF_REL * lambda_max.max(1.0);

        let mut pinv = DMatrix::zeros(n, n);
        let mut proj = DMatrix::zeros(n, n);
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > cutoff {
                let v = eig.eigenvectors.column(i);
                pinv += v * v.transpose() / lambda;
                proj += v * v.transpose();
            }
        }
        Ok(QuadraticForm {
            matrix: sym,
            pinv,
            range_projector: proj,
            eigen_cutoff: cutoff,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn eigen_cutoff(&self) -> f64 {
        self.eigen_cutoff
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<(), LinopError> {
        if v.len() != self.dim() {
            return Err(LinopError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `q(x) = <x, Sx>/2`, clamped at zero against rounding.
    pub fn eval(&self, x: &DVector<f64>) -> Result<f64, LinopError> {
        self.check_dim(x)?;
        Ok((x.dot(&(&self.matrix * x)) * 0.5).max(0.0))
    }

    /// `q^*(s) = <s, S^+ s>/2` on `ran S`, `+inf` off the range.
    ///
    /// The off-range verdict uses the relative tolerance
    /// `RANGE_TOL_REL * (1 + |s|)`. When `S = 0` the projector is zero and
    /// this correctly degenerates to the indicator of the origin.
    pub fn conjugate_eval(&self, s: &DVector<f64>) -> Result<ExtReal, LinopError> {
        self.check_dim(s)?;
        let off_range = (s - &self.range_projector * s).norm();
        if off_range > RANGE_TOL_REL * (1.0 + s.norm()) {
            return Ok(ExtReal::PosInf);
        }
        Ok(ExtReal::Finite(s.dot(&(&self.pinv * s)) * 0.5))
    }
}

/// Dense n x n operator with cached symmetric/antisymmetric decomposition.
/// The adjoint is the transpose (Euclidean pairing throughout).
#[derive(Clone, Debug)]
pub struct LinearMonotoneOperator {
    matrix: DMatrix<f64>,
    symmetric: QuadraticForm,
    antisymmetric: DMatrix<f64>,
}

impl LinearMonotoneOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, LinopError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(LinopError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(LinopError::Empty);
        }
        let symmetric = QuadraticForm::new(&matrix)?;
        let antisymmetric = (&matrix - matrix.transpose()) * 0.5;
        Ok(LinearMonotoneOperator {
            matrix,
            symmetric,
            antisymmetric,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The symmetric part as a quadratic form (`q_A = q_{A_plus}`).
    pub fn symmetric_form(&self) -> &QuadraticForm {
        &self.symmetric
    }

    pub fn antisymmetric_part(&self) -> &DMatrix<f64> {
        &self.antisymmetric
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>, LinopError> {
        if x.len() != self.dim() {
            return Err(LinopError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(&self.matrix * x)
    }

    pub fn apply_adjoint(&self, x: &DVector<f64>) -> Result<DVector<f64>, LinopError> {
        if x.len() != self.dim() {
            return Err(LinopError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.matrix.transpose() * x)
    }

    /// Spectral norm via SVD.
    pub fn spectral_norm(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// True iff the smallest eigenvalue of the symmetric part is at least
    /// `-tol * (1 + |A|)`, i.e. `q_A` is convex up to tolerance.
    pub fn certify_monotone(&self, tol: f64) -> bool {
        let eig = self.symmetric.matrix().clone().symmetric_eigen();
        let lambda_min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        lambda_min >= -tol * (1.0 + self.spectral_norm())
    }

    /// Operator sum; dimensions must match.
    pub fn sum(&self, other: &LinearMonotoneOperator) -> Result<LinearMonotoneOperator, LinopError> {
        if self.dim() != other.dim() {
            return Err(LinopError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        LinearMonotoneOperator::new(&self.matrix + &other.matrix)
    }
}

/// Splits `A` into its symmetric part (as a quadratic form) and its
/// antisymmetric part; the two reconstruct `A` exactly.
pub fn decompose(
    a: &LinearMonotoneOperator,
) -> (QuadraticForm, DMatrix<f64>) {
    (a.symmetric.clone(), a.antisymmetric.clone())
}

/// Checks antisymmetry entrywise within `tol`.
pub fn require_antisymmetric(m: &DMatrix<f64>, tol: f64) -> Result<(), LinopError> {
    let dev = (m + m.transpose()).abs().max();
    if dev > tol {
        return Err(LinopError::NotAntisymmetric(dev));
    }
    Ok(())
}

#[derive(Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

/// Parses the shared matrix format: either JSON `{"n": int, "rows": [[...]]}`
/// or whitespace-separated plain-text rows. Ragged rows are rejected.
pub fn parse_matrix(input: &str) -> Result<DMatrix<f64>, LinopError> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        let parsed: MatrixJson =
            serde_json::from_str(trimmed).map_err(|e| LinopError::BadEntry(e.to_string()))?;
        if parsed.rows.len() != parsed.n {
            return Err(LinopError::NotSquare {
                rows: parsed.rows.len(),
                cols: parsed.n,
            });
        }
        return rows_to_matrix(parsed.rows);
    }
    let mut rows = Vec::new();
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| LinopError::BadEntry(tok.to_string())))
            .collect();
        rows.push(row?);
    }
    rows_to_matrix(rows)
}

fn rows_to_matrix(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>, LinopError> {
    let n = rows.len();
    if n == 0 {
        return Err(LinopError::Empty);
    }
    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(LinopError::RaggedRows {
                row: i,
                got: row.len(),
                expected: width,
            });
        }
    }
    if width != n {
        return Err(LinopError::NotSquare { rows: n, cols: width });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn op(entries: &[&[f64]]) -> LinearMonotoneOperator {
        let n = entries.len();
        LinearMonotoneOperator::new(DMatrix::from_fn(n, n, |i, j| entries[i][j])).unwrap()
    }

    #[test]
    fn decompose_antisymmetric_matrix() {
        let a = op(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let (sym, anti) = decompose(&a);
        assert_eq!(sym.matrix().abs().max(), 0.0);
        assert_eq!(anti, *a.matrix());
    }

    #[test]
    fn decompose_symmetric_matrix() {
        let a = op(&[&[2.0, 0.0], &[0.0, 3.0]]);
        let (sym, anti) = decompose(&a);
        assert_eq!(*sym.matrix(), *a.matrix());
        assert_eq!(anti.abs().max(), 0.0);
    }

    #[test]
    fn decompose_rotation_pi_over_3() {
        let th = std::f64::consts::PI / 3.0;
        let a = op(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]);
        let (sym, anti) = decompose(&a);
        assert_abs_diff_eq!(*sym.matrix(), DMatrix::identity(2, 2) * 0.5, epsilon = 1e-15);
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]) * (3.0f64.sqrt() / 2.0);
        assert_abs_diff_eq!(anti, expected, epsilon = 1e-15);
    }

    #[test]
    fn decompose_parts_reconstruct_exactly() {
        let a = op(&[&[1.0, 2.0, -1.0], &[0.5, 3.0, 0.0], &[4.0, -2.0, 1.0]]);
        let (sym, anti) = decompose(&a);
        assert_eq!(sym.matrix() + anti, *a.matrix());
        assert_eq!(*sym.matrix(), sym.matrix().transpose());
        assert_eq!(decompose(&a).1, -decompose(&a).1.transpose());
    }

    #[test]
    fn certify_monotone_cases() {
        assert!(op(&[&[1.0, 0.0], &[0.0, 1.0]]).certify_monotone(MONOTONE_TOL));
        assert!(op(&[&[0.0, -1.0], &[1.0, 0.0]]).certify_monotone(MONOTONE_TOL));
        assert!(!op(&[&[-1.0, 0.0], &[0.0, 1.0]]).certify_monotone(MONOTONE_TOL));
    }

    #[test]
    fn rotation_near_half_pi_still_certifies() {
        let th = std::f64::consts::FRAC_PI_2 - 1e-9;
        let a = op(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]);
        assert!(a.certify_monotone(MONOTONE_TOL));
    }

    #[test]
    fn quad_eval_examples() {
        let q = QuadraticForm::new(&DMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(
            q.eval(&DVector::from_vec(vec![3.0, 4.0])).unwrap(),
            12.5,
            epsilon = 1e-15
        );

        let q = QuadraticForm::new(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(
            q.eval(&DVector::from_vec(vec![1.0, 5.0])).unwrap(),
            1.0,
            epsilon = 1e-15
        );

        // symmetric part of the rotation by pi/3 is Id/2
        let q = QuadraticForm::new(&(DMatrix::identity(2, 2) * 0.5)).unwrap();
        assert_abs_diff_eq!(
            q.eval(&DVector::from_vec(vec![1.0, 0.0])).unwrap(),
            0.25,
            epsilon = 1e-15
        );
    }

    #[test]
    fn quad_conjugate_on_and_off_range() {
        let q = QuadraticForm::new(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(
            q.conjugate_eval(&DVector::from_vec(vec![2.0, 0.0])).unwrap(),
            ExtReal::Finite(1.0)
        );
        assert_eq!(
            q.conjugate_eval(&DVector::from_vec(vec![0.0, 1.0])).unwrap(),
            ExtReal::PosInf
        );
    }

    #[test]
    fn quad_conjugate_shift_identity_scalar() {
        // q*(x + x*) = q(x) + x x* + q*(x*) for q = |.|^2/2 on R
        let q = QuadraticForm::new(&DMatrix::identity(1, 1)).unwrap();
        for &(x, xs) in &[(1.0, 1.0), (2.0, -0.5), (-1.3, 0.7)] {
            let lhs = q
                .conjugate_eval(&DVector::from_vec(vec![x + xs]))
                .unwrap()
                .unwrap_finite();
            let rhs = q.eval(&DVector::from_vec(vec![x])).unwrap()
                + x * xs
                + q.conjugate_eval(&DVector::from_vec(vec![xs]))
                    .unwrap()
                    .unwrap_finite();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_form_conjugate_is_indicator_of_origin() {
        let q = QuadraticForm::new(&DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(
            q.conjugate_eval(&DVector::zeros(2)).unwrap(),
            ExtReal::Finite(0.0)
        );
        assert_eq!(
            q.conjugate_eval(&DVector::from_vec(vec![0.1, 0.0])).unwrap(),
            ExtReal::PosInf
        );
    }

    #[test]
    fn pinv_is_consistent() {
        let s = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let q = QuadraticForm::new(&s).unwrap();
        let back = q.matrix() * q.pinv() * q.matrix();
        assert_abs_diff_eq!(back, *q.matrix(), epsilon = 1e-10);
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0; 6]);
        assert!(LinearMonotoneOperator::new(m).is_err());
    }

    #[test]
    fn parse_matrix_json_and_text() {
        let json = r#"{"n": 2, "rows": [[1.0, 2.0], [3.0, 4.0]]}"#;
        let text = "1 2\n3 4\n";
        let a = parse_matrix(json).unwrap();
        let b = parse_matrix(text).unwrap();
        assert_eq!(a, b);
        assert!(parse_matrix("1 2\n3\n").is_err());
        assert!(parse_matrix("1 2\n3 x\n").is_err());
        assert!(parse_matrix("").is_err());
    }
}
