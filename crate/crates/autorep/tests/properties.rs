//! Randomized invariants for the quadratic-form calculus and the oracles.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use autorep::linop::{decompose, parse_matrix, LinearMonotoneOperator, QuadraticForm};
use autorep::oracle::{fenchel_young_check, grid_conjugate, GridSpec};
use autorep::representers::unified_bivariate;
use autorep::ExtReal;

fn small_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n * n)
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

/// Monotone operator with a positive-definite symmetric part, so every
/// conjugate below is finite.
fn monotone_from(entries: &[f64], n: usize) -> LinearMonotoneOperator {
    let m = DMatrix::from_row_slice(n, n, entries);
    let sym = m.transpose() * &m / (n as f64) + DMatrix::identity(n, n) * 0.2;
    let anti = DMatrix::from_row_slice(n, n, entries);
    let anti = (&anti - anti.transpose()) * 0.5;
    LinearMonotoneOperator::new(sym + anti).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_reconstructs_exactly(n in 1usize..4, entries in small_entries(3)) {
        let needed = &entries[..n * n];
        let op = monotone_from(needed, n);
        let (sym, anti) = decompose(&op);
        let rebuilt = sym.matrix() + &anti;
        let dev = (op.matrix() - rebuilt).abs().max();
        prop_assert!(dev <= 1e-14);
    }

    /// `q*(x* + Sx) = q(x) + <x, x*> + q*(x*)` for the symmetric part,
    /// whenever `x*` lies in its range.
    #[test]
    fn conjugate_shift_identity(n in 1usize..4, entries in small_entries(3), xv in vector(3), yv in vector(3)) {
        let q = QuadraticForm::new(&{
            let m = DMatrix::from_row_slice(n, n, &entries[..n * n]);
            m.transpose() * m
        }).unwrap();
        let x = DVector::from_column_slice(&xv[..n]);
        let xstar = q.matrix() * DVector::from_column_slice(&yv[..n]); // in range
        let lhs = q.conjugate_eval(&(&xstar + q.matrix() * &x)).unwrap().unwrap_finite();
        let rhs = q.eval(&x).unwrap() + x.dot(&xstar)
            + q.conjugate_eval(&xstar).unwrap().unwrap_finite();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()));
    }

    /// `q*(Sx) = q(x)` up to the rank-deficient directions of `S`.
    #[test]
    fn conjugate_composed_with_matrix(n in 1usize..4, entries in small_entries(3), xv in vector(3)) {
        let q = QuadraticForm::new(&{
            let m = DMatrix::from_row_slice(n, n, &entries[..n * n]);
            m.transpose() * m
        }).unwrap();
        // project x onto the range so the kernel component (killed by S
        // on the left, kept by q on the right) does not enter
        let x = q.pinv() * q.matrix() * DVector::from_column_slice(&xv[..n]);
        let lhs = q.conjugate_eval(&(q.matrix() * &x)).unwrap().unwrap_finite();
        let rhs = q.eval(&x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()));
    }

    /// The unified representer majorizes the pairing everywhere.
    #[test]
    fn representer_majorizes_pairing(n in 1usize..4, entries in small_entries(3), pts in prop::collection::vec(vector(6), 10)) {
        let op = monotone_from(&entries[..n * n], n);
        let f = unified_bivariate(&op);
        let points: Vec<(Vec<f64>, Vec<f64>)> = pts
            .iter()
            .map(|p| (p[..n].to_vec(), p[n..2 * n].to_vec()))
            .collect();
        prop_assert!(fenchel_young_check(&f, &points, 1e-9));
    }

    /// Refining the grid can only raise the sampled supremum.
    #[test]
    fn refinement_raises_grid_conjugate(scale in 0.2f64..3.0, query in -2.0f64..2.0) {
        let f = move |w: &[f64]| ExtReal::Finite(0.5 * scale * w[0] * w[0]);
        let coarse = GridSpec::cube(-4.0, 4.0, 1, 41).unwrap();
        let fine = GridSpec::cube(-4.0, 4.0, 1, 81).unwrap(); // same nodes plus midpoints
        let lo = grid_conjugate(&f, &coarse, &[query]).unwrap().unwrap_finite();
        let hi = grid_conjugate(&f, &fine, &[query]).unwrap().unwrap_finite();
        prop_assert!(hi >= lo - 1e-12);
    }

    /// Conjugating the exact conjugate on a grid minorizes the original:
    /// the sampled supremum is a lower bound for the true biconjugate.
    #[test]
    fn grid_biconjugate_minorizes(scale in 0.2f64..3.0, at in -1.5f64..1.5) {
        let exact_conj = move |s: &[f64]| ExtReal::Finite(0.5 * s[0] * s[0] / scale);
        let grid = GridSpec::cube(-4.0, 4.0, 1, 81).unwrap();
        let biconj = grid_conjugate(&exact_conj, &grid, &[at]).unwrap().unwrap_finite();
        prop_assert!(biconj <= 0.5 * scale * at * at + 1e-12);
    }

    #[test]
    fn matrix_json_round_trip(n in 1usize..4, entries in small_entries(3)) {
        let m = DMatrix::from_row_slice(n, n, &entries[..n * n]);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
        let text = serde_json::json!({ "n": n, "rows": rows }).to_string();
        let parsed = parse_matrix(&text).unwrap();
        prop_assert_eq!(parsed, m);
    }

    #[test]
    fn infinity_absorbs_addition(v in -1e6f64..1e6) {
        prop_assert_eq!(ExtReal::PosInf + ExtReal::Finite(v), ExtReal::PosInf);
        prop_assert!(ExtReal::Finite(v) < ExtReal::PosInf);
    }
}
