//! Fitzpatrick functions of continuous linear monotone operators.
//!
//! For such an operator the Fitzpatrick function has the closed form
//! `F_A(x, x*) = q_{A+}^*(x* + A^T x) / 2`, and its conjugate collapses to
//! the graph indicator plus the pairing:
//! `F_A^*(x*, x) = iota_{gra A}(x, x*) + <x, Ax>`. For operators given only
//! by graph samples, the defining sup over the sample is a certified lower
//! bound.

use nalgebra::DVector;
use thiserror::Error;

use crate::extreal::ExtReal;
use crate::linop::{LinearMonotoneOperator, LinopError, RANGE_TOL_REL};
use crate::oracle::BivariateFunction;

#[derive(Debug, Error)]
pub enum FitzError {
    #[error(transparent)]
    Linop(#[from] LinopError),
    #[error("empty graph sample")]
    EmptySample,
}

/// `F_A(x, x*) = q_{A+}^*(x* + A^T x) / 2`.
///
/// When `A` is antisymmetric the symmetric part vanishes and this is the
/// indicator of `x* = Ax` (zero on the graph, `+inf` off it).
pub fn fitz_eval(
    a: &LinearMonotoneOperator,
    x: &DVector<f64>,
    xstar: &DVector<f64>,
) -> Result<ExtReal, FitzError> {
    let arg = xstar + a.apply_adjoint(x)?;
    Ok(a.symmetric_form().conjugate_eval(&arg)?.map(|v| 0.5 * v))
}

/// `F_A^*(x*, x)`: the pairing `<x, Ax>` when `x* = Ax` within the range
/// tolerance, `+inf` otherwise.
pub fn fitz_conjugate_eval(
    a: &LinearMonotoneOperator,
    xstar: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<ExtReal, FitzError> {
    let ax = a.apply(x)?;
    if xstar.len() != ax.len() {
        return Err(LinopError::DimensionMismatch {
            expected: ax.len(),
            got: xstar.len(),
        }
        .into());
    }
    if (xstar - &ax).norm() <= RANGE_TOL_REL * (1.0 + xstar.norm()) {
        Ok(ExtReal::Finite(x.dot(&ax)))
    } else {
        Ok(ExtReal::PosInf)
    }
}

/// Sampled-graph lower bound: `max` over the sample of
/// `<x, y*> + <y, x*> - <y, y*>`. This is the only general mechanism for
/// operators without a closed form.
pub fn fitz_sampled(
    graph_points: &[(Vec<f64>, Vec<f64>)],
    x: &[f64],
    xstar: &[f64],
) -> Result<f64, FitzError> {
    if graph_points.is_empty() {
        return Err(FitzError::EmptySample);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    Ok(graph_points
        .iter()
        .map(|(y, ystar)| dot(x, ystar) + dot(y, xstar) - dot(y, ystar))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Wraps the closed form as a bivariate function for the oracles.
pub fn fitz_bivariate(a: &LinearMonotoneOperator) -> BivariateFunction {
    let a = a.clone();
    BivariateFunction::new(a.dim(), "F_A", move |x, xstar| {
        let x = DVector::from_column_slice(x);
        let xs = DVector::from_column_slice(xstar);
        fitz_eval(&a, &x, &xs).expect("dimension checked by construction")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn v(entries: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(entries)
    }

    fn id(n: usize) -> LinearMonotoneOperator {
        LinearMonotoneOperator::new(DMatrix::identity(n, n)).unwrap()
    }

    fn rotation(theta: f64) -> LinearMonotoneOperator {
        LinearMonotoneOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        ))
        .unwrap()
    }

    #[test]
    fn identity_graph_point() {
        // F_Id(1,1) = (1+1)^2/4 = 1 = <x,x*>
        let a = id(1);
        assert_abs_diff_eq!(
            fitz_eval(&a, &v(&[1.0]), &v(&[1.0])).unwrap().unwrap_finite(),
            1.0,
            epsilon = 1e-14
        );
        // F_Id(1,-1) = 0 >= -1
        assert_abs_diff_eq!(
            fitz_eval(&a, &v(&[1.0]), &v(&[-1.0])).unwrap().unwrap_finite(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn antisymmetric_operator_is_graph_indicator() {
        let a = LinearMonotoneOperator::new(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]))
            .unwrap();
        let x = v(&[1.0, 0.0]);
        let ax = a.apply(&x).unwrap();
        assert_eq!(fitz_eval(&a, &x, &ax).unwrap(), ExtReal::Finite(0.0));
        assert_eq!(
            fitz_eval(&a, &x, &v(&[0.5, 1.0])).unwrap(),
            ExtReal::PosInf
        );
    }

    #[test]
    fn conjugate_is_graph_indicator_plus_pairing() {
        let a = id(1);
        assert_eq!(
            fitz_conjugate_eval(&a, &v(&[1.0]), &v(&[1.0])).unwrap(),
            ExtReal::Finite(1.0)
        );
        assert_eq!(
            fitz_conjugate_eval(&a, &v(&[0.0]), &v(&[1.0])).unwrap(),
            ExtReal::PosInf
        );

        let a = rotation(std::f64::consts::PI / 3.0);
        let x = v(&[1.0, 0.0]);
        let ax = a.apply(&x).unwrap();
        assert_abs_diff_eq!(
            fitz_conjugate_eval(&a, &ax, &x).unwrap().unwrap_finite(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sampled_lower_bound() {
        // single sample {(0,0)} gives 0 everywhere
        let sample = vec![(vec![0.0], vec![0.0])];
        assert_eq!(fitz_sampled(&sample, &[3.0], &[-2.0]).unwrap(), 0.0);

        // Id graph sampled on [-2,2] approximates F_Id(1,1) = 1
        let sample: Vec<_> = (-200..=200)
            .map(|i| {
                let t = i as f64 * 0.01;
                (vec![t], vec![t])
            })
            .collect();
        let val = fitz_sampled(&sample, &[1.0], &[1.0]).unwrap();
        assert!((val - 1.0).abs() < 1e-3, "got {val}");
        // always a lower bound
        let closed = fitz_eval(&id(1), &v(&[1.0]), &v(&[1.0])).unwrap().unwrap_finite();
        assert!(val <= closed + 1e-12);
    }

    #[test]
    fn neglog_graph_sample_matches_closed_form() {
        // graph of d(-ln): x* = -1/x; F(1,-1) = 1 - 2*sqrt(1) = -1
        let sample: Vec<_> = (1..=400)
            .map(|i| {
                let t = i as f64 * 0.01;
                (vec![t], vec![-1.0 / t])
            })
            .collect();
        let val = fitz_sampled(&sample, &[1.0], &[-1.0]).unwrap();
        assert!((val + 1.0).abs() < 1e-3, "got {val}");
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(fitz_sampled(&[], &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn inverse_law_for_invertible_operators() {
        // F_{A^{-1}}(x*, x) = F_A(x, x*)
        let a = rotation(std::f64::consts::PI / 6.0);
        let ainv = LinearMonotoneOperator::new(a.matrix().clone().try_inverse().unwrap()).unwrap();
        for (x, xs) in [
            (v(&[1.0, 0.5]), v(&[0.3, -0.2])),
            (v(&[-1.0, 2.0]), v(&[1.0, 1.0])),
            (v(&[0.0, 0.0]), v(&[0.0, 0.0])),
        ] {
            let lhs = fitz_eval(&ainv, &xs, &x).unwrap().unwrap_finite();
            let rhs = fitz_eval(&a, &x, &xs).unwrap().unwrap_finite();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9 * (1.0 + rhs.abs()));
        }
    }
}
