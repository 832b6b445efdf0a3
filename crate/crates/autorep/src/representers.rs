//! The three autoconjugate constructions for a continuous linear monotone
//! operator and the operations connecting them.
//!
//! * `a_rep` (Penot-Zalinescu): `inf over y*` of
//!   `F(x, x*+y*)/2 + F^{*T}(x, x*-y*)/2`. For linear operators the graph
//!   indicator inside the conjugate collapses the infimum to
//!   `F_A(x, 2x* - Ax)/2 + q_{A+}(x)`.
//! * `b_rep` (proximal average): `inf over (y, y*)` of
//!   `F(x+y, x*+y*)/2 + F^{*T}(x-y, x*-y*)/2 + |y|^2/2 + |y*|^2/2`. For
//!   linear operators the indicator forces `y* = x* - A(x-y)`, leaving an
//!   unconstrained convex minimization over `y`.
//! * `c_rep` (Ghoussoub): the closed form
//!   `q_{A+}(x) + q_{A+}^*(x* - A_circ x)`.
//!
//! For continuous linear monotone operators all three coincide with
//! `<x, x*> + q_{A+}^*(x* - Ax)` (the unified form). The numeric modes stay
//! available for nonlinear operators given by closed-form `F` and `F^{*T}`
//! pairs.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::extreal::ExtReal;
use crate::fitzpatrick::{fitz_eval, FitzError};
use crate::linop::{require_antisymmetric, LinearMonotoneOperator, LinopError};
use crate::minimize::{minimize, MinimizerReport, SearchBox};
use crate::oracle::BivariateFunction;

/// Default per-axis search interval for the numeric modes.
pub const DEFAULT_BOX: (f64, f64) = (-10.0, 10.0);
/// Default line-search refinement tolerance.
pub const SOLVER_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum RepError {
    #[error(transparent)]
    Linop(#[from] LinopError),
    #[error(transparent)]
    Fitz(#[from] FitzError),
    #[error("search box dimension {got} does not match problem dimension {expected}")]
    BoxDimension { expected: usize, got: usize },
}

/// Evaluation routes for representer-shaped bivariate functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresenterKind {
    PenotZalinescu,
    ProximalAverage,
    Ghoussoub,
    Unified,
    Indicator,
    Separable,
    Shear,
    PartialInfConv,
}

/// Ghoussoub construction `q_{A+}(x) + q_{A+}^*(x* - A_circ x)`.
pub fn c_rep_eval(
    a: &LinearMonotoneOperator,
    x: &DVector<f64>,
    xstar: &DVector<f64>,
) -> Result<ExtReal, RepError> {
    let q = a.symmetric_form();
    let shifted = xstar - a.antisymmetric_part() * x;
    Ok(q.conjugate_eval(&shifted)?.map(|v| v + q.eval(x).unwrap()))
}

/// Unified closed form `<x, x*> + q_{A+}^*(x* - Ax)`.
pub fn unified_eval(
    a: &LinearMonotoneOperator,
    x: &DVector<f64>,
    xstar: &DVector<f64>,
) -> Result<ExtReal, RepError> {
    let shifted = xstar - a.apply(x)?;
    Ok(a.symmetric_form()
        .conjugate_eval(&shifted)?
        .map(|v| v + x.dot(xstar)))
}

/// Penot-Zalinescu construction, collapsed closed form for linear `A`:
/// `F_A(x, 2x* - Ax)/2 + q_{A+}(x)`. The inner minimizer is
/// `y* = x* - Ax`, recorded in the report.
pub fn a_rep_closed(
    a: &LinearMonotoneOperator,
    x: &DVector<f64>,
    xstar: &DVector<f64>,
) -> Result<(ExtReal, MinimizerReport), RepError> {
    let doubled = xstar * 2.0 - a.apply(x)?;
    let value = fitz_eval(a, x, &doubled)?.map(|v| 0.5 * v + a.symmetric_form().eval(x).unwrap());
    let argmin = (xstar - a.apply(x)?).iter().cloned().collect();
    Ok((
        value,
        MinimizerReport {
            argmin,
            objective: value,
            iterations: 0,
            certificate: 0.0,
            boundary_hit: false,
        },
    ))
}

/// Penot-Zalinescu construction by numeric minimization over `y*` given
/// evaluators for `F` and `F^{*T}` (both as functions on `X x X*`).
pub fn a_rep_numeric(
    f: &BivariateFunction,
    f_conj_t: &BivariateFunction,
    x: &[f64],
    xstar: &[f64],
    search: &SearchBox,
    tol: f64,
) -> Result<(ExtReal, MinimizerReport), RepError> {
    a_rep_numeric_seeded(f, f_conj_t, x, xstar, search, tol, &[])
}

/// [`a_rep_numeric`] with extra starting candidates for `y*`. When
/// `F^{*T}` carries a graph indicator the finite slice is a single point
/// (`y* = x* - Ax` for linear operators) that no probe lattice can find.
pub fn a_rep_numeric_seeded(
    f: &BivariateFunction,
    f_conj_t: &BivariateFunction,
    x: &[f64],
    xstar: &[f64],
    search: &SearchBox,
    tol: f64,
    ystar_seeds: &[Vec<f64>],
) -> Result<(ExtReal, MinimizerReport), RepError> {
    let n = f.dim();
    if search.dim() != n {
        return Err(RepError::BoxDimension {
            expected: n,
            got: search.dim(),
        });
    }
    let objective = |ystar: &[f64]| {
        let plus: Vec<f64> = xstar.iter().zip(ystar).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = xstar.iter().zip(ystar).map(|(a, b)| a - b).collect();
        (f.eval(x, &plus) + f_conj_t.eval(x, &minus)).map(|v| 0.5 * v)
    };
    let report = crate::minimize::minimize_seeded(&objective, search, tol, ystar_seeds);
    Ok((report.objective, report))
}

/// Proximal-average construction, collapsed for linear `A` to an
/// unconstrained minimization over `y`:
/// `F_A(x+y, 2x* - A(x-y))/2 + q_A(x-y) + |y|^2/2 + |x* - A(x-y)|^2/2`.
pub fn b_rep_collapsed(
    a: &LinearMonotoneOperator,
    x: &DVector<f64>,
    xstar: &DVector<f64>,
    search: &SearchBox,
    tol: f64,
) -> Result<(ExtReal, MinimizerReport), RepError> {
    let n = a.dim();
    if x.len() != n || xstar.len() != n {
        return Err(LinopError::DimensionMismatch {
            expected: n,
            got: x.len().max(xstar.len()),
        }
        .into());
    }
    if search.dim() != n {
        return Err(RepError::BoxDimension {
            expected: n,
            got: search.dim(),
        });
    }
    let objective = |y: &[f64]| {
        let y = DVector::from_column_slice(y);
        let xmy = x - &y;
        let a_xmy = a.apply(&xmy).unwrap();
        let second = xstar * 2.0 - &a_xmy;
        let ystar = xstar - &a_xmy;
        fitz_eval(a, &(x + &y), &second).unwrap().map(|v| {
            0.5 * v
                + a.symmetric_form().eval(&xmy).unwrap()
                + 0.5 * y.norm_squared()
                + 0.5 * ystar.norm_squared()
        })
    };
    let report = minimize(&objective, search, tol);
    Ok((report.objective, report))
}

/// Proximal-average construction by joint numeric minimization over
/// `(y, y*)`; the search box covers the `2n` joint variable.
pub fn b_rep_numeric(
    f: &BivariateFunction,
    f_conj_t: &BivariateFunction,
    x: &[f64],
    xstar: &[f64],
    search: &SearchBox,
    tol: f64,
) -> Result<(ExtReal, MinimizerReport), RepError> {
    let n = f.dim();
    if search.dim() != 2 * n {
        return Err(RepError::BoxDimension {
            expected: 2 * n,
            got: search.dim(),
        });
    }
    let objective = |w: &[f64]| {
        let (y, ystar) = w.split_at(n);
        let xp: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let xsp: Vec<f64> = xstar.iter().zip(ystar).map(|(a, b)| a + b).collect();
        let xm: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let xsm: Vec<f64> = xstar.iter().zip(ystar).map(|(a, b)| a - b).collect();
        let quad = 0.5 * y.iter().map(|v| v * v).sum::<f64>()
            + 0.5 * ystar.iter().map(|v| v * v).sum::<f64>();
        (f.eval(&xp, &xsp) + f_conj_t.eval(&xm, &xsm)).map(|v| 0.5 * v + quad)
    };
    let report = minimize(&objective, search, tol);
    Ok((report.objective, report))
}

/// Partial infimal convolution in the dual variable:
/// `inf over y*` of `F1(x, y*) + F2(x, x* - y*)`. Adds the represented
/// operators when both inputs are autoconjugate.
pub fn partial_inf_conv(
    f1: &BivariateFunction,
    f2: &BivariateFunction,
    x: &[f64],
    xstar: &[f64],
    search: &SearchBox,
    tol: f64,
) -> Result<(ExtReal, MinimizerReport), RepError> {
    partial_inf_conv_seeded(f1, f2, x, xstar, search, tol, &[])
}

/// [`partial_inf_conv`] with caller-supplied candidate values for the
/// inner variable `y*`. Needed when one factor is a graph indicator: its
/// finite slice is a single point that no probe lattice can find, so the
/// caller who knows the slice supplies it.
pub fn partial_inf_conv_seeded(
    f1: &BivariateFunction,
    f2: &BivariateFunction,
    x: &[f64],
    xstar: &[f64],
    search: &SearchBox,
    tol: f64,
    ystar_seeds: &[Vec<f64>],
) -> Result<(ExtReal, MinimizerReport), RepError> {
    let n = f1.dim();
    if search.dim() != n {
        return Err(RepError::BoxDimension {
            expected: n,
            got: search.dim(),
        });
    }
    let objective = |ystar: &[f64]| {
        let rest: Vec<f64> = xstar.iter().zip(ystar).map(|(a, b)| a - b).collect();
        f1.eval(x, ystar) + f2.eval(x, &rest)
    };
    let report = crate::minimize::minimize_seeded(&objective, search, tol, ystar_seeds);
    Ok((report.objective, report))
}

/// Shears a representer by an antisymmetric operator:
/// `(x, x*) -> F1(x, x* - A2 x)`, the representer of `G(F1) + A2`.
pub fn shear_rep(
    f1: &BivariateFunction,
    a2: &DMatrix<f64>,
) -> Result<BivariateFunction, RepError> {
    require_antisymmetric(a2, 1e-12)?;
    let a2 = a2.clone();
    let inner = f1.clone();
    let label = format!("shear({})", f1.label());
    Ok(BivariateFunction::new(f1.dim(), label, move |x, xstar| {
        let shift = &a2 * DVector::from_column_slice(x);
        let arg: Vec<f64> = xstar.iter().zip(shift.iter()).map(|(a, b)| a - b).collect();
        inner.eval(x, &arg)
    }))
}

/// Bivariate view of the Ghoussoub representer.
pub fn c_rep_bivariate(a: &LinearMonotoneOperator) -> BivariateFunction {
    let a = a.clone();
    BivariateFunction::new(a.dim(), "C_A", move |x, xstar| {
        c_rep_eval(
            &a,
            &DVector::from_column_slice(x),
            &DVector::from_column_slice(xstar),
        )
        .expect("dimension fixed by construction")
    })
}

/// Bivariate view of the unified closed form.
pub fn unified_bivariate(a: &LinearMonotoneOperator) -> BivariateFunction {
    let a = a.clone();
    BivariateFunction::new(a.dim(), "unified_A", move |x, xstar| {
        unified_eval(
            &a,
            &DVector::from_column_slice(x),
            &DVector::from_column_slice(xstar),
        )
        .expect("dimension fixed by construction")
    })
}

/// Checks `inf_conv(C_A, C_B) = C_{A+B}` at the given test points.
/// Returns the verdict and the largest finite-side gap.
pub fn ghoussoub_sum_identity(
    a: &LinearMonotoneOperator,
    b: &LinearMonotoneOperator,
    test_points: &[(Vec<f64>, Vec<f64>)],
    search: &SearchBox,
    tol: f64,
) -> Result<(bool, f64), RepError> {
    let sum = a.sum(b)?;
    let ca = c_rep_bivariate(a);
    let cb = c_rep_bivariate(b);
    let mut max_gap: f64 = 0.0;
    for (x, xstar) in test_points {
        let (lhs, _) = partial_inf_conv(&ca, &cb, x, xstar, search, SOLVER_TOL)?;
        let rhs = c_rep_eval(
            &sum,
            &DVector::from_column_slice(x),
            &DVector::from_column_slice(xstar),
        )?;
        match crate::extreal::finite_gap(lhs, rhs) {
            Some(gap) => max_gap = max_gap.max(gap),
            None => return Ok((false, f64::INFINITY)),
        }
    }
    Ok((max_gap <= tol, max_gap))
}

/// Verdict of the symmetry characterization checks on a candidate
/// representer for a symmetric monotone operator.
#[derive(Debug)]
pub struct HoeVerdict {
    pub origin_ok: bool,
    pub origin_value: ExtReal,
    pub swap_ok: bool,
    /// Largest `|F(x, Ay) - F(y, Ax)|` over the sampled pairs.
    pub worst_swap_gap: f64,
}

impl HoeVerdict {
    pub fn all_pass(&self) -> bool {
        self.origin_ok && self.swap_ok
    }
}

/// Tests the necessary conditions `F(0,0) = 0` and `F(x, Ay) = F(y, Ax)`
/// on sampled pairs. (Autoconjugacy, the third condition, is the oracle's
/// job.) For `F = C_A` both pass; a perturbed candidate fails at the
/// origin.
pub fn hoe_symmetry_check(
    a: &LinearMonotoneOperator,
    f: &BivariateFunction,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> Result<HoeVerdict, RepError> {
    let n = a.dim();
    let zero = vec![0.0; n];
    let origin_value = f.eval(&zero, &zero);
    let origin_ok = matches!(origin_value, ExtReal::Finite(v) if v.abs() <= tol);

    let mut worst: f64 = 0.0;
    let mut swap_ok = true;
    for (x, y) in pairs {
        let ax = a.apply(&DVector::from_column_slice(x))?;
        let ay = a.apply(&DVector::from_column_slice(y))?;
        let lhs = f.eval(x, ay.as_slice());
        let rhs = f.eval(y, ax.as_slice());
        match crate::extreal::finite_gap(lhs, rhs) {
            Some(gap) => {
                worst = worst.max(gap);
                if gap > tol {
                    swap_ok = false;
                }
            }
            None => swap_ok = false,
        }
    }
    Ok(HoeVerdict {
        origin_ok,
        origin_value,
        swap_ok,
        worst_swap_gap: worst,
    })
}
