//! Worked scalar examples with exact formulas.
//!
//! Three stories live here:
//!
//! * a whole family of distinct autoconjugate representers for the
//!   identity on `R`, built from any `g` with `g*(-x) = g(x) >= 0`;
//! * the negative-log subdifferential, where the Penot-Zalinescu,
//!   proximal-average, and separable representers all differ (their
//!   domains are strictly nested);
//! * finite diagonal truncations of the `l2` operator `diag(k)`, whose
//!   two constructions coincide in finite dimensions, together with the
//!   bounded-energy sequence showing what breaks in the limit.

use thiserror::Error;

use crate::extreal::ExtReal;
use crate::linop::{LinearMonotoneOperator, LinopError};
use crate::oracle::{
    grid_conjugate_argmax, grid_error_bound, BivariateFunction, GridSpec,
    OracleError,
};

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("power-pair exponent must satisfy p > 1, got {0}")]
    BadExponent(f64),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Linop(#[from] LinopError),
    #[error("diagonal truncation constructions disagree: {a} vs {b}")]
    TruncationMismatch { a: f64, b: f64 },
}

/// Scalar generator `g` with `g*(-x) = g(x) >= 0`; each instance yields an
/// autoconjugate representer for the identity on `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GSpec {
    IndicatorHalfLine,
    Energy,
    /// `x^p/p` for `x >= 0`, `(-x)^q/q` for `x < 0` with `1/p + 1/q = 1`.
    PowerPair(f64),
}

impl GSpec {
    pub fn power_pair(p: f64) -> Result<GSpec, GalleryError> {
        if p > 1.0 {
            Ok(GSpec::PowerPair(p))
        } else {
            Err(GalleryError::BadExponent(p))
        }
    }

    pub fn eval(self, x: f64) -> ExtReal {
        match self {
            GSpec::IndicatorHalfLine => {
                if x >= 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PosInf
                }
            }
            GSpec::Energy => ExtReal::Finite(0.5 * x * x),
            GSpec::PowerPair(p) => {
                let q = p / (p - 1.0);
                if x >= 0.0 {
                    ExtReal::Finite(x.powf(p) / p)
                } else {
                    ExtReal::Finite((-x).powf(q) / q)
                }
            }
        }
    }
}

/// `F_g(x, y) = q((x+y)/sqrt 2) + g((x-y)/sqrt 2)` with `q = |.|^2/2`:
/// an autoconjugate representer for the identity whenever `g` passes
/// [`g_axiom_check`].
pub fn id_family_eval(g: GSpec, x: f64, y: f64) -> ExtReal {
    let s = std::f64::consts::SQRT_2;
    g.eval((x - y) / s).map(|v| v + 0.25 * (x + y).powi(2))
}

/// Bivariate view of [`id_family_eval`] for the oracles.
pub fn id_family_bivariate(g: GSpec) -> BivariateFunction {
    let label = format!("F_{g:?}");
    BivariateFunction::new(1, label, move |x, y| id_family_eval(g, x[0], y[0]))
}

/// Verifies `g >= 0` on the grid, `g(0) = 0` exactly, and
/// `g*(-x) = g(x)` within the grid-error bound at interior finite points.
pub fn g_axiom_check(g: GSpec, grid: &GridSpec) -> Result<bool, GalleryError> {
    let f = move |w: &[f64]| g.eval(w[0]);
    if g.eval(0.0) != ExtReal::Finite(0.0) {
        return Ok(false);
    }
    for idx in 0..grid.num_nodes() {
        let t = grid.node(idx)[0];
        if let ExtReal::Finite(v) = g.eval(t) {
            if v < 0.0 {
                return Ok(false);
            }
        }
    }
    let bound = grid_error_bound(&f, grid);
    let margin = 2.0 * grid.step(0);
    for idx in 0..grid.num_nodes() {
        let t = grid.node(idx)[0];
        if !grid.is_interior(&[t], margin) {
            continue;
        }
        if let ExtReal::Finite(gt) = g.eval(t) {
            let (conj, argmax) = grid_conjugate_argmax(&f, grid, &[-t])?;
            // a boundary-attained sup means the box clipped the true
            // maximizer; nothing to conclude at this point
            if !grid.is_interior(&argmax, margin) {
                continue;
            }
            if (conj - gt).abs() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Pieces of the negative-log story.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegLogWhich {
    /// `f(x) = -ln x` on `(0, inf)`.
    F,
    /// `f*(x*) = -1 - ln(-x*)` on `(-inf, 0)`.
    FStar,
    /// Fitzpatrick function of the subdifferential: `1 - 2 sqrt(-x x*)`.
    Fitz,
    /// `F^{*T} = -1 + iota_C` with `C = {x* <= -1/x < 0}`.
    FitzConj,
    /// Penot-Zalinescu representer: `-sqrt(-1 - 2 x x*)` on `(1/sqrt2) C`.
    Arep,
    /// Separable representer `f(x) + f*(x*)`.
    SepRep,
}

fn neg_ln(x: f64) -> ExtReal {
    if x > 0.0 {
        ExtReal::Finite(-x.ln())
    } else {
        ExtReal::PosInf
    }
}

/// Clamps tiny negative radicands from rounding so boundary evaluations
/// return 0 rather than NaN.
fn safe_sqrt(v: f64) -> Option<f64> {
    if v >= 0.0 {
        Some(v.sqrt())
    } else if v >= -1e-12 {
        Some(0.0)
    } else {
        None
    }
}

pub fn neglog_value(which: NegLogWhich, x: f64, xstar: f64) -> ExtReal {
    match which {
        NegLogWhich::F => neg_ln(x),
        NegLogWhich::FStar => neg_ln(-xstar).map(|v| v - 1.0),
        NegLogWhich::Fitz => {
            if x >= 0.0 && xstar <= 0.0 {
                ExtReal::Finite(1.0 - 2.0 * (-x * xstar).sqrt())
            } else {
                ExtReal::PosInf
            }
        }
        NegLogWhich::FitzConj => {
            if x > 0.0 && xstar <= -1.0 / x {
                ExtReal::Finite(-1.0)
            } else {
                ExtReal::PosInf
            }
        }
        NegLogWhich::Arep => {
            if x > 0.0 && xstar <= -0.5 / x {
                match safe_sqrt(-1.0 - 2.0 * x * xstar) {
                    Some(r) => ExtReal::Finite(-r),
                    None => ExtReal::PosInf,
                }
            } else {
                ExtReal::PosInf
            }
        }
        NegLogWhich::SepRep => neg_ln(x) + neglog_value(NegLogWhich::FStar, x, xstar),
    }
}

pub fn neglog_bivariate(which: NegLogWhich) -> BivariateFunction {
    BivariateFunction::new(1, format!("neglog_{which:?}"), move |x, xs| {
        neglog_value(which, x[0], xs[0])
    })
}

/// Exact domain membership for the three representers:
/// `dom A = {x* <= -1/(2x) < 0}`, `dom B = {x* <= -1/(4x) < 0}`,
/// `dom (f + f*) = (0, inf) x (-inf, 0)`; strictly nested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegLogDomain {
    Arep,
    Brep,
    SepRep,
}

pub fn neglog_domain_classify(which: NegLogDomain, x: f64, xstar: f64) -> bool {
    match which {
        NegLogDomain::Arep => x > 0.0 && xstar <= -0.5 / x,
        NegLogDomain::Brep => x > 0.0 && xstar <= -0.25 / x,
        NegLogDomain::SepRep => x > 0.0 && xstar < 0.0,
    }
}

/// Finite truncation of the `l2` diagonal pair: `A = diag(k)`,
/// `B = A^{-1} = diag(1/k)`.
#[derive(Clone, Copy, Debug)]
pub struct DiagonalTruncation {
    pub n: usize,
}

impl DiagonalTruncation {
    pub fn a_operator(self) -> Result<LinearMonotoneOperator, LinopError> {
        LinearMonotoneOperator::new(nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                (i + 1) as f64
            } else {
                0.0
            }
        }))
    }

    pub fn b_operator(self) -> Result<LinearMonotoneOperator, LinopError> {
        LinearMonotoneOperator::new(nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                1.0 / (i + 1) as f64
            } else {
                0.0
            }
        }))
    }
}

/// Both truncated constructions at `(x, x*)`: `q_A(x) + q_B(x*)` and
/// `q_B^*(x) + q_B(x*)`. In finite dimensions `q_B^* = q_A`, so the two
/// must agree; a disagreement beyond `1e-10` relative is an error.
pub fn diag_truncation_reps(
    n: usize,
    x: &[f64],
    xstar: &[f64],
) -> Result<(ExtReal, ExtReal), GalleryError> {
    let trunc = DiagonalTruncation { n };
    let a = trunc.a_operator()?;
    let b = trunc.b_operator()?;
    let xv = nalgebra::DVector::from_column_slice(x);
    let xsv = nalgebra::DVector::from_column_slice(xstar);
    let qb_xs = b.symmetric_form().eval(&xsv)?;
    let a_val = ExtReal::Finite(a.symmetric_form().eval(&xv)? + qb_xs);
    let b_val = b
        .symmetric_form()
        .conjugate_eval(&xv)?
        .map(|v| v + qb_xs);
    if let (ExtReal::Finite(av), ExtReal::Finite(bv)) = (a_val, b_val) {
        if (av - bv).abs() > 1e-10 * (1.0 + av.abs()) {
            return Err(GalleryError::TruncationMismatch { a: av, b: bv });
        }
    }
    Ok((a_val, b_val))
}

/// One checkpoint of the bounded-energy sequence demonstration.
#[derive(Clone, Copy, Debug)]
pub struct EnergyRow {
    pub n: u64,
    /// `S_n = sum_{k<=n} k^(-5/3)`.
    pub partial_sum: f64,
    /// Integral tail bound `(3/2) n^(-2/3)` on `S_inf - S_n`.
    pub tail_bound: f64,
}

/// Partial sums of `sum k^(-5/3)` (the energies `<x_n, A x_n>` of the
/// truncated sequence) at logarithmic checkpoints up to `n_max`. The sums
/// are monotone and bounded, even though the limit point leaves the
/// operator's domain.
pub fn energy_sequence_demo(n_max: u64) -> Vec<EnergyRow> {
    let mut checkpoints: Vec<u64> = Vec::new();
    let mut base = 1u64;
    while base <= n_max {
        for mult in [1, 2, 5] {
            let n = base.saturating_mul(mult);
            if n <= n_max {
                checkpoints.push(n);
            }
        }
        base = base.saturating_mul(10);
    }
    if *checkpoints.last().unwrap_or(&0) != n_max {
        checkpoints.push(n_max);
    }

    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut sum = 0.0;
    let mut next = 0;
    for k in 1..=n_max {
        sum += (k as f64).powf(-5.0 / 3.0);
        if next < checkpoints.len() && checkpoints[next] == k {
            rows.push(EnergyRow {
                n: k,
                partial_sum: sum,
                tail_bound: 1.5 * (k as f64).powf(-2.0 / 3.0),
            });
            next += 1;
        }
    }
    rows
}
