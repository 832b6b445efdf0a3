//! Brute-force conjugation oracles.
//!
//! Everything here is deliberately independent of the closed forms in the
//! rest of the crate: conjugates are computed as maxima over grid nodes,
//! graphs are extracted by scanning for equality with the pairing, and
//! monotonicity is audited pairwise. The oracle exists to verify formulas
//! at desk scale (joint dimension <= 4), not to be fast; grid sweeps are
//! data-parallel and run on rayon when the `parallel` feature is enabled.

use std::io::Write;
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::extreal::ExtReal;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid axis {axis}: lower {lower} must be strictly below upper {upper}")]
    BadBox { axis: usize, lower: f64, upper: f64 },
    #[error("points_per_axis must be at least 3, got {0}")]
    TooFewPoints(usize),
    #[error("grid dimension {grid} does not match query dimension {query}")]
    DimensionMismatch { grid: usize, query: usize },
    #[error("function is +inf on every grid node; conjugate undefined on this box")]
    Improper,
    #[error("empty test set")]
    EmptyTestSet,
    #[error("empty sample")]
    EmptySample,
}

/// Axis-aligned box with a uniform number of nodes per axis.
#[derive(Clone, Debug)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, points_per_axis: usize) -> Result<Self, OracleError> {
        if points_per_axis < 3 {
            return Err(OracleError::TooFewPoints(points_per_axis));
        }
        if lower.len() != upper.len() {
            return Err(OracleError::DimensionMismatch {
                grid: lower.len(),
                query: upper.len(),
            });
        }
        for (axis, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo >= hi || lo.is_nan() || hi.is_nan() {
                return Err(OracleError::BadBox { axis, lower: lo, upper: hi });
            }
        }
        Ok(GridSpec { lower, upper, points_per_axis })
    }

    /// Cube `[lo, hi]^dim` with `m` nodes per axis.
    pub fn cube(lo: f64, hi: f64, dim: usize, m: usize) -> Result<Self, OracleError> {
        GridSpec::new(vec![lo; dim], vec![hi; dim], m)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.points_per_axis - 1) as f64
    }

    /// Largest per-axis step.
    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(0.0, f64::max)
    }

    pub fn num_nodes(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    /// Decodes a linear index into the node coordinates.
    pub fn node(&self, mut index: usize) -> Vec<f64> {
        let mut point = vec![0.0; self.dim()];
        for (axis, coord) in point.iter_mut().enumerate() {
            let i = index % self.points_per_axis;
            index /= self.points_per_axis;
            *coord = self.lower[axis] + self.step(axis) * i as f64;
        }
        point
    }

    /// True when `p` is at least `margin` away from every box face.
    pub fn is_interior(&self, p: &[f64], margin: f64) -> bool {
        p.iter().enumerate().all(|(a, &v)| {
            v >= self.lower[a] + margin && v <= self.upper[a] - margin
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn conj_at_node<F>(f: &F, grid: &GridSpec, query: &[f64], idx: usize) -> Option<f64>
where
    F: Fn(&[f64]) -> ExtReal + Sync + ?Sized,
{
    let w = grid.node(idx);
    match f(&w) {
        ExtReal::Finite(v) => Some(dot(&w, query) - v),
        ExtReal::PosInf => None, // +inf nodes never attain the sup
    }
}

/// Sequential grid Legendre transform: `max_w <w, query> - f(w)` over the
/// grid nodes. A lower bound on the true conjugate.
pub fn grid_conjugate_seq<F>(f: &F, grid: &GridSpec, query: &[f64]) -> Result<ExtReal, OracleError>
where
    F: Fn(&[f64]) -> ExtReal + Sync + ?Sized,
{
    if query.len() != grid.dim() {
        return Err(OracleError::DimensionMismatch {
            grid: grid.dim(),
            query: query.len(),
        });
    }
    let best = (0..grid.num_nodes())
        .filter_map(|idx| conj_at_node(f, grid, query, idx))
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(OracleError::Improper);
    }
    Ok(ExtReal::Finite(best))
}

/// Grid Legendre transform that also reports the attaining node, for
/// callers that need to reject boundary-attained (untrustworthy) suprema.
pub fn grid_conjugate_argmax<F>(
    f: &F,
    grid: &GridSpec,
    query: &[f64],
) -> Result<(f64, Vec<f64>), OracleError>
where
    F: Fn(&[f64]) -> ExtReal + Sync + ?Sized,
{
    if query.len() != grid.dim() {
        return Err(OracleError::DimensionMismatch {
            grid: grid.dim(),
            query: query.len(),
        });
    }
    let mut best: Option<(f64, usize)> = None;
    for idx in 0..grid.num_nodes() {
        if let Some(v) = conj_at_node(f, grid, query, idx) {
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, idx));
            }
        }
    }
    match best {
        Some((v, idx)) => Ok((v, grid.node(idx))),
        None => Err(OracleError::Improper),
    }
}

/// Grid Legendre transform; parallel over nodes when the `parallel`
/// feature is on, otherwise identical to [`grid_conjugate_seq`].
pub fn grid_conjugate<F>(f: &F, grid: &GridSpec, query: &[f64]) -> Result<ExtReal, OracleError>
where
    F: Fn(&[f64]) -> ExtReal + Sync + ?Sized,
{
    #[cfg(feature = "parallel")]
    {
        if query.len() != grid.dim() {
            return Err(OracleError::DimensionMismatch {
                grid: grid.dim(),
                query: query.len(),
            });
        }
        let best = (0..grid.num_nodes())
            .into_par_iter()
            .filter_map(|idx| conj_at_node(f, grid, query, idx))
            .reduce(|| f64::NEG_INFINITY, f64::max);
        if best == f64::NEG_INFINITY {
            return Err(OracleError::Improper);
        }
        Ok(ExtReal::Finite(best))
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid_conjugate_seq(f, grid, query)
    }
}

type Evaluator = Arc<dyn Fn(&[f64], &[f64]) -> ExtReal + Send + Sync>;

/// Evaluatable bivariate function `F(x, x*)` on `R^n x R^n` with extended
/// real values; never `-inf`.
#[derive(Clone)]
pub struct BivariateFunction {
    dim: usize,
    label: String,
    evaluator: Evaluator,
}

impl BivariateFunction {
    pub fn new<F>(dim: usize, label: impl Into<String>, evaluator: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> ExtReal + Send + Sync + 'static,
    {
        BivariateFunction {
            dim,
            label: label.into(),
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &[f64], xstar: &[f64]) -> ExtReal {
        (self.evaluator)(x, xstar)
    }

    /// Evaluates on the joint `2n`-vector `(x, x*)`.
    pub fn eval_joint(&self, w: &[f64]) -> ExtReal {
        let (x, xstar) = w.split_at(self.dim);
        self.eval(x, xstar)
    }

    /// The transpose view `F^T(x*, x) = F(x, x*)`.
    pub fn transpose(&self) -> BivariateFunction {
        let inner = self.evaluator.clone();
        BivariateFunction {
            dim: self.dim,
            label: format!("{}^T", self.label),
            evaluator: Arc::new(move |xstar, x| inner(x, xstar)),
        }
    }

    /// Verifies properness against a probe grid: at least one joint node
    /// must be finite.
    pub fn check_proper(&self, probe: &GridSpec) -> Result<(), OracleError> {
        if probe.dim() != 2 * self.dim {
            return Err(OracleError::DimensionMismatch {
                grid: probe.dim(),
                query: 2 * self.dim,
            });
        }
        if (0..probe.num_nodes()).any(|i| self.eval_joint(&probe.node(i)).is_finite()) {
            Ok(())
        } else {
            Err(OracleError::Improper)
        }
    }
}

/// Grid nodes where a bivariate function touches the pairing.
#[derive(Clone, Debug)]
pub struct GraphSample {
    pub pairs: Vec<(Vec<f64>, Vec<f64>, f64)>,
    pub tol: f64,
}

impl GraphSample {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// CSV export with header `x0,..,xstar0,..,residual`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.pairs.first().map_or(0, |(x, _, _)| x.len());
        let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        header.extend((0..n).map(|i| format!("xstar{i}")));
        header.push("residual".to_string());
        writeln!(out, "{}", header.join(","))?;
        for (x, xstar, res) in &self.pairs {
            let mut fields: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            fields.extend(xstar.iter().map(|v| v.to_string()));
            fields.push(res.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// All joint grid nodes `(x, x*)` with `|F(x,x*) - <x,x*>| <= tol`.
/// The stored residual is `F - <x,x*>` (nonnegative up to `-tol` by
/// Fenchel-Young when `F` majorizes the pairing).
pub fn extract_graph(f: &BivariateFunction, grid: &GridSpec, tol: f64) -> Result<GraphSample, OracleError> {
    if grid.dim() != 2 * f.dim() {
        return Err(OracleError::DimensionMismatch {
            grid: grid.dim(),
            query: 2 * f.dim(),
        });
    }
    let scan = |idx: usize| -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let w = grid.node(idx);
        let (x, xstar) = w.split_at(f.dim());
        let pairing = dot(x, xstar);
        match f.eval(x, xstar) {
            ExtReal::Finite(v) if (v - pairing).abs() <= tol => {
                Some((x.to_vec(), xstar.to_vec(), v - pairing))
            }
            _ => None,
        }
    };
    #[cfg(feature = "parallel")]
    let pairs: Vec<_> = (0..grid.num_nodes()).into_par_iter().filter_map(scan).collect();
    #[cfg(not(feature = "parallel"))]
    let pairs: Vec<_> = (0..grid.num_nodes()).filter_map(scan).collect();
    Ok(GraphSample { pairs, tol })
}

/// Result of [`autoconjugacy_residual`].
#[derive(Debug)]
pub struct AutoconjReport {
    /// Max of `|F*(x*,x) - F(x,x*)|` over points where both sides are finite.
    pub max_residual: f64,
    /// Points where `F` is `+inf` but the grid conjugate (necessarily
    /// finite) exceeded the pairing-scale tolerance; reported separately
    /// because the grid sup is only a lower bound there.
    pub infinite_mismatches: Vec<(Vec<f64>, Vec<f64>, f64)>,
    pub points_checked: usize,
}

/// Compares the grid conjugate of `F` (evaluated at the swapped point)
/// against `F` itself at each test point. For an autoconjugate `F` the
/// finite-side residual is bounded by the grid error.
pub fn autoconjugacy_residual(
    f: &BivariateFunction,
    grid: &GridSpec,
    test_points: &[(Vec<f64>, Vec<f64>)],
    inf_tol: f64,
) -> Result<AutoconjReport, OracleError> {
    if test_points.is_empty() {
        return Err(OracleError::EmptyTestSet);
    }
    let joint = |w: &[f64]| f.eval_joint(w);
    let mut max_residual: f64 = 0.0;
    let mut infinite_mismatches = Vec::new();
    for (x, xstar) in test_points {
        // query (x*, x): <(y,y*), (x*,x)> = <y,x*> + <y*,x>
        let mut query = xstar.clone();
        query.extend_from_slice(x);
        let conj = grid_conjugate(&joint, grid, &query)?;
        match (f.eval(x, xstar), conj) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                max_residual = max_residual.max((a - b).abs());
            }
            (ExtReal::PosInf, ExtReal::Finite(b)) if b > dot(x, xstar) + inf_tol => {
                infinite_mismatches.push((x.clone(), xstar.clone(), b));
            }
            _ => {}
        }
    }
    Ok(AutoconjReport {
        max_residual,
        infinite_mismatches,
        points_checked: test_points.len(),
    })
}

/// An `(x, x*)` pair from a graph sample.
pub type GraphNode = (Vec<f64>, Vec<f64>);

/// Outcome of a pairwise monotonicity audit.
#[derive(Debug)]
pub struct MonotoneAudit {
    pub monotone: bool,
    /// Most negative `<x - y, x* - y*>` over all pairs.
    pub worst_inner: f64,
    pub worst_pair: Option<(GraphNode, GraphNode)>,
}

/// Checks `<x - y, x* - y*> >= -tol_pair` for every pair in the sample.
pub fn audit_monotone(sample: &GraphSample, tol_pair: f64) -> MonotoneAudit {
    let mut worst = f64::INFINITY;
    let mut worst_pair = None;
    for (i, (x, xs, _)) in sample.pairs.iter().enumerate() {
        for (y, ys, _) in sample.pairs.iter().skip(i + 1) {
            let dx: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let ds: Vec<f64> = xs.iter().zip(ys).map(|(a, b)| a - b).collect();
            let inner = dot(&dx, &ds);
            if inner < worst {
                worst = inner;
                worst_pair = Some(((x.clone(), xs.clone()), (y.clone(), ys.clone())));
            }
        }
    }
    if worst == f64::INFINITY {
        worst = 0.0;
    }
    MonotoneAudit {
        monotone: worst >= -tol_pair,
        worst_inner: worst,
        worst_pair,
    }
}

/// True iff `F(x,x*) >= <x,x*> - tol` at every test point.
pub fn fenchel_young_check(
    f: &BivariateFunction,
    test_points: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> bool {
    test_points.iter().all(|(x, xstar)| match f.eval(x, xstar) {
        ExtReal::PosInf => true,
        ExtReal::Finite(v) => v >= dot(x, xstar) - tol,
    })
}

/// Grid-error tolerance for a smooth function: `C * h` with
/// `C = 10 * (max sampled gradient norm)` estimated by central finite
/// differences over the grid interior.
pub fn grid_error_bound<F>(f: &F, grid: &GridSpec) -> f64
where
    F: Fn(&[f64]) -> ExtReal + Sync + ?Sized,
{
    let h = grid.max_step();
    let mut max_grad: f64 = 0.0;
    for idx in 0..grid.num_nodes() {
        let p = grid.node(idx);
        if !grid.is_interior(&p, 0.5 * h) {
            continue;
        }
        let mut grad_sq = 0.0;
        let mut ok = true;
        for axis in 0..grid.dim() {
            let mut lo = p.clone();
            let mut hi = p.clone();
            lo[axis] -= grid.step(axis);
            hi[axis] += grid.step(axis);
            match (f(&lo), f(&hi)) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                    grad_sq += ((b - a) / (2.0 * grid.step(axis))).powi(2);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            max_grad = max_grad.max(grad_sq.sqrt());
        }
    }
    10.0 * max_grad.max(1.0) * h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn energy_joint(w: &[f64]) -> ExtReal {
        ExtReal::Finite(0.5 * w.iter().map(|v| v * v).sum::<f64>())
    }

    #[test]
    fn conjugate_of_energy_at_origin() {
        let grid = GridSpec::cube(-2.0, 2.0, 2, 41).unwrap();
        let v = grid_conjugate(&energy_joint, &grid, &[0.0, 0.0]).unwrap();
        assert_eq!(v, ExtReal::Finite(0.0));
    }

    #[test]
    fn conjugate_of_origin_indicator_is_zero() {
        let f = |w: &[f64]| {
            if w.iter().all(|v| v.abs() < 1e-12) {
                ExtReal::Finite(0.0)
            } else {
                ExtReal::PosInf
            }
        };
        // odd m so the origin is a node
        let grid = GridSpec::cube(-1.0, 1.0, 2, 41).unwrap();
        for q in [[0.0, 0.0], [3.0, -7.0], [100.0, 0.5]] {
            assert_eq!(grid_conjugate(&f, &grid, &q).unwrap(), ExtReal::Finite(0.0));
        }
    }

    #[test]
    fn energy_is_autoconjugate_at_a_point() {
        // F(x,y) = x^2/2 + y^2/2 is C_Id in 1-D; F*(1,1) = F(1,1) = 1
        let grid = GridSpec::cube(-3.0, 3.0, 2, 241).unwrap();
        let v = grid_conjugate(&energy_joint, &grid, &[1.0, 1.0])
            .unwrap()
            .unwrap_finite();
        assert!((v - 1.0).abs() < 0.01, "got {v}");
    }

    #[test]
    fn improper_restriction_errors() {
        let f = |_: &[f64]| ExtReal::PosInf;
        let grid = GridSpec::cube(-1.0, 1.0, 1, 11).unwrap();
        assert!(matches!(
            grid_conjugate(&f, &grid, &[0.0]),
            Err(OracleError::Improper)
        ));
    }

    #[test]
    fn seq_and_parallel_agree() {
        let grid = GridSpec::cube(-2.0, 2.0, 2, 31).unwrap();
        for q in [[0.3, -1.2], [1.0, 1.0], [-2.0, 0.7]] {
            assert_eq!(
                grid_conjugate(&energy_joint, &grid, &q).unwrap(),
                grid_conjugate_seq(&energy_joint, &grid, &q).unwrap()
            );
        }
    }

    #[test]
    fn extract_graph_of_energy_clusters_on_diagonal() {
        let f = BivariateFunction::new(1, "C_Id", |x, xs| {
            ExtReal::Finite(0.5 * x[0] * x[0] + 0.5 * xs[0] * xs[0])
        });
        let grid = GridSpec::cube(-2.0, 2.0, 2, 81).unwrap();
        let h = grid.step(0);
        let sample = extract_graph(&f, &grid, h * h).unwrap();
        assert!(!sample.is_empty());
        for (x, xs, _) in &sample.pairs {
            assert!((x[0] - xs[0]).abs() <= 2.0 * h + 1e-12);
        }
        // a band of half-width 2h around a monotone graph is monotone up
        // to pairwise slack 4h^2
        assert!(audit_monotone(&sample, 4.0 * h * h + 1e-9).monotone);
    }

    #[test]
    fn extract_graph_of_antisymmetric_indicator() {
        // A = [[0,-1],[1,0]]; indicator of the graph
        let f = BivariateFunction::new(2, "iota_graA", |x, xs| {
            let ax = [-x[1], x[0]];
            if (xs[0] - ax[0]).abs() < 1e-9 && (xs[1] - ax[1]).abs() < 1e-9 {
                ExtReal::Finite(0.0)
            } else {
                ExtReal::PosInf
            }
        });
        let grid = GridSpec::cube(-1.0, 1.0, 4, 5).unwrap();
        let sample = extract_graph(&f, &grid, 1e-6).unwrap();
        assert!(!sample.is_empty());
        for (x, xs, _) in &sample.pairs {
            assert!((xs[0] + x[1]).abs() < 1e-9 && (xs[1] - x[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn audit_monotone_examples() {
        let diagonal = GraphSample {
            pairs: (-5..=5)
                .map(|i| {
                    let t = i as f64 * 0.3;
                    (vec![t], vec![t], 0.0)
                })
                .collect(),
            tol: 0.0,
        };
        assert!(audit_monotone(&diagonal, 1e-12).monotone);

        let bad = GraphSample {
            pairs: vec![(vec![0.0], vec![1.0], 0.0), (vec![1.0], vec![0.0], 0.0)],
            tol: 0.0,
        };
        let audit = audit_monotone(&bad, 1e-12);
        assert!(!audit.monotone);
        assert!((audit.worst_inner + 1.0).abs() < 1e-15);

        let neglog = GraphSample {
            pairs: vec![(vec![1.0], vec![-1.0], 0.0), (vec![2.0], vec![-0.5], 0.0)],
            tol: 0.0,
        };
        let audit = audit_monotone(&neglog, 1e-12);
        assert!(audit.monotone);
        assert!((audit.worst_inner - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fenchel_young_examples() {
        let c_id = BivariateFunction::new(1, "C_Id", |x, xs| {
            ExtReal::Finite(0.5 * x[0] * x[0] + 0.5 * xs[0] * xs[0])
        });
        assert!(fenchel_young_check(&c_id, &[(vec![1.0], vec![-1.0])], 1e-12));
    }

    #[test]
    fn refinement_never_decreases_conjugate() {
        let grid_coarse = GridSpec::cube(-2.0, 2.0, 2, 11).unwrap();
        let grid_fine = GridSpec::cube(-2.0, 2.0, 2, 21).unwrap(); // superset of nodes
        for q in [[0.7, 0.7], [1.5, -0.5]] {
            let coarse = grid_conjugate(&energy_joint, &grid_coarse, &q)
                .unwrap()
                .unwrap_finite();
            let fine = grid_conjugate(&energy_joint, &grid_fine, &q)
                .unwrap()
                .unwrap_finite();
            assert!(fine >= coarse - 1e-15);
        }
    }

    #[test]
    fn csv_export_round_trips_header() {
        let sample = GraphSample {
            pairs: vec![(vec![1.0], vec![2.0], 0.5)],
            tol: 1.0,
        };
        let mut buf = Vec::new();
        sample.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x0,xstar0,residual\n"));
        assert!(text.contains("1,2,0.5"));
    }
}
