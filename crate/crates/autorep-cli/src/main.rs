//! `autorep`: evaluate, compare, and verify autoconjugate representers of
//! linear monotone operators from the command line.
//!
//! Operators come from files in a shared matrix format, either JSON
//! `{"n": 2, "rows": [[0.5, -0.87], [0.87, 0.5]]}` or whitespace-separated
//! rows of numbers. Points are comma-separated coordinates `x...,xstar...`.
//! `+inf` serializes as the string `"inf"` in JSON and as an empty cell in
//! CSV.
//!
//! Exit codes: 0 success, 1 verification failure or (with `--strict`)
//! unattained minimum, 2 malformed input, 3 dimension mismatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde_json::{json, Value};

use autorep::exec::par_map;
use autorep::extreal::ExtReal;
use autorep::fitzpatrick::{fitz_bivariate, fitz_conjugate_eval, fitz_eval};
use autorep::gallery::{
    energy_sequence_demo, id_family_eval, neglog_value, GSpec, NegLogWhich,
};
use autorep::linop::{parse_matrix, LinearMonotoneOperator, LinopError, MONOTONE_TOL};
use autorep::minimize::SearchBox;
use autorep::oracle::{extract_graph, BivariateFunction, GridSpec, OracleError};
use autorep::representers::{
    a_rep_closed, a_rep_numeric_seeded, b_rep_collapsed, c_rep_bivariate, c_rep_eval,
    unified_eval, RepError, DEFAULT_BOX, SOLVER_TOL,
};
use autorep::suites;

#[derive(Parser)]
#[command(name = "autorep", version, about = "Autoconjugate representers of linear monotone operators: evaluation, sweeps, and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Fitzpatrick function at a point and report graph membership
    Fitz {
        #[command(flatten)]
        op: OpArg,
        /// Point as `x...,xstar...` (2n comma-separated values)
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Graph-membership tolerance on `F - <x,x*>` (relative)
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Evaluate one representer construction at a point
    Rep {
        /// Construction: A (Penot-Zalinescu), B (proximal average),
        /// C (Ghoussoub), or unified
        #[arg(long)]
        kind: String,
        #[command(flatten)]
        op: OpArg,
        /// Point as `x...,xstar...` (2n comma-separated values)
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Search interval per axis for the numeric modes, as `lo:hi`
        #[arg(long = "box", value_name = "LO:HI", allow_hyphen_values = true)]
        search_box: Option<String>,
        /// `closed` (default for A, C, unified) or `numeric` (default for B)
        #[arg(long)]
        mode: Option<String>,
        /// Line-search tolerance for the numeric modes
        #[arg(long, default_value_t = SOLVER_TOL)]
        tol: f64,
        /// Exit 1 if the numeric minimum was not attained inside the box
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep all four constructions over a grid and tabulate them
    Compare {
        #[command(flatten)]
        op: OpArg,
        /// Sweep range per axis, as `lo:hi`
        #[arg(long = "box", value_name = "LO:HI", default_value = "-2:2", allow_hyphen_values = true)]
        sweep_box: String,
        /// Grid nodes per axis
        #[arg(long, default_value_t = 11)]
        m: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite; exits 1 if any check fails
    Verify {
        /// One of: coincidence, autoconj, graph, neglog-domains, idfam,
        /// sum-identity, rotation, symmetry, truncation, all
        suite: String,
        /// Operator file for the autoconj and graph suites (overrides the
        /// built-in examples)
        #[arg(long)]
        op: Option<PathBuf>,
        /// Grid nodes per axis for the autoconj suite
        #[arg(long, default_value_t = 241)]
        m: usize,
        /// Seed for the randomized suites
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Worked scalar examples
    #[command(subcommand)]
    Gallery(GalleryCommand),
    /// Extract the grid nodes where a representer touches the pairing
    Graph {
        #[command(flatten)]
        op: OpArg,
        /// Sweep range per axis, as `lo:hi`
        #[arg(long = "box", value_name = "LO:HI", default_value = "-2:2", allow_hyphen_values = true)]
        sweep_box: String,
        /// Grid nodes per axis
        #[arg(long, default_value_t = 41)]
        m: usize,
        /// Band tolerance on `F - <x,x*>`; defaults to the squared grid step
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// The negative-log example: the constructions genuinely differ
    Neglog {
        /// Which function: f, fstar, fitz, fitzconj, arep, seprep
        #[arg(long)]
        which: Option<String>,
        /// Point as `x,xstar`
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Tabulate all six functions over a grid instead
        #[arg(long)]
        sweep: bool,
        #[arg(long = "box", value_name = "LO:HI", default_value = "-3:3", allow_hyphen_values = true)]
        sweep_box: String,
        #[arg(long, default_value_t = 25)]
        m: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The identity's family of distinct representers
    Idfam {
        /// Generator: energy, halfline, or power:P
        #[arg(long)]
        g: String,
        /// Point as `x,xstar`
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long)]
        sweep: bool,
        #[arg(long = "box", value_name = "LO:HI", default_value = "-2:2", allow_hyphen_values = true)]
        sweep_box: String,
        #[arg(long, default_value_t = 25)]
        m: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded-energy sequence under the diagonal truncations
    L2demo {
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OpArg {
    /// Operator matrix file (JSON `{"n":..,"rows":[[..]]}` or text rows)
    #[arg(long)]
    op: PathBuf,
}

enum CliError {
    /// Malformed input: exit 2.
    Parse(String),
    /// Dimension mismatch between operator and point/grid: exit 3.
    Dimension(String),
    /// Verification failure or strict non-attainment: exit 1.
    Failed(String),
}

impl From<LinopError> for CliError {
    fn from(e: LinopError) -> Self {
        match e {
            LinopError::DimensionMismatch { .. } => CliError::Dimension(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DimensionMismatch { .. } => CliError::Dimension(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Linop(inner) => inner.into(),
            RepError::BoxDimension { .. } => CliError::Dimension(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, msg) = match err {
                CliError::Failed(m) => (1, m),
                CliError::Parse(m) => (2, m),
                CliError::Dimension(m) => (3, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fitz { op, point, tol } => cmd_fitz(&op, &point, tol),
        Command::Rep {
            kind,
            op,
            point,
            search_box,
            mode,
            tol,
            strict,
            out,
        } => cmd_rep(&kind, &op, &point, search_box.as_deref(), mode.as_deref(), tol, strict, out),
        Command::Compare {
            op,
            sweep_box,
            m,
            format,
            out,
        } => cmd_compare(&op, &sweep_box, m, &format, out),
        Command::Verify { suite, op, m, seed } => cmd_verify(&suite, op, m, seed),
        Command::Gallery(g) => cmd_gallery(g),
        Command::Graph {
            op,
            sweep_box,
            m,
            tol,
            format,
            out,
        } => cmd_graph(&op, &sweep_box, m, tol, &format, out),
    }
}

// ---- shared parsing and emission ----

fn load_operator(arg: &OpArg) -> Result<LinearMonotoneOperator, CliError> {
    let text = fs::read_to_string(&arg.op)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", arg.op.display())))?;
    let matrix = parse_matrix(&text)?;
    let op = LinearMonotoneOperator::new(matrix)?;
    if !op.certify_monotone(MONOTONE_TOL) {
        return Err(CliError::Parse(format!(
            "operator in {} is not monotone (symmetric part has a negative eigenvalue)",
            arg.op.display()
        )));
    }
    Ok(op)
}

fn parse_csv_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Parse(format!("bad coordinate {tok:?} in --point")))
        })
        .collect()
}

/// Splits a `x...,xstar...` point of length `2n` for an operator on `R^n`.
fn split_pair(point: &[f64], n: usize) -> Result<(DVector<f64>, DVector<f64>), CliError> {
    if point.len() != 2 * n {
        return Err(CliError::Dimension(format!(
            "--point has {} coordinates, expected {} (x and x* for an operator on R^{n})",
            point.len(),
            2 * n
        )));
    }
    Ok((
        DVector::from_column_slice(&point[..n]),
        DVector::from_column_slice(&point[n..]),
    ))
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Parse(format!("bad --box {s:?}, expected lo:hi with lo < hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

fn parse_format(s: &str) -> Result<bool, CliError> {
    match s {
        "csv" => Ok(false),
        "json" => Ok(true),
        other => Err(CliError::Parse(format!(
            "bad --format {other:?}, expected csv or json"
        ))),
    }
}

fn ext_json(v: ExtReal) -> Value {
    match v {
        ExtReal::Finite(x) => json!(x),
        ExtReal::PosInf => json!("inf"),
    }
}

fn ext_csv(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => x.to_string(),
        ExtReal::PosInf => String::new(),
    }
}

fn emit(out: Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(&path, content)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Parse(format!("stdout: {e}")))
        }
    }
}

fn fitz_conj_bivariate(a: &LinearMonotoneOperator) -> BivariateFunction {
    let a = a.clone();
    BivariateFunction::new(a.dim(), "F_A_conj_T", move |x, xs| {
        fitz_conjugate_eval(
            &a,
            &DVector::from_column_slice(xs),
            &DVector::from_column_slice(x),
        )
        .expect("dimension fixed by construction")
    })
}

// ---- subcommands ----

fn cmd_fitz(op: &OpArg, point: &str, tol: f64) -> Result<(), CliError> {
    let a = load_operator(op)?;
    let coords = parse_csv_point(point)?;
    let (x, xs) = split_pair(&coords, a.dim())?;
    let value = fitz_eval(&a, &x, &xs).map_err(RepError::from)?;
    let pairing = x.dot(&xs);
    let residual = value.map(|v| v - pairing);
    let on_graph = matches!(residual, ExtReal::Finite(r) if r.abs() <= tol * (1.0 + pairing.abs()));
    let record = json!({
        "value": ext_json(value),
        "pairing": pairing,
        "residual": ext_json(residual),
        "on_graph": on_graph,
    });
    println!("{record}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_rep(
    kind: &str,
    op: &OpArg,
    point: &str,
    search_box: Option<&str>,
    mode: Option<&str>,
    tol: f64,
    strict: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let a = load_operator(op)?;
    let n = a.dim();
    let coords = parse_csv_point(point)?;
    let (x, xs) = split_pair(&coords, n)?;
    let (lo, hi) = match search_box {
        Some(s) => parse_range(s)?,
        None => DEFAULT_BOX,
    };
    let search = SearchBox::cube(lo, hi, n);

    let numeric = match (kind.to_ascii_uppercase().as_str(), mode) {
        (_, Some(m)) if m != "closed" && m != "numeric" => {
            return Err(CliError::Parse(format!(
                "bad --mode {m:?}, expected closed or numeric"
            )))
        }
        ("A" | "C" | "UNIFIED", None) => false,
        ("B", None) => true,
        (_, Some(m)) => m == "numeric",
        _ => false,
    };

    let (value, report) = match (kind.to_ascii_uppercase().as_str(), numeric) {
        ("A", false) => {
            let (v, r) = a_rep_closed(&a, &x, &xs)?;
            (v, Some(r))
        }
        ("A", true) => {
            // the conjugate factor is finite only on the graph slice
            // y* = x* - Ax; seed it so the solver can find it
            let seed: Vec<f64> = (&xs - a.apply(&x)?).iter().cloned().collect();
            let (v, r) = a_rep_numeric_seeded(
                &fitz_bivariate(&a),
                &fitz_conj_bivariate(&a),
                x.as_slice(),
                xs.as_slice(),
                &search,
                tol,
                &[seed],
            )?;
            (v, Some(r))
        }
        ("B", true) => {
            let (v, r) = b_rep_collapsed(&a, &x, &xs, &search, tol)?;
            (v, Some(r))
        }
        ("B", false) => {
            return Err(CliError::Parse(
                "the proximal average has no closed mode; use --mode numeric".into(),
            ))
        }
        ("C", _) => (c_rep_eval(&a, &x, &xs)?, None),
        ("UNIFIED", _) => (unified_eval(&a, &x, &xs)?, None),
        (other, _) => {
            return Err(CliError::Parse(format!(
                "bad --kind {other:?}, expected A, B, C, or unified"
            )))
        }
    };

    let boundary_hit = report.as_ref().is_some_and(|r| r.boundary_hit);
    let mut record = json!({
        "kind": kind,
        "value": ext_json(value),
        "attained": !boundary_hit,
    });
    if let Some(r) = report {
        record["argmin"] = json!(r.argmin);
        record["iterations"] = json!(r.iterations);
    }
    emit(out, &format!("{record}\n"))?;
    if strict && boundary_hit {
        return Err(CliError::Failed(
            "minimum not attained inside the search box".into(),
        ));
    }
    Ok(())
}

fn cmd_compare(
    op: &OpArg,
    sweep_box: &str,
    m: usize,
    format: &str,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let json_out = parse_format(format)?;
    let a = load_operator(op)?;
    let n = a.dim();
    let (lo, hi) = parse_range(sweep_box)?;
    let grid = GridSpec::cube(lo, hi, 2 * n, m)?;
    let search = SearchBox::cube(DEFAULT_BOX.0, DEFAULT_BOX.1, n);

    let indices: Vec<usize> = (0..grid.num_nodes()).collect();
    let rows = par_map(&indices, |&idx| {
        let w = grid.node(idx);
        let (xc, xsc) = w.split_at(n);
        let x = DVector::from_column_slice(xc);
        let xs = DVector::from_column_slice(xsc);
        let (a_val, _) = a_rep_closed(&a, &x, &xs).unwrap();
        let (b_val, _) = b_rep_collapsed(&a, &x, &xs, &search, SOLVER_TOL).unwrap();
        let c_val = c_rep_eval(&a, &x, &xs).unwrap();
        let u_val = unified_eval(&a, &x, &xs).unwrap();
        let vals = [a_val, b_val, c_val, u_val];
        let finite: Vec<f64> = vals.iter().filter_map(|v| v.finite()).collect();
        let maxgap = if finite.len() == vals.len() {
            let top = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let bot = finite.iter().cloned().fold(f64::INFINITY, f64::min);
            ExtReal::Finite(top - bot)
        } else if finite.is_empty() {
            ExtReal::Finite(0.0)
        } else {
            ExtReal::PosInf
        };
        (w, vals, maxgap)
    });

    let content = if json_out {
        let points: Vec<Value> = rows
            .iter()
            .map(|(w, vals, maxgap)| {
                json!({
                    "x": w[..n],
                    "xstar": w[n..],
                    "A": ext_json(vals[0]),
                    "B": ext_json(vals[1]),
                    "C": ext_json(vals[2]),
                    "unified": ext_json(vals[3]),
                    "maxgap": ext_json(*maxgap),
                })
            })
            .collect();
        format!("{}\n", json!({ "points": points }))
    } else {
        let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        header.extend((0..n).map(|i| format!("xstar{i}")));
        header.extend(["A", "B", "C", "unified", "maxgap"].map(String::from));
        let mut lines = vec![header.join(",")];
        for (w, vals, maxgap) in &rows {
            let mut fields: Vec<String> = w.iter().map(|v| v.to_string()).collect();
            fields.extend(vals.iter().map(|v| ext_csv(*v)));
            fields.push(ext_csv(*maxgap));
            lines.push(fields.join(","));
        }
        lines.join("\n") + "\n"
    };
    emit(out, &content)
}

fn cmd_verify(suite: &str, op: Option<PathBuf>, m: usize, seed: u64) -> Result<(), CliError> {
    let custom_ops = |op: &Option<PathBuf>| -> Result<Option<Vec<(String, LinearMonotoneOperator)>>, CliError> {
        match op {
            Some(path) => {
                let loaded = load_operator(&OpArg { op: path.clone() })?;
                Ok(Some(vec![("custom".to_string(), loaded)]))
            }
            None => Ok(None),
        }
    };

    let reports = match suite {
        "coincidence" => vec![suites::coincidence_suite(seed, 20, 50)],
        "autoconj" => {
            let ops = custom_ops(&op)?.unwrap_or_else(suites::default_autoconj_ops);
            vec![suites::autoconjugacy_suite(&ops, -3.0, 3.0, m, seed)]
        }
        "graph" => {
            let ops = custom_ops(&op)?.unwrap_or_else(suites::default_graph_ops);
            vec![suites::graph_suite(&ops, -2.0, 2.0)]
        }
        "neglog-domains" => vec![suites::neglog_suite()],
        "idfam" => vec![suites::id_family_suite()],
        "sum-identity" => vec![suites::sum_identity_suite(seed)],
        "rotation" => vec![suites::rotation_suite()],
        "symmetry" => vec![suites::symmetry_suite(seed)],
        "truncation" => vec![suites::truncation_suite(seed)],
        "all" => vec![
            suites::coincidence_suite(seed, 20, 50),
            suites::rotation_suite(),
            suites::autoconjugacy_suite(&suites::default_autoconj_ops(), -3.0, 3.0, m, seed),
            suites::graph_suite(&suites::default_graph_ops(), -2.0, 2.0),
            suites::neglog_suite(),
            suites::id_family_suite(),
            suites::sum_identity_suite(seed),
            suites::symmetry_suite(seed),
            suites::truncation_suite(seed),
        ],
        other => {
            return Err(CliError::Parse(format!(
                "unknown suite {other:?}; expected coincidence, autoconj, graph, \
                 neglog-domains, idfam, sum-identity, rotation, symmetry, truncation, or all"
            )))
        }
    };

    let mut failures = 0usize;
    for report in &reports {
        for line in report.lines() {
            println!("{line}");
        }
        failures += report.checks.iter().filter(|c| !c.pass).count();
    }
    if failures > 0 {
        Err(CliError::Failed(format!("{failures} check(s) failed")))
    } else {
        Ok(())
    }
}

fn cmd_gallery(cmd: GalleryCommand) -> Result<(), CliError> {
    match cmd {
        GalleryCommand::Neglog {
            which,
            point,
            sweep,
            sweep_box,
            m,
            format,
            out,
        } => {
            if sweep {
                return neglog_sweep(&sweep_box, m, &format, out);
            }
            let which = parse_neglog_which(which.as_deref().ok_or_else(|| {
                CliError::Parse("need --which together with --point, or --sweep".into())
            })?)?;
            let coords = parse_csv_point(&point.ok_or_else(|| {
                CliError::Parse("need --point x,xstar (or --sweep)".into())
            })?)?;
            if coords.len() != 2 {
                return Err(CliError::Dimension(format!(
                    "--point has {} coordinates, expected 2",
                    coords.len()
                )));
            }
            let value = neglog_value(which, coords[0], coords[1]);
            let record = json!({
                "which": format!("{which:?}"),
                "x": coords[0],
                "xstar": coords[1],
                "value": ext_json(value),
            });
            emit(out, &format!("{record}\n"))
        }
        GalleryCommand::Idfam {
            g,
            point,
            sweep,
            sweep_box,
            m,
            format,
            out,
        } => {
            let g = parse_gspec(&g)?;
            if sweep {
                return idfam_sweep(g, &sweep_box, m, &format, out);
            }
            let coords = parse_csv_point(&point.ok_or_else(|| {
                CliError::Parse("need --point x,xstar (or --sweep)".into())
            })?)?;
            if coords.len() != 2 {
                return Err(CliError::Dimension(format!(
                    "--point has {} coordinates, expected 2",
                    coords.len()
                )));
            }
            let value = id_family_eval(g, coords[0], coords[1]);
            let record = json!({
                "g": format!("{g:?}"),
                "x": coords[0],
                "xstar": coords[1],
                "value": ext_json(value),
            });
            emit(out, &format!("{record}\n"))
        }
        GalleryCommand::L2demo { n, format, out } => {
            let json_out = parse_format(&format)?;
            if n == 0 {
                return Err(CliError::Parse("--n must be positive".into()));
            }
            let rows = energy_sequence_demo(n);
            let content = if json_out {
                let items: Vec<Value> = rows
                    .iter()
                    .map(|r| json!({"n": r.n, "partial_sum": r.partial_sum, "tail_bound": r.tail_bound}))
                    .collect();
                format!("{}\n", json!({ "rows": items }))
            } else {
                let mut lines = vec!["n,partial_sum,tail_bound".to_string()];
                lines.extend(
                    rows.iter()
                        .map(|r| format!("{},{},{}", r.n, r.partial_sum, r.tail_bound)),
                );
                lines.join("\n") + "\n"
            };
            emit(out, &content)
        }
    }
}

fn parse_neglog_which(s: &str) -> Result<NegLogWhich, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "f" => Ok(NegLogWhich::F),
        "fstar" => Ok(NegLogWhich::FStar),
        "fitz" => Ok(NegLogWhich::Fitz),
        "fitzconj" => Ok(NegLogWhich::FitzConj),
        "arep" => Ok(NegLogWhich::Arep),
        "seprep" => Ok(NegLogWhich::SepRep),
        other => Err(CliError::Parse(format!(
            "bad --which {other:?}; expected f, fstar, fitz, fitzconj, arep, or seprep"
        ))),
    }
}

fn parse_gspec(s: &str) -> Result<GSpec, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "energy" => Ok(GSpec::Energy),
        "halfline" => Ok(GSpec::IndicatorHalfLine),
        other => {
            if let Some(p) = other.strip_prefix("power:") {
                let p: f64 = p
                    .parse()
                    .map_err(|_| CliError::Parse(format!("bad exponent in --g {s:?}")))?;
                GSpec::power_pair(p).map_err(|e| CliError::Parse(e.to_string()))
            } else {
                Err(CliError::Parse(format!(
                    "bad --g {s:?}; expected energy, halfline, or power:P"
                )))
            }
        }
    }
}

fn neglog_sweep(sweep_box: &str, m: usize, format: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let json_out = parse_format(format)?;
    let (lo, hi) = parse_range(sweep_box)?;
    let grid = GridSpec::cube(lo, hi, 2, m)?;
    let which = [
        NegLogWhich::F,
        NegLogWhich::FStar,
        NegLogWhich::Fitz,
        NegLogWhich::FitzConj,
        NegLogWhich::Arep,
        NegLogWhich::SepRep,
    ];
    let mut records = Vec::with_capacity(grid.num_nodes());
    for idx in 0..grid.num_nodes() {
        let w = grid.node(idx);
        let vals: Vec<ExtReal> = which.iter().map(|&k| neglog_value(k, w[0], w[1])).collect();
        records.push((w, vals));
    }
    let content = if json_out {
        let items: Vec<Value> = records
            .iter()
            .map(|(w, vals)| {
                json!({
                    "x": w[0], "xstar": w[1],
                    "f": ext_json(vals[0]), "fstar": ext_json(vals[1]),
                    "fitz": ext_json(vals[2]), "fitzconj": ext_json(vals[3]),
                    "arep": ext_json(vals[4]), "seprep": ext_json(vals[5]),
                })
            })
            .collect();
        format!("{}\n", json!({ "points": items }))
    } else {
        let mut lines = vec!["x,xstar,f,fstar,fitz,fitzconj,arep,seprep".to_string()];
        for (w, vals) in &records {
            let mut fields = vec![w[0].to_string(), w[1].to_string()];
            fields.extend(vals.iter().map(|v| ext_csv(*v)));
            lines.push(fields.join(","));
        }
        lines.join("\n") + "\n"
    };
    emit(out, &content)
}

fn idfam_sweep(g: GSpec, sweep_box: &str, m: usize, format: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let json_out = parse_format(format)?;
    let (lo, hi) = parse_range(sweep_box)?;
    let grid = GridSpec::cube(lo, hi, 2, m)?;
    let mut records = Vec::with_capacity(grid.num_nodes());
    for idx in 0..grid.num_nodes() {
        let w = grid.node(idx);
        records.push((w.clone(), id_family_eval(g, w[0], w[1])));
    }
    let content = if json_out {
        let items: Vec<Value> = records
            .iter()
            .map(|(w, v)| json!({"x": w[0], "xstar": w[1], "value": ext_json(*v)}))
            .collect();
        format!("{}\n", json!({ "g": format!("{g:?}"), "points": items }))
    } else {
        let mut lines = vec!["x,xstar,value".to_string()];
        for (w, v) in &records {
            lines.push(format!("{},{},{}", w[0], w[1], ext_csv(*v)));
        }
        lines.join("\n") + "\n"
    };
    emit(out, &content)
}

fn cmd_graph(
    op: &OpArg,
    sweep_box: &str,
    m: usize,
    tol: Option<f64>,
    format: &str,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let json_out = parse_format(format)?;
    let a = load_operator(op)?;
    let n = a.dim();
    let (lo, hi) = parse_range(sweep_box)?;
    let grid = GridSpec::cube(lo, hi, 2 * n, m)?;
    let tol = tol.unwrap_or_else(|| grid.max_step() * grid.max_step());
    let sample = extract_graph(&c_rep_bivariate(&a), &grid, tol)?;
    let content = if json_out {
        let pairs: Vec<Value> = sample
            .pairs
            .iter()
            .map(|(x, xs, r)| json!({"x": x, "xstar": xs, "residual": r}))
            .collect();
        format!("{}\n", json!({"tol": tol, "pairs": pairs}))
    } else {
        let mut buf = Vec::new();
        sample
            .write_csv(&mut buf)
            .map_err(|e| CliError::Parse(format!("csv: {e}")))?;
        String::from_utf8(buf).expect("csv output is ascii")
    };
    emit(out, &content)
}
