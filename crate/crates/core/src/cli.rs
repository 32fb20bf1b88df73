//! Command-line front end.
//!
//! Exit codes: `0` success, `1` usage or numerical failure, `2` a
//! verification check failed. JSON output is deterministic: keys are sorted
//! and every float is printed with 17 significant digits.

use crate::asymptotics::{g, g_interval, qes_table, surjectivity_scan, table};
use crate::error::{Error, Result};
use crate::polynomial::{parse_potential, EvenPolynomial};
use crate::qes::{classify, cross_check_report, lift_zeros, qes_solve, QesSpec};
use crate::spectrum::{eigenvalue, eigenvalues_with, SolverConfig};
use crate::trees::{
    check_proposition1, count_filtered, enumerate_double_symmetric, enumerate_rooted_symmetric,
    validate_line_complex, EmbeddedTree, LineComplex,
};
use crate::zeros::{census, verify_axis_confinement, CensusBox, CensusConfig};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "ANHARMONIC_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "anharmonic", version, about = "Zeros and asymptotics of anharmonic oscillator eigenfunctions")]
pub struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues λ_0..λ_K with certified real-zero counts.
    Spectrum {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long = "K", default_value_t = 5)]
        max_k: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Matching radius override.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Zero census of the k-th eigenfunction in a box.
    Zeros {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long)]
        k: usize,
        /// Half-widths `XxY` of the box centred at the origin.
        #[arg(long = "box", default_value = "3x3", value_parser = parse_box)]
        census_box: CensusBox,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Closed-form eigenpairs of a quasi-exactly solvable sextic.
    Qes {
        #[arg(long, value_parser = parse_qes)]
        qes: QesSpec,
    },
    /// Asymptotic values of y/y₁ in every Stokes sector.
    Asymptotic {
        #[command(flatten)]
        source: SourceArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// CSV samples of Arg a_1 over a grid of b.
    Gscan {
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        b_min: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        b_max: f64,
        #[arg(long, default_value_t = 0.5)]
        b_step: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Symmetric planar trees.
    Trees {
        #[command(subcommand)]
        command: TreesCommand,
    },
    /// Run a verification suite and emit a structured report.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
}

#[derive(Subcommand, Debug)]
pub enum TreesCommand {
    /// Catalogue of double-symmetric trees.
    Enumerate {
        #[arg(long)]
        ends: usize,
        /// Place ends on the coordinate axes.
        #[arg(long)]
        axes: bool,
    },
    /// Validate a JSON tree or line complex.
    Validate {
        file: PathBuf,
        /// Also check the structure required for degree `d`.
        #[arg(long)]
        d: Option<usize>,
        /// Require alternating zero labels.
        #[arg(long)]
        alternating: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifySuite {
    /// Zeros of quartic eigenfunctions lie on the axes.
    Theorem1 {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long = "K", default_value_t = 3)]
        max_k: usize,
        #[arg(long = "box", default_value = "3x3", value_parser = parse_box)]
        census_box: CensusBox,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Zeros of QES sextic eigenfunctions lie on the axes.
    Theorem2 {
        #[arg(long, value_parser = parse_qes)]
        qes: QesSpec,
        #[arg(long = "box", value_parser = parse_box)]
        census_box: Option<CensusBox>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// QES against shooting and the argument intervals of a_1.
    Corollary {
        #[arg(long, default_value_t = 3)]
        m_max: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Exact tree counts.
    Trees,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct PotentialArg {
    /// Potential shorthand such as `z^4+z^2`.
    #[arg(long, value_parser = parse_potential_arg)]
    pub potential: Option<EvenPolynomial>,
    /// Comma-separated even coefficients c0,c2,c4,...
    #[arg(long, value_parser = parse_coeffs)]
    pub coeffs: Option<EvenPolynomial>,
}

impl PotentialArg {
    fn get(&self) -> EvenPolynomial {
        self.potential
            .clone()
            .or_else(|| self.coeffs.clone())
            .expect("clap enforces one potential source")
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArg {
    #[arg(long, value_parser = parse_potential_arg)]
    pub potential: Option<EvenPolynomial>,
    #[arg(long, value_parser = parse_coeffs)]
    pub coeffs: Option<EvenPolynomial>,
    #[arg(long, value_parser = parse_qes)]
    pub qes: Option<QesSpec>,
}

fn parse_potential_arg(s: &str) -> std::result::Result<EvenPolynomial, String> {
    parse_potential(s).map_err(|e| e.to_string())
}

fn parse_coeffs(s: &str) -> std::result::Result<EvenPolynomial, String> {
    let c = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    EvenPolynomial::new(c).map_err(|e| e.to_string())
}

fn parse_qes(s: &str) -> std::result::Result<QesSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_box(s: &str) -> std::result::Result<CensusBox, String> {
    let (x, y) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("box must look like 3x3, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    CensusBox::new(x, y).map_err(|e| e.to_string())
}

/// Serialize with sorted keys and 17 significant digits per float.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => {
                let _ = write!(out, "{i}");
            }
            (_, Some(u), _) => {
                let _ = write!(out, "{u}");
            }
            (_, _, Some(f)) => {
                let _ = write!(out, "{f:.16e}");
            }
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            let flat = items.iter().all(|x| !x.is_array() && !x.is_object());
            if flat {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_value(out, x, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// One sub-check of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Value) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
            error: None,
        }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Check {
            name: name.into(),
            passed: false,
            detail: Value::Null,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        VerifyReport {
            suite: suite.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// `0` if all checks pass, `1` if any check hit a module error, else `2`.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else if self.checks.iter().any(|c| c.error.is_some()) {
            EXIT_ERROR
        } else {
            EXIT_FAILED
        }
    }
}

/// Artifact and exit code of one command.
pub struct Outcome {
    pub artifact: String,
    pub code: i32,
}

impl Outcome {
    fn ok(artifact: String) -> Self {
        Outcome { artifact, code: EXIT_OK }
    }
}

pub fn verify_theorem1(p: &EvenPolynomial, max_k: usize, census_box: CensusBox, tol: f64) -> Result<VerifyReport> {
    if p.degree() != 4 {
        return Err(Error::InvalidDegree(p.degree() as i64));
    }
    let pairs = eigenvalues_with(p, max_k, &SolverConfig::with_tol(1e-10))?;
    let cfg = CensusConfig::with_tol(tol);
    let checks = pairs
        .iter()
        .map(|ep| {
            let name = format!("k={}", ep.k);
            match census(p, ep.lambda, ep.parity, census_box, &cfg) {
                Ok(mut c) => {
                    c.k = Some(ep.k);
                    let passed = verify_axis_confinement(&c)
                        && c.is_consistent()
                        && c.real_zeros.len() == ep.k;
                    Check::new(
                        name,
                        passed,
                        json!({
                            "lambda": ep.lambda,
                            "real_zeros": c.real_zeros,
                            "imaginary_zeros": c.imaginary_zeros,
                            "quadrant_counts": c.quadrant_counts,
                            "total_count": c.total_count,
                        }),
                    )
                }
                Err(e) => Check::failed(name, &e),
            }
        })
        .collect();
    Ok(VerifyReport::new("theorem1", checks))
}

pub fn verify_theorem2(spec: &QesSpec, census_box: Option<CensusBox>, tol: f64) -> Result<VerifyReport> {
    let sols = qes_solve(spec)?;
    let pot = spec.potential()?;
    let mut checks = Vec::new();
    for sol in &sols {
        let name = format!("k={}", sol.k);
        match cross_check_report(spec, sol.k, tol) {
            Ok(r) => checks.push(Check::new(
                format!("{name} cross-check"),
                r.passed(),
                json!({
                    "index": r.index,
                    "qes_lambda": r.qes_lambda,
                    "shooting_lambda": r.shooting_lambda,
                    "real_zeros": r.census.real_zeros,
                    "imaginary_zeros": r.census.imaginary_zeros,
                    "offaxis_count": r.census.offaxis_count,
                }),
            )),
            Err(e) => checks.push(Check::failed(format!("{name} cross-check"), &e)),
        }
        match classify(sol, spec.p) {
            Ok((m_tree, n_tree)) => checks.push(Check::new(
                format!("{name} zero counts"),
                true,
                json!({"m_tree": m_tree, "n_tree": n_tree, "m_qes": spec.m}),
            )),
            Err(e) => checks.push(Check::failed(format!("{name} zero counts"), &e)),
        }
        if let Some(b) = census_box {
            let res = census(&pot, sol.lambda, spec.parity(), b, &CensusConfig::with_tol(tol));
            match res {
                Ok(c) => checks.push(Check::new(
                    format!("{name} box census"),
                    verify_axis_confinement(&c) && c.is_consistent(),
                    json!({
                        "offaxis_count": c.offaxis_count,
                        "total_count": c.total_count,
                    }),
                )),
                Err(e) => checks.push(Check::failed(format!("{name} box census"), &e)),
            }
        }
    }
    Ok(VerifyReport::new("theorem2", checks))
}

pub fn verify_corollary(m_max: u32, tol: f64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for m in 0..=m_max {
        for p in 0..=1u32 {
            for b in [-2.0, 0.0, 2.0] {
                let spec = QesSpec::new(m, p, b)?;
                for k in 0..=m as usize {
                    let name = format!("{spec},k={k}");
                    match cross_check_report(&spec, k, tol) {
                        Ok(r) => checks.push(Check::new(
                            format!("{name} cross-check"),
                            r.passed(),
                            json!({"qes_lambda": r.qes_lambda, "shooting_lambda": r.shooting_lambda}),
                        )),
                        Err(e) => checks.push(Check::failed(format!("{name} cross-check"), &e)),
                    }
                    let (lo, hi) = g_interval(p);
                    match g(k, m, p, b, tol) {
                        Ok(v) => checks.push(Check::new(
                            format!("{name} arg interval"),
                            v > lo && v < hi,
                            json!({"g": v, "interval": [lo, hi]}),
                        )),
                        Err(e) => checks.push(Check::failed(format!("{name} arg interval"), &e)),
                    }
                }
            }
        }
    }
    Ok(VerifyReport::new("corollary", checks))
}

pub fn verify_trees() -> Result<VerifyReport> {
    let count = |name: &str, expected: usize, got: Result<usize>| match got {
        Ok(n) => Check::new(name, n == expected, json!({"expected": expected, "found": n})),
        Err(e) => Check::failed(name, &e),
    };
    let checks = vec![
        count(
            "rooted symmetric, 4 ends",
            6,
            enumerate_rooted_symmetric(4).map(|v| v.len()),
        ),
        count(
            "double symmetric, 8 ends off the axes",
            11,
            enumerate_double_symmetric(8, false).map(|v| v.len()),
        ),
        count("degree 4 types", 2, count_filtered(4, false)),
        count("degree 4 decorated types", 3, count_filtered(4, true)),
        count("degree 6 decorated types", 5, count_filtered(6, true)),
    ];
    Ok(VerifyReport::new("trees", checks))
}

#[derive(Serialize)]
struct SpectrumRow {
    k: usize,
    lambda: f64,
    real_zero_count: usize,
}

#[derive(Serialize)]
struct CatalogEntry {
    canonical: String,
    contour: String,
}

fn validate_file(path: &PathBuf, d: Option<usize>, alternating: bool) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("q").is_some() {
        let lc: LineComplex =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        let rep = validate_line_complex(&lc);
        let code = if rep.passed() { EXIT_OK } else { EXIT_FAILED };
        return Ok(Outcome {
            artifact: to_json(&rep)?,
            code,
        });
    }
    let tree: EmbeddedTree = match serde_json::from_value(value) {
        Ok(t) => t,
        Err(e) => {
            let rep = json!({"valid": false, "error": e.to_string()});
            return Ok(Outcome {
                artifact: to_json(&rep)?,
                code: EXIT_FAILED,
            });
        }
    };
    let mut rep = json!({
        "valid": true,
        "canonical": tree.canonical_form(),
        "contour": tree.contour_word(),
    });
    let mut code = EXIT_OK;
    if let Some(d) = d {
        let p1 = check_proposition1(&tree, d, alternating)?;
        if !p1.passed() {
            code = EXIT_FAILED;
        }
        rep["structure"] = serde_json::to_value(&p1).map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(Outcome {
        artifact: to_json(&rep)?,
        code,
    })
}

/// Execute a parsed command.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Spectrum {
            potential,
            max_k,
            tol,
            radius,
        } => {
            if !(*tol > 0.0) {
                return Err(Error::InvalidArgument("tol must be positive".into()));
            }
            let cfg = SolverConfig {
                tol: *tol,
                radius: *radius,
                ..SolverConfig::default()
            };
            let rows: Vec<SpectrumRow> = eigenvalues_with(&potential.get(), *max_k, &cfg)?
                .into_iter()
                .map(|e| SpectrumRow {
                    k: e.k,
                    lambda: e.lambda,
                    real_zero_count: e.real_zero_count,
                })
                .collect();
            Ok(Outcome::ok(to_json(&rows)?))
        }
        Command::Zeros {
            potential,
            k,
            census_box,
            tol,
        } => {
            let p = potential.get();
            let ep = eigenvalue(&p, *k, &SolverConfig::with_tol(1e-10))?;
            let mut c = census(&p, ep.lambda, ep.parity, *census_box, &CensusConfig::with_tol(*tol))?;
            c.k = Some(*k);
            let code = if c.is_consistent() { EXIT_OK } else { EXIT_FAILED };
            Ok(Outcome {
                artifact: to_json(&c)?,
                code,
            })
        }
        Command::Qes { qes } => {
            let sols = qes_solve(qes)?;
            let rows = sols
                .iter()
                .map(|s| {
                    let (m_tree, n_tree) = classify(s, qes.p)?;
                    let (real, imag) = lift_zeros(s, qes.p)?;
                    Ok(json!({
                        "k": s.k,
                        "index": s.index(qes.p),
                        "lambda": s.lambda,
                        "q_coeffs": s.q_coeffs,
                        "u_roots": s.u_roots,
                        "residual": s.residual,
                        "real_zeros": real,
                        "imaginary_zeros": imag,
                        "m_tree": m_tree,
                        "n_tree": n_tree,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            let out = json!({"m": qes.m, "p": qes.p, "b": qes.b, "solutions": rows});
            Ok(Outcome::ok(to_json(&out)?))
        }
        Command::Asymptotic {
            source,
            k,
            radius,
            tol,
        } => {
            let t = if let Some(spec) = &source.qes {
                qes_table(spec, *k, *radius, *tol)?
            } else {
                let p = source
                    .potential
                    .clone()
                    .or_else(|| source.coeffs.clone())
                    .expect("clap enforces one source");
                let ep = eigenvalue(&p, *k, &SolverConfig::with_tol(1e-12))?;
                table(&p, ep.lambda, ep.parity, *radius, *tol)?
            };
            let out = json!({
                "d": t.d,
                "values": t.values,
                "radius": t.radius,
                "parity": t.parity_of_y,
                "symmetry_defect": t.symmetry_defect(),
            });
            Ok(Outcome::ok(to_json(&out)?))
        }
        Command::Gscan {
            k,
            m,
            p,
            b_min,
            b_max,
            b_step,
            tol,
        } => {
            if !(*b_step > 0.0) || b_max < b_min {
                return Err(Error::InvalidArgument("need b_step > 0 and b_min <= b_max".into()));
            }
            let n = ((b_max - b_min) / b_step + 1e-9).floor() as usize;
            let grid: Vec<f64> = (0..=n).map(|i| b_min + i as f64 * b_step).collect();
            let scan = surjectivity_scan(*k, *m, *p, &grid, *tol)?;
            let code = if scan.within_interval() { EXIT_OK } else { EXIT_FAILED };
            Ok(Outcome {
                artifact: scan.to_csv(),
                code,
            })
        }
        Command::Trees { command } => match command {
            TreesCommand::Enumerate { ends, axes } => {
                let list: Vec<CatalogEntry> = enumerate_double_symmetric(*ends, *axes)?
                    .iter()
                    .map(|t| CatalogEntry {
                        canonical: t.canonical_form(),
                        contour: t.contour_word(),
                    })
                    .collect();
                Ok(Outcome::ok(to_json(&list)?))
            }
            TreesCommand::Validate {
                file,
                d,
                alternating,
            } => validate_file(file, *d, *alternating),
        },
        Command::Verify { suite } => {
            let report = match suite {
                VerifySuite::Theorem1 {
                    potential,
                    max_k,
                    census_box,
                    tol,
                } => verify_theorem1(&potential.get(), *max_k, *census_box, *tol)?,
                VerifySuite::Theorem2 {
                    qes,
                    census_box,
                    tol,
                } => verify_theorem2(qes, *census_box, *tol)?,
                VerifySuite::Corollary { m_max, tol } => verify_corollary(*m_max, *tol)?,
                VerifySuite::Trees => verify_trees()?,
            };
            Ok(Outcome {
                artifact: to_json(&report)?,
                code: report.exit_code(),
            })
        }
    }
}

fn configure_workers() {
    if let Some(n) = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parse arguments, run, write the artifact and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_workers();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.artifact)
            .map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", outcome.artifact);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if outcome.code == EXIT_FAILED {
        eprintln!("verification failed");
    }
    outcome.code
}
