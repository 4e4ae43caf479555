//! `altinv`: evaluate alternating invariant functions, run verification
//! suites, tabulate convolutions.
//!
//! Exit codes: 0 success, 1 verification failure, 2 domain error,
//! 3 convergence or quadrature error, 64 usage error.

mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use altinv_core::builtins::{make_builtin, tolerance_class, BuiltinId, FAMILIES};
use altinv_core::convolution::{convolve_at, normalized_euler};
use altinv_core::euler::euler_eval;
use altinv_core::gamma_tilde::log_gamma_tilde;
use altinv_core::quadrature::QuadratureConfig;
use altinv_core::zeta::{zeta_e, Regime, ZetaParams};
use altinv_core::{BivariateFn, Complex64, Error, Grid, GridPoint, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use report::{complex, num, render_json, Document, SCHEMA_VERSION};
use suites::{SuiteOptions, DEFAULT_ALPHA_BETA};

const EXIT_VERIFY: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "altinv", version, about = "Alternating invariant functions: evaluation and verification")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Tolerance override (verify: every check; eval: working tolerance).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON list of {"x", "y", "n"} grid points; values may be "p/q" strings.
    #[arg(long, global = true)]
    grid_file: Option<PathBuf>,
    /// Seed for randomized rational sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one function at one point.
    Eval {
        #[command(subcommand)]
        target: EvalTarget,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Tabulate the convolution g∗h at fixed y.
    Convolve(ConvolveArgs),
    /// List registry contents.
    List {
        #[arg(value_enum)]
        what: ListWhat,
    },
}

#[derive(Subcommand, Debug)]
enum EvalTarget {
    /// Alternating Hurwitz zeta ζ_E(s, x).
    Zeta {
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        /// Imaginary part of s.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        s_im: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value = "auto")]
        regime: String,
    },
    /// Euler polynomial E_m(x); exact for rational x.
    Euler {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// A registry function f(x, y).
    Builtin {
        #[arg(long)]
        id: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// log|Γ̃(x)| and its sign.
    GammaTilde {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    EulerIdentities,
    ZetaIdentities,
    GammaIdentities,
    InvarianceAll,
    ConvolutionTheorems,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// α of the zeta convolution identity (with --beta).
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    /// β of the zeta convolution identity (with --alpha).
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
}

#[derive(Args, Debug)]
struct ConvolveArgs {
    /// Left builtin id.
    #[arg(long)]
    g: String,
    /// Right builtin id.
    #[arg(long)]
    h: String,
    /// Period parameter y > 0.
    #[arg(long)]
    y: String,
    /// Evaluation points (repeat or comma-separate).
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<String>,
    /// Replace euler:m by y^m E_m(x/y)/(2·m!).
    #[arg(long)]
    euler_normalized: bool,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = QuadratureConfig::default().panel_order)]
    panel_order: usize,
    #[arg(long, default_value_t = QuadratureConfig::default().abs_tol)]
    abs_tol: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().rel_tol)]
    rel_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ListWhat {
    Builtins,
}

/// A command failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => EXIT_DOMAIN,
            Error::Convergence(_) | Error::Quadrature(_) => EXIT_CONVERGENCE,
            Error::Argument(_) | Error::Regime(_) => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type CmdResult = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("altinv: {}", f.message);
        return ExitCode::from(f.code);
    }
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    match run(&cli, echo) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("altinv: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Caps the rayon pool at `ALTINV_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ALTINV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("ALTINV_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

fn run(cli: &Cli, echo: String) -> CmdResult {
    match &cli.command {
        Command::Eval { target } => eval(cli, target),
        Command::Verify(args) => verify(cli, args, echo),
        Command::Convolve(args) => convolve(cli, args),
        Command::List { what: ListWhat::Builtins } => Ok((list_builtins(cli.format), 0)),
    }
}

fn scalar(raw: &str, what: &str) -> Result<Scalar, Failure> {
    raw.parse::<Scalar>()
        .map_err(|e| usage(format!("--{what}: {e}")))
}

fn parse_id(raw: &str) -> Result<BuiltinId, Failure> {
    raw.parse::<BuiltinId>().map_err(|e| usage(format!("invalid builtin id {raw:?}: {e}")))
}

/// Renders a flat record as JSON, or as a one-row CSV with the same keys.
fn emit_record(format: Format, record: Value) -> String {
    match format {
        Format::Json => render_json(&record),
        Format::Csv => {
            let obj = record.as_object().expect("records are objects");
            let mut header = Vec::new();
            let mut row = Vec::new();
            for (k, v) in obj {
                flatten(k, v, &mut header, &mut row);
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            w.write_record(&row).expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
    }
}

fn flatten(key: &str, v: &Value, header: &mut Vec<String>, row: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, inner) in m {
                flatten(&format!("{key}_{k}"), inner, header, row);
            }
        }
        Value::Null => {
            header.push(key.to_string());
            row.push(String::new());
        }
        Value::String(s) => {
            header.push(key.to_string());
            row.push(s.clone());
        }
        other => {
            header.push(key.to_string());
            row.push(other.to_string());
        }
    }
}

fn eval(cli: &Cli, target: &EvalTarget) -> CmdResult {
    let record = match target {
        EvalTarget::Zeta { s, s_im, x, regime } => {
            let regime: Regime = regime.parse().map_err(|e: Error| usage(e.to_string()))?;
            let mut p = ZetaParams::new(Complex64::new(*s, *s_im), Complex64::new(*x, 0.0)).with_regime(regime);
            if let Some(t) = cli.tol {
                p = p.with_tol(t);
            }
            let v = zeta_e(&p)?;
            json!({
                "schema_version": SCHEMA_VERSION,
                "target": "zeta",
                "value": complex(v.value),
                "regime": v.regime.to_string(),
                "est_error": num(v.est_error),
            })
        }
        EvalTarget::Euler { m, x } => {
            let x = scalar(x, "x")?;
            let v = euler_eval(*m, &x)?;
            json!({
                "schema_version": SCHEMA_VERSION,
                "target": "euler",
                "value": num(v.to_f64()),
                "exact": if v.is_exact() { json!(v.to_string()) } else { Value::Null },
                "est_error": num(if v.is_exact() { 0.0 } else { f64::EPSILON * v.to_f64().abs().max(1.0) }),
            })
        }
        EvalTarget::Builtin { id, x, y } => {
            let id = parse_id(id)?;
            let (x, y) = (scalar(x, "x")?, scalar(y, "y")?);
            if !y.is_positive() {
                return Err(usage("--y must be positive"));
            }
            let f = make_builtin(&id)?;
            let v = f.eval(&x, &y)?;
            json!({
                "schema_version": SCHEMA_VERSION,
                "target": id.to_string(),
                "value": complex(v),
                "exact": x.to_rational().zip(y.to_rational()).and_then(|(xr, yr)| f.eval_exact(&xr, &yr)).map(|r| Scalar::Exact(r).to_string()),
                "est_error": num(tolerance_class(&id).at(&GridPoint { x, y, n: 1 })),
            })
        }
        EvalTarget::GammaTilde { x } => {
            let v = log_gamma_tilde(*x, cli.tol.unwrap_or(1e-12))?;
            json!({
                "schema_version": SCHEMA_VERSION,
                "target": "gamma-tilde",
                "log_abs": num(v.log_abs),
                "sign": v.sign,
                "value": num(v.value()),
                "truncation_terms": v.truncation_terms,
                "est_error": num(v.est_error),
            })
        }
    };
    Ok((emit_record(cli.format, record), 0))
}

#[derive(Deserialize)]
struct RawPoint {
    x: Value,
    y: Value,
    n: i64,
}

/// JSON numbers and strings both go through the decimal / `p/q` parser, so
/// integer literals are exact.
fn raw_scalar(v: &Value, what: &str) -> Result<Scalar, Failure> {
    match v {
        Value::Number(n) => scalar(&n.to_string(), what),
        Value::String(s) => scalar(s, what),
        other => Err(usage(format!("{what}: expected a number or string, got {other}"))),
    }
}

fn load_grid(path: &Option<PathBuf>) -> Result<Grid, Failure> {
    let Some(path) = path else {
        return Ok(Grid::default_grid());
    };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let raw: Vec<RawPoint> = serde_json::from_str(&text).map_err(|e| usage(format!("bad grid file {}: {e}", path.display())))?;
    let points = raw
        .iter()
        .map(|p| {
            let n = u32::try_from(p.n).map_err(|_| usage(format!("grid n out of range: {}", p.n)))?;
            Ok(GridPoint { x: raw_scalar(&p.x, "grid x")?, y: raw_scalar(&p.y, "grid y")?, n })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Grid::from_points(points).map_err(|e| usage(e.to_string()))
}

fn verify(cli: &Cli, args: &VerifyArgs, echo: String) -> CmdResult {
    if let Some(t) = cli.tol {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(usage("--tol must be a finite nonnegative number"));
        }
    }
    let alpha_beta = match (args.alpha, args.beta) {
        (Some(a), Some(b)) if a > 0.0 && b > 0.0 => vec![(a, b)],
        (Some(_), Some(_)) => return Err(usage("--alpha and --beta must be positive")),
        _ => DEFAULT_ALPHA_BETA.to_vec(),
    };
    let opts = SuiteOptions { tol: cli.tol, grid: load_grid(&cli.grid_file)?, seed: cli.seed, alpha_beta };
    let entries = match args.suite {
        Suite::EulerIdentities => suites::euler_identities(&opts),
        Suite::ZetaIdentities => suites::zeta_identities(&opts),
        Suite::GammaIdentities => suites::gamma_identities(&opts),
        Suite::InvarianceAll => suites::invariance_all(&opts),
        Suite::ConvolutionTheorems => suites::convolution_theorems(&opts),
    };
    let doc = Document { command: echo, entries };
    let text = match cli.format {
        Format::Json => render_json(&doc.to_json()),
        Format::Csv => doc.to_csv(),
    };
    Ok((text, if doc.passed() { 0 } else { EXIT_VERIFY }))
}

fn convolve_operand(raw: &str, normalized: bool) -> Result<BivariateFn, Failure> {
    let id = parse_id(raw)?;
    if normalized && id.family() == "euler" {
        let m = id.param("m").map(Scalar::to_f64).expect("euler has m") as usize;
        return Ok(normalized_euler(m)?);
    }
    Ok(make_builtin(&id)?)
}

fn convolve(cli: &Cli, a: &ConvolveArgs) -> CmdResult {
    let g = convolve_operand(&a.g, a.euler_normalized)?;
    let h = convolve_operand(&a.h, a.euler_normalized)?;
    let y = scalar(&a.y, "y")?;
    if !y.is_positive() {
        return Err(usage("--y must be positive"));
    }
    let cfg = QuadratureConfig { panel_order: a.panel_order, abs_tol: a.abs_tol, rel_tol: a.rel_tol, ..QuadratureConfig::default() };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let mut rows = Vec::new();
    for raw in &a.x {
        let x = scalar(raw, "x")?;
        let v = convolve_at(&g, &h, &x, &y, &cfg)?;
        rows.push((x, v));
    }
    let text = match cli.format {
        Format::Json => render_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "g": g.name(),
            "h": h.name(),
            "y": y.to_string(),
            "values": rows.iter().map(|(x, v)| json!({
                "x": x.to_string(),
                "value": complex(v.value),
                "est_error": num(v.est_error),
                "panels": v.panels,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "value_re", "value_im", "est_error"]).expect("in-memory write");
            for (x, v) in &rows {
                w.write_record([x.to_string(), report::fmt_f64(v.value.re), report::fmt_f64(v.value.im), report::fmt_f64(v.est_error)])
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
    };
    Ok((text, 0))
}

fn list_builtins(format: Format) -> String {
    let registry = altinv_core::builtins::default_registry();
    match format {
        Format::Json => render_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "families": FAMILIES.iter().map(|f| json!({
                "name": f.name,
                "params": f.params,
                "summary": f.summary,
                "example": f.example,
            })).collect::<Vec<_>>(),
            "registry": registry.iter().map(|id| json!({
                "id": id.to_string(),
                "tolerance_class": tolerance_class(id).label(),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "family", "tolerance_class"]).expect("in-memory write");
            for id in &registry {
                w.write_record([id.to_string(), id.family().to_string(), tolerance_class(id).label().to_string()])
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
    }
}
