//! `pathsig` command-line front end.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 input error. JSON documents
//! go to `--out` when given (the human-readable table then goes to stdout),
//! otherwise to stdout with the table on stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::asymptotics::analyze;
use crate::complexify::{dilation_invariance_check, lie_generator, DilationReport, DILATION_TOL};
use crate::error::Error;
use crate::io::{parse_input, path_to_json, tensor_to_json, AnyPath, AnyTensor, Input, SCHEMA_VERSION};
use crate::path::PiecewiseLinearPath;
use crate::sample::DEFAULT_SEED;
use crate::scalar::{RealScalar, Scalar, ScalarKind};
use crate::selftest::{self, SelftestConfig};
use crate::semigroup::{extract_pattern, modulus_report};
use crate::tensor::{NormKind, TruncatedTensor};
use crate::with_tensor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Zero tolerance used for floating-point inputs when `--tol` is absent.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "pathsig", version, about = "Exact signatures of piecewise-linear paths and their zero structure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Truncation depth N.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub depth: Option<u64>,
    /// Tensor norm.
    #[arg(long, global = true, default_value = "l1proj")]
    pub norm: NormKind,
    /// Coefficient arithmetic. Paths default to rational; tensors keep their declared scalar.
    #[arg(long, global = true)]
    pub scalar: Option<ScalarArg>,
    /// Zero-test or residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for all randomness.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file for the JSON document.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalarArg {
    Rational,
    F64,
}

impl From<ScalarArg> for ScalarKind {
    fn from(s: ScalarArg) -> Self {
        match s {
            ScalarArg::Rational => ScalarKind::Rational,
            ScalarArg::F64 => ScalarKind::F64,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signature of a path (or re-emission of a tensor) as tensor JSON.
    Sig { input: PathBuf },
    /// Zero pattern of the degrees and its modulus.
    Zeros { input: PathBuf },
    /// Normalized norms (n! |g_n|)^(1/n) against the path length.
    Asym { input: PathBuf },
    /// Invariance under dilation by a primitive d-th root of unity.
    Dilate {
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=1024))]
        modulus: u64,
    },
    /// Removes backtracks, zero segments and collinear joints.
    Reduce { input: PathBuf },
    /// exp of a Lie bracket expression such as "[1,[1,2]]" or "1/2*[1,2]".
    Lie {
        expr: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Runs the fixed-seed invariant suite.
    Selftest {
        /// Dimension of random paths.
        #[arg(long)]
        dim: Option<usize>,
    },
}

/// Resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub depth: Option<usize>,
    pub norm: NormKind,
    pub scalar: Option<ScalarKind>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl From<&Options> for RunConfig {
    fn from(o: &Options) -> Self {
        RunConfig {
            depth: o.depth.map(|d| d as usize),
            norm: o.norm,
            scalar: o.scalar.map(Into::into),
            tol: o.tol,
            seed: o.seed,
            out: o.out.clone(),
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Output streams of one invocation.
pub struct Streams<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, streams: &mut Streams) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(streams.err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(streams.out, "{text}");
                EXIT_OK
            };
        }
    };
    execute(&cli, streams)
}

pub fn execute(cli: &Cli, streams: &mut Streams) -> i32 {
    let cfg = RunConfig::from(&cli.options);
    let outcome = match &cli.command {
        Command::Sig { input } => cmd_sig(&cfg, input, streams),
        Command::Zeros { input } => cmd_zeros(&cfg, input, streams),
        Command::Asym { input } => cmd_asym(&cfg, input, streams),
        Command::Dilate { input, modulus } => cmd_dilate(&cfg, input, *modulus as usize, streams),
        Command::Reduce { input } => cmd_reduce(&cfg, input, streams),
        Command::Lie { expr, dim } => cmd_lie(&cfg, expr, *dim, streams),
        Command::Selftest { dim } => cmd_selftest(&cfg, *dim, streams),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(streams.err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Invariant(msg)) => {
            let _ = writeln!(streams.err, "invariant failure: {msg}");
            EXIT_INVARIANT
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(cfg: &RunConfig, path: &Path) -> Result<Input, Failure> {
    let text = read_input(path)?;
    let kind = cfg.scalar.unwrap_or(ScalarKind::Rational);
    let input = parse_input(&text, Some(path), kind).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    match input {
        Input::Tensor(t) => Ok(Input::Tensor(coerce(t, cfg.scalar)?)),
        p => Ok(p),
    }
}

fn load_path(cfg: &RunConfig, path: &Path) -> Result<AnyPath, Failure> {
    match load(cfg, path)? {
        Input::Path(p) => Ok(p),
        Input::Tensor(_) => Err(Failure::Input(format!("{}: expected a path, found a tensor", path.display()))),
    }
}

/// Applies an explicit `--scalar` to a tensor input.
fn coerce(t: AnyTensor, scalar: Option<ScalarKind>) -> Result<AnyTensor, Failure> {
    match (t, scalar) {
        (t, None) => Ok(t),
        (AnyTensor::Rational(t), Some(ScalarKind::F64)) => Ok(AnyTensor::F64(t.to_f64())),
        (t, Some(k)) if t.kind() == k => Ok(t),
        (t, Some(k)) => Err(Failure::Input(format!("cannot convert a {} tensor to {}", t.kind().as_str(), k.as_str()))),
    }
}

fn signature(p: &AnyPath, depth: usize) -> Result<AnyTensor, Failure> {
    Ok(match p {
        AnyPath::Rational(p) => AnyTensor::Rational(p.signature(depth)?),
        AnyPath::F64(p) => AnyTensor::F64(p.signature(depth)?),
    })
}

/// Tensor from a tensor file, or the signature of a path file.
fn load_tensor(cfg: &RunConfig, path: &Path, default_depth: usize) -> Result<(AnyTensor, bool), Failure> {
    match load(cfg, path)? {
        Input::Tensor(t) => {
            let t = match cfg.depth {
                Some(n) if n < t.depth() => with_truncated(&t, n)?,
                Some(n) if n > t.depth() => {
                    return Err(Failure::Input(format!("tensor has depth {}, cannot extend to {n}", t.depth())))
                }
                _ => t,
            };
            Ok((t, false))
        }
        Input::Path(p) => Ok((signature(&p, cfg.depth.unwrap_or(default_depth))?, true)),
    }
}

fn with_truncated(t: &AnyTensor, n: usize) -> Result<AnyTensor, Failure> {
    Ok(match t {
        AnyTensor::Rational(t) => AnyTensor::Rational(t.truncate(n)?),
        AnyTensor::F64(t) => AnyTensor::F64(t.truncate(n)?),
        AnyTensor::C64(t) => AnyTensor::C64(t.truncate(n)?),
    })
}

/// Writes a JSON document and its table to the configured destinations.
fn emit(cfg: &RunConfig, doc: &str, table: &str, streams: &mut Streams) -> Outcome {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, doc).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            streams.out.write_all(table.as_bytes())?;
        }
        None => {
            streams.out.write_all(doc.as_bytes())?;
            streams.err.write_all(table.as_bytes())?;
        }
    }
    Ok(())
}

/// `{"schema_version", "command", ...body}` as pretty JSON.
fn report_doc(command: &str, body: impl Serialize) -> String {
    let mut map = Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert("command".into(), command.into());
    match serde_json::to_value(body).expect("report serialization cannot fail") {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("report".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn level_table<S: Scalar>(g: &TruncatedTensor<S>, norm: NormKind) -> String {
    let mut out = format!("{:>6}  {:>24}  {:>24}\n", "degree", format!("|g_n| ({})", norm.as_str()), "n! |g_n|");
    let mut fact = 1.0f64;
    for k in 1..=g.depth() {
        fact *= k as f64;
        let v = norm.apply(g.level(k));
        let _ = writeln!(out, "{k:>6}  {v:>24.16e}  {:>24.16e}", v * fact);
    }
    out
}

pub fn cmd_sig(cfg: &RunConfig, input: &Path, streams: &mut Streams) -> Outcome {
    let (t, _) = load_tensor(cfg, input, 4)?;
    let table = with_tensor!(&t, g => level_table(g, cfg.norm));
    emit(cfg, &tensor_to_json(&t), &table, streams)
}

pub fn cmd_zeros(cfg: &RunConfig, input: &Path, streams: &mut Streams) -> Outcome {
    let (t, from_path) = load_tensor(cfg, input, 8)?;
    let exact = t.kind() == ScalarKind::Rational;
    let tol = match cfg.tol {
        Some(tol) if exact && tol > 0.0 => {
            return Err(Failure::Input("rational mode tests for exact zeros; --tol must be 0".into()))
        }
        Some(tol) if tol < 0.0 || !tol.is_finite() => {
            return Err(Failure::Input(format!("tolerance must be finite and nonnegative, got {tol}")))
        }
        Some(tol) => tol,
        None if exact => 0.0,
        None => DEFAULT_FLOAT_TOL,
    };
    let pattern = with_tensor!(&t, g => extract_pattern(g, tol));
    let zeros = pattern.zeros();
    let report = modulus_report(pattern);
    let message = if report.trivial {
        format!("signature trivial to depth {}", t.depth())
    } else if report.additive.closed {
        "nonzero degrees are additively closed within the window".to_string()
    } else {
        "nonzero degrees are not additively closed".to_string()
    };
    let doc = report_doc(
        "zeros",
        serde_json::json!({
            "scalar": t.kind(),
            "depth": t.depth(),
            "tol": tol,
            "message": message,
            "nonzero_degrees": report.pattern.nonzero,
            "zero_degrees": zeros,
            "trivial": report.trivial,
            "additive": report.additive,
            "min_modulus": report.modulus,
            "generators": report.generators,
            "frobenius": report.frobenius,
        }),
    );
    let mut table = format!("nonzero {:?}\nzero    {:?}\n{message}\n", report.pattern.nonzero, zeros);
    match report.modulus {
        Some(m) => {
            let _ = writeln!(table, "min_modulus {m}");
        }
        None => table.push_str("min_modulus none\n"),
    }
    emit(cfg, &doc, &table, streams)?;
    if from_path && !report.additive.closed {
        return Err(Failure::Invariant(format!(
            "signature degrees not additively closed: {:?}",
            report.additive.counterexample
        )));
    }
    Ok(())
}

fn asym_of<S: RealScalar>(cfg: &RunConfig, p: &PiecewiseLinearPath<S>, streams: &mut Streams) -> Outcome {
    let depth = cfg.depth.unwrap_or(8);
    let length = p.length(cfg.norm);
    let report = analyze(&p.signature(depth)?, cfg.norm, Some(length))?;
    emit(cfg, &report_doc("asym", &report), &report.table(), streams)?;
    if report.decay_ok == Some(false) {
        return Err(Failure::Invariant(format!("S_N = {:?} exceeds the length {length}", report.sup)));
    }
    if !report.violations.is_empty() {
        return Err(Failure::Invariant(format!("supermultiplicativity fails at {:?}", report.violations)));
    }
    Ok(())
}

pub fn cmd_asym(cfg: &RunConfig, input: &Path, streams: &mut Streams) -> Outcome {
    match load_path(cfg, input)? {
        AnyPath::Rational(p) => asym_of(cfg, &p, streams),
        AnyPath::F64(p) => asym_of(cfg, &p, streams),
    }
}

fn dilation_table(r: &DilationReport) -> String {
    let mut out = format!(
        "d = {}  lambda = {:+.17} {:+.17}i  norm {}\n{:>6}  {:>8}  {:>24}\n",
        r.modulus,
        r.lambda[0],
        r.lambda[1],
        r.norm.as_str(),
        "degree",
        "d | n",
        "residual"
    );
    for d in &r.degrees {
        let _ = writeln!(out, "{:>6}  {:>8}  {:>24.16e}", d.degree, if d.multiple { "yes" } else { "no" }, d.residual);
    }
    let _ = writeln!(
        out,
        "invariant: {}  degree pattern divisible: {}",
        if r.pass { "yes" } else { "no" },
        if r.pattern_pass { "yes" } else { "no" }
    );
    out
}

pub fn cmd_dilate(cfg: &RunConfig, input: &Path, modulus: usize, streams: &mut Streams) -> Outcome {
    let (t, _) = load_tensor(cfg, input, 8)?;
    let tol = cfg.tol.unwrap_or(DILATION_TOL);
    let report = with_tensor!(&t, g => dilation_invariance_check(g, modulus, cfg.norm, tol))?;
    emit(cfg, &report_doc("dilate", &report), &dilation_table(&report), streams)?;
    if !report.agree {
        return Err(Failure::Invariant("residual verdict and degree-pattern verdict disagree".into()));
    }
    Ok(())
}

fn reduce_of<S: RealScalar>(
    cfg: &RunConfig,
    p: &PiecewiseLinearPath<S>,
) -> Result<(PiecewiseLinearPath<S>, String), Failure> {
    let depth = cfg.depth.unwrap_or(6);
    let reduced = p.tree_reduce();
    let (before, after) = (p.length(cfg.norm), reduced.length(cfg.norm));
    let mut table = format!(
        "segments  {} -> {}\nlength    {before:.17} -> {after:.17} ({})\nremoved   {:.17}\n",
        p.num_segments(),
        reduced.num_segments(),
        cfg.norm.as_str(),
        before - after
    );
    let (s_in, s_out) = (p.signature(depth)?, reduced.signature(depth)?);
    if S::is_exact() {
        if s_in != s_out {
            return Err(Failure::Invariant(format!("reduction changed the signature at depth {depth}")));
        }
        let _ = writeln!(table, "signature preserved exactly to depth {depth}");
    } else {
        let _ = writeln!(table, "signature deviation to depth {depth}: {:.3e}", s_in.max_abs_diff(&s_out)?);
    }
    Ok((reduced, table))
}

pub fn cmd_reduce(cfg: &RunConfig, input: &Path, streams: &mut Streams) -> Outcome {
    let (doc, table) = match load_path(cfg, input)? {
        AnyPath::Rational(p) => {
            let (r, t) = reduce_of(cfg, &p)?;
            (path_to_json(&AnyPath::Rational(r)), t)
        }
        AnyPath::F64(p) => {
            let (r, t) = reduce_of(cfg, &p)?;
            (path_to_json(&AnyPath::F64(r)), t)
        }
    };
    emit(cfg, &doc, &table, streams)
}

pub fn cmd_lie(cfg: &RunConfig, expr: &str, dim: usize, streams: &mut Streams) -> Outcome {
    let g = lie_generator(expr, dim)?.exp(cfg.depth.unwrap_or(4))?;
    let t = coerce(AnyTensor::Rational(g), cfg.scalar)?;
    let table = with_tensor!(&t, g => level_table(g, cfg.norm));
    emit(cfg, &tensor_to_json(&t), &table, streams)
}

pub fn cmd_selftest(cfg: &RunConfig, dim: Option<usize>, streams: &mut Streams) -> Outcome {
    if dim == Some(0) {
        return Err(Failure::Input("--dim must be positive".into()));
    }
    let config = SelftestConfig { seed: cfg.seed, depth: cfg.depth, dim };
    let report = selftest::run(&config);
    streams.out.write_all(report.table().as_bytes())?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, report_doc("selftest", &report))?;
    }
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.pass).map(|s| s.name).collect();
        Err(Failure::Invariant(format!("failed suites: {}", failed.join(", "))))
    }
}
