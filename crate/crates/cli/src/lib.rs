//! Command-line front end: parses arguments, dispatches to the core and
//! hamlab crates, and renders deterministic reports.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use hamlab::suite::{run_suite, Suite, SuiteConfig};
use hamlab::HamError;
use torsionlab_core::polydisk::{polydisk_bound, Mode, PolydiskError, PolydiskSpec};
use torsionlab_core::rational::{fmt_q, parse_q, q_to_f64, Extended, Q};
use torsionlab_core::toric::{self, FiberPoint, ModelSpec, MomentModel, ToricError};
use torsionlab_core::valmat::{
    self, smith_normal_form, torsion_threshold, ChainComplex, MatrixJson, ModuleDecomposition, NovikovMatrix,
    ValmatError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONSTRAINT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

pub const SEED_VAR: &str = "TORSIONLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "torsionlab", version, about = "Torsion thresholds of toric fibers and Floer quadrature checks")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Truncation level `p/q` (or `inf`) for Novikov arithmetic.
    #[arg(long, global = true, value_name = "P/Q")]
    pub trunc: Option<String>,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Floer cohomology and torsion threshold of a toric fiber.
    Torsion(TorsionArgs),
    /// Displacement-energy bound for polydisks and disk-ball products.
    Polydisk(PolydiskArgs),
    /// Smith normal form of a Novikov matrix.
    Snf(SnfArgs),
    /// Cohomology decomposition of a chain complex.
    Decompose(DecomposeArgs),
    /// Randomized quadrature verification suites.
    Verify(VerifyArgs),
    /// Fiber maximizing the torsion threshold on a grid.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
pub struct TorsionArgs {
    /// Shorthand such as `sphere:3/2*sphere:5*cylinder`, or a JSON file.
    #[arg(long)]
    pub model: String,
    /// Comma-separated moment coordinates, e.g. `3/4,2,2`.
    #[arg(long)]
    pub fiber: String,
    /// Hofer norm for the intersection count `a + 2b`.
    #[arg(long)]
    pub hofer: Option<String>,
}

#[derive(Debug, Args)]
pub struct PolydiskArgs {
    #[arg(long)]
    pub mode: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "S", value_name = "P/Q")]
    pub s: String,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub eps2: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Debug, Args)]
pub struct SnfArgs {
    /// JSON file `{rows, cols, entries, trunc?}`.
    #[arg(long)]
    pub matrix: String,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// JSON file `{ranks, differentials, trunc?}`.
    #[arg(long)]
    pub complex: String,
    /// Cohomological degree; the total over all degrees when omitted.
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    /// Defaults to $TORSIONLAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid spacing `h`, as `p/q` or a decimal.
    #[arg(long)]
    pub resolution: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 8)]
    pub resolution: usize,
    /// Search box `lo:hi,lo:hi,...`; required for cylinder factors.
    #[arg(long = "box", value_name = "LO:HI,...")]
    pub search_box: Option<String>,
}

/// Result of one invocation: the text to print and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<ValmatError> for CliError {
    fn from(e: ValmatError) -> Self {
        let code = match e {
            ValmatError::PrecisionExhausted(_) => EXIT_PRECISION,
            ValmatError::NotAComplex { .. } | ValmatError::NotIntegral { .. } => EXIT_CONSTRAINT,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<ToricError> for CliError {
    fn from(e: ToricError) -> Self {
        match e {
            ToricError::Valmat(v) => v.into(),
            ToricError::FiberOnBoundary { .. } | ToricError::EmptyInterior => {
                CliError { code: EXIT_CONSTRAINT, message: e.to_string() }
            }
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<PolydiskError> for CliError {
    fn from(e: PolydiskError) -> Self {
        match e {
            PolydiskError::ConstraintViolated(_) => CliError { code: EXIT_CONSTRAINT, message: e.to_string() },
            PolydiskError::Toric(t) => t.into(),
        }
    }
}

impl From<HamError> for CliError {
    fn from(e: HamError) -> Self {
        let code = match e {
            HamError::StepFailure { .. } => EXIT_PRECISION,
            HamError::NonCompact | HamError::UnboundedDomain => EXIT_CONSTRAINT,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    let start = Instant::now();
    match report(cli) {
        Ok((mut body, code)) => {
            if cli.timing {
                body.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
            }
            let stdout = if cli.json { render_json(&body) } else { render_text(&body) };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: e.code, stdout: String::new(), stderr: format!("error: {}\n", e.message) },
    }
}

fn report(cli: &Cli) -> Result<(Map<String, Value>, i32), CliError> {
    let trunc = cli.trunc.as_deref().map(parse_extended).transpose()?;
    let (command, mut body, code) = match &cli.command {
        Command::Torsion(a) => ("torsion", torsion(a, trunc.clone())?, EXIT_OK),
        Command::Polydisk(a) => ("polydisk", polydisk(a)?, EXIT_OK),
        Command::Snf(a) => ("snf", snf(a, trunc.clone())?, EXIT_OK),
        Command::Decompose(a) => ("decompose", decompose(a, trunc.clone())?, EXIT_OK),
        Command::Verify(a) => {
            let body = verify(a)?;
            let code = if body["pass"] == Value::Bool(true) { EXIT_OK } else { EXIT_CONSTRAINT };
            ("verify", body, code)
        }
        Command::Optimize(a) => ("optimize", optimize(a)?, EXIT_OK),
    };
    body.insert("command".into(), json!(command));
    if let Some(t) = &trunc {
        body.entry("trunc").or_insert_with(|| json!(t.render()));
    }
    if !body.contains_key("provenance") {
        body.insert("provenance".into(), json!("exact"));
    }
    Ok((body, code))
}

fn render_json(body: &Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(body).expect("reports serialize");
    s.push('\n');
    s
}

fn render_text(body: &Map<String, Value>) -> String {
    let mut out = String::new();
    for (key, value) in body {
        let shown = match value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        out.push_str(&format!("{key}: {shown}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Value rendering
// ---------------------------------------------------------------------------

fn decimal(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

fn put_q(body: &mut Map<String, Value>, key: &str, value: &Q) {
    body.insert(key.into(), json!(fmt_q(value)));
    body.insert(format!("{key}_decimal"), json!(decimal(q_to_f64(value))));
}

fn put_extended(body: &mut Map<String, Value>, key: &str, value: &Extended) {
    body.insert(key.into(), json!(value.render()));
    body.insert(format!("{key}_decimal"), json!(decimal(value.to_f64())));
}

fn put_q_list(body: &mut Map<String, Value>, key: &str, values: &[Q]) {
    body.insert(key.into(), json!(values.iter().map(fmt_q).collect::<Vec<_>>()));
    body.insert(
        format!("{key}_decimal"),
        json!(values.iter().map(|v| decimal(q_to_f64(v))).collect::<Vec<_>>()),
    );
}

fn decomposition(dec: &ModuleDecomposition) -> Map<String, Value> {
    let mut body = Map::new();
    body.insert("betti".into(), json!(dec.betti));
    put_q_list(&mut body, "torsion", dec.torsion());
    put_extended(&mut body, "threshold", &torsion_threshold(dec));
    body
}

// ---------------------------------------------------------------------------
// Input parsing
// ---------------------------------------------------------------------------

fn parse_rational(flag: &str, s: &str) -> Result<Q, CliError> {
    parse_q(s).map_err(|e| CliError::usage(format!("--{flag}: {e}")))
}

fn parse_extended(s: &str) -> Result<Extended, CliError> {
    s.parse::<Extended>().map_err(|_| CliError::usage(format!("--trunc: invalid level `{s}`")))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{path}: {e}")))
}

fn load_model(spec: &str) -> Result<MomentModel, CliError> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let parsed: ModelSpec = read_json(spec)?;
        Ok(parsed.build()?)
    } else {
        Ok(MomentModel::from_shorthand(spec)?)
    }
}

fn parse_fiber(s: &str) -> Result<FiberPoint, CliError> {
    s.parse::<FiberPoint>().map_err(|e| CliError::usage(format!("--fiber: {e}")))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn torsion(a: &TorsionArgs, trunc: Option<Extended>) -> Result<Map<String, Value>, CliError> {
    let model = load_model(&a.model)?;
    let fiber = parse_fiber(&a.fiber)?;
    let areas = toric::facet_areas(&model, &fiber)?;
    let trunc = match trunc {
        Some(t) => t,
        None => toric::default_trunc(&model, &fiber)?,
    };
    let floer = toric::floer_model_with_trunc(&model, &fiber, trunc.clone())?;
    let dec = valmat::decompose_total(&floer.complex)?;
    let threshold = torsion_threshold(&dec);
    let mut body = decomposition(&dec);
    body.insert("model".into(), json!(a.model));
    body.insert("fiber".into(), json!(fiber.render()));
    put_q_list(&mut body, "facet_areas", &areas);
    body.insert(
        "w".into(),
        json!(floer.w.iter().map(|w| w.clone().into_exact().to_text()).collect::<Vec<_>>()),
    );
    body.insert("trunc".into(), json!(trunc.render()));
    body.insert("non_displaceable".into(), json!(threshold.is_infinite()));
    let verdict = match &threshold {
        Extended::Infinity => "non-displaceable".to_string(),
        Extended::Finite(t) => format!("displacement energy >= {}", fmt_q(t)),
    };
    body.insert("verdict".into(), json!(verdict));
    if let Some(h) = &a.hofer {
        let hofer = parse_rational("hofer", h)?;
        if hofer <= Q::from_integer(0.into()) {
            return Err(CliError::usage("--hofer must be positive"));
        }
        put_q(&mut body, "hofer", &hofer);
        body.insert("b".into(), json!(valmat::b_count(&dec, &hofer)));
        body.insert("intersection_bound".into(), json!(valmat::theorem_j_bound(&dec, &hofer)));
    }
    Ok(body)
}

fn polydisk(a: &PolydiskArgs) -> Result<Map<String, Value>, CliError> {
    let mode = Mode::parse(&a.mode)
        .ok_or_else(|| CliError::usage(format!("--mode: expected 1.3, 1.4 or 1.5, got `{}`", a.mode)))?;
    let s = parse_rational("S", &a.s)?;
    let mut spec = PolydiskSpec::new(mode, a.n, a.k, s);
    match (&a.eps, &a.eps2) {
        (None, None) => {}
        (eps, eps2) => {
            let eps = eps.as_deref().map(|e| parse_rational("eps", e)).transpose()?.unwrap_or_else(|| spec.eps.clone());
            let eps2 = eps2.as_deref().map(|e| parse_rational("eps2", e)).transpose()?.unwrap_or_else(|| spec.eps2.clone());
            spec = spec.with_eps(eps, eps2);
        }
    }
    if let Some(l) = &a.lambda {
        spec = spec.with_lambda(parse_rational("lambda", l)?);
    }
    let report = polydisk_bound(&spec)?;
    let mut body = match serde_json::to_value(&report).expect("reports serialize") {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    body.insert("bound_decimal".into(), json!(decimal(report.bound.to_f64())));
    put_q(&mut body, "certified_bound", &report.certified_bound);
    put_q(&mut body, "eps", &spec.eps);
    put_q(&mut body, "eps2", &spec.eps2);
    put_q(&mut body, "lambda", &spec.lambda);
    body.insert("n".into(), json!(spec.n));
    body.insert("k".into(), json!(spec.k));
    Ok(body)
}

fn snf(a: &SnfArgs, trunc: Option<Extended>) -> Result<Map<String, Value>, CliError> {
    let json: MatrixJson = read_json(&a.matrix)?;
    let m = NovikovMatrix::from_json(&json, trunc.unwrap_or(Extended::Infinity))?;
    let form = smith_normal_form(&m)?;
    let mut body = Map::new();
    body.insert("rows".into(), json!(m.rows()));
    body.insert("cols".into(), json!(m.cols()));
    body.insert("rank".into(), json!(form.rank()));
    put_q_list(&mut body, "pivots", &form.pivots);
    body.insert("trunc".into(), json!(m.trunc().render()));
    body.insert("u".into(), json!(form.u.to_json().entries));
    body.insert("d".into(), json!(form.d.to_json().entries));
    body.insert("v".into(), json!(form.v.to_json().entries));
    Ok(body)
}

/// `{ranks: [r0, ...], differentials: [matrix, ...], trunc?}`; differential
/// `k` maps degree `k` to degree `k + 1`.
#[derive(Debug, serde::Deserialize)]
struct ComplexJson {
    ranks: Vec<usize>,
    differentials: Vec<MatrixJson>,
    #[serde(default)]
    trunc: Option<Extended>,
}

fn decompose(a: &DecomposeArgs, trunc: Option<Extended>) -> Result<Map<String, Value>, CliError> {
    let json: ComplexJson = read_json(&a.complex)?;
    let level = trunc.or(json.trunc).unwrap_or(Extended::Infinity);
    let differentials = json
        .differentials
        .iter()
        .map(|d| NovikovMatrix::from_json(d, level.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let complex = ChainComplex::new(json.ranks, differentials)?;
    let mut body = match a.degree {
        Some(k) => {
            let mut body = decomposition(&valmat::decompose(&complex, k)?);
            body.insert("degree".into(), json!(k));
            body
        }
        None => {
            let all = valmat::decompose_all(&complex)?;
            let total = all.iter().fold(ModuleDecomposition::free(0), |acc, d| acc.sum(d));
            let mut body = decomposition(&total);
            body.insert("degree".into(), json!("total"));
            body.insert("degrees".into(), Value::Array(all.iter().map(|d| Value::Object(decomposition(d))).collect()));
            body
        }
    };
    body.insert("ranks".into(), json!(complex.ranks()));
    Ok(body)
}

fn default_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::usage(format!("{SEED_VAR}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn verify(a: &VerifyArgs) -> Result<Map<String, Value>, CliError> {
    let suite: Suite = a.suite.parse()?;
    let seed = match a.seed {
        Some(s) => s,
        None => default_seed()?,
    };
    let mut config = SuiteConfig::new(suite, seed);
    config.tol = a.tol;
    if let Some(r) = &a.resolution {
        let h = q_to_f64(&parse_rational("resolution", r)?);
        if !(h > 0.0) {
            return Err(CliError::usage("--resolution must be positive"));
        }
        config.resolution = h;
    }
    if let Some(c) = a.cases {
        config.cases = c;
    }
    let report = run_suite(&config)?;
    let mut body = match serde_json::to_value(&report).expect("reports serialize") {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    body.insert("provenance".into(), json!(format!("quadrature({:e})", report.tol)));
    Ok(body)
}

fn parse_box(s: &str) -> Result<Vec<(Q, Q)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (lo, hi) = pair
                .split_once(':')
                .ok_or_else(|| CliError::usage(format!("--box: expected lo:hi, got `{pair}`")))?;
            Ok((parse_rational("box", lo)?, parse_rational("box", hi)?))
        })
        .collect()
}

fn optimize(a: &OptimizeArgs) -> Result<Map<String, Value>, CliError> {
    let model = load_model(&a.model)?;
    let search_box = a.search_box.as_deref().map(parse_box).transpose()?;
    let best = toric::optimize_threshold(&model, a.resolution, search_box.as_deref())?;
    let mut body = Map::new();
    body.insert("model".into(), json!(a.model));
    body.insert("resolution".into(), json!(a.resolution));
    body.insert("fiber".into(), json!(best.point.render()));
    put_extended(&mut body, "threshold", &best.threshold);
    Ok(body)
}
