//! Command-line front end: `qig compute`, `qig verify`, `qig list`.
//!
//! Exit codes: 0 success, 1 verification failures, 2 malformed input or unknown suite,
//! 3 violated invariant (non-density state, uncentered observable, ...), 4 domain error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
use crate::quantities::{self, QuantityResult};
use crate::stdfun::{self, DiscreteMeasure, ScalarFunctionSpec};
use crate::verify::{self, DimRange, Suite, Tolerances, TrialReport, SUITE_NAMES};

/// Matrix interchange format: `{"n": 2, "data": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let data = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        MatrixFile { n: m.nrows(), data }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.n {
            return Err(format!("`data` has {} rows, expected n = {}", self.data.len(), self.n));
        }
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.n {
                return Err(format!("row {i} has {} entries, expected {}", row.len(), self.n));
            }
        }
        Ok(ComplexMatrix::from_fn(self.n, self.n, |i, j| {
            let [re, im] = self.data[i][j];
            C64::new(re, im)
        }))
    }
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
    file.to_matrix().map_err(|e| CliError::input(path, e))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> std::io::Result<()> {
    let text = serde_json::to_string(&MatrixFile::from_matrix(m)).expect("finite entries");
    fs::write(path, text)
}

/// Hansen measure file: `[[atom, weight], ...]`.
pub fn read_measure(path: &Path) -> Result<DiscreteMeasure, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let pairs: Vec<(f64, f64)> = serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
    DiscreteMeasure::from_pairs(&pairs).map_err(|e| CliError::input(path, e))
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed file or argument (exit 2).
    Input(String),
    Core(Error),
    Io(String),
}

impl CliError {
    fn input(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "malformed input: {m}"),
            CliError::Core(e) if e.is_invariant_violation() => write!(f, "invariant violated: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownSuite(_) | Error::UnknownFunction(_) | Error::InvalidParameter(_) => 2,
        e if e.is_invariant_violation() => 3,
        _ => 4,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qig",
    version,
    about = "Quasi-entropies, monotone metrics and skew informations of density matrices",
    after_help = "All logarithms are natural. Matrix files: {\"n\": 2, \"data\": [[[re, im], ...], ...]}."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one quantity and print it with 12 significant digits.
    Compute(ComputeArgs),
    /// Run a property suite (or `all`) and emit a report.
    Verify(VerifyArgs),
    /// List catalog functions and suites.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    QuasiEntropy,
    Umegaki,
    Renyi,
    Cov,
    GenCov,
    Fisher,
    Skew,
    Wyd,
}

#[derive(Debug, clap::Args)]
struct ComputeArgs {
    quantity: Quantity,
    /// Density matrix (first argument of relative entropies)
    #[arg(long)]
    state: Option<PathBuf>,
    /// Second density matrix
    #[arg(long)]
    state2: Option<PathBuf>,
    /// Observable, or the operator of the quasi-entropy (default identity)
    #[arg(long)]
    obs: Option<PathBuf>,
    /// Second observable (defaults to --obs)
    #[arg(long)]
    obs2: Option<PathBuf>,
    /// Standard function, e.g. `sld`, `wyd:0.3`, `hansen:mu.json`, `tilde:sld`
    #[arg(long = "fn")]
    function: Option<String>,
    /// Quasi-entropy kernel in the same grammar (alias of --fn for quasi-entropy)
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    /// Suite name or `all`
    suite: String,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension `n` or inclusive range `a-b`
    #[arg(long, default_value = "4")]
    dim: String,
    /// Tolerance override `key=value`, repeatable
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Report emitted by `qig verify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub trials: u64,
    pub dims: DimRange,
    pub passed: bool,
    pub suites: Vec<TrialReport>,
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(&a).and_then(|s| writeln!(out, "{s}").map_err(io_err)),
        Command::Verify(a) => return cmd_verify(&a, out, err),
        Command::List => write!(out, "{}", cmd_list()).map_err(io_err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Input(format!("missing required flag --{flag}")))
}

fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    Ok(DensityMatrix::new(read_matrix(path)?)?)
}

fn load_hermitian(path: &Path) -> Result<HermitianMatrix, CliError> {
    Ok(HermitianMatrix::new(read_matrix(path)?)?)
}

fn load_function(text: &str) -> Result<ScalarFunctionSpec, CliError> {
    let loader = |p: &str| {
        read_measure(Path::new(p)).map_err(|e| Error::InvalidParameter(e.to_string()))
    };
    stdfun::parse_spec(text, &loader).map_err(|e| match e {
        Error::UnknownFunction(_) | Error::InvalidParameter(_) => CliError::Input(format!("--fn {text}: {e}")),
        other => CliError::Core(other),
    })
}

fn cmd_compute(a: &ComputeArgs) -> Result<String, CliError> {
    let state = || load_state(required(&a.state, "state")?);
    let state2 = || load_state(required(&a.state2, "state2")?);
    let function = || load_function(required(&a.function, "fn")?);
    let obs_pair = || -> Result<(HermitianMatrix, HermitianMatrix), CliError> {
        let x = load_hermitian(required(&a.obs, "obs")?)?;
        let y = match &a.obs2 {
            Some(p) => load_hermitian(p)?,
            None => x.clone(),
        };
        Ok((x, y))
    };
    let text = match a.quantity {
        Quantity::QuasiEntropy => {
            let spec = a.kernel.as_ref().or(a.function.as_ref());
            let f = load_function(spec.ok_or_else(|| CliError::Input("missing required flag --kernel".into()))?)?;
            let (d1, d2) = (state()?, state2()?);
            let op = match &a.obs {
                Some(p) => read_matrix(p)?,
                None => ComplexMatrix::identity(d1.dim(), d1.dim()),
            };
            format_result(&quantities::quasi_entropy(&f, &op, &d1, &d2)?)
        }
        Quantity::Umegaki => format_g(quantities::umegaki(&state()?, &state2()?)?, 12),
        Quantity::Renyi => {
            let alpha = *required(&a.alpha, "alpha")?;
            format_g(quantities::renyi(alpha, &state()?, &state2()?)?, 12)
        }
        Quantity::Cov => {
            let (x, y) = obs_pair()?;
            format_result(&quantities::sym_cov(&state()?, x.matrix(), y.matrix())?)
        }
        Quantity::GenCov => {
            let (x, y) = obs_pair()?;
            format_result(&quantities::gen_cov(&function()?, &state()?, x.matrix(), y.matrix())?)
        }
        Quantity::Fisher => {
            let (x, y) = obs_pair()?;
            format_result(&quantities::fisher(&function()?, &state()?, x.matrix(), y.matrix())?)
        }
        Quantity::Skew => {
            let x = load_hermitian(required(&a.obs, "obs")?)?;
            format_g(quantities::skew_info(&function()?, &state()?, &x)?, 12)
        }
        Quantity::Wyd => {
            let p = *required(&a.p, "p")?;
            let x = load_hermitian(required(&a.obs, "obs")?)?;
            format_g(quantities::wyd_direct(p, &state()?, &x)?, 12)
        }
    };
    Ok(text)
}

fn format_result(r: &QuantityResult) -> String {
    let (re, im) = (r.re(), r.im());
    if im.abs() <= quantities::LEAKAGE_TOL * (1.0 + re.abs()) {
        format_g(re, 12)
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", format_g(re, 12), format_g(im.abs(), 12))
    }
}

/// `printf("%.{digits}g")`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= p as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match build_report(a) {
        Ok(report) => {
            let text = match a.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable report") + "\n",
                Format::Markdown => render_markdown(&report),
            };
            let written = match &a.report {
                Some(path) => fs::write(path, &text),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write report: {e}");
                return 2;
            }
            for s in &report.suites {
                for f in &s.failures {
                    let _ = writeln!(
                        err,
                        "FAIL {} seed={} trial={} stream={} check={} value={} tol={} {}",
                        s.suite,
                        report.seed,
                        f.trial,
                        f.stream,
                        f.check,
                        f.value.map_or("-".into(), |v| format!("{v:e}")),
                        f.tolerance.map_or("-".into(), |v| format!("{v:e}")),
                        f.message.as_deref().unwrap_or(&f.inputs_digest),
                    );
                }
            }
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn build_report(a: &VerifyArgs) -> Result<ReportFile, CliError> {
    let dims: DimRange = a.dim.parse().map_err(|e: Error| CliError::Input(format!("--dim: {e}")))?;
    let overrides = a
        .tol
        .iter()
        .map(|t| {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("--tol {t}: expected key=value")))?;
            let v: f64 = v.parse().map_err(|_| CliError::Input(format!("--tol {t}: bad number")))?;
            Ok((k.to_string(), v))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse::<Suite>()?]
    };
    let mut used = vec![false; overrides.len()];
    let mut reports = Vec::with_capacity(suites.len());
    for s in suites {
        let mut tol = Tolerances::for_suite(s);
        for (i, (k, v)) in overrides.iter().enumerate() {
            if tol.keys().any(|key| key == k) {
                tol.set(k, *v).map_err(|e| CliError::Input(format!("--tol: {e}")))?;
                used[i] = true;
            }
        }
        reports.push(verify::run_suite(s.name(), a.trials, a.seed, dims, Some(&tol))?);
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(CliError::Input(format!("--tol: no selected suite has a tolerance named `{}`", overrides[i].0)));
    }
    Ok(ReportFile {
        tool: "qig".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: a.seed,
        trials: a.trials,
        dims,
        passed: reports.iter().all(TrialReport::passed),
        suites: reports,
    })
}

fn render_markdown(r: &ReportFile) -> String {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
    let mut s = String::new();
    let _ = writeln!(s, "# qig {} verification report\n", r.version);
    let _ = writeln!(s, "seed {}, trials {}, dims {}-{}\n", r.seed, r.trials, r.dims.min, r.dims.max);
    let _ = writeln!(s, "| suite | trials | min margin | max residual | failures | seconds |");
    let _ = writeln!(s, "|---|---|---|---|---|---|");
    for t in &r.suites {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {:.2} |",
            t.suite,
            t.trials,
            opt(t.min_margin),
            opt(t.max_residual),
            t.failures.len(),
            t.elapsed_seconds
        );
    }
    let _ = writeln!(s, "\nresult: {}", if r.passed { "pass" } else { "FAIL" });
    s
}

/// Text printed by `qig list`.
pub fn cmd_list() -> String {
    let mut s = String::from("functions (standard, f(0) shown):\n");
    for line in [
        "sld f(0)=0.5",
        "harmonic f(0)=0",
        "kubo-mori f(0)=0",
        "wyd:<p> f(0)=p(1-p)",
        "extremal:<lambda> f(0)=2*lambda/(1+lambda)^2",
        "hansen:<file> f(0)=1/sum_k w_k (1+l_k)^2/(2 l_k)",
        "tilde:<spec> f(0)=0 (0.5 when the inner f(0)=0)",
    ] {
        let _ = writeln!(s, "  {line}");
    }
    s.push_str("kernels (quasi-entropy only):\n");
    for line in ["power:<alpha>", "neg-log", "renyi-kernel:<alpha>"] {
        let _ = writeln!(s, "  {line}");
    }
    s.push_str("suites:\n");
    for name in SUITE_NAMES {
        let _ = writeln!(s, "  {name}");
    }
    s.push_str("  all\n");
    s
}
