use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::random::{
    random_centered_observables, random_commuting, random_complex, random_hermitian, random_measure,
    try_random_density,
};
use super::{
    det_inequality_margins, gram_psd_margin, hessian_vs_skew, lemma_commutator_identity, lemma_commuting_residual,
    lemma_cross_residual, cov_gram, skew_gram, StepSchedule,
};
use crate::channels::{self, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    digest_matrices, max_abs, max_abs_diff, relmod_apply, relmod_dense, trace, vectorize, unvectorize,
    ComplexMatrix, DensityMatrix, DENSE_MAX_DIM,
};
use crate::quantities::{quasi_entropy, renyi, skew_identity_residual, skew_info, umegaki, wyd_direct};
use crate::stdfun::{self, ScalarFunctionSpec};

/// Names accepted by [`run_suite`], in reporting order.
pub const SUITE_NAMES: [&str; 14] = [
    "standardness",
    "operator-monotone",
    "scalar-gibi",
    "skew-identity",
    "hessian",
    "lemma-commuting",
    "lemma-cross",
    "monotonicity",
    "data-processing",
    "concavity",
    "det-uncertainty",
    "oracle-equivalence",
    "wyd-consistency",
    "renyi-limit",
];

/// Attempts per trial before a generator error is reported as a failure.
const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Standardness,
    OperatorMonotone,
    ScalarGibi,
    SkewIdentity,
    Hessian,
    LemmaCommuting,
    LemmaCross,
    Monotonicity,
    DataProcessing,
    Concavity,
    DetUncertainty,
    OracleEquivalence,
    WydConsistency,
    RenyiLimit,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Standardness,
        Suite::OperatorMonotone,
        Suite::ScalarGibi,
        Suite::SkewIdentity,
        Suite::Hessian,
        Suite::LemmaCommuting,
        Suite::LemmaCross,
        Suite::Monotonicity,
        Suite::DataProcessing,
        Suite::Concavity,
        Suite::DetUncertainty,
        Suite::OracleEquivalence,
        Suite::WydConsistency,
        Suite::RenyiLimit,
    ];

    pub fn name(self) -> &'static str {
        SUITE_NAMES[self.index()]
    }

    fn index(self) -> usize {
        Suite::ALL.iter().position(|s| *s == self).unwrap()
    }

    /// Tolerance keys and their defaults.
    fn default_tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Suite::Standardness => &[("violation", 1e-9)],
            Suite::OperatorMonotone => &[("loewner", 1e-8), ("pick", 1e-10)],
            Suite::ScalarGibi => &[("margin", 1e-10)],
            Suite::SkewIdentity => &[("residual", 1e-9)],
            Suite::Hessian => &[("relerr", 1e-5)],
            Suite::LemmaCommuting => &[("residual", 1e-6)],
            Suite::LemmaCross => &[("residual", 1e-6), ("identity", 1e-6)],
            Suite::Monotonicity | Suite::DataProcessing | Suite::Concavity => &[("margin", 1e-8)],
            Suite::DetUncertainty => &[("margin", 1e-9), ("psd", 1e-10)],
            Suite::OracleEquivalence => &[("deviation", 1e-10)],
            Suite::WydConsistency => &[("residual", 1e-9)],
            Suite::RenyiLimit => &[("gap", 1e-2), ("decrease", 1e-6)],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SUITE_NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| Suite::ALL[i])
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive range of matrix dimensions drawn per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl DimRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min < 2 || max < min || max > DENSE_MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "dimension range {min}-{max} must satisfy 2 <= min <= max <= {DENSE_MAX_DIM}"
            )));
        }
        Ok(DimRange { min, max })
    }

    pub fn fixed(n: usize) -> Result<Self> {
        DimRange::new(n, n)
    }
}

impl FromStr for DimRange {
    type Err = Error;

    /// `"4"` or `"2-5"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse dimension `{t}`")))
        };
        match s.split_once('-') {
            Some((a, b)) => DimRange::new(parse(a)?, parse(b)?),
            None => DimRange::fixed(parse(s)?),
        }
    }
}

/// Per-suite tolerance table; keys depend on the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn for_suite(suite: Suite) -> Self {
        Tolerances(suite.default_tolerances().iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    /// Replaces the tolerance named `key`; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {key}={value}")));
        }
        match self.0.get_mut(key) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::InvalidParameter(format!(
                "unknown tolerance `{key}` (expected one of {})",
                self.0.keys().cloned().collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: u64,
    /// RNG stream of the trial: `suite_index << 32 | trial`, under the suite seed.
    pub stream: u64,
    pub inputs_digest: String,
    pub check: String,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    pub dims: DimRange,
    pub tolerances: Tolerances,
    /// Smallest (normalized) margin; `None` when no margin was measured.
    pub min_margin: Option<f64>,
    /// Largest residual; `None` when no residual was measured.
    pub max_residual: Option<f64>,
    pub failures: Vec<Failure>,
    pub elapsed_seconds: f64,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Margin,
    Residual,
}

#[derive(Debug, Clone)]
struct Measurement {
    key: &'static str,
    kind: Kind,
    value: f64,
    /// Overrides the table entry with `max(table, adaptive)`.
    adaptive: Option<f64>,
}

impl Measurement {
    fn margin(key: &'static str, value: f64) -> Self {
        Measurement { key, kind: Kind::Margin, value, adaptive: None }
    }

    fn residual(key: &'static str, value: f64) -> Self {
        Measurement { key, kind: Kind::Residual, value, adaptive: None }
    }

    fn adaptive(mut self, tol: f64) -> Self {
        self.adaptive = Some(tol);
        self
    }
}

struct TrialOutcome {
    digest: String,
    measurements: Vec<Measurement>,
}

struct Ctx<'a> {
    rng: ChaCha8Rng,
    n: usize,
    schedule: &'a StepSchedule,
    /// Three-level schedule for the derivative lemmas, whose expected values carry
    /// `D⁻¹` and so amplify the fourth-order remainder of a two-level extrapolation.
    lemma_schedule: &'a StepSchedule,
}

/// Runs one named suite. `trials = 0` gives an empty passing report.
pub fn run_suite(name: &str, trials: u64, seed: u64, dims: DimRange, tolerances: Option<&Tolerances>) -> Result<TrialReport> {
    let suite: Suite = name.parse()?;
    let tol = tolerances.cloned().unwrap_or_else(|| Tolerances::for_suite(suite));
    Ok(execute(suite, trials, seed, dims, tol))
}

/// Runs every suite with its default tolerances.
pub fn run_all(trials: u64, seed: u64, dims: DimRange) -> Vec<TrialReport> {
    Suite::ALL
        .iter()
        .map(|&s| execute(s, trials, seed, dims, Tolerances::for_suite(s)))
        .collect()
}

fn execute(suite: Suite, trials: u64, seed: u64, dims: DimRange, tol: Tolerances) -> TrialReport {
    let start = Instant::now();
    let schedule = StepSchedule::default();
    let lemma_schedule = StepSchedule::new(vec![1e-2, 1e-3, 1e-4]).expect("valid schedule");
    let outcomes: Vec<(u64, u64, Result<TrialOutcome>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let stream = ((suite.index() as u64) << 32) | trial;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let n = rng.random_range(dims.min..=dims.max);
            let mut ctx = Ctx { rng, n, schedule: &schedule, lemma_schedule: &lemma_schedule };
            let mut last = Err(Error::InvalidParameter("no attempt".into()));
            for _ in 0..MAX_ATTEMPTS {
                last = run_trial(suite, &mut ctx);
                if last.is_ok() {
                    break;
                }
            }
            (trial, stream, last)
        })
        .collect();

    let mut min_margin: Option<f64> = None;
    let mut max_residual: Option<f64> = None;
    let mut failures = Vec::new();
    for (trial, stream, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                for m in o.measurements {
                    let base = tol.get(m.key);
                    let allowed = m.adaptive.map_or(base, |a| a.max(base));
                    let bad = match m.kind {
                        Kind::Margin => {
                            min_margin = Some(min_margin.map_or(m.value, |v| v.min(m.value)));
                            !(m.value >= -allowed)
                        }
                        Kind::Residual => {
                            max_residual = Some(max_residual.map_or(m.value, |v| v.max(m.value)));
                            !(m.value <= allowed)
                        }
                    };
                    if bad {
                        failures.push(Failure {
                            trial,
                            stream,
                            inputs_digest: o.digest.clone(),
                            check: m.key.to_string(),
                            value: m.value.is_finite().then_some(m.value),
                            tolerance: Some(allowed),
                            message: None,
                        });
                    }
                }
            }
            Err(e) => failures.push(Failure {
                trial,
                stream,
                inputs_digest: String::new(),
                check: "error".into(),
                value: None,
                tolerance: None,
                message: Some(e.to_string()),
            }),
        }
    }
    TrialReport {
        suite,
        seed,
        trials,
        dims,
        tolerances: tol,
        min_margin,
        max_residual,
        failures,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

fn run_trial(suite: Suite, ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    match suite {
        Suite::Standardness => standardness(ctx),
        Suite::OperatorMonotone => operator_monotone(ctx),
        Suite::ScalarGibi => scalar_gibi(ctx),
        Suite::SkewIdentity => skew_identity(ctx),
        Suite::Hessian => hessian(ctx),
        Suite::LemmaCommuting => lemma_commuting(ctx),
        Suite::LemmaCross => lemma_cross(ctx),
        Suite::Monotonicity => monotonicity(ctx),
        Suite::DataProcessing => data_processing(ctx),
        Suite::Concavity => concavity(ctx),
        Suite::DetUncertainty => det_uncertainty(ctx),
        Suite::OracleEquivalence => oracle_equivalence(ctx),
        Suite::WydConsistency => wyd_consistency(ctx),
        Suite::RenyiLimit => renyi_limit(ctx),
    }
}

/// A standard function drawn from the catalog, parameters included.
fn random_standard(rng: &mut ChaCha8Rng, nonzero_at_zero: bool) -> Result<ScalarFunctionSpec> {
    let pick = rng.random_range(0..if nonzero_at_zero { 4 } else { 6 });
    match pick {
        0 => Ok(stdfun::sld()),
        1 => stdfun::wyd(rng.random_range(0.05..0.95)),
        2 => stdfun::extremal_inverse(rng.random_range(0.05..=1.0)),
        3 => {
            let k = rng.random_range(1..=3);
            let mut mu = random_measure(rng, k)?;
            if nonzero_at_zero && mu.atoms().contains(&0.0) {
                mu = stdfun::DiscreteMeasure::delta(0.5)?;
            }
            Ok(stdfun::hansen_mixture(&mu))
        }
        4 => Ok(stdfun::harmonic()),
        _ => Ok(stdfun::kubo_mori()),
    }
}

/// Floor for random states: between `1e-3/n` and `0.1/n`, log-uniform.
fn state(ctx: &mut Ctx<'_>) -> Result<DensityMatrix> {
    let n = ctx.n;
    let floor = 10f64.powf(ctx.rng.random_range(-3.0..-1.0)) / n as f64;
    try_random_density(&mut ctx.rng, n, floor)
}

/// States for finite-difference suites keep eigenvalues away from 0.
fn fd_state(ctx: &mut Ctx<'_>) -> Result<DensityMatrix> {
    floored_state(ctx, 0.02, 0.2)
}

fn lemma_state(ctx: &mut Ctx<'_>) -> Result<DensityMatrix> {
    floored_state(ctx, 0.1, 0.3)
}

/// Floor drawn uniformly from `[lo/n, hi/n)`.
fn floored_state(ctx: &mut Ctx<'_>, lo: f64, hi: f64) -> Result<DensityMatrix> {
    let n = ctx.n;
    let floor = ctx.rng.random_range(lo..hi) / n as f64;
    try_random_density(&mut ctx.rng, n, floor)
}

fn outcome(digest: String, measurements: Vec<Measurement>) -> Result<TrialOutcome> {
    Ok(TrialOutcome { digest, measurements })
}

fn standardness(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = random_standard(&mut ctx.rng, false)?;
    let tilde = stdfun::tilde_transform(&f)?;
    let grid = stdfun::probe_grid();
    let a = stdfun::check_standard(&f, &grid).max_violation();
    let b = stdfun::check_standard(&tilde, &grid).max_violation();
    outcome(
        digest_name(&f),
        vec![Measurement::residual("violation", a), Measurement::residual("violation", b)],
    )
}

fn operator_monotone(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let base = random_standard(&mut ctx.rng, false)?;
    let f = if ctx.rng.random_bool(0.5) { stdfun::tilde_transform(&base)? } else { base };
    let seed = ctx.rng.random();
    let r = stdfun::check_operator_monotone(&f, seed, 10, ctx.n)?;
    let mut ms = vec![Measurement::margin("loewner", r.loewner_min_margin)];
    if let Some(p) = r.pick_min_margin {
        ms.push(Measurement::margin("pick", p));
    }
    outcome(digest_name(&f), ms)
}

fn scalar_gibi(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = random_standard(&mut ctx.rng, false)?;
    let g = random_standard(&mut ctx.rng, false)?;
    let grid = stdfun::probe_grid();
    let r = stdfun::scalar_inequality_check(&f, &g, &grid);
    // Rearranged form g(x) ≥ 2g(0)((1+x)/2 − f̃(x)), the single-observable case of the
    // determinant bound.
    let tilde = stdfun::tilde_transform(&f)?;
    let g0 = g.value_at_zero();
    let pointwise = grid
        .iter()
        .map(|&x| g.eval(x) - 2.0 * g0 * ((1.0 + x) / 2.0 - tilde.eval(x)))
        .fold(f64::INFINITY, f64::min);
    outcome(
        format!("{}|{}", f.name(), g.name()),
        vec![Measurement::margin("margin", r.min_margin), Measurement::margin("margin", pointwise)],
    )
}

fn skew_identity(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = match ctx.rng.random_range(0..4) {
        0 => stdfun::sld(),
        1 => stdfun::wyd(0.3)?,
        2 => stdfun::wyd(0.5)?,
        _ => {
            let k = ctx.rng.random_range(1..=3);
            stdfun::hansen_mixture(&random_measure(&mut ctx.rng, k)?)
        }
    };
    let d = state(ctx)?;
    let x = random_centered_observables(&mut ctx.rng, &d, 1)?.remove(0);
    let r = skew_identity_residual(&f, &d, &x)?;
    outcome(
        digest_matrices(f.name(), &[d.matrix(), x.matrix()]),
        vec![Measurement::residual("residual", r.relative())],
    )
}

fn hessian(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = random_standard(&mut ctx.rng, true)?;
    let d = fd_state(ctx)?;
    let x = random_centered_observables(&mut ctx.rng, &d, 1)?.remove(0);
    let h = hessian_vs_skew(&f, &d, &x, ctx.schedule)?;
    outcome(
        digest_matrices(f.name(), &[d.matrix(), x.matrix()]),
        vec![
            Measurement::residual("relerr", h.relerr).adaptive(h.tolerance),
            Measurement::residual("relerr", h.identity_relerr).adaptive(h.tolerance),
        ],
    )
}

/// Smooth kernels for the derivative lemmas; `x³` only when `with_cube`.
fn random_kernel(rng: &mut ChaCha8Rng, with_cube: bool) -> Result<ScalarFunctionSpec> {
    match rng.random_range(0..if with_cube { 6 } else { 5 }) {
        0 => Ok(stdfun::neg_log()),
        1 => stdfun::power([0.25, 0.5, 0.75][rng.random_range(0..3)]),
        2 => Ok(ScalarFunctionSpec::custom("square", |x| x * x, 0.0)),
        3 => stdfun::renyi_kernel(rng.random_range(-0.9..0.9)),
        4 => stdfun::tilde_transform(&random_standard(rng, false)?),
        _ => Ok(ScalarFunctionSpec::custom("cube", |x| x * x * x, 0.0)),
    }
}

fn lemma_commuting(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = random_kernel(&mut ctx.rng, false)?;
    let d = lemma_state(ctx)?;
    let a = random_commuting(&mut ctx.rng, &d);
    let b = random_commuting(&mut ctx.rng, &d);
    let c = lemma_commuting_residual(&f, &d, &a, &b, ctx.lemma_schedule)?;
    outcome(
        digest_matrices(f.name(), &[d.matrix(), a.matrix(), b.matrix()]),
        vec![Measurement::residual("residual", c.residual).adaptive(c.tolerance)],
    )
}

fn lemma_cross(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = random_kernel(&mut ctx.rng, true)?;
    let d = lemma_state(ctx)?;
    let a = random_commuting(&mut ctx.rng, &d);
    let x = random_hermitian(&mut ctx.rng, ctx.n);
    let cross = lemma_cross_residual(&f, &d, &a, &x, ctx.lemma_schedule)?;
    let ident = lemma_commutator_identity(&f, &d, &x, ctx.lemma_schedule)?;
    outcome(
        digest_matrices(f.name(), &[d.matrix(), a.matrix(), x.matrix()]),
        vec![
            Measurement::residual("residual", cross.residual).adaptive(cross.tolerance),
            Measurement::residual("identity", ident.residual).adaptive(ident.tolerance),
        ],
    )
}

fn random_channel(ctx: &mut Ctx<'_>) -> Result<KrausChannel> {
    let n_in = ctx.n;
    let n_out = ctx.rng.random_range(2..=n_in);
    let min_k = n_in.div_ceil(n_out);
    let k = ctx.rng.random_range(min_k..=min_k + 2);
    channels::random_channel_with(&mut ctx.rng, n_in, n_out, k)
}

fn monotonicity(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = stdfun::power([0.25, 0.5, 0.75][ctx.rng.random_range(0..3)])?;
    let ch = random_channel(ctx)?;
    let a = random_complex(&mut ctx.rng, ch.n_out());
    let d1 = state(ctx)?;
    let d2 = state(ctx)?;
    let m = channels::monotonicity_margin(&f, &a, &d1, &d2, &ch)?;
    outcome(
        digest_matrices(f.name(), &[&a, d1.matrix(), d2.matrix()]),
        vec![Measurement::margin("margin", m)],
    )
}

fn data_processing(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = if ctx.rng.random_bool(0.5) {
        stdfun::neg_log()
    } else {
        stdfun::renyi_kernel(ctx.rng.random_range(-0.9..0.9))?
    };
    let ch = random_channel(ctx)?;
    let d1 = state(ctx)?;
    let d2 = state(ctx)?;
    let m = channels::data_processing_margin(&f, &d1, &d2, &ch)?;
    outcome(
        digest_matrices(f.name(), &[d1.matrix(), d2.matrix()]),
        vec![Measurement::margin("margin", m)],
    )
}

fn concavity(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = if ctx.rng.random_bool(0.5) {
        stdfun::power([0.25, 0.5, 0.75][ctx.rng.random_range(0..3)])?
    } else {
        random_standard(&mut ctx.rng, false)?
    };
    let lambda = ctx.rng.random_range(1..=9) as f64 / 10.0;
    let a = random_complex(&mut ctx.rng, ctx.n);
    let (e1, e2, f1, f2) = (state(ctx)?, state(ctx)?, state(ctx)?, state(ctx)?);
    let m = channels::concavity_margin(&f, &a, (&e1, &e2), (&f1, &f2), lambda)?;
    outcome(
        digest_matrices(f.name(), &[&a, e1.matrix(), e2.matrix(), f1.matrix(), f2.matrix()]),
        vec![Measurement::margin("margin", m)],
    )
}

fn det_uncertainty(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = random_standard(&mut ctx.rng, false)?;
    let g = random_standard(&mut ctx.rng, false)?;
    let m = ctx.rng.random_range(1..=3usize).min(ctx.n * ctx.n - 1);
    let d = state(ctx)?;
    let obs = random_centered_observables(&mut ctx.rng, &d, m)?;
    let r = det_inequality_margins(&f, &g, &d, &obs)?;
    let psd_cov = gram_psd_margin(&cov_gram(&g, &d, &obs)?)?;
    let psd_skew = gram_psd_margin(&skew_gram(&f, &d, &obs)?)?;
    let mut mats: Vec<&ComplexMatrix> = vec![d.matrix()];
    mats.extend(obs.iter().map(|o| o.matrix()));
    outcome(
        digest_matrices(&format!("{}|{}", f.name(), g.name()), &mats),
        vec![
            Measurement::margin("margin", r.margin_tuj / r.scale.max(f64::MIN_POSITIVE)),
            Measurement::margin("margin", r.margin_tvegso / r.scale.max(f64::MIN_POSITIVE)),
            Measurement::margin("psd", psd_cov),
            Measurement::margin("psd", psd_skew),
        ],
    )
}

fn oracle_equivalence(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let f = match ctx.rng.random_range(0..4) {
        0 => stdfun::power(ctx.rng.random_range(0.05..0.95))?,
        1 => stdfun::neg_log(),
        2 => stdfun::tilde_transform(&random_standard(&mut ctx.rng, false)?)?,
        _ => random_standard(&mut ctx.rng, false)?,
    };
    let d1 = state(ctx)?;
    let d2 = state(ctx)?;
    let a = random_complex(&mut ctx.rng, ctx.n);
    let structured = relmod_apply(&f, &d1, &d2, &a)?;
    let dense = relmod_dense(&f, &d1, &d2)?;
    let via_dense = unvectorize(&(&dense.matrix * vectorize(&a)), ctx.n);
    let deviation = max_abs_diff(&structured, &via_dense) / (1.0 + max_abs(&structured));

    let alpha = ctx.rng.random_range(0.05..0.95);
    let pw = stdfun::power(alpha)?;
    let qe = quasi_entropy(&pw, &a, &d1, &d2)?.real()?;
    let d2a = d2.spectral().map(&|x: f64| x.powf(alpha))?;
    let d1a = d1.spectral().map(&|x: f64| x.powf(1.0 - alpha))?;
    let direct = trace(&(a.adjoint() * d2a * &a * d1a)).re;
    let trace_gap = (qe - direct).abs() / (1.0 + direct.abs());
    outcome(
        digest_matrices(f.name(), &[&a, d1.matrix(), d2.matrix()]),
        vec![Measurement::residual("deviation", deviation), Measurement::residual("deviation", trace_gap)],
    )
}

fn wyd_consistency(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let p = ctx.rng.random_range(0.01..0.99);
    let d = state(ctx)?;
    let x = random_hermitian(&mut ctx.rng, ctx.n);
    let spectral = skew_info(&stdfun::wyd(p)?, &d, &x)?;
    let direct = wyd_direct(p, &d, &x)?;
    outcome(
        digest_matrices(&format!("wyd:{p}"), &[d.matrix(), x.matrix()]),
        vec![Measurement::residual("residual", (spectral - direct).abs() / (1.0 + direct.abs()))],
    )
}

fn renyi_limit(ctx: &mut Ctx<'_>) -> Result<TrialOutcome> {
    let d1 = fd_state(ctx)?;
    let d2 = fd_state(ctx)?;
    let u = umegaki(&d1, &d2)?;
    let gaps: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&a| renyi(a, &d1, &d2).map(|r| (r - u).abs()))
        .collect::<Result<_>>()?;
    // |gap| is first order in α with a coefficient of either sign, so between 0.1 and
    // 0.01 the Rényi value may cross the Umegaki value; only the tail must shrink.
    let decrease = gaps[1] - gaps[2];
    outcome(
        digest_matrices("renyi", &[d1.matrix(), d2.matrix()]),
        vec![Measurement::residual("gap", gaps[2]), Measurement::margin("decrease", decrease)],
    )
}

fn digest_name(f: &ScalarFunctionSpec) -> String {
    digest_matrices(f.name(), &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> DimRange {
        DimRange::new(2, 4).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn zero_trials_is_empty_pass() {
        let r = run_suite("hessian", 0, 1, dims(), None).unwrap();
        assert!(r.passed());
        assert_eq!(r.min_margin, None);
        assert_eq!(r.max_residual, None);
    }

    #[test]
    fn deterministic() {
        let a = run_suite("det-uncertainty", 6, 3, dims(), None).unwrap();
        let b = run_suite("det-uncertainty", 6, 3, dims(), None).unwrap();
        assert_eq!(a.min_margin, b.min_margin);
        assert_eq!(a.failures, b.failures);
    }

    #[test]
    fn every_suite_passes_small_runs() {
        for s in Suite::ALL {
            let r = run_suite(s.name(), 4, 9, dims(), None).unwrap();
            assert!(r.passed(), "{}: {:?}", s, r.failures);
        }
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::for_suite(Suite::Hessian);
        t.set("relerr", 1e-4).unwrap();
        assert_eq!(t.get("relerr"), 1e-4);
        assert!(t.set("margin", 1.0).is_err());
    }

    #[test]
    fn dim_range_parsing() {
        assert_eq!("4".parse::<DimRange>().unwrap(), DimRange { min: 4, max: 4 });
        assert_eq!("2-5".parse::<DimRange>().unwrap(), DimRange { min: 2, max: 5 });
        assert!("1".parse::<DimRange>().is_err());
        assert!("5-2".parse::<DimRange>().is_err());
    }

    #[test]
    fn failing_tolerance_is_reported() {
        let mut t = Tolerances::for_suite(Suite::RenyiLimit);
        t.set("gap", 0.0).unwrap();
        let r = run_suite("renyi-limit", 3, 0, dims(), Some(&t)).unwrap();
        assert_eq!(r.failures.len(), 3);
        assert!(r.max_residual.unwrap() > 0.0);
    }
}
