//! Standard operator monotone functions and the kernels used with quasi-entropies.
//!
//! A function `f: (0,∞) → (0,∞)` is *standard* when it is operator monotone,
//! `f(1) = 1` and `x f(1/x) = f(x)`. Inverses of standard functions are probability
//! mixtures of the extremal kernels
//!
//! ```text
//! g_λ(x) = (1+λ)/2 · (1/(x+λ) + 1/(1+xλ)),   0 ≤ λ ≤ 1,
//! ```
//!
//! which [`hansen_mixture`] builds from a [`DiscreteMeasure`]. [`tilde_transform`] maps a
//! metric function `f` to the covariance kernel `f̃(x) = ((x+1) - (x-1)² f(0)/f(x))/2`.
//!
//! Every entry carries its value at zero and, where known in closed form, its second
//! derivative at one. Operator monotonicity is asserted for catalog entries and can be
//! probed numerically with [`check_operator_monotone`].

use std::fmt;
use std::sync::Arc;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermitianMatrix, ScalarFn, C64};
use crate::verify::random;

/// Violations up to this size pass [`check_standard`].
pub const STANDARD_TOL: f64 = 1e-9;
/// Smallest eigenvalue of `f(B) - f(A)` accepted by the Loewner sampler.
pub const LOEWNER_TOL: f64 = 1e-8;
/// Smallest imaginary part accepted by the Pick sampler.
pub const PICK_TOL: f64 = 1e-10;
/// Smallest margin accepted by [`scalar_inequality_check`].
pub const SCALAR_INEQUALITY_TOL: f64 = 1e-10;
/// Removable singularities at `x = 1` are replaced by a Taylor polynomial inside this radius.
const TAYLOR_RADIUS: f64 = 1e-4;

/// Finite probability measure on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "measure needs matching nonempty atoms/weights, got {} and {}",
                atoms.len(),
                weights.len()
            )));
        }
        if let Some(a) = atoms.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidParameter(format!("atom {a} outside [0,1]")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("negative or non-finite weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    pub fn delta(lambda: f64) -> Result<Self> {
        Self::new(vec![lambda], vec![1.0])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Flags {
    pub claims_standard: bool,
    /// Operator monotone increasing.
    pub claims_operator_monotone: bool,
    pub claims_operator_decreasing: bool,
}

#[derive(Clone)]
pub enum FunctionKind {
    /// `(1+x)/2`
    Sld,
    /// `2x/(x+1)`
    Harmonic,
    /// `p(1-p)(x-1)² / ((x^p - 1)(x^{1-p} - 1))`
    Wyd(f64),
    /// `(x-1)/log x`
    KuboMori,
    /// `1/g_λ`
    ExtremalInverse(f64),
    /// `g_λ` itself; decreasing, not standard.
    ExtremalKernel(f64),
    /// `1/f = Σ w_k g_{λ_k}`
    Hansen(DiscreteMeasure),
    Tilde(Box<ScalarFunctionSpec>),
    /// `x^α`
    Power(f64),
    /// `-log x`
    NegLog,
    /// `(1 - x^α)/(α(1-α))`
    RenyiKernel(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionKind::Sld => write!(f, "Sld"),
            FunctionKind::Harmonic => write!(f, "Harmonic"),
            FunctionKind::Wyd(p) => write!(f, "Wyd({p})"),
            FunctionKind::KuboMori => write!(f, "KuboMori"),
            FunctionKind::ExtremalInverse(l) => write!(f, "ExtremalInverse({l})"),
            FunctionKind::ExtremalKernel(l) => write!(f, "ExtremalKernel({l})"),
            FunctionKind::Hansen(m) => write!(f, "Hansen({m:?})"),
            FunctionKind::Tilde(inner) => write!(f, "Tilde({inner:?})"),
            FunctionKind::Power(a) => write!(f, "Power({a})"),
            FunctionKind::NegLog => write!(f, "NegLog"),
            FunctionKind::RenyiKernel(a) => write!(f, "RenyiKernel({a})"),
            FunctionKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A real function on the positive half-line together with the metadata the theorems use.
#[derive(Debug, Clone)]
pub struct ScalarFunctionSpec {
    name: String,
    kind: FunctionKind,
    value_at_zero: f64,
    second_derivative_at_one: Option<f64>,
    flags: Flags,
}

impl ScalarFn for ScalarFunctionSpec {
    fn eval(&self, x: f64) -> f64 {
        ScalarFunctionSpec::eval(self, x)
    }
}

impl ScalarFunctionSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// `lim_{x→0⁺} f(x)`, stored in closed form (may be `+∞` for kernels such as `-log`).
    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    pub fn analytic_second_derivative_at_one(&self) -> Option<f64> {
        self.second_derivative_at_one
    }

    pub fn is_standard(&self) -> bool {
        self.flags.claims_standard
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            FunctionKind::Sld => (1.0 + x) / 2.0,
            FunctionKind::Harmonic => 2.0 * x / (x + 1.0),
            FunctionKind::Wyd(p) => wyd_eval(*p, x),
            FunctionKind::KuboMori => {
                let e = x - 1.0;
                if e.abs() < TAYLOR_RADIUS {
                    1.0 + e / 2.0 - e * e / 12.0
                } else {
                    e / x.ln()
                }
            }
            FunctionKind::ExtremalInverse(l) => 1.0 / extremal_kernel(*l, x),
            FunctionKind::ExtremalKernel(l) => extremal_kernel(*l, x),
            FunctionKind::Hansen(mu) => 1.0 / mu.iter().map(|(l, w)| w * extremal_kernel(l, x)).sum::<f64>(),
            FunctionKind::Tilde(f) => tilde_eval(f, x),
            FunctionKind::Power(a) => x.powf(*a),
            FunctionKind::NegLog => -x.ln(),
            FunctionKind::RenyiKernel(a) => -(a * x.ln()).exp_m1() / (a * (1.0 - a)),
            FunctionKind::Custom(f) => f(x),
        }
    }

    /// Analytic continuation to complex arguments, where a closed form is known.
    pub fn eval_complex(&self, z: C64) -> Option<C64> {
        let one = C64::new(1.0, 0.0);
        let v = match &self.kind {
            FunctionKind::Sld => (one + z) / 2.0,
            FunctionKind::Harmonic => z * 2.0 / (z + one),
            FunctionKind::Wyd(p) => {
                let p = *p;
                (z - one).powi(2) * (p * (1.0 - p)) / ((z.powf(p) - one) * (z.powf(1.0 - p) - one))
            }
            FunctionKind::KuboMori => (z - one) / z.ln(),
            FunctionKind::ExtremalInverse(l) => one / extremal_kernel_complex(*l, z),
            FunctionKind::ExtremalKernel(l) => extremal_kernel_complex(*l, z),
            FunctionKind::Hansen(mu) => {
                one / mu
                    .iter()
                    .map(|(l, w)| extremal_kernel_complex(l, z) * w)
                    .sum::<C64>()
            }
            FunctionKind::Tilde(f) => {
                let f0 = f.value_at_zero;
                if f0 == 0.0 {
                    (z + one) / 2.0
                } else {
                    ((z + one) - (z - one).powi(2) * f0 / f.eval_complex(z)?) / 2.0
                }
            }
            FunctionKind::Power(a) => z.powf(*a),
            FunctionKind::NegLog => -z.ln(),
            FunctionKind::RenyiKernel(a) => (one - z.powf(*a)) / (a * (1.0 - a)),
            FunctionKind::Custom(_) => return None,
        };
        Some(v)
    }

    /// `F''(1)`: the closed form when known, otherwise a Richardson-extrapolated central
    /// difference (see [`second_derivative_at_one`]).
    pub fn second_derivative_at_one(&self) -> Result<f64> {
        second_derivative_at_one(self)
    }

    /// User-supplied function; no structural claims until [`Self::claim_standard`].
    pub fn custom<F>(name: &str, f: F, value_at_zero: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarFunctionSpec {
            name: name.to_string(),
            kind: FunctionKind::Custom(Arc::new(f)),
            value_at_zero,
            second_derivative_at_one: None,
            flags: Flags::default(),
        }
    }

    /// Marks the function standard after it passes [`check_standard`] on the probe grid.
    /// Operator monotonicity still has to be claimed separately.
    pub fn claim_standard(mut self) -> Result<Self> {
        let report = check_standard(&self, &probe_grid());
        if !report.pass {
            return Err(Error::Precondition(format!(
                "{} fails standardness checks: {report:?}",
                self.name
            )));
        }
        self.flags.claims_standard = true;
        Ok(self)
    }

    /// Asserts operator monotonicity for a user function. Only accepted after a Loewner
    /// sampling run finds no counterexample.
    pub fn claim_operator_monotone(mut self, seed: u64) -> Result<Self> {
        let report = check_operator_monotone(&self, seed, 200, 3)?;
        if !report.pass {
            return Err(Error::Precondition(format!(
                "{} fails operator monotonicity sampling: {report:?}",
                self.name
            )));
        }
        self.flags.claims_operator_monotone = true;
        Ok(self)
    }
}

fn wyd_eval(p: f64, x: f64) -> f64 {
    let e = x - 1.0;
    if e.abs() < TAYLOR_RADIUS {
        return 1.0 + e / 2.0 - (1.0 - p + p * p) / 12.0 * e * e;
    }
    let l = x.ln();
    p * (1.0 - p) * e * e / ((p * l).exp_m1() * ((1.0 - p) * l).exp_m1())
}

fn extremal_kernel(l: f64, x: f64) -> f64 {
    (1.0 + l) / 2.0 * (1.0 / (x + l) + 1.0 / (1.0 + x * l))
}

fn extremal_kernel_complex(l: f64, z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    (one / (z + l) + one / (z * l + one)) * ((1.0 + l) / 2.0)
}

fn tilde_eval(f: &ScalarFunctionSpec, x: f64) -> f64 {
    let f0 = f.value_at_zero;
    if f0 == 0.0 {
        (x + 1.0) / 2.0
    } else {
        let e = x - 1.0;
        ((x + 1.0) - e * e * f0 / f.eval(x)) / 2.0
    }
}

fn standard(name: String, kind: FunctionKind, value_at_zero: f64, second: f64) -> ScalarFunctionSpec {
    ScalarFunctionSpec {
        name,
        kind,
        value_at_zero,
        second_derivative_at_one: Some(second),
        flags: Flags {
            claims_standard: true,
            claims_operator_monotone: true,
            claims_operator_decreasing: false,
        },
    }
}

/// `f(x) = (1+x)/2`, the symmetric logarithmic derivative metric.
pub fn sld() -> ScalarFunctionSpec {
    standard("sld".into(), FunctionKind::Sld, 0.5, 0.0)
}

/// `f(x) = 2x/(x+1)`.
pub fn harmonic() -> ScalarFunctionSpec {
    standard("harmonic".into(), FunctionKind::Harmonic, 0.0, -0.5)
}

/// Wigner–Yanase–Dyson function `f_p`, `0 < p < 1`.
pub fn wyd(p: f64) -> Result<ScalarFunctionSpec> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("wyd parameter p={p} must lie in (0,1)")));
    }
    Ok(standard(
        format!("wyd:{p}"),
        FunctionKind::Wyd(p),
        p * (1.0 - p),
        -(1.0 - p + p * p) / 6.0,
    ))
}

/// `f(x) = (x-1)/log x`.
pub fn kubo_mori() -> ScalarFunctionSpec {
    standard("kubo-mori".into(), FunctionKind::KuboMori, 0.0, -1.0 / 6.0)
}

/// The standard function `1/g_λ`.
pub fn extremal_inverse(lambda: f64) -> Result<ScalarFunctionSpec> {
    check_lambda(lambda)?;
    let l = lambda;
    Ok(standard(
        format!("extremal:{l}"),
        FunctionKind::ExtremalInverse(l),
        2.0 * l / ((1.0 + l) * (1.0 + l)),
        0.5 - (1.0 + l * l) / ((1.0 + l) * (1.0 + l)),
    ))
}

/// The extremal kernel `g_λ(x) = (1+λ)/2 · (1/(x+λ) + 1/(1+xλ))`.
///
/// `g_0(x) = (x+1)/(2x)` is the largest and `g_1(x) = 2/(x+1)` the smallest member.
pub fn extremal_g(lambda: f64) -> Result<ScalarFunctionSpec> {
    check_lambda(lambda)?;
    let l = lambda;
    Ok(ScalarFunctionSpec {
        name: format!("g:{l}"),
        kind: FunctionKind::ExtremalKernel(l),
        value_at_zero: if l == 0.0 {
            f64::INFINITY
        } else {
            (1.0 + l) * (1.0 + l) / (2.0 * l)
        },
        second_derivative_at_one: Some((1.0 + l * l) / ((1.0 + l) * (1.0 + l))),
        flags: Flags {
            claims_standard: false,
            claims_operator_monotone: false,
            claims_operator_decreasing: true,
        },
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda={lambda} must lie in [0,1]")));
    }
    Ok(())
}

/// Standard function `f` with `1/f(x) = Σ_k w_k g_{λ_k}(x)`.
pub fn hansen_mixture(mu: &DiscreteMeasure) -> ScalarFunctionSpec {
    let inv_at_zero: f64 = mu
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(l, w)| if l == 0.0 { f64::INFINITY } else { w * (1.0 + l) * (1.0 + l) / (2.0 * l) })
        .sum();
    let inv_second: f64 = mu.iter().map(|(l, w)| w * (1.0 + l * l) / ((1.0 + l) * (1.0 + l))).sum();
    let parts: Vec<String> = mu.iter().map(|(l, w)| format!("{l}@{w}")).collect();
    standard(
        format!("hansen[{}]", parts.join(",")),
        FunctionKind::Hansen(mu.clone()),
        1.0 / inv_at_zero,
        0.5 - inv_second,
    )
}

/// `f̃(x) = ((x+1) - (x-1)² f(0)/f(x)) / 2`, which is again standard.
///
/// When `f(0) = 0` the correction term vanishes and `f̃(x) = (x+1)/2`.
pub fn tilde_transform(f: &ScalarFunctionSpec) -> Result<ScalarFunctionSpec> {
    if !f.flags.claims_standard {
        return Err(Error::Precondition(format!("{} is not flagged standard", f.name)));
    }
    if let Some(x) = probe_grid().into_iter().find(|&x| !(f.eval(x) > 0.0)) {
        return Err(Error::Precondition(format!("{} is not positive at {x}", f.name)));
    }
    let f0 = f.value_at_zero;
    Ok(standard(
        format!("tilde({})", f.name),
        FunctionKind::Tilde(Box::new(f.clone())),
        if f0 == 0.0 { 0.5 } else { 0.0 },
        -f0,
    ))
}

/// `x^α`; operator monotone for `0 ≤ α ≤ 1`, standard only for `α = 1/2`.
pub fn power(alpha: f64) -> Result<ScalarFunctionSpec> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("power exponent {alpha}")));
    }
    let value_at_zero = if alpha > 0.0 {
        0.0
    } else if alpha == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(ScalarFunctionSpec {
        name: format!("power:{alpha}"),
        kind: FunctionKind::Power(alpha),
        value_at_zero,
        second_derivative_at_one: Some(alpha * (alpha - 1.0)),
        flags: Flags {
            claims_standard: alpha == 0.5,
            claims_operator_monotone: (0.0..=1.0).contains(&alpha),
            claims_operator_decreasing: (-1.0..=0.0).contains(&alpha),
        },
    })
}

/// `-log x`; quasi-entropy with this kernel and `A = I` is the Umegaki relative entropy.
pub fn neg_log() -> ScalarFunctionSpec {
    ScalarFunctionSpec {
        name: "neg-log".into(),
        kind: FunctionKind::NegLog,
        value_at_zero: f64::INFINITY,
        second_derivative_at_one: Some(1.0),
        flags: Flags {
            claims_standard: false,
            claims_operator_monotone: false,
            claims_operator_decreasing: true,
        },
    }
}

/// `(1 - x^α)/(α(1-α))` for `α ∈ (-1, 1) \ {0}`; tends to `-log x` as `α → 0`.
pub fn renyi_kernel(alpha: f64) -> Result<ScalarFunctionSpec> {
    if !(alpha > -1.0 && alpha < 1.0) || alpha == 0.0 {
        return Err(Error::Domain(format!("renyi kernel needs alpha in (-1,1) \\ {{0}}, got {alpha}")));
    }
    Ok(ScalarFunctionSpec {
        name: format!("renyi-kernel:{alpha}"),
        kind: FunctionKind::RenyiKernel(alpha),
        value_at_zero: if alpha > 0.0 { 1.0 / (alpha * (1.0 - alpha)) } else { f64::INFINITY },
        second_derivative_at_one: Some(1.0),
        flags: Flags {
            claims_standard: false,
            claims_operator_monotone: false,
            claims_operator_decreasing: true,
        },
    })
}

/// Catalog lookup by name with numeric parameters.
///
/// Names: `sld`, `harmonic`, `kubo-mori`, `wyd` (p), `extremal` (λ), `power` (α),
/// `neg-log`, `renyi-kernel` (α).
pub fn catalog(name: &str, params: &[f64]) -> Result<ScalarFunctionSpec> {
    let param = |k: usize| {
        params
            .get(k)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("{name} needs a parameter")))
    };
    match name {
        "sld" => Ok(sld()),
        "harmonic" => Ok(harmonic()),
        "kubo-mori" | "kubo_mori" => Ok(kubo_mori()),
        "wyd" => wyd(param(0)?),
        "extremal" | "extremal_inverse" => extremal_inverse(param(0)?),
        "power" => power(param(0)?),
        "neg-log" => Ok(neg_log()),
        "renyi-kernel" => renyi_kernel(param(0)?),
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}

/// Parses the textual function grammar
/// `sld | harmonic | kubo-mori | wyd:<p> | extremal:<λ> | hansen:<file> | power:<α> |
/// neg-log | renyi-kernel:<α> | tilde:<spec>`.
///
/// Hansen measures are resolved by `load_measure`, which receives the file part.
pub fn parse_spec<L>(text: &str, load_measure: &L) -> Result<ScalarFunctionSpec>
where
    L: Fn(&str) -> Result<DiscreteMeasure>,
{
    let (head, arg) = match text.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (text, None),
    };
    let number = |a: Option<&str>| -> Result<f64> {
        let a = a.ok_or_else(|| Error::InvalidParameter(format!("`{head}` needs a parameter")))?;
        a.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse `{a}` as a number")))
    };
    match head {
        "hansen" => {
            let path = arg.ok_or_else(|| Error::InvalidParameter("hansen needs a file".into()))?;
            Ok(hansen_mixture(&load_measure(path)?))
        }
        "tilde" => {
            let inner = arg.ok_or_else(|| Error::InvalidParameter("tilde needs a function".into()))?;
            tilde_transform(&parse_spec(inner, load_measure)?)
        }
        "sld" | "harmonic" | "kubo-mori" | "neg-log" if arg.is_none() => catalog(head, &[]),
        "wyd" | "extremal" | "power" | "renyi-kernel" => catalog(head, &[number(arg)?]),
        _ => Err(Error::UnknownFunction(text.to_string())),
    }
}

/// 60 logarithmically spaced points in `[1e-3, 1e3]` together with `1`, ascending.
pub fn probe_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..60).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 59.0)).collect();
    grid.push(1.0);
    grid.sort_by(f64::total_cmp);
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardnessReport {
    /// `max |x f(1/x) - f(x)|`
    pub symmetry: f64,
    pub symmetry_worst_at: f64,
    /// `|f(1) - 1|`
    pub normalization: f64,
    /// `max (2x/(x+1) - f(x))⁺`
    pub lower_bound: f64,
    /// `max (f(x) - (1+x)/2)⁺`
    pub upper_bound: f64,
    pub pass: bool,
}

impl StandardnessReport {
    pub fn max_violation(&self) -> f64 {
        self.symmetry.max(self.normalization).max(self.lower_bound).max(self.upper_bound)
    }
}

pub fn check_standard<F: ScalarFn + ?Sized>(f: &F, grid: &[f64]) -> StandardnessReport {
    let mut symmetry: f64 = 0.0;
    let mut symmetry_worst_at = f64::NAN;
    let mut lower_bound: f64 = 0.0;
    let mut upper_bound: f64 = 0.0;
    for &x in grid {
        let fx = f.eval(x);
        let s = (x * f.eval(1.0 / x) - fx).abs();
        if !(s <= symmetry) {
            symmetry = s;
            symmetry_worst_at = x;
        }
        lower_bound = lower_bound.max(2.0 * x / (x + 1.0) - fx);
        upper_bound = upper_bound.max(fx - (1.0 + x) / 2.0);
    }
    let normalization = (f.eval(1.0) - 1.0).abs();
    let mut report = StandardnessReport {
        symmetry,
        symmetry_worst_at,
        normalization,
        lower_bound,
        upper_bound,
        pass: false,
    };
    report.pass = report.max_violation() <= STANDARD_TOL;
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// Smallest eigenvalue of `f(B) - f(A)` over the sampled pairs `A ≼ B`.
    pub loewner_min_margin: f64,
    pub loewner_trials: usize,
    /// Smallest `Im f(a+ib)` over the Pick grid; `None` if `f` has no complex form.
    pub pick_min_margin: Option<f64>,
    pub pick_skipped: bool,
    pub pass: bool,
}

/// Samples pairs `A ≼ B` (`B = A + P`, `P ≽ 0`) with spectra in `[1e-3, 10]` and checks
/// `f(B) - f(A) ≽ 0`; then checks that the analytic continuation maps a grid of
/// upper half-plane points into the closed upper half-plane.
pub fn check_operator_monotone(
    f: &ScalarFunctionSpec,
    seed: u64,
    trials: usize,
    dim: usize,
) -> Result<MonotonicityReport> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut loewner_min_margin = f64::INFINITY;
    for _ in 0..trials {
        let (a, b) = loewner_pair(&mut rng, dim)?;
        let fa = linalg::apply_matrix_function(f, &a)?;
        let fb = linalg::apply_matrix_function(f, &b)?;
        let diff = HermitianMatrix::new(fb.matrix() - fa.matrix())?;
        let m = linalg::eig_hermitian(&diff)?.eigenvalues[0];
        loewner_min_margin = loewner_min_margin.min(m);
    }

    let mut pick_min_margin: Option<f64> = None;
    'grid: for &a in &[-10.0, -5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        for &b in &[1e-3, 1e-2, 0.1, 1.0, 10.0] {
            match f.eval_complex(Complex::new(a, b)) {
                Some(v) => pick_min_margin = Some(pick_min_margin.map_or(v.im, |m: f64| m.min(v.im))),
                None => {
                    pick_min_margin = None;
                    break 'grid;
                }
            }
        }
    }
    let pick_skipped = pick_min_margin.is_none();
    let pass = loewner_min_margin >= -LOEWNER_TOL && pick_min_margin.is_none_or(|m| m >= -PICK_TOL);
    Ok(MonotonicityReport {
        loewner_min_margin: if trials == 0 { 0.0 } else { loewner_min_margin },
        loewner_trials: trials,
        pick_min_margin,
        pick_skipped,
        pass,
    })
}

fn loewner_pair(rng: &mut ChaCha8Rng, n: usize) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..5.0)).collect();
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    let rank = rng.random_range(1..=n);
    let increments: Vec<f64> = (0..n)
        .map(|k| if k < rank { rng.random_range(0.0..(10.0 - top)) } else { 0.0 })
        .collect();
    let u = random::random_unitary(rng, n);
    let v = random::random_unitary(rng, n);
    let a = conjugate_diagonal(&u, &spectrum);
    let p = conjugate_diagonal(&v, &increments);
    let b = &a + &p;
    Ok((HermitianMatrix::new(a)?, HermitianMatrix::new(b)?))
}

fn conjugate_diagonal(u: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let mut scaled = u.clone();
    for (j, &x) in d.iter().enumerate() {
        scaled.column_mut(j).scale_mut(x);
    }
    linalg::hermitize(scaled * u.adjoint())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarInequalityReport {
    /// `min_x f(x)g(x) - f(0)g(0)(x-1)²`
    pub min_margin: f64,
    pub argmin: f64,
    pub pass: bool,
}

/// Checks `f(x) g(x) ≥ f(0) g(0) (x-1)²` on `grid`.
pub fn scalar_inequality_check(f: &ScalarFunctionSpec, g: &ScalarFunctionSpec, grid: &[f64]) -> ScalarInequalityReport {
    let c = f.value_at_zero * g.value_at_zero;
    let mut min_margin = f64::INFINITY;
    let mut argmin = f64::NAN;
    for &x in grid {
        let m = f.eval(x) * g.eval(x) - c * (x - 1.0) * (x - 1.0);
        if !(m >= min_margin) {
            min_margin = m;
            argmin = x;
        }
    }
    ScalarInequalityReport {
        min_margin,
        argmin,
        pass: min_margin >= -SCALAR_INEQUALITY_TOL,
    }
}

/// `F''(1)`. Uses the closed form when the spec carries one; otherwise central second
/// differences `D(h)` are Richardson-extrapolated over the step pairs `(1e-2, 5e-3)` and
/// `(5e-3, 2.5e-3)`, and the two extrapolants must agree within `1e-6 (1 + |F''(1)|)`.
pub fn second_derivative_at_one(f: &ScalarFunctionSpec) -> Result<f64> {
    match f.second_derivative_at_one {
        Some(v) => Ok(v),
        None => numeric_second_derivative_at_one(f),
    }
}

pub(crate) fn numeric_second_derivative_at_one<F: ScalarFn + ?Sized>(f: &F) -> Result<f64> {
    let d = |h: f64| (f.eval(1.0 + h) - 2.0 * f.eval(1.0) + f.eval(1.0 - h)) / (h * h);
    let (d1, d2, d3) = (d(1e-2), d(5e-3), d(2.5e-3));
    let first = (4.0 * d2 - d1) / 3.0;
    let second = (4.0 * d3 - d2) / 3.0;
    if !(first.is_finite() && second.is_finite()) || (first - second).abs() > 1e-6 * (1.0 + second.abs()) {
        return Err(Error::NoisyDerivative { first, second });
    }
    Ok(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn catalog_values() {
        assert_eq!(sld().eval(3.0), 2.0);
        let w = wyd(0.3).unwrap();
        assert_abs_diff_eq!(w.eval(1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.value_at_zero(), 0.21, epsilon = 1e-15);
        assert_abs_diff_eq!(w.eval(0.0), 0.21, epsilon = 1e-15);
        assert_abs_diff_eq!(wyd(0.5).unwrap().eval(4.0), 2.25, epsilon = 1e-14);
        assert_eq!(harmonic().value_at_zero(), 0.0);
        assert_eq!(kubo_mori().value_at_zero(), 0.0);
        assert_abs_diff_eq!(extremal_inverse(0.5).unwrap().value_at_zero(), 1.0 / 2.25 * 1.0, epsilon = 1e-15);
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(catalog("nope", &[]), Err(Error::UnknownFunction(_))));
        assert!(wyd(0.0).is_err());
        assert!(wyd(1.0).is_err());
        assert!(extremal_inverse(1.5).is_err());
        assert!(extremal_g(-0.1).is_err());
        assert!(catalog("wyd", &[]).is_err());
    }

    #[test]
    fn wyd_taylor_patch_is_continuous() {
        for p in [0.1, 0.3, 0.5, 0.8] {
            let w = wyd(p).unwrap();
            for &x in &[1.0 - 1.0001e-4, 1.0 + 1.0001e-4] {
                let inside = 1.0 + (x - 1.0) / 2.0 - (1.0 - p + p * p) / 12.0 * (x - 1.0) * (x - 1.0);
                assert_abs_diff_eq!(w.eval(x), inside, epsilon = 1e-12);
            }
        }
        let k = kubo_mori();
        let x: f64 = 1.0 + 1.0001e-4;
        assert_abs_diff_eq!(k.eval(x), (x - 1.0) / x.ln(), epsilon = 1e-15);
    }

    #[test]
    fn extremal_family() {
        assert_abs_diff_eq!(extremal_g(0.0).unwrap().eval(2.0), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(extremal_g(1.0).unwrap().eval(2.0), 2.0 / 3.0, epsilon = 1e-15);
        for l in [0.0, 0.2, 0.7, 1.0] {
            assert_abs_diff_eq!(extremal_g(l).unwrap().eval(1.0), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn extremal_derivative_in_lambda() {
        // ∂g_λ/∂λ = -(1-λ²)(x+1)(x-1)² / (2(x+λ)²(1+xλ)²)
        for &x in &[0.1, 0.5, 2.0, 7.0] {
            for &l in &[0.1, 0.4, 0.9] {
                let h = 1e-6;
                let g = |l: f64| extremal_g(l).unwrap().eval(x);
                let fd = (g(l + h) - g(l - h)) / (2.0 * h);
                let closed = -(1.0 - l * l) * (x + 1.0) * (x - 1.0) * (x - 1.0)
                    / (2.0 * (x + l) * (x + l) * (1.0 + x * l) * (1.0 + x * l));
                assert_abs_diff_eq!(fd, closed, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn hansen_examples() {
        let f0 = hansen_mixture(&DiscreteMeasure::delta(0.0).unwrap());
        assert_abs_diff_eq!(f0.eval(2.0), 4.0 / 3.0, epsilon = 1e-15);
        assert_eq!(f0.value_at_zero(), 0.0);
        let f1 = hansen_mixture(&DiscreteMeasure::delta(1.0).unwrap());
        assert_abs_diff_eq!(f1.eval(2.0), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f1.value_at_zero(), 0.5, epsilon = 1e-15);
        let half = hansen_mixture(&DiscreteMeasure::from_pairs(&[(0.0, 0.5), (1.0, 0.5)]).unwrap());
        assert_abs_diff_eq!(half.eval(1.0), 1.0, epsilon = 1e-15);
        assert!(half.flags().claims_standard && half.flags().claims_operator_monotone);
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::from_pairs(&[(0.5, 0.4)]).is_err());
        assert!(DiscreteMeasure::from_pairs(&[(1.5, 1.0)]).is_err());
        assert!(DiscreteMeasure::from_pairs(&[(0.5, -0.5), (0.2, 1.5)]).is_err());
        assert!(DiscreteMeasure::new(vec![], vec![]).is_err());
    }

    #[test]
    fn tilde_examples() {
        let t = tilde_transform(&sld()).unwrap();
        for &x in &probe_grid() {
            assert_abs_diff_eq!(t.eval(x), 2.0 * x / (x + 1.0), epsilon = 1e-12 * (1.0 + x));
        }
        assert_eq!(t.value_at_zero(), 0.0);
        for f in [sld(), wyd(0.3).unwrap(), kubo_mori(), extremal_inverse(0.4).unwrap()] {
            assert_abs_diff_eq!(tilde_transform(&f).unwrap().eval(1.0), 1.0, epsilon = 1e-15);
        }
        // closed form for 1/f = g_λ
        for &l in &[0.25, 0.5, 0.9] {
            let t = tilde_transform(&extremal_inverse(l).unwrap()).unwrap();
            for &x in &[0.01, 0.3, 1.7, 20.0] {
                let closed = x * (x * l * l + l * l + 2.0 * l + 2.0 * x * l + x + 1.0) / (2.0 * (x + l) * (1.0 + x * l));
                assert_abs_diff_eq!(t.eval(x), closed, epsilon = 1e-13 * (1.0 + x));
            }
        }
        // f(0) = 0 gives the arithmetic mean
        let t = tilde_transform(&harmonic()).unwrap();
        assert_eq!(t.eval(3.0), 2.0);
        assert_eq!(t.value_at_zero(), 0.5);
        assert!(matches!(tilde_transform(&power(2.0).unwrap()), Err(Error::Precondition(_))));
    }

    #[test]
    fn tilde_derivative_closed_form() {
        // derivative of f̃ for 1/f = g_λ
        let l: f64 = 0.6;
        let t = tilde_transform(&extremal_inverse(l).unwrap()).unwrap();
        for &x in &[0.2f64, 1.3, 4.0] {
            let h = 1e-6;
            let fd = (t.eval(x + h) - t.eval(x - h)) / (2.0 * h);
            let num = l + 2.0 * x * l + 2.0 * l * l + x * x * l + 4.0 * x * l * l + 2.0 * l.powi(3) * x + x * x
                + l.powi(3) * x * x
                + l.powi(3)
                + l.powi(4) * x * x;
            let closed = num / (2.0 * (x + l).powi(2) * (1.0 + x * l).powi(2));
            assert_abs_diff_eq!(fd, closed, epsilon = 1e-8);
        }
    }

    #[test]
    fn standardness_checks() {
        let r = check_standard(&sld(), &probe_grid());
        assert!(r.pass);
        assert!(r.max_violation() <= 1e-12);
        let r = check_standard(&|x: f64| x, &[0.5, 2.0]);
        assert!(!r.pass);
        assert_abs_diff_eq!(r.symmetry, 1.0, epsilon = 1e-15);
        assert_eq!(r.symmetry_worst_at, 2.0);
        assert!(check_standard(&wyd(0.3).unwrap(), &probe_grid()).pass);
    }

    #[test]
    fn custom_claims() {
        let f = ScalarFunctionSpec::custom("sqrt", f64::sqrt, 0.0).claim_standard().unwrap();
        assert!(f.is_standard());
        assert!(ScalarFunctionSpec::custom("id", |x| x, 0.0).claim_standard().is_err());
        assert!(ScalarFunctionSpec::custom("sq", |x| x * x, 0.0).claim_operator_monotone(1).is_err());
        let g = ScalarFunctionSpec::custom("sqrt", f64::sqrt, 0.0).claim_operator_monotone(1).unwrap();
        assert!(g.flags().claims_operator_monotone);
    }

    #[test]
    fn operator_monotone_checks() {
        let r = check_operator_monotone(&sld(), 3, 50, 3).unwrap();
        assert!(r.pass, "{r:?}");
        let sq = power(2.0).unwrap();
        let r = check_operator_monotone(&sq, 11, 200, 2).unwrap();
        assert!(!r.pass);
        assert!(r.loewner_min_margin < -LOEWNER_TOL);
        let t = tilde_transform(&extremal_inverse(0.5).unwrap()).unwrap();
        let r = check_operator_monotone(&t, 5, 100, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.pick_min_margin.unwrap() >= -PICK_TOL);
        let custom = ScalarFunctionSpec::custom("sqrt", f64::sqrt, 0.0);
        let r = check_operator_monotone(&custom, 5, 20, 3).unwrap();
        assert!(r.pick_skipped && r.pass);
    }

    #[test]
    fn scalar_inequality_examples() {
        let r = scalar_inequality_check(&sld(), &sld(), &probe_grid());
        assert!(r.pass);
        let r = scalar_inequality_check(&sld(), &sld(), &[1.0]);
        assert_eq!(r.min_margin, 1.0);
        let r = scalar_inequality_check(&harmonic(), &wyd(0.3).unwrap(), &probe_grid());
        assert!(r.pass && r.min_margin > 0.0);
    }

    #[test]
    fn second_derivatives() {
        assert_eq!(power(2.0).unwrap().second_derivative_at_one().unwrap(), 2.0);
        assert_eq!(power(1.0).unwrap().second_derivative_at_one().unwrap(), 0.0);
        assert_eq!(neg_log().second_derivative_at_one().unwrap(), 1.0);
        let numeric = numeric_second_derivative_at_one(&|x: f64| -x.ln()).unwrap();
        assert_abs_diff_eq!(numeric, 1.0, epsilon = 1e-7);
        // every closed form agrees with the difference quotient
        let specs = vec![
            sld(),
            harmonic(),
            kubo_mori(),
            wyd(0.3).unwrap(),
            wyd(0.5).unwrap(),
            extremal_inverse(0.35).unwrap(),
            extremal_g(0.35).unwrap(),
            hansen_mixture(&DiscreteMeasure::from_pairs(&[(0.2, 0.3), (0.9, 0.7)]).unwrap()),
            tilde_transform(&wyd(0.4).unwrap()).unwrap(),
            renyi_kernel(0.3).unwrap(),
        ];
        for s in specs {
            let closed = s.second_derivative_at_one().unwrap();
            let fd = numeric_second_derivative_at_one(&s).unwrap();
            assert_abs_diff_eq!(closed, fd, epsilon = 1e-6);
        }
        let noisy = ScalarFunctionSpec::custom("kink", |x| (x - 1.0).abs(), 1.0);
        assert!(matches!(noisy.second_derivative_at_one(), Err(Error::NoisyDerivative { .. })));
    }

    #[test]
    fn grammar() {
        let none = |_: &str| -> Result<DiscreteMeasure> { Err(Error::InvalidParameter("no files".into())) };
        assert_eq!(parse_spec("sld", &none).unwrap().name(), "sld");
        assert_eq!(parse_spec("wyd:0.25", &none).unwrap().value_at_zero(), 0.1875);
        assert_eq!(parse_spec("tilde:sld", &none).unwrap().name(), "tilde(sld)");
        assert!(parse_spec("wyd:abc", &none).is_err());
        assert!(parse_spec("sld:3", &none).is_err());
        assert!(parse_spec("hansen:x.json", &none).is_err());
        let delta = |_: &str| DiscreteMeasure::delta(1.0);
        assert_abs_diff_eq!(parse_spec("hansen:x.json", &delta).unwrap().eval(3.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn probe_grid_shape() {
        let g = probe_grid();
        assert_eq!(g.len(), 61);
        assert_abs_diff_eq!(g[0], 1e-3, epsilon = 1e-18);
        assert_abs_diff_eq!(g[60], 1e3, epsilon = 1e-9);
        assert!(g.contains(&1.0));
    }
}
