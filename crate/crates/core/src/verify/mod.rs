//! Finite-difference checks of the trace-functional derivative formulas, the Hessian
//! theorem, Gram matrices for the determinant uncertainty relations, and the
//! randomized property suites.

pub mod random;
mod suites;

pub use suites::{run_all, run_suite, DimRange, Failure, Suite, Tolerances, TrialReport, SUITE_NAMES};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, commutator_direction, eig_raw, ensure_same_dim, hermitize, hs_norm, max_abs, trace,
    ComplexMatrix, DensityMatrix, HermitianMatrix, ScalarFn, SpectralDecomposition, C64, DENSITY_FLOOR,
};
use crate::quantities::{ensure_centered, gen_cov, quasi_entropy_spectral, sym_cov};
use crate::stdfun::{self, ScalarFunctionSpec};

/// Largest allowed `‖[D, A]‖` (entrywise) for directions that must commute with `D`.
pub const COMMUTING_TOL: f64 = 1e-12;
/// Base tolerance for the derivative lemmas.
pub const LEMMA_TOL: f64 = 1e-6;
/// Base relative tolerance for the Hessian theorem.
pub const HESSIAN_TOL: f64 = 1e-5;
/// Gram matrices count as PSD when `λ_min ≥ −GRAM_PSD_TOL·(1 + λ_max)`.
pub const GRAM_PSD_TOL: f64 = 1e-10;
/// Determinant margins must be `≥ −DET_TOL·scale`.
pub const DET_TOL: f64 = 1e-9;

const MIN_STEP: f64 = 1e-5;

/// Finite-difference increments, strictly decreasing, smallest at least `1e-5`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepSchedule {
    steps: Vec<f64>,
}

impl StepSchedule {
    pub fn new(steps: Vec<f64>) -> Result<Self> {
        if steps.len() < 2 {
            return Err(Error::InvalidParameter("step schedule needs at least two steps".into()));
        }
        if steps.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidParameter("steps must be positive and finite".into()));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("steps must be strictly decreasing".into()));
        }
        if *steps.last().unwrap() < MIN_STEP {
            return Err(Error::InvalidParameter(format!("smallest step must be at least {MIN_STEP:e}")));
        }
        Ok(StepSchedule { steps })
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule { steps: vec![1e-2, 1e-3] }
    }
}

/// Seeded version of [`random::random_density`]; requires `floor ∈ (0, 1/n)`.
pub fn random_density(n: usize, floor: f64, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random::try_random_density(&mut rng, n, floor)
}

/// `A − (Tr DA)·I`.
pub fn center_observable(d: &DensityMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    ensure_same_dim(d.matrix(), a.matrix())?;
    let mean = trace(&(d.matrix() * a.matrix())).re;
    let n = d.dim();
    HermitianMatrix::new(a.matrix() - ComplexMatrix::identity(n, n).scale(mean))
}

/// Richardson-extrapolated mixed derivative with an error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdEstimate {
    pub value: f64,
    /// `|R − D(h_fine)|` for the two finest steps, where `R` is their extrapolant.
    pub error_estimate: f64,
    /// Steps actually used (the schedule may have been shrunk to keep positivity).
    pub steps: Vec<f64>,
}

/// `∂²/∂t∂s S_F(D + tA, D + sB)` at `t = s = 0` with `S_F = quasi-entropy with A = I`.
///
/// Directions are normalized to unit Hilbert–Schmidt norm before stepping and the result
/// is rescaled. When `D ± hA` or `D ± hB` leaves the positive cone the whole schedule is
/// divided by 10, down to the `1e-5` floor.
pub fn mixed_second_derivative<F: ScalarFn + ?Sized>(
    f: &F,
    d: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    schedule: &StepSchedule,
) -> Result<FdEstimate> {
    ensure_same_dim(d.matrix(), a.matrix())?;
    ensure_same_dim(d.matrix(), b.matrix())?;
    let (na, nb) = (hs_norm(a.matrix()), hs_norm(b.matrix()));
    if na == 0.0 || nb == 0.0 {
        return Ok(FdEstimate { value: 0.0, error_estimate: 0.0, steps: schedule.steps.clone() });
    }
    let ah = a.matrix().unscale(na);
    let bh = b.matrix().unscale(nb);
    let identity = ComplexMatrix::identity(d.dim(), d.dim());

    let mut steps = schedule.steps.clone();
    loop {
        if let Some(diffs) = stencils(f, d.matrix(), &ah, &bh, &identity, &steps)? {
            let xs: Vec<f64> = steps.iter().map(|h| h * h).collect();
            let value = neville_at_zero(&xs, &diffs);
            let k = steps.len();
            let pair = neville_at_zero(&xs[k - 2..], &diffs[k - 2..]);
            let error_estimate = (pair - diffs[k - 1]).abs();
            let scale = na * nb;
            return Ok(FdEstimate { value: value * scale, error_estimate: error_estimate * scale, steps });
        }
        steps.iter_mut().for_each(|h| *h /= 10.0);
        if *steps.last().unwrap() < MIN_STEP {
            return Err(Error::StepsExhausted(
                "perturbed state is not positive definite at any allowed step".into(),
            ));
        }
    }
}

/// Central mixed differences for each step, or `None` when a perturbed matrix is not
/// positive definite.
fn stencils<F: ScalarFn + ?Sized>(
    f: &F,
    d: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    identity: &ComplexMatrix,
    steps: &[f64],
) -> Result<Option<Vec<f64>>> {
    let perturbed = |dir: &ComplexMatrix, h: f64| -> Result<Option<SpectralDecomposition>> {
        let s = eig_raw(&hermitize(d + dir.scale(h)))?;
        Ok((s.eigenvalues[0] > DENSITY_FLOOR).then_some(s))
    };
    let mut out = Vec::with_capacity(steps.len());
    for &h in steps {
        let (Some(ap), Some(am), Some(bp), Some(bm)) =
            (perturbed(a, h)?, perturbed(a, -h)?, perturbed(b, h)?, perturbed(b, -h)?)
        else {
            return Ok(None);
        };
        let g = |s1: &SpectralDecomposition, s2: &SpectralDecomposition| quasi_entropy_spectral(f, identity, s1, s2);
        let mixed = g(&ap, &bp)? - g(&ap, &bm)? - g(&am, &bp)? + g(&am, &bm)?;
        out.push(mixed / (4.0 * h * h));
    }
    Ok(Some(out))
}

/// Polynomial extrapolation of `(xs, ys)` to `x = 0`.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let m = xs.len();
    for k in 1..m {
        for i in 0..m - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

/// Finite-difference value against a closed-form expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub fd: f64,
    pub expected: f64,
    pub residual: f64,
    pub fd_error: f64,
    /// `max(1e-6, 10·fd_error)`
    pub tolerance: f64,
}

impl LemmaCheck {
    fn new(fd: FdEstimate, expected: f64) -> Self {
        LemmaCheck {
            fd: fd.value,
            expected,
            residual: (fd.value - expected).abs(),
            fd_error: fd.error_estimate,
            tolerance: LEMMA_TOL.max(10.0 * fd.error_estimate),
        }
    }

    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn ensure_commutes(d: &DensityMatrix, a: &HermitianMatrix, what: &str) -> Result<()> {
    let c = max_abs(&commutator(d.matrix(), a.matrix())?);
    if c > COMMUTING_TOL * (1.0 + max_abs(a.matrix())) {
        return Err(Error::Precondition(format!("{what} does not commute with D (|[D,{what}]| = {c:e})")));
    }
    Ok(())
}

/// Mixed derivative along directions commuting with `D` against `−F''(1)·Tr D⁻¹AB`.
pub fn lemma_commuting_residual(
    f: &ScalarFunctionSpec,
    d: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    schedule: &StepSchedule,
) -> Result<LemmaCheck> {
    ensure_commutes(d, a, "A")?;
    ensure_commutes(d, b, "B")?;
    let fd = mixed_second_derivative(f, d, a, b, schedule)?;
    let tr = trace(&(inverse_of(d)? * a.matrix() * b.matrix())).re;
    let expected = -stdfun::second_derivative_at_one(f)? * tr;
    Ok(LemmaCheck::new(fd, expected))
}

/// Mixed derivative along `A` commuting with `D` and `i[D, X]`; expected to vanish.
pub fn lemma_cross_residual<F: ScalarFn + ?Sized>(
    f: &F,
    d: &DensityMatrix,
    a: &HermitianMatrix,
    x: &HermitianMatrix,
    schedule: &StepSchedule,
) -> Result<LemmaCheck> {
    ensure_commutes(d, a, "A")?;
    let b = commutator_direction(d.matrix(), x)?;
    let fd = mixed_second_derivative(f, d, a, &b, schedule)?;
    Ok(LemmaCheck::new(fd, 0.0))
}

/// Mixed derivative along `(i[D,X], i[D,X])` against `2F(1)·Tr DX² − 2·S^X_F(D, D)`.
pub fn lemma_commutator_identity<F: ScalarFn + ?Sized>(
    f: &F,
    d: &DensityMatrix,
    x: &HermitianMatrix,
    schedule: &StepSchedule,
) -> Result<LemmaCheck> {
    let b = commutator_direction(d.matrix(), x)?;
    let fd = mixed_second_derivative(f, d, &b, &b, schedule)?;
    Ok(LemmaCheck::new(fd, commutator_identity_rhs(f, d, x)?))
}

fn commutator_identity_rhs<F: ScalarFn + ?Sized>(f: &F, d: &DensityMatrix, x: &HermitianMatrix) -> Result<f64> {
    let tr = trace(&(d.matrix() * x.matrix() * x.matrix())).re;
    let s = quasi_entropy_spectral(f, x.matrix(), d.spectral(), d.spectral())?;
    Ok(2.0 * f.eval(1.0) * tr - 2.0 * s)
}

/// Both sides of the Hessian theorem for `F = f̃`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianCheck {
    /// Finite-difference Hessian of the quasi-entropy of `f̃` along `i[D,X]`.
    pub lhs: f64,
    /// `f(0)·γ^f_D(i[D,X], i[D,X])`
    pub rhs: f64,
    /// `|lhs − rhs| / (1 + |rhs|)`
    pub relerr: f64,
    pub fd_error: f64,
    /// `max(1e-5, 10·fd_error)`
    pub tolerance: f64,
    /// `2f̃(1)·Tr DX² − 2·S^X_{f̃}(D, D)`
    pub identity_value: f64,
    /// `|lhs − identity_value| / (1 + |identity_value|)`
    pub identity_relerr: f64,
}

impl HessianCheck {
    pub fn pass(&self) -> bool {
        self.relerr <= self.tolerance && self.identity_relerr <= self.tolerance
    }
}

pub fn hessian_vs_skew(
    f: &ScalarFunctionSpec,
    d: &DensityMatrix,
    x: &HermitianMatrix,
    schedule: &StepSchedule,
) -> Result<HessianCheck> {
    if f.value_at_zero() == 0.0 {
        return Err(Error::Precondition(format!("{} has f(0) = 0", f.name())));
    }
    ensure_centered(d, x)?;
    let tilde = stdfun::tilde_transform(f)?;
    let dir = commutator_direction(d.matrix(), x)?;
    let fd = mixed_second_derivative(&tilde, d, &dir, &dir, schedule)?;
    let rhs = if hs_norm(dir.matrix()) == 0.0 {
        0.0
    } else {
        f.value_at_zero() * crate::quantities::fisher(f, d, dir.matrix(), dir.matrix())?.real()?
    };
    let identity_value = commutator_identity_rhs(&tilde, d, x)?;
    let lhs = fd.value;
    Ok(HessianCheck {
        lhs,
        rhs,
        relerr: (lhs - rhs).abs() / (1.0 + rhs.abs()),
        fd_error: fd.error_estimate,
        tolerance: HESSIAN_TOL.max(10.0 * fd.error_estimate),
        identity_value,
        identity_relerr: (lhs - identity_value).abs() / (1.0 + identity_value.abs()),
    })
}

fn gram<E>(d: &DensityMatrix, observables: &[HermitianMatrix], entry: E) -> Result<HermitianMatrix>
where
    E: Fn(&ComplexMatrix, &ComplexMatrix) -> Result<C64>,
{
    for a in observables {
        ensure_centered(d, a)?;
    }
    let m = observables.len();
    let mut g = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = entry(observables[i].matrix(), observables[j].matrix())?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
        g[(i, i)].im = 0.0;
    }
    HermitianMatrix::new(g)
}

/// `[qCov^g_D(Aᵢ, Aⱼ)]` for centered observables.
pub fn cov_gram(g: &ScalarFunctionSpec, d: &DensityMatrix, observables: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    gram(d, observables, |a, b| Ok(gen_cov(g, d, a, b)?.complex()))
}

/// `[Cov_D(Aᵢ, Aⱼ) − qCov^{f̃}_D(Aᵢ, Aⱼ)]` for centered observables.
pub fn skew_gram(f: &ScalarFunctionSpec, d: &DensityMatrix, observables: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    let tilde = stdfun::tilde_transform(f)?;
    gram(d, observables, |a, b| {
        Ok(sym_cov(d, a, b)?.complex() - gen_cov(&tilde, d, a, b)?.complex())
    })
}

/// `λ_min / (1 + λ_max)`; nonnegative up to rounding for a PSD matrix.
pub fn gram_psd_margin(g: &HermitianMatrix) -> Result<f64> {
    if g.dim() == 0 {
        return Ok(0.0);
    }
    let s = g.spectral()?;
    let top = *s.eigenvalues.last().unwrap();
    Ok(s.eigenvalues[0] / (1.0 + top.max(0.0)))
}

/// Determinant of a Hermitian matrix as the product of its eigenvalues.
pub fn hermitian_det(g: &HermitianMatrix) -> Result<f64> {
    Ok(g.spectral()?.eigenvalues.iter().product())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetMargins {
    pub det_cov: f64,
    /// `Det(f(0)g(0)·skew_gram(f))`
    pub det_tuj: f64,
    /// `Det(2g(0)·skew_gram(f))`
    pub det_tvegso: f64,
    pub margin_tuj: f64,
    pub margin_tvegso: f64,
    /// `max(Πₖ cov_gram[k,k], |det_cov|, |det_tuj|, |det_tvegso|)`
    pub scale: f64,
}

impl DetMargins {
    pub fn pass(&self) -> bool {
        self.margin_tuj >= -DET_TOL * self.scale && self.margin_tvegso >= -DET_TOL * self.scale
    }
}

pub fn det_inequality_margins(
    f: &ScalarFunctionSpec,
    g: &ScalarFunctionSpec,
    d: &DensityMatrix,
    observables: &[HermitianMatrix],
) -> Result<DetMargins> {
    let cov = cov_gram(g, d, observables)?;
    let skew = skew_gram(f, d, observables)?;
    let det_cov = hermitian_det(&cov)?;
    let det_skew = hermitian_det(&skew)?;
    let m = observables.len() as i32;
    let (f0, g0) = (f.value_at_zero(), g.value_at_zero());
    let det_tuj = (f0 * g0).powi(m) * det_skew;
    let det_tvegso = (2.0 * g0).powi(m) * det_skew;
    let hadamard: f64 = (0..observables.len()).map(|k| cov.matrix()[(k, k)].re).product();
    let scale = hadamard.abs().max(det_cov.abs()).max(det_tuj.abs()).max(det_tvegso.abs());
    Ok(DetMargins {
        det_cov,
        det_tuj,
        det_tvegso,
        margin_tuj: det_cov - det_tuj,
        margin_tvegso: det_cov - det_tvegso,
        scale,
    })
}

pub(crate) fn inverse_of(d: &DensityMatrix) -> Result<ComplexMatrix> {
    d.spectral().map(&|x: f64| 1.0 / x)
}
