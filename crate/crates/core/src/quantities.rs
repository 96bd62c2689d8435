//! Quasi-entropies, relative entropies, covariances, Fisher informations and skew informations.
//!
//! All quantities are evaluated as double sums over the eigenbasis of the density
//! (or the two eigenbases, for two-state quantities). With `D = Σ λᵢ eᵢeᵢ*` and `A_ij`
//! the matrix of `A` in that basis:
//!
//! ```text
//! qCov^f_D(A,B)   = Σ conj(A_ij) B_ij λⱼ f(λᵢ/λⱼ) − conj(Tr DA) Tr DB
//! γ^f_D(A,B)      = Σ conj(A_ij) B_ij / (λⱼ f(λᵢ/λⱼ))
//! I^f_D(X)        = f(0)/2 · Σ (λᵢ−λⱼ)² |X_ij|² / (λⱼ f(λᵢ/λⱼ))
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, digest_matrices, ensure_same_dim, ratio_weights, trace, ComplexMatrix, DensityMatrix, HermitianMatrix,
    ScalarFn, SpectralDecomposition, C64,
};
use crate::stdfun::{self, ScalarFunctionSpec};

/// Imaginary parts above `LEAKAGE_TOL (1 + |re|)` on real-valued quantities are errors.
pub const LEAKAGE_TOL: f64 = 1e-9;
/// `|Tr D X|` allowed for an observable to count as centered.
pub const CENTERING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityResult {
    pub value: C64Serde,
    pub quantity: String,
    pub inputs_digest: String,
}

/// Complex value as `(re, im)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C64Serde {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for C64Serde {
    fn from(z: C64) -> Self {
        C64Serde { re: z.re, im: z.im }
    }
}

impl QuantityResult {
    fn new(quantity: &str, value: C64, digest: String) -> Self {
        QuantityResult {
            value: value.into(),
            quantity: quantity.to_string(),
            inputs_digest: digest,
        }
    }

    pub fn complex(&self) -> C64 {
        C64::new(self.value.re, self.value.im)
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    /// Real part, refusing values whose imaginary part is not roundoff.
    pub fn real(&self) -> Result<f64> {
        ensure_real(&self.quantity, self.complex())
    }
}

fn ensure_real(quantity: &str, z: C64) -> Result<f64> {
    if z.im.abs() > LEAKAGE_TOL * (1.0 + z.re.abs()) {
        return Err(Error::ImaginaryLeakage {
            quantity: quantity.to_string(),
            re: z.re,
            im: z.im,
        });
    }
    Ok(z.re)
}

/// Quasi-entropy `S^A_F(D₁, D₂) = ⟨A D₁^{1/2}, F(Δ(D₂/D₁))(A D₁^{1/2})⟩`.
pub fn quasi_entropy(
    f: &ScalarFunctionSpec,
    a: &ComplexMatrix,
    d1: &DensityMatrix,
    d2: &DensityMatrix,
) -> Result<QuantityResult> {
    ensure_same_dim(d1.matrix(), a)?;
    ensure_same_dim(d1.matrix(), d2.matrix())?;
    let v = quasi_entropy_spectral(f, a, d1.spectral(), d2.spectral())?;
    Ok(QuantityResult::new(
        "quasi-entropy",
        C64::new(v, 0.0),
        digest_matrices(f.name(), &[a, d1.matrix(), d2.matrix()]),
    ))
}

/// `Σᵢⱼ F(μᵢ/λⱼ) |⟨uᵢ, A vⱼ⟩|² λⱼ` for `D₁ = Σ λⱼ vⱼvⱼ*`, `D₂ = Σ μᵢ uᵢuᵢ*`.
/// Only positivity of the spectra is required, not unit trace.
pub(crate) fn quasi_entropy_spectral<F: ScalarFn + ?Sized>(
    f: &F,
    a: &ComplexMatrix,
    s1: &SpectralDecomposition,
    s2: &SpectralDecomposition,
) -> Result<f64> {
    let c = s2.eigenvectors.adjoint() * a * &s1.eigenvectors;
    let w = ratio_weights(f, &s2.eigenvalues, &s1.eigenvalues)?;
    let mut total = 0.0;
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            total += w[(i, j)] * c[(i, j)].norm_sqr() * s1.eigenvalues[j];
        }
    }
    Ok(total)
}

/// Umegaki relative entropy `Tr D₁(log D₁ − log D₂)`, natural logarithm.
pub fn umegaki(d1: &DensityMatrix, d2: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(d1.matrix(), d2.matrix())?;
    let log1 = d1.spectral().map(&f64::ln)?;
    let log2 = d2.spectral().map(&f64::ln)?;
    let z = trace(&(d1.matrix() * (log1 - log2)));
    ensure_real("umegaki", z)
}

/// `(1/(α(1−α))) Tr (I − D₂^α D₁^{−α}) D₁` for `α ∈ (−1, 1) \ {0}`.
pub fn renyi(alpha: f64, d1: &DensityMatrix, d2: &DensityMatrix) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::Domain("alpha must be nonzero".into()));
    }
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (-1, 1), got {alpha}")));
    }
    ensure_same_dim(d1.matrix(), d2.matrix())?;
    let p2 = d2.spectral().map(&|x: f64| x.powf(alpha))?;
    let p1 = d1.spectral().map(&|x: f64| x.powf(1.0 - alpha))?;
    let z = trace(d1.matrix()) - trace(&(p2 * p1));
    ensure_real("renyi", z / (alpha * (1.0 - alpha)))
}

/// `Cov_D(A,B) = ½ Tr D(A*B + BA*) − conj(Tr DA) Tr DB`.
pub fn sym_cov(d: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<QuantityResult> {
    ensure_same_dim(d.matrix(), a)?;
    ensure_same_dim(d.matrix(), b)?;
    let dm = d.matrix();
    let ad = a.adjoint();
    let sym = trace(&(dm * (&ad * b + b * &ad))) * 0.5;
    let v = sym - trace(&(dm * &ad)) * trace(&(dm * b));
    Ok(QuantityResult::new("cov", v, digest_matrices("cov", &[dm, a, b])))
}

/// Generalized covariance `qCov^f_D(A,B)` for a standard `f`.
pub fn gen_cov(f: &ScalarFunctionSpec, d: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<QuantityResult> {
    require_standard(f)?;
    ensure_same_dim(d.matrix(), a)?;
    ensure_same_dim(d.matrix(), b)?;
    let v = gen_cov_spectral(f, d, a, b)?;
    Ok(QuantityResult::new(
        "gen-cov",
        v,
        digest_matrices(f.name(), &[d.matrix(), a, b]),
    ))
}

fn gen_cov_spectral<F: ScalarFn + ?Sized>(f: &F, d: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let sd = d.spectral();
    let lam = &sd.eigenvalues;
    let ae = sd.to_eigenbasis(a);
    let be = sd.to_eigenbasis(b);
    let w = ratio_weights(f, lam, lam)?;
    let mut total = C64::new(0.0, 0.0);
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            total += ae[(i, j)].conj() * be[(i, j)] * (lam[j] * w[(i, j)]);
        }
    }
    let mean_a = diagonal_mean(lam, &ae).conj();
    let mean_b = diagonal_mean(lam, &be);
    Ok(total - mean_a * mean_b)
}

/// `Tr D A` from the eigenbasis matrix of `A`.
fn diagonal_mean(lam: &[f64], ae: &ComplexMatrix) -> C64 {
    lam.iter().enumerate().map(|(i, &l)| ae[(i, i)] * l).sum()
}

/// Monotone quantum Fisher information `γ^f_D(A,B)`.
pub fn fisher(f: &ScalarFunctionSpec, d: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<QuantityResult> {
    require_standard(f)?;
    ensure_same_dim(d.matrix(), a)?;
    ensure_same_dim(d.matrix(), b)?;
    let sd = d.spectral();
    let lam = &sd.eigenvalues;
    let ae = sd.to_eigenbasis(a);
    let be = sd.to_eigenbasis(b);
    let w = metric_weights(f, lam)?;
    let mut total = C64::new(0.0, 0.0);
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            total += ae[(i, j)].conj() * be[(i, j)] * w[(i, j)];
        }
    }
    Ok(QuantityResult::new(
        "fisher",
        total,
        digest_matrices(f.name(), &[d.matrix(), a, b]),
    ))
}

/// `1/(λⱼ f(λᵢ/λⱼ))`.
fn metric_weights(f: &ScalarFunctionSpec, lam: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
    let n = lam.len();
    let mut w = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let r = lam[i] / lam[j];
            let fr = f.eval(r);
            if !(fr > 0.0 && fr.is_finite()) {
                return Err(Error::SingularMetric(format!("{}({r:e}) = {fr}", f.name())));
            }
            w[(i, j)] = 1.0 / (lam[j] * fr);
        }
    }
    Ok(w)
}

/// Skew information `I^f_D(X) = f(0)/2 · γ^f_D(i[D,X], i[D,X])`.
pub fn skew_info(f: &ScalarFunctionSpec, d: &DensityMatrix, x: &HermitianMatrix) -> Result<f64> {
    require_standard(f)?;
    ensure_same_dim(d.matrix(), x.matrix())?;
    let sd = d.spectral();
    let lam = &sd.eigenvalues;
    let xe = sd.to_eigenbasis(x.matrix());
    let w = metric_weights(f, lam)?;
    let mut total = 0.0;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            let gap = lam[i] - lam[j];
            total += gap * gap * xe[(i, j)].norm_sqr() * w[(i, j)];
        }
    }
    Ok(f.value_at_zero() / 2.0 * total)
}

/// Wigner–Yanase–Dyson skew information `−½ Tr [D^p, X][D^{1−p}, X]`, from the
/// commutators themselves.
pub fn wyd_direct(p: f64, d: &DensityMatrix, x: &HermitianMatrix) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p={p} must lie in (0,1)")));
    }
    ensure_same_dim(d.matrix(), x.matrix())?;
    let dp = d.spectral().map(&|v: f64| v.powf(p))?;
    let dq = d.spectral().map(&|v: f64| v.powf(1.0 - p))?;
    let c1 = linalg::commutator(&dp, x.matrix())?;
    let c2 = linalg::commutator(&dq, x.matrix())?;
    ensure_real("wyd", trace(&(c1 * c2)) * -0.5)
}

/// The three terms of `f(0) γ^f_D(i[D,X], i[D,X]) = 2 Cov_D(X,X) − 2 qCov^{f̃}_D(X,X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewIdentity {
    /// `f(0) γ^f_D(i[D,X], i[D,X])`
    pub fisher_term: f64,
    /// `2 Cov_D(X,X)`
    pub cov_term: f64,
    /// `2 qCov^{f̃}_D(X,X)`
    pub tilde_term: f64,
    /// `|fisher_term − cov_term + tilde_term|`
    pub residual: f64,
    /// `1 + |fisher_term| + |cov_term| + |tilde_term|`
    pub scale: f64,
}

impl SkewIdentity {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

/// Evaluates both sides of the skew information identity for a centered `X`.
pub fn skew_identity_residual(f: &ScalarFunctionSpec, d: &DensityMatrix, x: &HermitianMatrix) -> Result<SkewIdentity> {
    require_standard(f)?;
    ensure_centered(d, x)?;
    let dir = linalg::commutator_direction(d.matrix(), x)?;
    let fisher_term = f.value_at_zero() * fisher(f, d, dir.matrix(), dir.matrix())?.real()?;
    let cov_term = 2.0 * sym_cov(d, x.matrix(), x.matrix())?.real()?;
    let tilde = stdfun::tilde_transform(f)?;
    let tilde_term = 2.0 * gen_cov(&tilde, d, x.matrix(), x.matrix())?.real()?;
    Ok(SkewIdentity {
        fisher_term,
        cov_term,
        tilde_term,
        residual: (fisher_term - cov_term + tilde_term).abs(),
        scale: 1.0 + fisher_term.abs() + cov_term.abs() + tilde_term.abs(),
    })
}

pub(crate) fn ensure_centered(d: &DensityMatrix, x: &HermitianMatrix) -> Result<()> {
    ensure_same_dim(d.matrix(), x.matrix())?;
    let mean = trace(&(d.matrix() * x.matrix()));
    if mean.norm() > CENTERING_TOL {
        return Err(Error::Precondition(format!(
            "observable is not centered: Tr DX = {:e}",
            mean.re
        )));
    }
    Ok(())
}

fn require_standard(f: &ScalarFunctionSpec) -> Result<()> {
    if !f.is_standard() {
        return Err(Error::Precondition(format!("{} is not a standard function", f.name())));
    }
    Ok(())
}
