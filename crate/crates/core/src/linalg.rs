//! Complex Hermitian matrix algebra.
//!
//! Everything here is built on one primitive, the Hermitian eigendecomposition.
//! Matrix functions, the relative modular operator `A ↦ D₂ A D₁⁻¹` and the
//! splitting of a matrix into its `D`-commutant part and a commutator part are
//! all evaluated in eigenbases.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Relative tolerance on `M - M*` accepted (and symmetrized away) at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed distance of a density's trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue a density matrix may have.
pub const DENSITY_FLOOR: f64 = 1e-10;
/// Eigenvalues closer than `CLUSTER_TOL * (1 + spread)` share a spectral block.
pub const CLUSTER_TOL: f64 = 1e-9;
/// Largest dimension accepted by [`relmod_dense`].
pub const DENSE_MAX_DIM: usize = 32;

const EIG_MAX_ITER: usize = 10_000;

/// A real function of one positive real variable.
pub trait ScalarFn {
    fn eval(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> ScalarFn for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Square matrix with `M = M*`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` when it is Hermitian up to roundoff and stores `(m + m*)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        ensure_square(&m)?;
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let allowed = HERMITIAN_TOL * (1.0 + scale);
        let deviation = max_abs_diff(&m, &m.adjoint());
        if deviation > allowed {
            return Err(Error::NotHermitian { deviation, allowed });
        }
        let sym = (&m + m.adjoint()).scale(0.5);
        Ok(HermitianMatrix(sym))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermitianMatrix(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        eig_hermitian(self)
    }

    /// Real linear combination `a·self + b·other`, which stays Hermitian.
    pub fn combine(&self, a: f64, other: &HermitianMatrix, b: f64) -> Result<Self> {
        ensure_same_dim(&self.0, &other.0)?;
        Ok(HermitianMatrix(self.0.scale(a) + other.0.scale(b)))
    }

    pub fn scale(&self, a: f64) -> Self {
        HermitianMatrix(self.0.scale(a))
    }
}

/// Positive definite Hermitian matrix with unit trace and spectrum bounded below by
/// [`DENSITY_FLOOR`]. The spectral decomposition is computed once at construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    hermitian: HermitianMatrix,
    spectral: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::new(m)?)
    }

    pub fn from_hermitian(h: HermitianMatrix) -> Result<Self> {
        let tr = trace(h.matrix());
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { re: tr.re, im: tr.im });
        }
        let spectral = eig_hermitian(&h)?;
        let min_eigenvalue = spectral.eigenvalues[0];
        if min_eigenvalue < DENSITY_FLOOR {
            return Err(Error::NotInvertible {
                min_eigenvalue,
                floor: DENSITY_FLOOR,
            });
        }
        Ok(DensityMatrix { hermitian: h, spectral })
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::from_real_diagonal(probabilities))
    }

    /// The maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self::diagonal(&vec![1.0 / n as f64; n]).expect("I/n is a valid density")
    }

    pub fn dim(&self) -> usize {
        self.hermitian.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.hermitian.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.hermitian
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectral.eigenvalues[0]
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w} outside [0,1]")));
        }
        Self::from_hermitian(self.hermitian.combine(w, &other.hermitian, 1.0 - w)?)
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(h(λ)) U*`; fails if `h` is not finite on the spectrum.
    pub fn map<H: ScalarFn + ?Sized>(&self, h: &H) -> Result<ComplexMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&x| {
                let y = h.eval(x);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::Domain(format!("function is not finite at eigenvalue {x:e}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.synthesize(&values))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.synthesize(&self.eigenvalues)
    }

    fn synthesize(&self, values: &[f64]) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        scaled * u.adjoint()
    }

    /// `U* A U`, the matrix of `A` in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }

    /// Cluster index of every eigenvalue; neighbours closer than
    /// `CLUSTER_TOL * (1 + spread)` share an index.
    pub fn clusters(&self) -> Vec<usize> {
        let ev = &self.eigenvalues;
        let spread = ev.last().copied().unwrap_or(0.0) - ev.first().copied().unwrap_or(0.0);
        let gap = CLUSTER_TOL * (1.0 + spread);
        let mut ids = Vec::with_capacity(ev.len());
        let mut current = 0;
        for (k, &x) in ev.iter().enumerate() {
            if k > 0 && x - ev[k - 1] >= gap {
                current += 1;
            }
            ids.push(current);
        }
        ids
    }
}

/// Linear map on `n×n` matrices stored as an `n²×n²` matrix acting on column-stacked input.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_square(a)?;
        if a.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.nrows(),
            });
        }
        let v = vectorize(a);
        Ok(unvectorize(&(&self.matrix * v), self.dim))
    }
}

/// Column stacking `vec(A)`.
pub fn vectorize(a: &ComplexMatrix) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &nalgebra::DVector<C64>, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

pub fn eig_hermitian(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    eig_raw(h.matrix())
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn eig_raw(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| {
        Error::NoConvergence {
            label: format!("{n}x{n} Hermitian matrix {}", digest_matrices("eig", &[m])),
        }
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

pub fn apply_matrix_function<H: ScalarFn + ?Sized>(h: &H, m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let sd = eig_hermitian(m)?;
    Ok(HermitianMatrix(hermitize(sd.map(h)?)))
}

/// `F(Δ(D₂/D₁)) A` where `Δ(D₂/D₁) A = D₂ A D₁⁻¹`.
///
/// With `D₂ = Σ μᵢ uᵢuᵢ*` and `D₁ = Σ λⱼ vⱼvⱼ*` the result is
/// `Σᵢⱼ F(μᵢ/λⱼ) ⟨uᵢ, A vⱼ⟩ uᵢ vⱼ*`.
pub fn relmod_apply<F: ScalarFn + ?Sized>(
    f: &F,
    d1: &DensityMatrix,
    d2: &DensityMatrix,
    a: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    relmod_apply_spectral(f, d1.spectral(), d2.spectral(), a)
}

pub(crate) fn relmod_apply_spectral<F: ScalarFn + ?Sized>(
    f: &F,
    s1: &SpectralDecomposition,
    s2: &SpectralDecomposition,
    a: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    let n = s1.dim();
    if s2.dim() != n || a.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if s2.dim() != n { s2.dim() } else { a.nrows() },
        });
    }
    let mut c = s2.eigenvectors.adjoint() * a * &s1.eigenvectors;
    let weights = ratio_weights(f, &s2.eigenvalues, &s1.eigenvalues)?;
    c.component_mul_assign(&weights.map(|w| C64::new(w, 0.0)));
    Ok(&s2.eigenvectors * c * s1.eigenvectors.adjoint())
}

/// Real matrix `W[i,j] = F(μᵢ/λⱼ)`.
pub(crate) fn ratio_weights<F: ScalarFn + ?Sized>(f: &F, mu: &[f64], lambda: &[f64]) -> Result<DMatrix<f64>> {
    let mut w = DMatrix::zeros(mu.len(), lambda.len());
    for (i, &m) in mu.iter().enumerate() {
        for (j, &l) in lambda.iter().enumerate() {
            let r = m / l;
            let v = f.eval(r);
            if !v.is_finite() {
                return Err(Error::Domain(format!("function is not finite at eigenvalue ratio {r:e}")));
            }
            w[(i, j)] = v;
        }
    }
    Ok(w)
}

/// Dense `n²×n²` matrix of `F(Δ(D₂/D₁))`.
///
/// Built from the Kronecker product `conj(D₁⁻¹) ⊗ D₂` (Hermitian, positive) and an
/// eigendecomposition of that big matrix, so it shares no code path with
/// [`relmod_apply`] beyond the eigen-solver.
pub fn relmod_dense<F: ScalarFn + ?Sized>(f: &F, d1: &DensityMatrix, d2: &DensityMatrix) -> Result<Superoperator> {
    let n = d1.dim();
    if d2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d2.dim(),
        });
    }
    if n > DENSE_MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "dense superoperator limited to n <= {DENSE_MAX_DIM}, got {n}"
        )));
    }
    let inv1 = d1
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible {
            min_eigenvalue: d1.min_eigenvalue(),
            floor: DENSITY_FLOOR,
        })?;
    let kron = inv1.map(|z| z.conj()).kronecker(d2.matrix());
    let sd = eig_raw(&hermitize(kron))?;
    Ok(Superoperator {
        dim: n,
        matrix: sd.map(f)?,
    })
}

/// Hilbert–Schmidt pairing `Tr A* B`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    ensure_same_dim(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_same_dim(a, b)?;
    Ok(a * b - b * a)
}

/// `i[D, X]` for Hermitian `D`, `X`; the result is Hermitian.
pub fn commutator_direction(d: &ComplexMatrix, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    let c = commutator(d, x.matrix())?;
    Ok(HermitianMatrix(hermitize(c * C64::i())))
}

/// Splits Hermitian `B` as `B_c + i[D, X]` with `[D, B_c] = 0`.
///
/// In the eigenbasis of `D`, `B_c` keeps the blocks inside (clustered) eigenspaces and
/// `X_ij = B_ij / (i(λᵢ - λⱼ))` on the remaining entries. The two parts are orthogonal
/// in the Hilbert–Schmidt inner product.
pub fn pinch_decompose(d: &DensityMatrix, b: &HermitianMatrix) -> Result<(HermitianMatrix, HermitianMatrix)> {
    ensure_same_dim(d.matrix(), b.matrix())?;
    let sd = d.spectral();
    let ids = sd.clusters();
    let lam = &sd.eigenvalues;
    let bb = sd.to_eigenbasis(b.matrix());
    let n = d.dim();
    let mut comm = ComplexMatrix::zeros(n, n);
    let mut x = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if ids[i] == ids[j] {
                comm[(i, j)] = bb[(i, j)];
            } else {
                x[(i, j)] = bb[(i, j)] / C64::new(0.0, lam[i] - lam[j]);
            }
        }
    }
    Ok((
        HermitianMatrix(hermitize(sd.from_eigenbasis(&comm))),
        HermitianMatrix(hermitize(sd.from_eigenbasis(&x))),
    ))
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Short hex digest of matrix entries, used to name inputs in diagnostics and reports.
pub fn digest_matrices(label: &str, ms: &[&ComplexMatrix]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    for m in ms {
        hasher.update((m.nrows() as u64).to_le_bytes());
        for z in m.iter() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    hex::encode(&hasher.finalize()[..8])
}

pub(crate) fn hermitize(m: ComplexMatrix) -> ComplexMatrix {
    (&m + m.adjoint()).scale(0.5)
}

pub(crate) fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    ensure_square(a)?;
    ensure_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// Builds a complex matrix from row-major `(re, im)` pairs.
pub fn from_rows(rows: &[&[(f64, f64)]]) -> ComplexMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j].0, rows[i][j].1))
}

/// Builds a complex matrix with zero imaginary part from real rows.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
}
