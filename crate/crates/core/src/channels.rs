//! Completely positive maps in Kraus form.
//!
//! A [`KrausChannel`] with `Σ Kᵢ*Kᵢ = I` acts on states as `D ↦ Σ Kᵢ D Kᵢ*` (trace
//! preserving) and on observables through its dual `A ↦ Σ Kᵢ* A Kᵢ` (unital, completely
//! positive, hence a Schwarz map). The margins below measure how far the quasi-entropy
//! inequalities hold for concrete instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, ensure_same_dim, max_abs_diff, ComplexMatrix, DensityMatrix, HermitianMatrix, C64,
};
use crate::quantities::quasi_entropy;
use crate::stdfun::ScalarFunctionSpec;
use crate::verify::random;

/// Allowed deviation of `Σ K*K` from the identity.
pub const TRACE_PRESERVING_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    n_in: usize,
    n_out: usize,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("channel needs at least one Kraus operator".into()))?;
        let (n_out, n_in) = first.shape();
        if let Some(k) = kraus_ops.iter().find(|k| k.shape() != (n_out, n_in)) {
            return Err(Error::DimensionMismatch {
                expected: n_out,
                found: k.nrows(),
            });
        }
        let sum = kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(n_in, n_in), |acc, k| acc + k.adjoint() * k);
        let deviation = max_abs_diff(&sum, &ComplexMatrix::identity(n_in, n_in));
        if deviation > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(KrausChannel { kraus_ops, n_in, n_out })
    }

    pub fn identity(n: usize) -> Self {
        KrausChannel {
            kraus_ops: vec![ComplexMatrix::identity(n, n)],
            n_in: n,
            n_out: n,
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Kraus operators `E_ab / √n` built from matrix units; maps every state to `I/n`.
    pub fn fully_depolarizing(n: usize) -> Self {
        let s = 1.0 / (n as f64).sqrt();
        let mut ops = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(a, b)] = C64::new(s, 0.0);
                ops.push(e);
            }
        }
        KrausChannel::new(ops).expect("matrix units give a trace-preserving set")
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }
}

/// Channel whose Kraus operators are the `n_out × n_in` blocks of a Haar-random isometry
/// `n_in → kraus_count·n_out`. Deterministic in `seed`.
pub fn random_channel(n_in: usize, n_out: usize, kraus_count: usize, seed: u64) -> Result<KrausChannel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_channel_with(&mut rng, n_in, n_out, kraus_count)
}

pub(crate) fn random_channel_with<R: rand::Rng + ?Sized>(
    rng: &mut R,
    n_in: usize,
    n_out: usize,
    kraus_count: usize,
) -> Result<KrausChannel> {
    if n_in == 0 || n_out == 0 || kraus_count == 0 || kraus_count * n_out < n_in {
        return Err(Error::InvalidParameter(format!(
            "cannot embed dimension {n_in} into {kraus_count} blocks of {n_out}"
        )));
    }
    let v = random::haar_isometry(rng, kraus_count * n_out, n_in);
    let ops = (0..kraus_count)
        .map(|k| v.rows(k * n_out, n_out).into_owned())
        .collect();
    KrausChannel::new(ops)
}

/// `Σ Kᵢ D Kᵢ*`. Outputs with an eigenvalue below the density floor are reported as
/// [`Error::SingularOutput`].
pub fn apply_state(ch: &KrausChannel, d: &DensityMatrix) -> Result<DensityMatrix> {
    if d.dim() != ch.n_in {
        return Err(Error::DimensionMismatch {
            expected: ch.n_in,
            found: d.dim(),
        });
    }
    let out = ch
        .kraus_ops
        .iter()
        .fold(ComplexMatrix::zeros(ch.n_out, ch.n_out), |acc, k| acc + k * d.matrix() * k.adjoint());
    let h = HermitianMatrix::new(linalg::hermitize(out))?;
    match DensityMatrix::from_hermitian(h) {
        Err(Error::NotInvertible { min_eigenvalue, .. }) => Err(Error::SingularOutput { min_eigenvalue }),
        other => other,
    }
}

/// Dual map `Σ Kᵢ* A Kᵢ` (`n_out × n_out` in, `n_in × n_in` out).
pub fn apply_dual(ch: &KrausChannel, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.shape() != (ch.n_out, ch.n_out) {
        return Err(Error::DimensionMismatch {
            expected: ch.n_out,
            found: a.nrows(),
        });
    }
    Ok(ch
        .kraus_ops
        .iter()
        .fold(ComplexMatrix::zeros(ch.n_in, ch.n_in), |acc, k| acc + k.adjoint() * a * k))
}

/// Smallest eigenvalue of `α(B*B) − α(B*)α(B)` for the dual `α`.
pub fn schwarz_margin(ch: &KrausChannel, b: &ComplexMatrix) -> Result<f64> {
    let bb = b.adjoint() * b;
    let lhs = apply_dual(ch, &bb)?;
    let rhs = apply_dual(ch, &b.adjoint())? * apply_dual(ch, b)?;
    let diff = HermitianMatrix::new(linalg::hermitize(lhs - rhs))?;
    Ok(linalg::eig_hermitian(&diff)?.eigenvalues[0])
}

fn require_increasing(f: &ScalarFunctionSpec) -> Result<()> {
    let flags = f.flags();
    if !flags.claims_operator_monotone || !(f.value_at_zero() >= 0.0) {
        return Err(Error::Precondition(format!(
            "{} is not flagged operator monotone increasing with F(0) >= 0",
            f.name()
        )));
    }
    Ok(())
}

/// `S^A_F(α*(D₁), α*(D₂)) − S^{α(A)}_F(D₁, D₂)`, nonnegative for operator monotone `F`
/// with `F(0) ≥ 0`. `A` lives on the output space of the channel.
pub fn monotonicity_margin(
    f: &ScalarFunctionSpec,
    a: &ComplexMatrix,
    d1: &DensityMatrix,
    d2: &DensityMatrix,
    ch: &KrausChannel,
) -> Result<f64> {
    require_increasing(f)?;
    let e1 = apply_state(ch, d1)?;
    let e2 = apply_state(ch, d2)?;
    let lhs = quasi_entropy(f, a, &e1, &e2)?.real()?;
    let rhs = quasi_entropy(f, &apply_dual(ch, a)?, d1, d2)?.real()?;
    Ok(lhs - rhs)
}

/// Data-processing direction for operator monotone *decreasing* kernels (for instance
/// `-log` and the Rényi kernels) with `A = I`:
/// `S_F(D₁, D₂) − S_F(α*(D₁), α*(D₂))`.
pub fn data_processing_margin(
    f: &ScalarFunctionSpec,
    d1: &DensityMatrix,
    d2: &DensityMatrix,
    ch: &KrausChannel,
) -> Result<f64> {
    if !f.flags().claims_operator_decreasing {
        return Err(Error::Precondition(format!(
            "{} is not flagged operator monotone decreasing",
            f.name()
        )));
    }
    let e1 = apply_state(ch, d1)?;
    let e2 = apply_state(ch, d2)?;
    let before = quasi_entropy(f, &ComplexMatrix::identity(ch.n_in, ch.n_in), d1, d2)?.real()?;
    let after = quasi_entropy(f, &ComplexMatrix::identity(ch.n_out, ch.n_out), &e1, &e2)?.real()?;
    Ok(before - after)
}

/// `S^A_F(λE₁+(1−λ)F₁, λE₂+(1−λ)F₂) − λ S^A_F(E₁,E₂) − (1−λ) S^A_F(F₁,F₂)`.
pub fn concavity_margin(
    f: &ScalarFunctionSpec,
    a: &ComplexMatrix,
    pair1: (&DensityMatrix, &DensityMatrix),
    pair2: (&DensityMatrix, &DensityMatrix),
    lambda: f64,
) -> Result<f64> {
    require_increasing(f)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda={lambda} outside [0,1]")));
    }
    ensure_same_dim(pair1.0.matrix(), pair2.0.matrix())?;
    let m1 = pair1.0.mix(pair2.0, lambda)?;
    let m2 = pair1.1.mix(pair2.1, lambda)?;
    let joint = quasi_entropy(f, a, &m1, &m2)?.real()?;
    let s1 = quasi_entropy(f, a, pair1.0, pair1.1)?.real()?;
    let s2 = quasi_entropy(f, a, pair2.0, pair2.1)?.real()?;
    Ok(joint - lambda * s1 - (1.0 - lambda) * s2)
}
