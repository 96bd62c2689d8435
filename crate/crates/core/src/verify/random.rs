//! Random instance generators shared by the property suites and the function checks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{hermitize, hs_inner, hs_norm, trace, ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
use crate::stdfun::DiscreteMeasure;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed isometry `V: C^cols → C^rows` (`V*V = I`), `rows ≥ cols`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rng, rows, cols).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    haar_isometry(rng, n, n)
}

/// Ginibre matrix scaled to unit Hilbert–Schmidt norm.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let norm = hs_norm(&g);
    g.unscale(norm)
}

/// Hermitian matrix of unit Hilbert–Schmidt norm.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = ginibre(rng, n, n);
    let h = hermitize(&g + g.adjoint());
    let norm = hs_norm(&h);
    HermitianMatrix::new(h.unscale(norm)).expect("hermitized matrix")
}

/// `(1 − n·floor)·GG*/Tr(GG*) + floor·I`. Panics unless `floor ∈ (0, 1/n)` and
/// `floor` clears the density floor; see [`crate::verify::random_density`] for the
/// checked, seed-based version.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> DensityMatrix {
    try_random_density(rng, n, floor).expect("valid floor")
}

pub(crate) fn try_random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(floor > 0.0 && floor * (n as f64) < 1.0) {
        return Err(Error::InvalidParameter(format!("floor {floor} outside (0, 1/{n})")));
    }
    if n == 1 {
        return DensityMatrix::diagonal(&[1.0]);
    }
    let g = ginibre(rng, n, n);
    let gg = &g * g.adjoint();
    let tr = trace(&gg).re;
    let mut rho = gg.unscale(tr).scale(1.0 - n as f64 * floor);
    for i in 0..n {
        rho[(i, i)] += C64::new(floor, 0.0);
    }
    DensityMatrix::new(hermitize(rho))
}

/// Hermitian `A` with `[D, A] = 0`: diagonal in the eigenbasis of `D`, unit norm.
pub fn random_commuting<R: Rng + ?Sized>(rng: &mut R, d: &DensityMatrix) -> HermitianMatrix {
    let s = d.spectral();
    let n = d.dim();
    let diag: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = diag.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut a = ComplexMatrix::zeros(n, n);
    for (i, x) in diag.iter().enumerate() {
        a[(i, i)] = C64::new(x / norm, 0.0);
    }
    HermitianMatrix::new(hermitize(s.from_eigenbasis(&a))).expect("hermitized matrix")
}

/// `m` Hermitian observables with `Tr D·Aₖ = 0`, orthonormal in the Hilbert–Schmidt
/// inner product. Requires `m ≤ n² − 1`.
pub fn random_centered_observables<R: Rng + ?Sized>(
    rng: &mut R,
    d: &DensityMatrix,
    m: usize,
) -> Result<Vec<HermitianMatrix>> {
    let n = d.dim();
    if m + 1 > n * n {
        return Err(Error::InvalidParameter(format!(
            "at most {} centered observables exist in dimension {n}",
            n * n - 1
        )));
    }
    // Centered Hermitian matrices form the real subspace orthogonal to D.
    let dn = d.matrix().unscale(hs_norm(d.matrix()));
    let mut basis: Vec<ComplexMatrix> = Vec::with_capacity(m);
    while basis.len() < m {
        let mut v = random_hermitian(rng, n).into_matrix();
        for _ in 0..2 {
            for b in std::iter::once(&dn).chain(basis.iter()) {
                let c = hs_inner(b, &v)?.re;
                v -= b.scale(c);
            }
        }
        let norm = hs_norm(&v);
        if norm > 1e-6 {
            basis.push(hermitize(v.unscale(norm)));
        }
    }
    basis.into_iter().map(HermitianMatrix::new).collect()
}

/// Finitely supported probability measure on `[0, 1]` with `k` atoms.
pub fn random_measure<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Result<DiscreteMeasure> {
    let atoms: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=1.0)).collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..k - 1].iter().sum();
    weights[k - 1] = 1.0 - head;
    DiscreteMeasure::new(atoms, weights)
}
