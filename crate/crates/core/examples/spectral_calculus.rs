//! Matrix functions, the relative modular operator and the pinching split.

use qig::linalg::{self, from_real_rows, pinch_decompose, relmod_apply, relmod_dense, DensityMatrix, HermitianMatrix};
use qig::verify::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qig::Result<()> {
    let h = HermitianMatrix::new(from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]))?;
    let sqrt = linalg::apply_matrix_function(&f64::sqrt, &h)?;
    println!("sqrt([[2,1],[1,2]]) =\n{:.6}", sqrt.matrix().map(|z| z.re));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d1 = random::random_density(&mut rng, 3, 0.01);
    let d2 = random::random_density(&mut rng, 3, 0.01);
    let a = random::random_complex(&mut rng, 3);
    let f = |x: f64| x.sqrt();
    let structured = relmod_apply(&f, &d1, &d2, &a)?;
    let dense = relmod_dense(&f, &d1, &d2)?.apply(&a)?;
    println!("structured vs dense modular action: {:.2e}", linalg::max_abs_diff(&structured, &dense));

    let b = random::random_hermitian(&mut rng, 3);
    let (commuting, x) = pinch_decompose(&d1, &b)?;
    let rest = linalg::commutator_direction(d1.matrix(), &x)?;
    let overlap = linalg::hs_inner(commuting.matrix(), rest.matrix())?;
    println!("B = B_c + i[D,X], <B_c, i[D,X]> = {:.2e}", overlap.norm());

    let mixed = DensityMatrix::maximally_mixed(3);
    println!("eigenvalues of I/3: {:?}", mixed.spectral().eigenvalues);
    Ok(())
}
