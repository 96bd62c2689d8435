//! Numerical second derivatives of the quasi-entropy against skew information.

use qig::linalg::{from_real_rows, DensityMatrix, HermitianMatrix};
use qig::stdfun;
use qig::verify::{self, random, StepSchedule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qig::Result<()> {
    let d = DensityMatrix::diagonal(&[0.75, 0.25])?;
    let x = HermitianMatrix::new(from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]))?;
    let h = verify::hessian_vs_skew(&stdfun::sld(), &d, &x, &StepSchedule::default())?;
    println!("qubit: lhs {:.9} rhs {:.9} relerr {:.1e}", h.lhs, h.rhs, h.relerr);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = random::random_density(&mut rng, 4, 0.03);
    let x = verify::center_observable(&d, &random::random_hermitian(&mut rng, 4))?;
    for f in [stdfun::sld(), stdfun::wyd(0.3)?, stdfun::extremal_inverse(0.5)?] {
        let h = verify::hessian_vs_skew(&f, &d, &x, &StepSchedule::default())?;
        println!("{:<14} relerr {:.2e} (tolerance {:.1e})", f.name(), h.relerr, h.tolerance);
    }

    let fine = StepSchedule::new(vec![1e-2, 1e-3, 1e-4])?;
    let a = random::random_commuting(&mut rng, &d);
    let b = random::random_commuting(&mut rng, &d);
    let c = verify::lemma_commuting_residual(&stdfun::power(0.5)?, &d, &a, &b, &fine)?;
    println!("commuting directions: expected {:.6}, residual {:.1e}", c.expected, c.residual);
    let c = verify::lemma_cross_residual(&stdfun::neg_log(), &d, &a, &x, &fine)?;
    println!("commuting vs commutator direction: residual {:.1e}", c.residual);
    Ok(())
}
