//! Covariances, Fisher information and skew information on a qubit.

use qig::linalg::{from_real_rows, DensityMatrix, HermitianMatrix};
use qig::quantities::{fisher, gen_cov, skew_identity_residual, skew_info, sym_cov, wyd_direct};
use qig::stdfun;

fn main() -> qig::Result<()> {
    let d = DensityMatrix::diagonal(&[0.75, 0.25])?;
    let x = HermitianMatrix::new(from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]))?;
    let m = x.matrix();

    println!("Cov(X,X)             = {}", sym_cov(&d, m, m)?.re());
    let tilde = stdfun::tilde_transform(&stdfun::sld())?;
    println!("qCov tilde(sld)(X,X) = {}", gen_cov(&tilde, &d, m, m)?.re());
    for f in [stdfun::sld(), stdfun::harmonic(), stdfun::kubo_mori(), stdfun::wyd(0.5)?] {
        let fi = fisher(&f, &d, m, m)?.re();
        let sk = skew_info(&f, &d, &x)?;
        let id = skew_identity_residual(&f, &d, &x)?;
        println!("{:<12} fisher {fi:.6}  skew {sk:.6}  identity residual {:.1e}", f.name(), id.relative());
    }
    println!("wyd(0.5) direct = {:.12}, 1 - sqrt(3)/2 = {:.12}", wyd_direct(0.5, &d, &x)?, 1.0 - 3f64.sqrt() / 2.0);
    Ok(())
}
