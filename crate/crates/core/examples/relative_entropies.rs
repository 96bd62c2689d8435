//! Quasi-entropies, Umegaki and Rényi relative entropies.

use qig::linalg::{ComplexMatrix, DensityMatrix};
use qig::quantities::{quasi_entropy, renyi, umegaki};
use qig::stdfun;

fn main() -> qig::Result<()> {
    let d1 = DensityMatrix::diagonal(&[0.5, 0.5])?;
    let d2 = DensityMatrix::diagonal(&[0.75, 0.25])?;
    let u = umegaki(&d1, &d2)?;
    println!("umegaki(I/2 || diag(.75,.25)) = {u:.12}");

    let id = ComplexMatrix::identity(2, 2);
    let q = quasi_entropy(&stdfun::neg_log(), &id, &d1, &d2)?;
    println!("quasi-entropy with -log kernel and A=I: {:.12}", q.re());

    for alpha in [0.5, 0.1, 0.01, 0.001, -0.001] {
        let r = renyi(alpha, &d1, &d2)?;
        println!("renyi alpha={alpha:<7} {r:.12}  gap {:.3e}", (r - u).abs());
    }
    match renyi(0.0, &d1, &d2) {
        Err(e) => println!("alpha=0: {e}"),
        Ok(v) => println!("alpha=0 unexpectedly gave {v}"),
    }
    Ok(())
}
