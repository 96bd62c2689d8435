//! Gram matrices of covariance and skew information and the determinant inequalities.

use qig::stdfun;
use qig::verify::{self, random};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = random::random_density(&mut rng, 3, 0.02);
    let obs = random::random_centered_observables(&mut rng, &d, 3)?;
    let f = stdfun::wyd(0.5)?;
    let g = stdfun::sld();

    let cov = verify::cov_gram(&g, &d, &obs)?;
    let skew = verify::skew_gram(&f, &d, &obs)?;
    println!("cov gram PSD margin  {:.3e}", verify::gram_psd_margin(&cov)?);
    println!("skew gram PSD margin {:.3e}", verify::gram_psd_margin(&skew)?);

    let m = verify::det_inequality_margins(&f, &g, &d, &obs)?;
    println!("det cov {:.6e}", m.det_cov);
    println!("weaker bound {:.6e}  margin {:.3e}", m.det_tuj, m.margin_tuj / m.scale);
    println!("stronger bound {:.6e}  margin {:.3e}", m.det_tvegso, m.margin_tvegso / m.scale);
    Ok(())
}
