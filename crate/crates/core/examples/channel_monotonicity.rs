//! Monotonicity under channels, joint concavity and the Schwarz inequality.

use qig::channels::{self, KrausChannel};
use qig::stdfun;
use qig::verify::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ch = channels::random_channel(4, 2, 3, 3)?;
    let d1 = random::random_density(&mut rng, 4, 0.01);
    let d2 = random::random_density(&mut rng, 4, 0.01);
    let a = random::random_complex(&mut rng, 2);

    for f in [stdfun::power(0.5)?, stdfun::sld(), stdfun::wyd(0.2)?] {
        let m = channels::monotonicity_margin(&f, &a, &d1, &d2, &ch)?;
        println!("{:<10} monotonicity margin {m:.3e}", f.name());
    }
    let dp = channels::data_processing_margin(&stdfun::neg_log(), &d1, &d2, &ch)?;
    println!("relative entropy decrease under the channel: {dp:.6}");
    println!("Schwarz margin: {:.3e}", channels::schwarz_margin(&ch, &a)?);

    let e1 = random::random_density(&mut rng, 4, 0.01);
    let e2 = random::random_density(&mut rng, 4, 0.01);
    let b = random::random_complex(&mut rng, 4);
    let c = channels::concavity_margin(&stdfun::power(0.5)?, &b, (&d1, &d2), (&e1, &e2), 0.3)?;
    println!("joint concavity margin: {c:.3e}");

    let id = channels::monotonicity_margin(&stdfun::sld(), &b, &d1, &d2, &KrausChannel::identity(4))?;
    println!("identity channel margin: {id:.1e}");
    Ok(())
}
