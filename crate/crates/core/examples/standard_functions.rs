//! The standard operator monotone functions and their checks.

use qig::stdfun::{self, DiscreteMeasure};

fn main() -> qig::Result<()> {
    let grid = stdfun::probe_grid();
    let mu = DiscreteMeasure::from_pairs(&[(0.2, 0.3), (0.7, 0.7)])?;
    let fs = [
        stdfun::sld(),
        stdfun::harmonic(),
        stdfun::kubo_mori(),
        stdfun::wyd(0.3)?,
        stdfun::extremal_inverse(0.5)?,
        stdfun::hansen_mixture(&mu),
    ];
    println!("{:<24} {:>8} {:>10} {:>12} {:>12}", "function", "f(0)", "f''(1)", "symmetry", "loewner");
    for (k, f) in fs.iter().enumerate() {
        let std = stdfun::check_standard(f, &grid);
        let mono = stdfun::check_operator_monotone(f, k as u64, 100, 3)?;
        println!(
            "{:<24} {:>8.4} {:>10.4} {:>12.1e} {:>12.1e}",
            f.name(),
            f.value_at_zero(),
            f.second_derivative_at_one()?,
            std.symmetry,
            mono.loewner_min_margin
        );
    }

    let t = stdfun::tilde_transform(&stdfun::sld())?;
    println!("tilde of sld at x=4: {:.6}", t.eval(4.0));
    for l in [0.0, 0.5, 1.0] {
        println!("g_{l}(4) = {:.6}", stdfun::extremal_g(l)?.eval(4.0));
    }
    let r = stdfun::scalar_inequality_check(&stdfun::sld(), &stdfun::wyd(0.5)?, &grid);
    println!("f(x)g(x) - f(0)g(0)(x-1)^2 >= {:.3e} (at x={:.3})", r.min_margin, r.argmin);
    Ok(())
}
