//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use qig::channels::{self, KrausChannel};
use qig::linalg::{from_real_rows, DensityMatrix, HermitianMatrix};
use qig::quantities::{renyi, skew_info, umegaki, wyd_direct};
use qig::stdfun::{self, DiscreteMeasure, ScalarFunctionSpec};
use qig::verify::{self, random, DimRange, StepSchedule, TrialReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn qubit() -> DensityMatrix {
    DensityMatrix::diagonal(&[0.75, 0.25]).unwrap()
}

fn sigma_x() -> HermitianMatrix {
    HermitianMatrix::new(from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap()
}

fn suite(name: &str, trials: u64) -> TrialReport {
    verify::run_suite(name, trials, SEED, DimRange::new(2, 5).unwrap(), None).unwrap()
}

fn residual(r: &TrialReport) -> f64 {
    r.max_residual.unwrap_or(0.0)
}

fn margin(r: &TrialReport) -> f64 {
    r.min_margin.unwrap_or(0.0)
}

fn skew_identity() -> Outcome {
    let r = suite("skew-identity", 200);
    let m = residual(&r);
    check(r.passed() && m <= 1e-9, format!("200 trials, max relative residual {m:.2e} <= 1e-9"))
}

fn hessian() -> Outcome {
    let r = suite("hessian", 100);
    let m = residual(&r);
    let g = verify::hessian_vs_skew(&stdfun::sld(), &qubit(), &sigma_x(), &StepSchedule::default()).unwrap();
    let golden = (g.lhs - 0.5).abs().max((g.rhs - 0.5).abs());
    check(
        r.passed() && m <= 1e-5 && golden <= 1e-6,
        format!("100 trials, max relerr {m:.2e} <= 1e-5; qubit lhs {:.9} rhs {:.9}", g.lhs, g.rhs),
    )
}

fn wyd_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let p = rng.random_range(0.01..0.99);
        let d = random::random_density(&mut rng, n, 0.01 / n as f64);
        let x = random::random_hermitian(&mut rng, n);
        let a = skew_info(&stdfun::wyd(p).unwrap(), &d, &x).unwrap();
        let b = wyd_direct(p, &d, &x).unwrap();
        worst = worst.max((a - b).abs());
    }
    let golden = skew_info(&stdfun::wyd(0.5).unwrap(), &qubit(), &sigma_x()).unwrap();
    let gap = (golden - (1.0 - 3f64.sqrt() / 2.0)).abs();
    check(
        worst <= 1e-9 && gap <= 1e-12,
        format!("100 trials, max |spectral - direct| {worst:.2e} <= 1e-9; golden gap {gap:.1e}"),
    )
}

fn monotonicity() -> Outcome {
    let r = suite("monotonicity", 500);
    let m = margin(&r);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut identity_gap = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let f = stdfun::power([0.25, 0.5, 0.75][rng.random_range(0..3)]).unwrap();
        let d1 = random::random_density(&mut rng, n, 0.01 / n as f64);
        let d2 = random::random_density(&mut rng, n, 0.01 / n as f64);
        let a = random::random_complex(&mut rng, n);
        let v = channels::monotonicity_margin(&f, &a, &d1, &d2, &KrausChannel::identity(n)).unwrap();
        identity_gap = identity_gap.max(v.abs());
    }
    check(
        r.passed() && m >= -1e-8 && identity_gap <= 1e-10,
        format!("500 trials, min margin {m:.2e} >= -1e-8; identity channel |margin| {identity_gap:.1e}"),
    )
}

fn concavity() -> Outcome {
    let r = suite("concavity", 500);
    let m = margin(&r);
    check(r.passed() && m >= -1e-8, format!("500 trials, min margin {m:.2e} >= -1e-8"))
}

fn det_uncertainty() -> Outcome {
    let r = suite("det-uncertainty", 200);
    let m = margin(&r);
    let g = verify::det_inequality_margins(&stdfun::sld(), &stdfun::sld(), &qubit(), &[sigma_x()]).unwrap();
    let gap = (g.margin_tvegso - 0.75).abs();
    check(
        r.passed() && m >= -1e-9 && gap <= 1e-10,
        format!("200 trials, min margin/scale {m:.2e} >= -1e-9; qubit margin {:.12}", g.margin_tvegso),
    )
}

fn lemmas() -> Outcome {
    let c = suite("lemma-commuting", 50);
    let x = suite("lemma-cross", 50);
    let (mc, mx) = (residual(&c), residual(&x));
    check(
        c.passed() && x.passed() && mc <= 1e-6 && mx <= 1e-6,
        format!("50 trials each, commuting residual {mc:.2e}, cross/identity residual {mx:.2e} <= 1e-6"),
    )
}

fn catalog_standard() -> Vec<ScalarFunctionSpec> {
    let mut fs = vec![stdfun::sld(), stdfun::harmonic(), stdfun::kubo_mori()];
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        fs.push(stdfun::wyd(p).unwrap());
    }
    for l in [0.0, 0.25, 0.5, 1.0] {
        fs.push(stdfun::extremal_inverse(l).unwrap());
    }
    fs.push(stdfun::hansen_mixture(&DiscreteMeasure::from_pairs(&[(0.0, 0.5), (1.0, 0.5)]).unwrap()));
    fs.push(stdfun::hansen_mixture(&DiscreteMeasure::from_pairs(&[(0.2, 0.3), (0.7, 0.7)]).unwrap()));
    fs
}

fn function_theory() -> Outcome {
    let grid = stdfun::probe_grid();
    let fs = catalog_standard();
    let mut standard_worst = 0.0f64;
    let mut loewner_worst = f64::INFINITY;
    for (k, f) in fs.iter().enumerate() {
        let t = stdfun::tilde_transform(f).unwrap();
        standard_worst = standard_worst.max(stdfun::check_standard(&t, &grid).max_violation());
        let r = stdfun::check_operator_monotone(&t, SEED + k as u64, 200, 3).unwrap();
        loewner_worst = loewner_worst.min(r.loewner_min_margin);
    }

    let lambdas: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let mut increase = 0.0f64;
    for w in lambdas.windows(2) {
        let (a, b) = (stdfun::extremal_g(w[0]).unwrap(), stdfun::extremal_g(w[1]).unwrap());
        for &x in &grid {
            let (ga, gb) = (a.eval(x), b.eval(x));
            if ga.is_finite() {
                increase = increase.max((gb - ga) / (1.0 + ga.abs()));
            }
        }
    }

    let mut hansen_gap = 0.0f64;
    for l in [0.0, 1.0] {
        let h = stdfun::hansen_mixture(&DiscreteMeasure::delta(l).unwrap());
        let g = stdfun::extremal_g(l).unwrap();
        for &x in &grid {
            let expected = g.eval(x);
            hansen_gap = hansen_gap.max((1.0 / h.eval(x) - expected).abs() / expected.abs().max(1.0));
        }
    }

    let mut gibi = f64::INFINITY;
    for f in &fs {
        for g in &fs {
            gibi = gibi.min(stdfun::scalar_inequality_check(f, g, &grid).min_margin);
        }
    }
    let pass = standard_worst <= 1e-9
        && loewner_worst >= -1e-8
        && increase <= 1e-14
        && hansen_gap <= 1e-14
        && gibi >= -1e-10;
    check(
        pass,
        format!(
            "tilde standardness {standard_worst:.1e}, Loewner {loewner_worst:.1e}, g_lambda increase {increase:.1e}, Hansen gap {hansen_gap:.1e}, scalar margin {gibi:.1e}"
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let r = suite("oracle-equivalence", 100);
    let m = residual(&r);
    check(r.passed() && m <= 1e-10, format!("100 trials, max deviation {m:.2e} <= 1e-10"))
}

fn renyi_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_gap = 0.0f64;
    let mut monotone = true;
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let d1 = random::random_density(&mut rng, n, 0.05 / n as f64);
        let d2 = random::random_density(&mut rng, n, 0.05 / n as f64);
        let u = umegaki(&d1, &d2).unwrap();
        let gaps: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&a| (renyi(a, &d1, &d2).unwrap() - u).abs()).collect();
        monotone &= gaps[0] > gaps[1] && gaps[1] > gaps[2];
        worst_gap = worst_gap.max(gaps[2]);
    }
    check(
        monotone && worst_gap <= 1e-2,
        format!("20 pairs, gaps decreasing: {monotone}, final gap {worst_gap:.2e} <= 1e-2"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("skew identity", skew_identity),
        ("Hessian theorem", hessian),
        ("WYD consistency", wyd_consistency),
        ("monotonicity", monotonicity),
        ("joint concavity", concavity),
        ("determinant uncertainty", det_uncertainty),
        ("derivative lemmas", lemmas),
        ("function theory", function_theory),
        ("oracle equivalence", oracle_equivalence),
        ("Renyi limit", renyi_limit),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {:>2} {:<24} {}  {}", k + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
