use qig::channels::{self, KrausChannel};
use qig::linalg::{from_real_rows, max_abs_diff, ComplexMatrix, DensityMatrix, HermitianMatrix};
use qig::quantities::{fisher, quasi_entropy, renyi, skew_info, sym_cov, umegaki, wyd_direct};
use qig::stdfun;
use qig::verify::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sigma_x() -> HermitianMatrix {
    HermitianMatrix::new(from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap()
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a * (a / b).ln()).sum()
}

#[test]
fn umegaki_of_commuting_pair_is_kl() {
    let p = [0.5, 0.3, 0.2];
    let q = [0.1, 0.6, 0.3];
    let u = umegaki(&DensityMatrix::diagonal(&p).unwrap(), &DensityMatrix::diagonal(&q).unwrap()).unwrap();
    assert!((u - kl(&p, &q)).abs() < 1e-14);
}

#[test]
fn renyi_of_commuting_pair() {
    let p = [0.5, 0.3, 0.2];
    let q = [0.1, 0.6, 0.3];
    let (d1, d2) = (DensityMatrix::diagonal(&p).unwrap(), DensityMatrix::diagonal(&q).unwrap());
    for alpha in [-0.7, -0.2, 0.3, 0.9] {
        let s: f64 = p.iter().zip(&q).map(|(a, b)| a.powf(1.0 - alpha) * b.powf(alpha)).sum();
        let expected = (1.0 - s) / (alpha * (1.0 - alpha));
        assert!((renyi(alpha, &d1, &d2).unwrap() - expected).abs() < 1e-13, "alpha={alpha}");
    }
}

#[test]
fn neg_log_kernel_with_identity_is_umegaki() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=5 {
        let d1 = random::random_density(&mut rng, n, 0.01);
        let d2 = random::random_density(&mut rng, n, 0.01);
        let q = quasi_entropy(&stdfun::neg_log(), &ComplexMatrix::identity(n, n), &d1, &d2).unwrap();
        assert!((q.re() - umegaki(&d1, &d2).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn fisher_on_qubit_closed_forms() {
    for a in [0.6, 0.75, 0.9, 0.99] {
        let b = 1.0 - a;
        let d = DensityMatrix::diagonal(&[a, b]).unwrap();
        let x = sigma_x();
        let sld = fisher(&stdfun::sld(), &d, x.matrix(), x.matrix()).unwrap().re();
        assert!((sld - 4.0).abs() < 1e-12);
        let km = fisher(&stdfun::kubo_mori(), &d, x.matrix(), x.matrix()).unwrap().re();
        assert!((km - 2.0 * (a / b).ln() / (a - b)).abs() < 1e-10, "a={a}");
        let hm = fisher(&stdfun::harmonic(), &d, x.matrix(), x.matrix()).unwrap().re();
        assert!((hm - (a + b) / (a * b)).abs() < 1e-10, "a={a}");
    }
}

#[test]
fn wyd_skew_on_qubit_closed_form() {
    for a in [0.6, 0.75, 0.9] {
        let b = 1.0 - a;
        let d = DensityMatrix::diagonal(&[a, b]).unwrap();
        for p in [0.1, 0.5, 0.8] {
            let expected = 1.0 - (a.powf(p) * b.powf(1.0 - p) + b.powf(p) * a.powf(1.0 - p));
            let spectral = skew_info(&stdfun::wyd(p).unwrap(), &d, &sigma_x()).unwrap();
            let direct = wyd_direct(p, &d, &sigma_x()).unwrap();
            assert!((spectral - expected).abs() < 1e-12, "a={a} p={p}");
            assert!((direct - expected).abs() < 1e-12, "a={a} p={p}");
        }
    }
}

#[test]
fn commuting_covariance_is_classical_variance() {
    let p = [0.2, 0.5, 0.3];
    let vals = [1.0, -2.0, 0.5];
    let d = DensityMatrix::diagonal(&p).unwrap();
    let a = HermitianMatrix::from_real_diagonal(&vals);
    let mean: f64 = p.iter().zip(&vals).map(|(q, v)| q * v).sum();
    let var: f64 = p.iter().zip(&vals).map(|(q, v)| q * (v - mean).powi(2)).sum();
    assert!((sym_cov(&d, a.matrix(), a.matrix()).unwrap().re() - var).abs() < 1e-14);
    assert!(skew_info(&stdfun::sld(), &d, &a).unwrap().abs() < 1e-14);
}

#[test]
fn simple_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let d = random::random_density(&mut rng, 3, 0.02);
    let out = channels::apply_state(&KrausChannel::fully_depolarizing(3), &d).unwrap();
    assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(3).matrix()) < 1e-14);
    let u = random::random_unitary(&mut rng, 3);
    let out = channels::apply_state(&KrausChannel::unitary(u.clone()).unwrap(), &d).unwrap();
    assert!(max_abs_diff(out.matrix(), &(&u * d.matrix() * u.adjoint())) < 1e-14);
}
