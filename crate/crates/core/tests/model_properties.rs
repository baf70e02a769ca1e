//! Kinematic identities of the channel model over random parameters.

mod common;

use coxspec::linalg;
use coxspec::{Complex64, SheetSignature, Tolerances};
use rand::Rng;

fn random_k1(rng: &mut rand_chacha::ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0))
}

#[test]
fn jost_determinant_identity() {
    let mut rng = common::rng(51);
    let tol = Tolerances::default();
    for n in 1..=4usize {
        for _ in 0..25 {
            let m = common::random_regular_model(&mut rng, n);
            let k1 = random_k1(&mut rng);
            for sheet in SheetSignature::enumerate(n, 0) {
                let k = m.momenta_from_k1(k1, &sheet).k;
                let lhs = linalg::complex_det(&m.jost_matrix(&k, &tol).unwrap()) * m.jost_prefactor_det(&k);
                let rhs = linalg::complex_det(&m.b_matrix(&k));
                assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300), "N={n}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn b_matrix_real_symmetric_on_imaginary_axis() {
    let mut rng = common::rng(52);
    for _ in 0..50 {
        let m = common::random_regular_model(&mut rng, 3);
        let k: Vec<Complex64> = (0..3).map(|_| Complex64::new(0.0, rng.gen_range(-5.0..5.0))).collect();
        let b = m.b_matrix(&k);
        let scale = linalg::max_abs_complex(&b);
        for i in 0..3 {
            for j in 0..3 {
                assert!(b[(i, j)].im.abs() < 1e-14 * scale);
                assert_eq!(b[(i, j)], b[(j, i)]);
            }
        }
    }
}

#[test]
fn momenta_satisfy_threshold_relation() {
    let mut rng = common::rng(53);
    for n in 1..=5usize {
        let m = common::random_regular_model(&mut rng, n);
        for _ in 0..20 {
            let k1 = random_k1(&mut rng);
            for sheet in SheetSignature::enumerate(n, 0) {
                let mom = m.momenta_from_k1(k1, &sheet);
                assert!(mom.threshold_residual(m.thresholds()) < 1e-12 * (1.0 + k1.norm_sqr()));
            }
        }
    }
}

#[test]
fn sheet_sign_counts() {
    for n in 1..=8usize {
        let sheets = SheetSignature::enumerate(n, 0);
        assert_eq!(sheets.len(), 1 << (n - 1));
        let total: usize = sheets.iter().map(|s| s.n_plus() + s.n_minus() + 1).sum();
        assert_eq!(total, n << (n - 1));
        let minus: usize = sheets.iter().map(|s| s.n_minus()).sum();
        let plus: usize = sheets.iter().map(|s| s.n_plus()).sum();
        let half = if n >= 2 { (n - 1) << (n - 2) } else { 0 };
        assert_eq!((plus, minus), (half, half));
    }
}
