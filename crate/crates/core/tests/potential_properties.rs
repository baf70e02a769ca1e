//! Riccati identity, symmetry, decay and regularity of the transformed potential.

mod common;

use coxspec::linalg::{self, RMatrix};
use coxspec::potential::{
    default_grid, factorization_solution_scaled, potential, potential_on_grid, superpotential,
    tail_log_slope,
};

#[test]
fn superpotential_satisfies_riccati_equation() {
    let h = 1e-4;
    let mut rng = common::rng(31);
    for n in 2..=4usize {
        for _ in 0..15 {
            let m = common::random_regular_model(&mut rng, n);
            let kappa = m.kappa();
            let k2 = RMatrix::from_fn(n, n, |i, j| if i == j { kappa[i] * kappa[i] } else { 0.0 });
            let scale = 1.0 + linalg::max_abs_real(&k2);
            for r in [0.3, 1.0, 2.5, 6.0] {
                let du = (superpotential(r + h, &m).unwrap() - superpotential(r - h, &m).unwrap()) / (2.0 * h);
                let u = superpotential(r, &m).unwrap();
                let rhs = &k2 - &u * &u;
                assert!(linalg::max_abs_real(&(du - rhs)) < 1e-6 * scale, "N={n} r={r}");
            }
        }
    }
}

#[test]
fn potential_symmetric_and_decaying() {
    let mut rng = common::rng(32);
    for n in 2..=4usize {
        for case in 0..15 {
            let m = common::random_regular_model(&mut rng, n);
            let samples = potential_on_grid(&default_grid(&m), &m).unwrap();
            for s in &samples {
                let size = linalg::max_abs_real(&s.v);
                assert!(s.asymmetry <= 1e-12 * size.max(f64::MIN_POSITIVE), "N={n} case {case} r={}", s.r);
            }
            let kmin = m.kappa().into_iter().fold(f64::INFINITY, f64::min);
            let slope = tail_log_slope(&samples).unwrap();
            assert!(slope <= -1.8 * kmin, "N={n} case {case}: slope {slope} kmin {kmin}");
        }
    }
}

#[test]
fn regular_models_have_no_singularity_up_to_sixty() {
    let mut rng = common::rng(33);
    let grid = common::linspace(0.0, 60.0, 3001);
    for n in 2..=4usize {
        for _ in 0..15 {
            let m = common::random_regular_model(&mut rng, n);
            for &r in &grid {
                let (det_a, _) = factorization_solution_scaled(r, &m).unwrap().det_eta_scaled();
                assert!(det_a > 0.0, "N={n} r={r}: det A = {det_a}");
                assert!(potential(r, &m).is_ok());
            }
        }
    }
}
