//! Seeded random model generators shared by the property tests.
#![allow(dead_code)]

use coxspec::ChannelModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct thresholds `0 < Delta_2 < ... < Delta_N` spaced at least 0.5 apart.
pub fn random_thresholds(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut t = vec![0.0];
    for _ in 1..n {
        let last = *t.last().unwrap();
        t.push(last + rng.gen_range(0.5..8.0));
    }
    t
}

/// A regular model: `alpha` in [-4, 4], couplings in [-1.5, 1.5], and the
/// factorization energy pushed down until `K + U0` is positive definite.
pub fn random_regular_model(rng: &mut ChaCha8Rng, n: usize) -> ChannelModel {
    let thresholds = random_thresholds(rng, n);
    let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let mut beta = Vec::new();
    for j in 1..n {
        for l in 0..j {
            beta.push((j, l, rng.gen_range(-1.5..1.5)));
        }
    }
    let mut e = -rng.gen_range(0.1..2.0);
    loop {
        let m = ChannelModel::new(thresholds.clone(), alpha.clone(), &beta, e).unwrap();
        if m.regularity_margin() > 1e-3 {
            return m;
        }
        e = 2.0 * e - 1.0;
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Couplings `beta * b` over a decoupled model whose unperturbed zeros are
/// well separated and whose second-order denominators stay away from zero.
/// Entries of `b` have magnitude in [0.5, 1], so no level is nearly decoupled.
pub fn random_nondegenerate_split(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (ChannelModel, coxspec::perturbation::CouplingSplit) {
    use coxspec::perturbation::{decoupled_roots, CouplingSplit};
    use coxspec::linalg::RMatrix;
    const GAP: f64 = 1.5;
    loop {
        let thresholds = random_thresholds(rng, n);
        let alpha: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let base = ChannelModel::new(thresholds, alpha.clone(), &[], -1.0).unwrap();
        let roots = decoupled_roots(&base).unwrap();
        let separated = roots.iter().enumerate().all(|(i, a)| {
            roots[i + 1..].iter().all(|b| a.momenta.distance(&b.momenta) > GAP)
        });
        let denominators_ok = roots.iter().all(|r| {
            (0..n).filter(|&l| l != r.level).all(|l| {
                let k = r.momenta.k[l];
                k.norm() > GAP && (coxspec::Complex64::new(alpha[l], 0.0) - coxspec::Complex64::i() * k).norm() > GAP
            })
        });
        if !(separated && denominators_ok) {
            continue;
        }
        let mut b = RMatrix::zeros(n, n);
        for j in 1..n {
            for l in 0..j {
                let v = rng.gen_range(0.5..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                b[(j, l)] = v;
                b[(l, j)] = v;
            }
        }
        return (base, CouplingSplit::new(1.0, b).unwrap());
    }
}
