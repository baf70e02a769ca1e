//! Reduction of `det B = 0` plus the threshold conditions to one univariate
//! polynomial in `k1`, and the back-substitution chain that recovers
//! `k2, ..., kN` from each of its roots.
//!
//! The determinant is multilinear in every momentum. Eliminating `k_m`
//! (for `m = N, ..., 2`) writes the current equation as `k_m P + R = 0`,
//! squares `k_m P = Q` with `Q = -R`, and replaces every `k_j^2` by
//! `k1^2 - Delta_j`. Each step doubles the degree in `k1`; the final
//! polynomial has degree `N 2^(N-1)`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix};
use crate::model::{ChannelModel, Momenta, Tolerances};
use crate::poly::UniPoly;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative size of the leading coefficient below which `P_N` is declared degenerate.
const LEADING_UNDERFLOW: f64 = 1e-250;

/// Polynomial multilinear in `k2..kN` with coefficients univariate in `k1`.
///
/// `terms[mask]` is the coefficient of `prod_{bit b in mask} k_{b+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearPoly {
    n_channels: usize,
    terms: Vec<UniPoly>,
}

impl MultilinearPoly {
    pub fn zero(n_channels: usize) -> Self {
        Self {
            n_channels,
            terms: vec![UniPoly::zero(); 1 << (n_channels - 1)],
        }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn term(&self, mask: usize) -> &UniPoly {
        &self.terms[mask]
    }

    pub fn terms(&self) -> &[UniPoly] {
        &self.terms
    }

    /// Masks with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_zero())
            .map(|(m, _)| m)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(UniPoly::max_abs).fold(0.0, f64::max)
    }

    fn scale(&mut self, s: f64) {
        for t in &mut self.terms {
            *t = t.scale(Complex64::new(s, 0.0));
        }
    }

    /// Highest channel index (zero-based) appearing in any monomial.
    pub fn highest_variable(&self) -> Option<usize> {
        self.support().filter(|&m| m != 0).map(|m| 64 - (m as u64).leading_zeros() as usize).max()
    }

    /// Evaluates at `k1` and the leading entries `k[1..]` that are present.
    /// Monomials are restricted to the channels available in `k`.
    pub fn eval(&self, k: &[Complex64]) -> Complex64 {
        self.support()
            .map(|mask| {
                let mono: Complex64 = bits(mask).map(|b| k[b + 1]).product();
                self.terms[mask].eval(k[0]) * mono
            })
            .sum()
    }

    /// Same monomials with every coefficient and momentum replaced by its magnitude.
    pub fn eval_abs(&self, k: &[Complex64]) -> f64 {
        self.support()
            .map(|mask| {
                let mono: f64 = bits(mask).map(|b| k[b + 1].norm()).product();
                self.terms[mask].eval_abs(k[0].norm()) * mono
            })
            .sum()
    }

    /// Splits on channel `channel` (zero-based, >= 1): `self = k_channel * P + R`.
    fn split(&self, channel: usize) -> (Self, Self) {
        let bit = 1 << (channel - 1);
        let mut with = Self::zero(self.n_channels);
        let mut without = Self::zero(self.n_channels);
        for mask in self.support() {
            if mask & bit != 0 {
                with.terms[mask & !bit] = self.terms[mask].clone();
            } else {
                without.terms[mask] = self.terms[mask].clone();
            }
        }
        (with, without)
    }

    /// Product with every `k_j^2` (j >= 2) replaced by `k1^2 - Delta_j`.
    fn mul_reduced(&self, other: &Self, thresholds: &[f64]) -> Self {
        let mut out = Self::zero(self.n_channels);
        let mut factors: HashMap<usize, UniPoly> = HashMap::new();
        let lhs: Vec<usize> = self.support().collect();
        let rhs: Vec<usize> = other.support().collect();
        for &a in &lhs {
            for &b in &rhs {
                let common = a & b;
                let prod = &self.terms[a] * &other.terms[b];
                let prod = if common == 0 {
                    prod
                } else {
                    let f = factors.entry(common).or_insert_with(|| {
                        bits(common).fold(UniPoly::constant(ONE), |acc, bit| {
                            &acc * &UniPoly::shifted_square(thresholds[bit + 1])
                        })
                    });
                    &prod * f
                };
                out.terms[a ^ b].add_assign(&prod);
            }
        }
        out
    }
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |b| mask >> b & 1 == 1)
}

/// One elimination step: `k_channel * p = q` over the remaining variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainStep {
    /// Zero-based channel eliminated at this step.
    pub channel: usize,
    pub p: MultilinearPoly,
    pub q: MultilinearPoly,
}

/// The steps in elimination order (`k_N` first) and the final polynomial `P_N(k1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionChain {
    pub steps: Vec<ChainStep>,
    pub final_poly: UniPoly,
    /// Product of the renormalization factors applied after each squaring.
    pub log10_scale: f64,
}

impl SubstitutionChain {
    pub fn degree(&self) -> usize {
        self.final_poly.degree().unwrap_or(0)
    }
}

/// Expansion of `det(U0 - i diag(k))` as a polynomial multilinear in all momenta.
///
/// The coefficient of `prod_{j in S} k_j` is `(-i)^|S|` times the principal
/// minor of `U0` on the complement of `S`.
pub fn build_detb_poly(model: &ChannelModel) -> MultilinearPoly {
    let n = model.n_channels();
    let u0 = model.u0();
    let mut out = MultilinearPoly::zero(n);
    let minus_i = Complex64::new(0.0, -1.0);
    for subset in 0..(1usize << n) {
        let complement: Vec<usize> = (0..n).filter(|j| subset >> j & 1 == 0).collect();
        let minor = RMatrix::from_fn(complement.len(), complement.len(), |a, b| {
            u0[(complement[a], complement[b])]
        });
        let det = linalg::real_det(&minor);
        if det == 0.0 {
            continue;
        }
        let size = subset.count_ones() as i32;
        let coeff = minus_i.powi(size) * det;
        let k1_power = subset & 1;
        let mask = subset >> 1;
        let mut c = vec![Complex64::new(0.0, 0.0); k1_power + 1];
        c[k1_power] = coeff;
        out.terms[mask].add_assign(&UniPoly::from_coeffs(c));
    }
    out
}

/// Runs the elimination loop for `k_N, ..., k_2` and returns the chain.
pub fn eliminate(poly: &MultilinearPoly, model: &ChannelModel) -> Result<SubstitutionChain> {
    let n = model.n_channels();
    if poly.n_channels() != n {
        return Err(Error::InvalidInput("polynomial and model disagree on N".into()));
    }
    let thresholds = model.thresholds();
    let mut current = poly.clone();
    let mut steps = Vec::with_capacity(n.saturating_sub(1));
    let mut log10_scale = 0.0;

    for channel in (1..n).rev() {
        let (p, r) = current.split(channel);
        let mut q = r;
        q.scale(-1.0);
        // (k1^2 - Delta_m) P^2 - Q^2
        let p2 = p.mul_reduced(&p, thresholds);
        let q2 = q.mul_reduced(&q, thresholds);
        let shift = UniPoly::shifted_square(thresholds[channel]);
        let mut next = MultilinearPoly::zero(n);
        for mask in 0..next.terms.len() {
            let a = &p2.terms[mask] * &shift;
            next.terms[mask] = &a - &q2.terms[mask];
        }
        let s = next.max_abs();
        if s == 0.0 || !s.is_finite() {
            return Err(Error::DegenerateLeadingForm);
        }
        next.scale(1.0 / s);
        log10_scale += s.log10();
        steps.push(ChainStep { channel, p, q });
        current = next;
    }

    debug_assert!(current.support().all(|m| m == 0));
    let final_poly = current.terms[0].clone().trimmed();
    let max = final_poly.max_abs();
    let expected = n << (n - 1);
    match final_poly.degree() {
        None => return Err(Error::DegenerateLeadingForm),
        Some(d) if d < expected && final_poly.leading().norm() < LEADING_UNDERFLOW * max => {
            return Err(Error::DegenerateLeadingForm)
        }
        _ => {}
    }
    if final_poly.leading().norm() < LEADING_UNDERFLOW * max {
        return Err(Error::DegenerateLeadingForm);
    }
    Ok(SubstitutionChain {
        steps,
        final_poly,
        log10_scale,
    })
}

/// Recovers `k2, ..., kN` from a root `k1` of `P_N` by `k_m = Q_m / P_m`.
///
/// No polishing happens here. Fails with a chain-breakdown error when some
/// `P_m` is negligible against its own magnitude envelope at the point.
pub fn back_substitute(
    k1: Complex64,
    chain: &SubstitutionChain,
    model: &ChannelModel,
    tol: &Tolerances,
) -> Result<Momenta> {
    let n = model.n_channels();
    let mut k = vec![Complex64::new(0.0, 0.0); n];
    k[0] = k1;
    for step in chain.steps.iter().rev() {
        let known = &k[..step.channel];
        let p = step.p.eval(known);
        let size = step.p.eval_abs(known);
        if !(p.norm() > tol.chain_breakdown * size) {
            return Err(Error::ChainBreakdown {
                channel: step.channel + 1,
                magnitude: p.norm(),
            });
        }
        k[step.channel] = step.q.eval(known) / p;
    }
    Ok(Momenta::new(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SheetSignature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn virtual3() -> ChannelModel {
        ChannelModel::new(
            vec![0.0, 15.0, 35.0],
            vec![3.0, 5.0, 9.0],
            &[(1, 0, 0.5), (2, 0, 0.4), (2, 1, 0.2)],
            -1.0,
        )
        .unwrap()
    }

    // Cofactor expansion along the first row, independent of any LU.
    fn cofactor_det(m: &RMatrix) -> f64 {
        let n = m.nrows();
        if n == 0 {
            return 1.0;
        }
        if n == 1 {
            return m[(0, 0)];
        }
        (0..n)
            .map(|col| {
                let minor = RMatrix::from_fn(n - 1, n - 1, |i, j| {
                    m[(i + 1, if j < col { j } else { j + 1 })]
                });
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, col)] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn detb_one_channel() {
        let m = ChannelModel::new(vec![0.0], vec![3.0], &[], -1.0).unwrap();
        let p = build_detb_poly(&m);
        assert_eq!(p.term(0).coeffs(), &[c(3.0, 0.0), c(0.0, -1.0)]);
    }

    #[test]
    fn detb_two_channel_expansion() {
        let (a1, a2, b) = (0.7, -1.3, 0.4);
        let m = ChannelModel::new(vec![0.0, 2.0], vec![a1, a2], &[(1, 0, b)], -1.0).unwrap();
        let p = build_detb_poly(&m);
        // -k1 k2 - i a2 k1 - i a1 k2 + (a1 a2 - b^2)
        assert!((p.term(0).coeffs()[0] - c(a1 * a2 - b * b, 0.0)).norm() < 1e-15);
        assert!((p.term(0).coeffs()[1] - c(0.0, -a2)).norm() < 1e-15);
        assert!((p.term(1).coeffs()[0] - c(0.0, -a1)).norm() < 1e-15);
        assert!((p.term(1).coeffs()[1] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn detb_constant_term_matches_cofactor_oracle() {
        let m = virtual3();
        let p = build_detb_poly(&m);
        let oracle = cofactor_det(&m.u0());
        assert!((p.term(0).coeffs()[0] - c(oracle, 0.0)).norm() < 1e-13);
        // leading monomial k1 k2 k3 has coefficient (-i)^3 = i
        assert!((p.term(0b11).coeffs()[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn detb_poly_evaluates_to_determinant() {
        let m = virtual3();
        let p = build_detb_poly(&m);
        let k = [c(0.3, 1.1), c(-0.7, 0.2), c(1.4, -0.9)];
        let direct = linalg::complex_det(&m.b_matrix(&k));
        assert!((p.eval(&k) - direct).norm() < 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn one_channel_chain_is_empty() {
        let m = ChannelModel::new(vec![0.0], vec![2.5], &[], -1.0).unwrap();
        let chain = eliminate(&build_detb_poly(&m), &m).unwrap();
        assert!(chain.steps.is_empty());
        assert_eq!(chain.degree(), 1);
        let k = back_substitute(c(0.0, -2.5), &chain, &m, &Tolerances::default()).unwrap();
        assert_eq!(k.k, vec![c(0.0, -2.5)]);
    }

    #[test]
    fn degrees_follow_n_two_to_n_minus_one() {
        for n in 1..=5usize {
            let thresholds: Vec<f64> = (0..n).map(|j| 1.7 * j as f64 + 0.3 * (j * j) as f64).collect();
            let alpha: Vec<f64> = (0..n).map(|j| 0.9 - 0.45 * j as f64).collect();
            let mut beta = Vec::new();
            for j in 1..n {
                for l in 0..j {
                    beta.push((j, l, 0.1 + 0.05 * (j + l) as f64));
                }
            }
            let m = ChannelModel::new(thresholds, alpha, &beta, -10.0).unwrap();
            let chain = eliminate(&build_detb_poly(&m), &m).unwrap();
            assert_eq!(chain.degree(), n << (n - 1), "N = {n}");
        }
    }

    // P_N(z) is proportional to the product over sheets of det B^sigma(z).
    #[test]
    fn final_poly_is_sheet_product() {
        let m = virtual3();
        let chain = eliminate(&build_detb_poly(&m), &m).unwrap();
        let sheets = SheetSignature::enumerate(3, 0);
        let product = |z: Complex64| -> Complex64 {
            sheets
                .iter()
                .map(|s| linalg::complex_det(&m.b_matrix(&m.momenta_from_k1(z, s).k)))
                .product()
        };
        let zs = [c(0.3, 0.2), c(-1.5, 2.0), c(4.0, -0.5), c(0.0, 7.0)];
        let ratios: Vec<Complex64> = zs.iter().map(|&z| chain.final_poly.eval(z) / product(z)).collect();
        for r in &ratios[1..] {
            assert!((r - ratios[0]).norm() < 1e-9 * ratios[0].norm(), "{ratios:?}");
        }
    }

    #[test]
    fn two_channel_back_substitution() {
        let m = ChannelModel::new(
            vec![0.0, 1.0],
            vec![-0.112_648_939_768_785_76, -1.795_567_656_791_443_4],
            &[(1, 0, 0.1)],
            -1.51 * 1.51,
        )
        .unwrap();
        let chain = eliminate(&build_detb_poly(&m), &m).unwrap();
        assert_eq!(chain.degree(), 4);
        assert!(chain.final_poly.eval(c(0.0, 0.1)).norm() < 1e-12);
        let k = back_substitute(c(0.0, 0.1), &chain, &m, &Tolerances::default()).unwrap();
        assert!((k.k[1] - c(0.0, 1.01f64.sqrt())).norm() < 1e-10);
    }

    #[test]
    fn chain_relations_hold_at_constructed_root() {
        let m = virtual3();
        let chain = eliminate(&build_detb_poly(&m), &m).unwrap();
        let roots = crate::poly::aberth_roots(&chain.final_poly, &Default::default());
        assert_eq!(roots.roots.len(), 12);
        let tol = Tolerances::default();
        for &r in &roots.roots {
            let k = back_substitute(r, &chain, &m, &tol).unwrap();
            for step in &chain.steps {
                let known = &k.k[..step.channel];
                let lhs = k.k[step.channel] * step.p.eval(known);
                let rhs = step.q.eval(known);
                assert!((lhs - rhs).norm() < 1e-8 * step.q.eval_abs(known).max(1e-300));
            }
        }
    }
}
