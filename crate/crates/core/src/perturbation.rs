//! Weak-coupling expansion of the zeros of `det B`.
//!
//! With `U0 = diag(alpha) + beta b`, every zero of the decoupled problem sits
//! at `k_j = -i alpha_j` for some level `j`, on one of `2^(N-1)` sheets
//! anchored at `j`. The first-order shift vanishes; the second-order one is
//! `i beta^2 sum_{l != j} b_jl^2 / (alpha_l - i k_l)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::model::{principal_sqrt, ChannelModel, Momenta, SheetSignature, Tolerances};
use crate::spectrum::SpectralPoint;

const I: Complex64 = Complex64::new(0.0, 1.0);
const DENOMINATOR_TOL: f64 = 1e-6;

/// `U0 = diag(alpha) + beta * b` with `b` symmetric and zero on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSplit {
    pub beta: f64,
    pub b: RMatrix,
}

impl CouplingSplit {
    pub fn new(beta: f64, b: RMatrix) -> Result<Self> {
        let n = b.nrows();
        if b.ncols() != n {
            return Err(Error::InvalidInput("coupling shape must be square".into()));
        }
        for j in 0..n {
            if b[(j, j)] != 0.0 {
                return Err(Error::InvalidInput("coupling shape must have a zero diagonal".into()));
            }
            for l in 0..j {
                if b[(j, l)] != b[(l, j)] {
                    return Err(Error::InvalidInput("coupling shape must be symmetric".into()));
                }
            }
        }
        Ok(Self { beta, b })
    }

    /// `beta = max |beta_jl|` and `b = beta_jl / beta`.
    pub fn from_model(model: &ChannelModel) -> Self {
        let n = model.n_channels();
        let beta = model.couplings().iter().map(|c| c.2.abs()).fold(0.0, f64::max);
        let b = RMatrix::from_fn(n, n, |j, l| {
            if j == l || beta == 0.0 {
                0.0
            } else {
                model.beta(j, l) / beta
            }
        });
        Self { beta, b }
    }

    /// The same shape at a different strength.
    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, b: self.b.clone() }
    }

    /// `model` with its couplings replaced by `beta * b`.
    pub fn apply(&self, model: &ChannelModel) -> Result<ChannelModel> {
        let n = model.n_channels();
        if self.b.nrows() != n {
            return Err(Error::InvalidInput("coupling shape does not match channel count".into()));
        }
        let beta: Vec<(usize, usize, f64)> = (1..n)
            .flat_map(|j| (0..j).map(move |l| (j, l)))
            .filter(|&(j, l)| self.b[(j, l)] != 0.0)
            .map(|(j, l)| (j, l, self.beta * self.b[(j, l)]))
            .collect();
        ChannelModel::new(
            model.thresholds().to_vec(),
            model.alpha().to_vec(),
            &beta,
            model.factorization_energy(),
        )
    }

    fn check_consistent(&self, model: &ChannelModel) -> Result<()> {
        let n = model.n_channels();
        if self.b.nrows() != n {
            return Err(Error::InvalidInput("coupling shape does not match channel count".into()));
        }
        let scale = 1.0 + self.beta.abs() * self.b.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for j in 1..n {
            for l in 0..j {
                let want = model.beta(j, l);
                if (self.beta * self.b[(j, l)] - want).abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "coupling split does not reproduce beta_{}{}",
                        j + 1,
                        l + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A zero labelled by its unperturbed level and a sheet anchored at that level.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedRoot {
    /// Zero-based level channel `j`.
    pub level: usize,
    pub sheet: SheetSignature,
    pub momenta: Momenta,
    /// The unperturbed level lies above the first threshold.
    pub zero_width: bool,
}

impl PerturbedRoot {
    /// The sheet re-expressed with channel 1 as anchor.
    pub fn channel1_sheet(&self, thresholds: &[f64], tol: &Tolerances) -> SheetSignature {
        SheetSignature::of_momenta(&self.momenta.k, thresholds, tol)
    }
}

/// Zeros of the decoupled problem. Fails when the model has any coupling.
pub fn decoupled_roots(model: &ChannelModel) -> Result<Vec<PerturbedRoot>> {
    if !model.is_decoupled() {
        return Err(Error::InvalidInput(
            "decoupled roots need all couplings equal to zero".into(),
        ));
    }
    Ok(unperturbed(model))
}

fn unperturbed(model: &ChannelModel) -> Vec<PerturbedRoot> {
    let n = model.n_channels();
    let thresholds = model.thresholds();
    let alpha = model.alpha();
    let mut out = Vec::with_capacity(n << (n - 1));
    for j in 0..n {
        let level_energy = -alpha[j] * alpha[j] + thresholds[j];
        for sheet in SheetSignature::enumerate(n, j) {
            let k = (0..n)
                .map(|m| {
                    if m == j {
                        Complex64::new(0.0, -alpha[j])
                    } else {
                        let radicand = Complex64::new(level_energy - thresholds[m], 0.0);
                        principal_sqrt(radicand) * f64::from(sheet.sign(m))
                    }
                })
                .collect();
            out.push(PerturbedRoot {
                level: j,
                sheet,
                momenta: with_level_energy(k, level_energy),
                zero_width: level_energy > 0.0,
            });
        }
    }
    out
}

fn with_level_energy(k: Vec<Complex64>, energy: f64) -> Momenta {
    Momenta {
        k,
        energy: Complex64::new(energy, 0.0),
    }
}

/// Second-order zeros for every level and sheet.
///
/// The level momentum carries the second-order shift; the companion momenta
/// follow from the threshold relation expanded to the same order.
pub fn perturbed_roots(model: &ChannelModel, split: &CouplingSplit) -> Result<Vec<PerturbedRoot>> {
    split.check_consistent(model)?;
    let n = model.n_channels();
    let alpha = model.alpha();
    let scale = 1.0 + alpha.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let beta2 = split.beta * split.beta;

    let mut out = unperturbed(model);
    for root in &mut out {
        let j = root.level;
        let k0 = root.momenta.k.clone();
        let mut shift = Complex64::new(0.0, 0.0);
        for l in (0..n).filter(|&l| l != j) {
            let bjl = split.b[(j, l)];
            if bjl == 0.0 {
                continue;
            }
            let denom = alpha[l] - I * k0[l];
            if denom.norm() < DENOMINATOR_TOL * scale {
                return Err(Error::NearDegenerateDenominator {
                    level: j + 1,
                    channel: l + 1,
                    magnitude: denom.norm(),
                });
            }
            shift += bjl * bjl / denom;
        }
        let delta = I * beta2 * shift;
        if delta == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut k = k0.clone();
        k[j] = k0[j] + delta;
        for m in (0..n).filter(|&m| m != j) {
            if k0[m].norm() < DENOMINATOR_TOL * scale {
                return Err(Error::NearDegenerateDenominator {
                    level: j + 1,
                    channel: m + 1,
                    magnitude: k0[m].norm(),
                });
            }
            k[m] = k0[m] + k0[j] * delta / k0[m];
        }
        root.momenta = Momenta::new(k);
        if j != 0 {
            // energy to second order from the level channel: E = k_j^2 + Delta_j
            let kj = k0[j];
            root.momenta.energy = kj * kj + 2.0 * kj * delta + model.thresholds()[j];
        }
    }
    Ok(out)
}

/// Greedy nearest-neighbour assignment of perturbed roots to exact zeros.
///
/// Pairs are taken in order of increasing momentum distance; the result maps
/// each perturbed root to the index of its exact partner.
pub fn match_roots(perturbed: &[PerturbedRoot], exact: &[SpectralPoint]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = perturbed
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            exact
                .iter()
                .enumerate()
                .map(move |(e, x)| (p.momenta.distance(&x.momenta), i, e))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut result = vec![None; perturbed.len()];
    let mut taken = vec![false; exact.len()];
    for (_, i, e) in pairs {
        if result[i].is_none() && !taken[e] {
            result[i] = Some(e);
            taken[e] = true;
        }
    }
    result
}
