//! Factorization solution, superpotential and transformed potential on a
//! radial grid.
//!
//! `eta(r) = cosh(K r) + K^{-1} sinh(K r) U0` grows like `exp(K r)`, so it is
//! stored as `eta = exp(K r) A(r)` with `A` bounded. The superpotential is
//! `U = K + W` with `W = exp(-K r) (U0 - K) A^{-1} exp(-K r)`, which decays and
//! never needs a growing exponential. Since `eta'' = K^2 eta`, the potential
//! is `V = -2 U' = 2 (U^2 - K^2) = 2 (K W + W K + W^2)`.

use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix};
use crate::model::ChannelModel;

const SINGULAR_TOL: f64 = 1e-13;
const DEFAULT_DECAY_LENGTHS: f64 = 25.0;
const DEFAULT_POINTS: usize = 2000;

/// `eta(r) = exp(K r) A(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledFactorization {
    pub a: RMatrix,
    /// Diagonal exponents `kappa_j r`.
    pub exponents: Vec<f64>,
}

impl ScaledFactorization {
    /// `det eta = exp(tr(K) r) det A`, returned as `(det A, tr(K) r)`.
    pub fn det_eta_scaled(&self) -> (f64, f64) {
        (linalg::real_det(&self.a), self.exponents.iter().sum())
    }
}

pub fn factorization_solution_scaled(r: f64, model: &ChannelModel) -> Result<ScaledFactorization> {
    check_radius(r)?;
    let kappa = model.kappa();
    let u0 = model.u0();
    let n = model.n_channels();
    let decay: Vec<f64> = kappa.iter().map(|k| (-2.0 * k * r).exp()).collect();
    let a = RMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 0.5 * (1.0 + decay[i]) } else { 0.0 };
        diag + 0.5 * (1.0 - decay[i]) / kappa[i] * u0[(i, j)]
    });
    Ok(ScaledFactorization {
        a,
        exponents: kappa.iter().map(|k| k * r).collect(),
    })
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be finite and nonnegative, got {r}")))
    }
}

/// `W = U - K`.
fn excess(r: f64, model: &ChannelModel) -> Result<RMatrix> {
    let f = factorization_solution_scaled(r, model)?;
    let kappa = model.kappa();
    let u0 = model.u0();
    // row sizes of the two terms of A, so cancellation inside A shows up
    let scale: f64 = (0..f.a.nrows())
        .map(|i| {
            let e = (-2.0 * kappa[i] * r).exp();
            let row = u0.row(i).iter().map(|x| x.abs()).fold(0.0, f64::max);
            0.5 * (1.0 + e) + 0.5 * (1.0 - e) / kappa[i] * row
        })
        .product();
    let det = linalg::real_det(&f.a);
    if !(det.abs() > SINGULAR_TOL * scale) {
        return Err(Error::SingularFactorizationSolution { r });
    }
    let inv = f
        .a
        .clone()
        .try_inverse()
        .ok_or(Error::SingularFactorizationSolution { r })?;
    let mut shifted = u0;
    for (j, k) in kappa.iter().enumerate() {
        shifted[(j, j)] -= k;
    }
    let mut w = shifted * inv;
    let n = w.nrows();
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] *= (-(kappa[i] + kappa[j]) * r).exp();
        }
    }
    Ok(w)
}

/// `U = eta' eta^{-1}`.
pub fn superpotential(r: f64, model: &ChannelModel) -> Result<RMatrix> {
    let mut u = excess(r, model)?;
    for (j, k) in model.kappa().iter().enumerate() {
        u[(j, j)] += k;
    }
    Ok(u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSample {
    pub r: f64,
    /// Symmetrized potential matrix.
    pub v: RMatrix,
    /// `max |V - V^T|` before symmetrization.
    pub asymmetry: f64,
}

/// Transformed potential `V(r) = 2 (U^2 - K^2)`.
pub fn potential(r: f64, model: &ChannelModel) -> Result<PotentialSample> {
    let w = excess(r, model)?;
    let kappa = model.kappa();
    let n = w.nrows();
    let w2 = &w * &w;
    let raw = RMatrix::from_fn(n, n, |i, j| 2.0 * ((kappa[i] + kappa[j]) * w[(i, j)] + w2[(i, j)]));
    let asymmetry = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (raw[(i, j)] - raw[(j, i)]).abs())
        .fold(0.0, f64::max);
    let v = RMatrix::from_fn(n, n, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    Ok(PotentialSample { r, v, asymmetry })
}

pub fn potential_on_grid(grid: &[f64], model: &ChannelModel) -> Result<Vec<PotentialSample>> {
    grid.iter().map(|&r| potential(r, model)).collect()
}

/// `r` in `[0, 25 / kappa_min]` with 2000 points.
pub fn default_grid(model: &ChannelModel) -> Vec<f64> {
    let kmin = model.kappa().into_iter().fold(f64::INFINITY, f64::min);
    let rmax = DEFAULT_DECAY_LENGTHS / kmin;
    (0..DEFAULT_POINTS)
        .map(|i| rmax * i as f64 / (DEFAULT_POINTS - 1) as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    /// Smallest eigenvalue of `K + U0`.
    pub min_eigenvalue: f64,
}

pub fn regularity_check(model: &ChannelModel) -> Regularity {
    let min_eigenvalue = model.regularity_margin();
    Regularity {
        regular: min_eigenvalue > 0.0,
        min_eigenvalue,
    }
}

/// Least-squares slope of `ln max|V_ij|` against `r` over the second half of
/// the samples, skipping entries that underflowed to zero.
pub fn tail_log_slope(samples: &[PotentialSample]) -> Option<f64> {
    let tail = &samples[samples.len() / 2..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .map(|s| (s.r, linalg::max_abs_real(&s.v)))
        .filter(|&(_, v)| v > 0.0 && v.is_finite())
        .map(|(r, v)| (r, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mr = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mr) * (p.1 - mv)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mr) * (p.0 - mr)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
