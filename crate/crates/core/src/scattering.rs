//! S-matrix, channel-1 phase shift and partial cross section on the real
//! energy axis, all from the closed-form Jost matrix.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::model::{ChannelModel, Tolerances};

const THRESHOLD_TOL: f64 = 1e-8;
const SINGULAR_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSample {
    pub energy: f64,
    /// Number of channels with `E > Delta_j`.
    pub open_count: usize,
    /// Zero-based indices of the open channels, in channel order.
    pub open: Vec<usize>,
    /// Open-channel block of the S-matrix, rows and columns ordered as `open`.
    pub s: CMatrix,
    /// `arg(S_11) / 2`; principal value for a single sample, continuous along a sweep.
    pub delta1: f64,
    /// `(pi / k1^2) |1 - S_11|^2`.
    pub sigma11: f64,
}

/// Physical-sheet momenta at real energy: `sqrt(E - Delta_j)` for open
/// channels, `i sqrt(Delta_j - E)` for closed ones.
pub fn physical_momenta(energy: f64, thresholds: &[f64]) -> Vec<Complex64> {
    thresholds
        .iter()
        .map(|&d| {
            if energy > d {
                Complex64::new((energy - d).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, (d - energy).sqrt())
            }
        })
        .collect()
}

/// `S = K_o^{1/2} [F(-k) F(k)^{-1}]^T_oo K_o^{-1/2}`.
///
/// For one channel this is `F(-k) / F(k)`. The transpose puts the outgoing
/// channel in the row index; with it `S` is unitary and symmetric.
pub fn s_matrix(energy: f64, model: &ChannelModel) -> Result<ObservableSample> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::InvalidInput(format!("energy must be positive, got {energy}")));
    }
    let thresholds = model.thresholds();
    if let Some(&d) = thresholds
        .iter()
        .find(|&&d| (energy - d).abs() < THRESHOLD_TOL * (1.0 + d.abs()))
    {
        return Err(Error::ThresholdProximity { energy, threshold: d });
    }
    let k = physical_momenta(energy, thresholds);
    let open: Vec<usize> = (0..k.len()).filter(|&j| k[j].im == 0.0).collect();

    let tol = Tolerances::default();
    let f_plus = model.jost_matrix(&k, &tol)?;
    let minus: Vec<Complex64> = k.iter().map(|z| -z).collect();
    let f_minus = model.jost_matrix(&minus, &tol)?;

    let row_scale: f64 = (0..f_plus.nrows())
        .map(|i| f_plus.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .product();
    if !(linalg::complex_det(&f_plus).norm() > SINGULAR_TOL * row_scale) {
        return Err(Error::JostSingular { energy });
    }
    let inv = f_plus.try_inverse().ok_or(Error::JostSingular { energy })?;
    let full = (f_minus * inv).transpose();

    let no = open.len();
    let s = CMatrix::from_fn(no, no, |a, b| {
        let (i, j) = (open[a], open[b]);
        full[(i, j)] * (k[i].re / k[j].re).sqrt()
    });
    let s11 = s[(0, 0)];
    let k1 = k[0].re;
    Ok(ObservableSample {
        energy,
        open_count: no,
        open,
        delta1: principal_half_phase(s11),
        sigma11: PI / (k1 * k1) * (Complex64::new(1.0, 0.0) - s11).norm_sqr(),
        s,
    })
}

/// `arg(s) / 2` in `(-pi/2, pi/2]`.
fn principal_half_phase(s: Complex64) -> f64 {
    let mut d = 0.5 * s.arg();
    if d <= -0.5 * PI {
        d += PI;
    }
    d
}

#[derive(Debug)]
pub struct Sweep {
    pub samples: Vec<ObservableSample>,
    /// Energies that failed, with the reason; the sweep continues past them.
    pub errors: Vec<(f64, Error)>,
}

/// `s_matrix` over an increasing grid with the phase shift made continuous.
///
/// The first successful sample keeps its principal value; each later one is
/// moved by the multiple of `pi` that brings it closest to its predecessor.
pub fn observable_sweep(grid: &[f64], model: &ChannelModel) -> Result<Sweep> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("energy grid must be strictly increasing".into()));
    }
    let mut samples: Vec<ObservableSample> = Vec::with_capacity(grid.len());
    let mut errors = Vec::new();
    for &e in grid {
        match s_matrix(e, model) {
            Ok(mut s) => {
                if let Some(prev) = samples.last() {
                    let turns = ((prev.delta1 - s.delta1) / PI).round();
                    s.delta1 += turns * PI;
                }
                samples.push(s);
            }
            Err(err) if err.is_input_error() => return Err(err),
            Err(err) => errors.push((e, err)),
        }
    }
    Ok(Sweep { samples, errors })
}

/// `max |S^dagger S - 1|` and `max |S - S^T|`.
pub fn unitarity_and_symmetry_defects(s: &CMatrix) -> (f64, f64) {
    let n = s.nrows();
    let sds = s.adjoint() * s;
    let unit = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let id = if i == j { 1.0 } else { 0.0 };
            (sds[(i, j)] - Complex64::new(id, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    let sym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (s[(i, j)] - s[(j, i)]).norm())
        .fold(0.0, f64::max);
    (unit, sym)
}
