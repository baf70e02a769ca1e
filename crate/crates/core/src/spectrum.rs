//! Zeros of the Jost determinant: root finding on the eliminated polynomial,
//! Newton polish on the original system, classification, the bound-state
//! count from `B(0)`, and the eigenvalue curves of `B^sigma` on imaginary momenta.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::elimination::{self, SubstitutionChain};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::model::{ChannelModel, Momenta, SheetSignature, Tolerances};
use crate::poly::{self, AberthConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);
const MAX_CHANNELS: usize = 10;
const CONDITIONING_WARNING_ABOVE: usize = 6;
const MAX_NEWTON_STEPS: usize = 50;
const MAX_HALVINGS: usize = 30;
const CROSSING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpectralClass {
    Bound,
    Virtual,
    ResonanceMember,
    Cancelled,
    Degenerate,
}

impl SpectralClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralClass::Bound => "bound",
            SpectralClass::Virtual => "virtual",
            SpectralClass::ResonanceMember => "resonance_member",
            SpectralClass::Cancelled => "cancelled",
            SpectralClass::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for SpectralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One classified zero of `det B`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint {
    pub momenta: Momenta,
    pub energy: Complex64,
    pub class: SpectralClass,
    pub sheet: SheetSignature,
    /// Dimensionless residual of the unsquared system, see [`residual`].
    pub residual: f64,
}

impl SpectralPoint {
    pub fn k1(&self) -> Complex64 {
        self.momenta.k[0]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub n_b: usize,
    pub n_v: usize,
    /// Resonance pairs, i.e. half the number of resonance members.
    pub n_r: usize,
    pub n_cancelled: usize,
    pub n_degenerate: usize,
    pub expected_total: usize,
}

impl Tally {
    pub fn from_points(points: &[SpectralPoint], n_channels: usize) -> Self {
        let count = |c: SpectralClass| points.iter().filter(|p| p.class == c).count();
        Self {
            n_b: count(SpectralClass::Bound),
            n_v: count(SpectralClass::Virtual),
            n_r: count(SpectralClass::ResonanceMember) / 2,
            n_cancelled: count(SpectralClass::Cancelled),
            n_degenerate: count(SpectralClass::Degenerate),
            expected_total: n_channels << (n_channels - 1),
        }
    }

    /// `n_b + n_v + 2 n_r + n_cancelled + n_degenerate`.
    pub fn total(&self) -> usize {
        self.n_b + self.n_v + 2 * self.n_r + self.n_cancelled + self.n_degenerate
    }

    pub fn is_conserved(&self) -> bool {
        self.total() == self.expected_total
    }
}

/// Result of [`solve_spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub points: Vec<SpectralPoint>,
    pub tally: Tally,
    /// Degree of the eliminated polynomial.
    pub degree: usize,
    pub warnings: Vec<String>,
}

impl Spectrum {
    pub fn of_class(&self, class: SpectralClass) -> impl Iterator<Item = &SpectralPoint> {
        self.points.iter().filter(move |p| p.class == class)
    }
}

pub fn solve_spectrum(model: &ChannelModel) -> Result<Spectrum> {
    solve_spectrum_with(model, &Tolerances::default())
}

/// All zeros of `det B` on all sheets, polished and classified.
pub fn solve_spectrum_with(model: &ChannelModel, tol: &Tolerances) -> Result<Spectrum> {
    let n = model.n_channels();
    if n > MAX_CHANNELS {
        return Err(Error::InvalidInput(format!(
            "{n} channels exceeds the supported maximum of {MAX_CHANNELS}"
        )));
    }
    let report = model.validate();
    let mut warnings = Vec::new();
    if !report.is_ok() {
        if !report.only_regularity() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidInput(msgs.join("; ")));
        }
        warnings.extend(report.violations.iter().map(|v| v.to_string()));
    }
    if n > CONDITIONING_WARNING_ABOVE {
        warnings.push(format!(
            "{n} channels: eliminated polynomial of degree {} may be ill-conditioned",
            n << (n - 1)
        ));
    }

    let chain = elimination::eliminate(&elimination::build_detb_poly(model), model)?;
    let rough = poly::aberth_roots(&chain.final_poly, &AberthConfig::default());
    let roots = refine_on_sheet_product(model, rough.roots);
    if !roots.converged {
        warnings.push(format!(
            "root finder stopped after {} iterations without full convergence",
            roots.iterations
        ));
    }

    let mut polished = Vec::with_capacity(roots.roots.len());
    for &k1 in &roots.roots {
        let start = recover_momenta(k1, &chain, model, tol);
        polished.push(polish_root(model, &start.k, tol));
    }
    separate_collapsed(&mut polished, &roots.roots, model, tol);
    let points = classify(polished, model, tol)?;
    let tally = Tally::from_points(&points, n);
    Ok(Spectrum {
        points,
        tally,
        degree: chain.degree(),
        warnings,
    })
}

/// Back-substitution with the sheet-scan fallback.
fn recover_momenta(
    k1: Complex64,
    chain: &SubstitutionChain,
    model: &ChannelModel,
    tol: &Tolerances,
) -> Momenta {
    match elimination::back_substitute(k1, chain, model, tol) {
        Ok(m) if m.k.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => m,
        _ => sheet_scan(k1, model),
    }
}

/// Aberth refinement on `prod_sigma det B^sigma(k1)`, which is the eliminated
/// polynomial up to a constant but evaluated factor by factor.
///
/// The explicit coefficients lose accuracy through the repeated squaring, so
/// their roots serve only as starting points. Each factor is a determinant
/// evaluated directly, so zeros on different sheets with nearly equal `k1`
/// stay separated.
fn refine_on_sheet_product(model: &ChannelModel, start: Vec<Complex64>) -> poly::RootSet {
    let sheets = SheetSignature::enumerate(model.n_channels(), 0);
    let ratio = |k1: Complex64| {
        let mut log_derivative = Complex64::new(0.0, 0.0);
        for sheet in &sheets {
            let k = model.momenta_from_k1(k1, sheet).k;
            let Some(inv) = model.b_matrix(&k).try_inverse() else {
                return Complex64::new(0.0, 0.0);
            };
            // d det B / dk_j = -i minor_jj = -i det B (B^-1)_jj, dk_j/dk1 = k1/k_j
            for (j, kj) in k.iter().enumerate() {
                log_derivative += -I * inv[(j, j)] * (k1 / kj);
            }
        }
        log_derivative.inv()
    };
    let cfg = AberthConfig {
        max_iterations: 500,
        tolerance: 1e-12,
    };
    poly::aberth_iterate(start, ratio, &cfg)
}

/// Zeros on sheets that differ only in the sign of a weakly coupled closed
/// channel have nearly equal `k1`, so their polynomial roots come out
/// clustered, and where the eliminated polynomial is ill-conditioned its
/// roots are only rough. Either way a start can polish onto a zero already
/// found, or not converge. For each such root, retries the same `k1` on every
/// sheet and keeps the first converged zero not already present. Genuine
/// double zeros stay duplicated.
fn separate_collapsed(
    polished: &mut [PolishedRoot],
    starts: &[Complex64],
    model: &ChannelModel,
    tol: &Tolerances,
) {
    let scale = 1.0 + polished.iter().map(|r| r.momenta.max_norm()).fold(0.0, f64::max);
    let limit = tol.degenerate * scale;
    let offset = |i: usize, p: &[PolishedRoot]| (starts[i] - p[i].momenta.k[0]).norm();

    // among coinciding zeros the start nearest in k1 keeps it
    let mut retry: Vec<usize> = Vec::new();
    for i in 0..polished.len() {
        if !polished[i].converged {
            retry.push(i);
            continue;
        }
        let loses = (0..polished.len()).any(|j| {
            j != i
                && polished[j].converged
                && polished[j].momenta.distance(&polished[i].momenta) < limit
                && (offset(j, polished), j) < (offset(i, polished), i)
        });
        if loses {
            retry.push(i);
        }
    }

    let sheets = SheetSignature::enumerate(model.n_channels(), 0);
    for &i in &retry {
        let mut candidates: Vec<(f64, Momenta)> = sheets
            .iter()
            .map(|sheet| {
                let m = model.momenta_from_k1(starts[i], sheet);
                (residual(model, &m.k), m)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, start) in candidates {
            let candidate = polish_root(model, &start.k, tol);
            let fresh = candidate.converged
                && polished
                    .iter()
                    .enumerate()
                    .all(|(j, r)| j == i || r.momenta.distance(&candidate.momenta) >= limit);
            if fresh {
                polished[i] = candidate;
                break;
            }
        }
    }
}

/// Momenta on the sheet where `|det B|` is smallest at the given `k1`.
pub fn sheet_scan(k1: Complex64, model: &ChannelModel) -> Momenta {
    SheetSignature::enumerate(model.n_channels(), 0)
        .iter()
        .map(|s| {
            let m = model.momenta_from_k1(k1, s);
            let b = model.b_matrix(&m.k);
            let size = linalg::max_abs_complex(&b).max(f64::MIN_POSITIVE);
            let r = linalg::complex_det(&b).norm() / size.powi(model.n_channels() as i32);
            (r, m)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, m)| m)
        .expect("at least one sheet")
}

/// `max(|det B| / ||B||_max^N, max_j |k_j^2 - k1^2 + Delta_j| / (1 + |k1|^2))`.
pub fn residual(model: &ChannelModel, k: &[Complex64]) -> f64 {
    let b = model.b_matrix(k);
    let n = model.n_channels() as i32;
    let size = linalg::max_abs_complex(&b).max(f64::MIN_POSITIVE);
    let det = linalg::complex_det(&b).norm() / size.powi(n);
    let m = Momenta::new(k.to_vec());
    let thr = m.threshold_residual(model.thresholds()) / (1.0 + k[0].norm_sqr());
    det.max(thr)
}

/// A root after Newton refinement on the unsquared system.
#[derive(Clone, Debug, PartialEq)]
pub struct PolishedRoot {
    pub momenta: Momenta,
    pub residual: f64,
    pub converged: bool,
}

/// Damped Newton on `det B(k) = 0`, `k_j^2 - k1^2 + Delta_j = 0` (j >= 2).
///
/// Roots that land within the imaginary-axis tolerance are moved onto the
/// axis and refined again; on the axis the system is real, so they stay there.
pub fn polish_root(model: &ChannelModel, start: &[Complex64], tol: &Tolerances) -> PolishedRoot {
    let mut k = newton(model, start.to_vec());
    if on_imaginary_axis(k[0], tol) {
        let mut snapped: Vec<Complex64> = k.iter().map(|z| Complex64::new(0.0, z.im)).collect();
        snapped = newton(model, snapped);
        for z in &mut snapped {
            z.re = 0.0;
        }
        if residual(model, &snapped) <= residual(model, &k).max(tol.polish) {
            k = snapped;
        }
    }
    let r = residual(model, &k);
    PolishedRoot {
        momenta: Momenta::new(k),
        residual: r,
        converged: r < tol.polish,
    }
}

fn newton(model: &ChannelModel, mut k: Vec<Complex64>) -> Vec<Complex64> {
    let n = model.n_channels();
    let thresholds = model.thresholds();
    let mut merit = residual(model, &k);
    for _ in 0..MAX_NEWTON_STEPS {
        if merit == 0.0 {
            break;
        }
        let b = model.b_matrix(&k);
        let mut jac = CMatrix::zeros(n, n);
        let mut f = nalgebra::DVector::<Complex64>::zeros(n);
        f[0] = linalg::complex_det(&b);
        for j in 0..n {
            jac[(0, j)] = -I * linalg::complex_principal_minor(&b, j);
        }
        for j in 1..n {
            f[j] = k[j] * k[j] - k[0] * k[0] + thresholds[j];
            jac[(j, 0)] = -2.0 * k[0];
            jac[(j, j)] = 2.0 * k[j];
        }
        let Some(step) = jac.lu().solve(&f) else {
            break;
        };
        if step.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<Complex64> = k.iter().zip(step.iter()).map(|(a, d)| a - d * lambda).collect();
            let r = residual(model, &trial);
            if r < merit {
                accepted = Some((trial, r));
                break;
            }
            lambda *= 0.5;
        }
        let Some((trial, r)) = accepted else {
            break;
        };
        let moved = step.iter().map(|z| z.norm()).fold(0.0, f64::max) * lambda;
        let size = 1.0 + k.iter().map(|z| z.norm()).fold(0.0, f64::max);
        k = trial;
        merit = r;
        if moved < 1e-15 * size {
            break;
        }
    }
    k
}

fn on_imaginary_axis(k1: Complex64, tol: &Tolerances) -> bool {
    k1.re.abs() < tol.imaginary_axis * (1.0 + k1.norm())
}

/// Assigns classes, pairs resonance members and sorts deterministically.
pub fn classify(
    roots: Vec<PolishedRoot>,
    model: &ChannelModel,
    tol: &Tolerances,
) -> Result<Vec<SpectralPoint>> {
    let kappa = model.kappa();
    let scale = 1.0 + roots.iter().map(|r| r.momenta.max_norm()).fold(0.0, f64::max);

    let mut classes: Vec<Option<SpectralClass>> = vec![None; roots.len()];
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if roots[i].momenta.distance(&roots[j].momenta) < tol.degenerate * scale {
                classes[i] = Some(SpectralClass::Degenerate);
                classes[j] = Some(SpectralClass::Degenerate);
            }
        }
    }

    for (root, class) in roots.iter().zip(classes.iter_mut()) {
        if class.is_some() {
            continue;
        }
        let k = &root.momenta.k;
        let cancelled = k
            .iter()
            .zip(&kappa)
            .any(|(kj, &kap)| (kj + I * kap).norm() < tol.cancellation * (1.0 + kap));
        *class = Some(if cancelled {
            SpectralClass::Cancelled
        } else if on_imaginary_axis(k[0], tol) {
            if k.iter().all(|z| z.im > 0.0) {
                SpectralClass::Bound
            } else {
                SpectralClass::Virtual
            }
        } else {
            SpectralClass::ResonanceMember
        });
    }

    // every complex zero needs its mirror -conj(k)
    let members: Vec<usize> = (0..roots.len())
        .filter(|&i| classes[i] == Some(SpectralClass::ResonanceMember))
        .collect();
    let mut partner: Vec<Option<usize>> = vec![None; roots.len()];
    for &i in &members {
        if partner[i].is_some() {
            continue;
        }
        let mirror = roots[i].momenta.mirrored();
        let best = members
            .iter()
            .copied()
            .filter(|&j| j != i && partner[j].is_none())
            .map(|j| (mirror.distance(&roots[j].momenta), j))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let limit = tol.pairing * (1.0 + roots[i].momenta.max_norm());
        match best {
            Some((d, j)) if d < limit => {
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
            _ => {
                let k1 = roots[i].momenta.k[0];
                return Err(Error::UnpairedComplexZero { re: k1.re, im: k1.im });
            }
        }
    }

    let mut points: Vec<SpectralPoint> = roots
        .into_iter()
        .zip(classes)
        .map(|(root, class)| SpectralPoint {
            energy: root.momenta.energy,
            sheet: SheetSignature::of_momenta(&root.momenta.k, model.thresholds(), tol),
            momenta: root.momenta,
            class: class.expect("every root classified"),
            residual: root.residual,
        })
        .collect();
    points.sort_by(compare_points);
    Ok(points)
}

fn compare_points(a: &SpectralPoint, b: &SpectralPoint) -> Ordering {
    a.class
        .cmp(&b.class)
        .then(a.energy.re.total_cmp(&b.energy.re))
        .then(a.energy.im.total_cmp(&b.energy.im))
        .then(a.sheet.cmp(&b.sheet))
        .then(a.momenta.k[0].im.total_cmp(&b.momenta.k[0].im))
}

/// `B(0) = U0 + diag(sqrt(Delta_j))`: the B matrix at the lowest threshold on
/// the physical sheet.
pub fn threshold_matrix(model: &ChannelModel) -> RMatrix {
    curve_matrix(model, &SheetSignature::physical(model.n_channels()), 0.0)
}

/// Number of bound states, `(N - sum_j sign lambda_j(0)) / 2`.
pub fn count_bound_states(model: &ChannelModel, tol: &Tolerances) -> Result<usize> {
    let b0 = threshold_matrix(model);
    let scale = linalg::max_abs_real(&b0).max(1.0);
    let eig = linalg::symmetric_eigenvalues(&b0);
    if let Some(&v) = eig.iter().find(|v| v.abs() < tol.threshold_critical * scale) {
        return Err(Error::ThresholdCritical { value: v });
    }
    Ok(eig.iter().filter(|&&v| v < 0.0).count())
}

/// `B^sigma(t) = U0 + diag(t, sigma_2 sqrt(t^2 + Delta_2), ...)`, the B matrix
/// at `k1 = i t` on the sheet `sigma`.
pub fn curve_matrix(model: &ChannelModel, sheet: &SheetSignature, t: f64) -> RMatrix {
    let mut b = model.u0();
    for (j, &d) in model.thresholds().iter().enumerate() {
        b[(j, j)] += if j == 0 {
            t
        } else {
            f64::from(sheet.sign(j)) * (t * t + d).sqrt()
        };
    }
    b
}

/// Momenta at `k1 = i t` on `sheet`.
pub fn curve_momenta(model: &ChannelModel, sheet: &SheetSignature, t: f64) -> Momenta {
    let k = model
        .thresholds()
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            if j == 0 {
                Complex64::new(0.0, t)
            } else {
                Complex64::new(0.0, f64::from(sheet.sign(j)) * (t * t + d).sqrt())
            }
        })
        .collect();
    Momenta::new(k)
}

/// A zero of the `index`-th sorted eigenvalue of `B^sigma` at `k1 = i kbar1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub index: usize,
    pub kbar1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenCurve {
    pub sheet: SheetSignature,
    pub grid: Vec<f64>,
    /// `eigenvalues[s]` holds the sorted eigenvalues at `grid[s]`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub crossings: Vec<Crossing>,
}

/// Eigenvalues of `B^sigma(kbar1)` on a grid and the zero crossings of each
/// sorted trace, refined by bisection.
pub fn eigenvalue_curves(model: &ChannelModel, sheet: &SheetSignature, grid: &[f64]) -> Result<EigenCurve> {
    if sheet.anchor() != 0 || sheet.len() != model.n_channels() {
        return Err(Error::InvalidInput(
            "eigenvalue curves need a channel-1 anchored sheet of length N".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("grid must be finite and strictly increasing".into()));
    }
    let eigenvalues: Vec<Vec<f64>> = grid
        .iter()
        .map(|&t| linalg::symmetric_eigenvalues(&curve_matrix(model, sheet, t)))
        .collect();
    let mut crossings = Vec::new();
    for s in 1..grid.len() {
        let pairs = eigenvalues[s - 1].iter().zip(&eigenvalues[s]);
        for (index, (&a, &b)) in pairs.enumerate() {
            if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
                let kbar1 = if b == 0.0 {
                    grid[s]
                } else {
                    bisect(model, sheet, index, grid[s - 1], grid[s], a)
                };
                crossings.push(Crossing { index, kbar1 });
            }
        }
    }
    Ok(EigenCurve {
        sheet: sheet.clone(),
        grid: grid.to_vec(),
        eigenvalues,
        crossings,
    })
}

fn bisect(model: &ChannelModel, sheet: &SheetSignature, index: usize, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    while hi - lo > CROSSING_TOL * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = linalg::symmetric_eigenvalues(&curve_matrix(model, sheet, mid))[index];
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radius beyond which no `B^sigma(t)` can be singular (Gershgorin).
pub fn imaginary_zero_bound(model: &ChannelModel) -> f64 {
    let n = model.n_channels();
    let u0 = model.u0();
    (0..n)
        .map(|j| (0..n).map(|l| u0[(j, l)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
