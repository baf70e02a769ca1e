//! Parameter set, channel kinematics, sheet signatures and the B / Jost
//! matrix evaluators.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Principal square root with the cut on the negative real axis.
///
/// A radicand lying exactly on the cut (zero imaginary part of either sign)
/// maps to the upper imaginary axis, so `sqrt(-a) = +i sqrt(a)`.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

/// Numerical tolerances shared by the solvers. Every field is a relative
/// tolerance; see the individual uses for the scale each one multiplies.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// `|k_j + i kappa_j| < cancellation * (1 + kappa_j)` marks a cancellation pole.
    pub cancellation: f64,
    /// `|Re k1| < imaginary_axis * (1 + |k1|)` marks a purely imaginary zero.
    pub imaginary_axis: f64,
    /// Two polished zeros closer than `degenerate * scale` are both flagged.
    pub degenerate: f64,
    /// Newton polish target on the relative determinant residual.
    pub polish: f64,
    /// Back-substitution gives up when `|P| < chain_breakdown * size(P)`.
    pub chain_breakdown: f64,
    /// `|lambda_j(0)| < threshold_critical * scale` makes the bound-state count ambiguous.
    pub threshold_critical: f64,
    /// Resonance partners must match `-conj(k)` to this relative distance.
    pub pairing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cancellation: 1e-9,
            imaginary_axis: 1e-8,
            degenerate: 1e-6,
            polish: 1e-11,
            chain_breakdown: 1e-10,
            threshold_critical: 1e-10,
            pairing: 1e-6,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 7] = [
        "cancellation",
        "imaginary_axis",
        "degenerate",
        "polish",
        "chain_breakdown",
        "threshold_critical",
        "pairing",
    ];

    /// Sets a tolerance by name. Unknown names and non-positive values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance {name} must be positive, got {value}"
            )));
        }
        let slot = match name {
            "cancellation" => &mut self.cancellation,
            "imaginary_axis" => &mut self.imaginary_axis,
            "degenerate" => &mut self.degenerate,
            "polish" => &mut self.polish,
            "chain_breakdown" => &mut self.chain_breakdown,
            "threshold_critical" => &mut self.threshold_critical,
            "pairing" => &mut self.pairing,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown tolerance '{name}' (known: {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Full parameter set of an N-channel Cox potential.
///
/// Construction never validates: inverse-problem workflows build parameters
/// before knowing whether they are regular. Call [`ChannelModel::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    thresholds: Vec<f64>,
    alpha: Vec<f64>,
    /// Strictly lower triangle of U0, row-major: (2,1), (3,1), (3,2), ...
    beta: Vec<f64>,
    factorization_energy: f64,
}

fn tri_index(j: usize, l: usize) -> usize {
    debug_assert!(j > l);
    j * (j - 1) / 2 + l
}

impl ChannelModel {
    /// `beta` entries are `(j, l, value)` with zero-based channel indices, `j != l`.
    pub fn new(
        thresholds: Vec<f64>,
        alpha: Vec<f64>,
        beta: &[(usize, usize, f64)],
        factorization_energy: f64,
    ) -> Result<Self> {
        let n = thresholds.len();
        if n == 0 {
            return Err(Error::InvalidInput("at least one channel is required".into()));
        }
        if alpha.len() != n {
            return Err(Error::InvalidInput(format!(
                "alpha has {} entries, expected {n}",
                alpha.len()
            )));
        }
        let mut packed = vec![0.0; n * (n - 1) / 2];
        let mut seen = vec![false; packed.len()];
        for &(j, l, v) in beta {
            if j >= n || l >= n || j == l {
                return Err(Error::InvalidInput(format!(
                    "beta index ({}, {}) out of range for {n} channels",
                    j + 1,
                    l + 1
                )));
            }
            let idx = tri_index(j.max(l), j.min(l));
            if seen[idx] {
                return Err(Error::InvalidInput(format!(
                    "beta ({}, {}) given twice",
                    j + 1,
                    l + 1
                )));
            }
            seen[idx] = true;
            packed[idx] = v;
        }
        Ok(Self {
            thresholds,
            alpha,
            beta: packed,
            factorization_energy,
        })
    }

    /// Builds a model from a full symmetric U0 (only the lower triangle is read).
    pub fn from_u0(thresholds: Vec<f64>, u0: &RMatrix, factorization_energy: f64) -> Result<Self> {
        let n = thresholds.len();
        if u0.nrows() != n || u0.ncols() != n {
            return Err(Error::InvalidInput("U0 shape does not match thresholds".into()));
        }
        let alpha = (0..n).map(|j| u0[(j, j)]).collect();
        let mut beta = Vec::new();
        for j in 1..n {
            for l in 0..j {
                beta.push((j, l, u0[(j, l)]));
            }
        }
        Self::new(thresholds, alpha, &beta, factorization_energy)
    }

    pub fn n_channels(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn factorization_energy(&self) -> f64 {
        self.factorization_energy
    }

    /// Off-diagonal entry of U0; symmetric in its arguments, zero on the diagonal.
    pub fn beta(&self, j: usize, l: usize) -> f64 {
        if j == l {
            0.0
        } else {
            self.beta[tri_index(j.max(l), j.min(l))]
        }
    }

    /// Nonzero couplings as `(j, l, value)` with `j > l`.
    pub fn couplings(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_channels();
        let mut out = Vec::new();
        for j in 1..n {
            for l in 0..j {
                let v = self.beta(j, l);
                if v != 0.0 {
                    out.push((j, l, v));
                }
            }
        }
        out
    }

    pub fn is_decoupled(&self) -> bool {
        self.beta.iter().all(|&b| b == 0.0)
    }

    /// `kappa_j = +sqrt(Delta_j - E_f)`; NaN when the factorization energy lies above a threshold.
    pub fn kappa(&self) -> Vec<f64> {
        self.thresholds
            .iter()
            .map(|d| (d - self.factorization_energy).sqrt())
            .collect()
    }

    pub fn with_factorization_energy(&self, e: f64) -> Self {
        Self {
            factorization_energy: e,
            ..self.clone()
        }
    }

    pub fn with_kappa1(&self, kappa1: f64) -> Self {
        self.with_factorization_energy(-kappa1 * kappa1)
    }

    pub fn u0(&self) -> RMatrix {
        let n = self.n_channels();
        RMatrix::from_fn(n, n, |j, l| if j == l { self.alpha[j] } else { self.beta(j, l) })
    }

    /// Raw parameter checks. Never mutates; callers decide what to do with violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let d = &self.thresholds;
        let all: Vec<f64> = d
            .iter()
            .chain(self.alpha.iter())
            .chain(self.beta.iter())
            .copied()
            .chain(std::iter::once(self.factorization_energy))
            .collect();
        if all.iter().any(|x| !x.is_finite()) {
            violations.push(Violation::NonFinite);
            return ValidationReport { violations };
        }
        if d[0] != 0.0 {
            violations.push(Violation::FirstThresholdNonzero(d[0]));
        }
        'outer: for j in 0..d.len() {
            for l in 0..j {
                if d[j] == d[l] {
                    violations.push(Violation::ThresholdsNotDistinct);
                    break 'outer;
                }
            }
        }
        if let Some((j, &v)) = d.iter().enumerate().skip(1).find(|(_, &v)| v < 0.0) {
            violations.push(Violation::ThresholdBelowFirst { channel: j + 1, value: v });
        }
        let lowest = d.iter().copied().fold(f64::INFINITY, f64::min);
        if self.factorization_energy >= lowest {
            violations.push(Violation::FactorizationEnergyTooHigh {
                energy: self.factorization_energy,
                bound: lowest,
            });
        } else {
            let min_eig = self.regularity_margin();
            if min_eig <= 0.0 {
                violations.push(Violation::NotPositiveDefinite { min_eigenvalue: min_eig });
            }
        }
        ValidationReport { violations }
    }

    /// Smallest eigenvalue of `K_f + U0`.
    pub fn regularity_margin(&self) -> f64 {
        let mut m = self.u0();
        for (j, k) in self.kappa().into_iter().enumerate() {
            m[(j, j)] += k;
        }
        linalg::symmetric_eigenvalues(&m)[0]
    }

    /// Momenta on a sheet from the channel-1 momentum.
    ///
    /// `k_j = sigma_j * sqrt(k1^2 - Delta_j)` with the principal root; sheets
    /// are selected only through the explicit signs.
    pub fn momenta_from_k1(&self, k1: Complex64, sheet: &SheetSignature) -> Momenta {
        assert_eq!(sheet.anchor(), 0, "momenta_from_k1 needs a channel-1 anchored sheet");
        assert_eq!(sheet.len(), self.n_channels());
        let e = k1 * k1;
        let k = self
            .thresholds
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                if j == 0 {
                    k1
                } else {
                    principal_sqrt(e - d) * f64::from(sheet.sign(j))
                }
            })
            .collect();
        Momenta { k, energy: e }
    }

    /// `B(k) = U0 - i diag(k)`.
    pub fn b_matrix(&self, k: &[Complex64]) -> CMatrix {
        let n = self.n_channels();
        assert_eq!(k.len(), n);
        CMatrix::from_fn(n, n, |j, l| {
            if j == l {
                Complex64::new(self.alpha[j], 0.0) - I * k[j]
            } else {
                Complex64::new(self.beta(j, l), 0.0)
            }
        })
    }

    /// `F(k) = (K_f - i K)^{-1} (U0 - i K)`.
    ///
    /// Fails with a cancellation-pole error when some `k_j` sits on `-i kappa_j`.
    pub fn jost_matrix(&self, k: &[Complex64], tol: &Tolerances) -> Result<CMatrix> {
        let kappa = self.kappa();
        let mut b = self.b_matrix(k);
        for (j, (&kj, &kap)) in k.iter().zip(&kappa).enumerate() {
            let dist = (kj + I * kap).norm();
            if dist < tol.cancellation * (1.0 + kap) {
                return Err(Error::CancellationPole { channel: j + 1, distance: dist });
            }
            let pre = Complex64::new(kap, 0.0) - I * kj;
            for l in 0..self.n_channels() {
                b[(j, l)] /= pre;
            }
        }
        Ok(b)
    }

    /// `det(K_f - i K)`, the denominator linking `det F` and `det B`.
    pub fn jost_prefactor_det(&self, k: &[Complex64]) -> Complex64 {
        self.kappa()
            .iter()
            .zip(k)
            .map(|(&kap, &kj)| Complex64::new(kap, 0.0) - I * kj)
            .product()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonFinite,
    FirstThresholdNonzero(f64),
    ThresholdsNotDistinct,
    ThresholdBelowFirst { channel: usize, value: f64 },
    FactorizationEnergyTooHigh { energy: f64, bound: f64 },
    NotPositiveDefinite { min_eigenvalue: f64 },
}

impl Violation {
    /// Violations that only affect the potential (not the Jost zeros).
    pub fn is_regularity(&self) -> bool {
        matches!(self, Violation::NotPositiveDefinite { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite => write!(f, "non-finite parameter"),
            Violation::FirstThresholdNonzero(d) => write!(f, "first threshold must be 0, got {d}"),
            Violation::ThresholdsNotDistinct => write!(f, "thresholds not distinct"),
            Violation::ThresholdBelowFirst { channel, value } => {
                write!(f, "threshold of channel {channel} ({value}) lies below the first")
            }
            Violation::FactorizationEnergyTooHigh { energy, bound } => {
                write!(f, "factorization energy {energy} not below lowest threshold {bound}")
            }
            Violation::NotPositiveDefinite { min_eigenvalue } => write!(
                f,
                "K+U0 not positive definite (min eigenvalue {min_eigenvalue:.6e})"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when every violation is a regularity one (zeros are still well defined).
    pub fn only_regularity(&self) -> bool {
        self.violations.iter().all(Violation::is_regularity)
    }
}

/// A choice of sign for every momentum relative to the anchor channel.
///
/// The anchor entry is always `+`. Channel 1 is the usual anchor; the
/// weak-coupling expansion anchors at the level channel instead.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SheetSignature {
    anchor: usize,
    signs: Vec<i8>,
}

impl SheetSignature {
    pub fn new(anchor: usize, signs: Vec<i8>) -> Result<Self> {
        if anchor >= signs.len() {
            return Err(Error::InvalidInput("sheet anchor out of range".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("sheet signs must be +1 or -1".into()));
        }
        if signs[anchor] != 1 {
            return Err(Error::InvalidInput("sheet anchor entry must be +".into()));
        }
        Ok(Self { anchor, signs })
    }

    pub fn physical(n: usize) -> Self {
        Self { anchor: 0, signs: vec![1; n] }
    }

    /// All `2^(N-1)` signatures anchored at `anchor`, in a fixed order.
    pub fn enumerate(n: usize, anchor: usize) -> Vec<Self> {
        assert!(anchor < n);
        let free: Vec<usize> = (0..n).filter(|&j| j != anchor).collect();
        (0..(1usize << free.len()))
            .map(|mask| {
                let mut signs = vec![1i8; n];
                for (b, &j) in free.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        signs[j] = -1;
                    }
                }
                Self { anchor, signs }
            })
            .collect()
    }

    /// Parses `"+-+"` style strings, anchored at channel 1.
    pub fn parse(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::InvalidInput(format!("bad sheet character '{c}' in '{s}'"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if signs.is_empty() {
            return Err(Error::InvalidInput("empty sheet signature".into()));
        }
        Self::new(0, signs)
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn sign(&self, j: usize) -> i8 {
        self.signs[j]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Number of `+` entries excluding the anchor.
    pub fn n_plus(&self) -> usize {
        self.signs
            .iter()
            .enumerate()
            .filter(|&(j, &s)| j != self.anchor && s == 1)
            .count()
    }

    pub fn n_minus(&self) -> usize {
        self.signs.iter().filter(|&&s| s == -1).count()
    }

    /// Channel-1 anchored signature of a solution.
    ///
    /// On the imaginary k1 axis the sign is that of `Im k_j`; elsewhere it is
    /// the sign relative to the principal root of `k1^2 - Delta_j`.
    pub fn of_momenta(k: &[Complex64], thresholds: &[f64], tol: &Tolerances) -> Self {
        let k1 = k[0];
        let on_axis = k1.re.abs() < tol.imaginary_axis * (1.0 + k1.norm());
        let signs = k
            .iter()
            .enumerate()
            .map(|(j, &kj)| {
                if j == 0 {
                    1
                } else if on_axis {
                    if kj.im >= 0.0 {
                        1
                    } else {
                        -1
                    }
                } else {
                    let s = principal_sqrt(k1 * k1 - thresholds[j]);
                    if (kj - s).norm() <= (kj + s).norm() {
                        1
                    } else {
                        -1
                    }
                }
            })
            .collect();
        Self { anchor: 0, signs }
    }
}

impl fmt::Display for SheetSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Channel momenta together with the energy `E = k1^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Momenta {
    pub k: Vec<Complex64>,
    pub energy: Complex64,
}

impl Momenta {
    pub fn new(k: Vec<Complex64>) -> Self {
        let energy = k[0] * k[0];
        Self { k, energy }
    }

    /// `max_j |k_j^2 - k1^2 + Delta_j|`.
    pub fn threshold_residual(&self, thresholds: &[f64]) -> f64 {
        let k1sq = self.k[0] * self.k[0];
        self.k
            .iter()
            .zip(thresholds)
            .map(|(kj, d)| (kj * kj - k1sq + d).norm())
            .fold(0.0, f64::max)
    }

    /// Euclidean distance between momentum vectors.
    pub fn distance(&self, other: &Momenta) -> f64 {
        self.k
            .iter()
            .zip(&other.k)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `-conj(k)` for every channel: the mirror zero with conjugate energy.
    pub fn mirrored(&self) -> Momenta {
        Momenta::new(self.k.iter().map(|z| -z.conj()).collect())
    }

    pub fn max_norm(&self) -> f64 {
        self.k.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn feshbach() -> ChannelModel {
        ChannelModel::new(vec![0.0, 1.0], vec![0.76938, -0.766853], &[(1, 0, 0.1)], -0.25).unwrap()
    }

    #[test]
    fn validate_accepts_feshbach_model() {
        let m = feshbach();
        assert!(m.validate().is_ok(), "{:?}", m.validate());
        assert!((m.kappa()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validate_flags_duplicate_thresholds() {
        let m = ChannelModel::new(vec![0.0, 0.0], vec![1.0, 1.0], &[], -1.0).unwrap();
        assert!(m.validate().violations.contains(&Violation::ThresholdsNotDistinct));
    }

    #[test]
    fn validate_flags_non_positive_definite() {
        let m = ChannelModel::new(vec![0.0], vec![-5.0], &[], -1.0).unwrap();
        let r = m.validate();
        assert!(matches!(r.violations[..], [Violation::NotPositiveDefinite { .. }]));
        assert!(r.only_regularity());
    }

    #[test]
    fn validate_flags_factorization_energy_above_threshold() {
        let m = ChannelModel::new(vec![0.0, 1.0], vec![1.0, 1.0], &[], 0.5).unwrap();
        assert!(matches!(
            m.validate().violations[..],
            [Violation::FactorizationEnergyTooHigh { .. }]
        ));
    }

    #[test]
    fn principal_sqrt_on_the_cut_points_up() {
        assert_eq!(principal_sqrt(c(-4.0, 0.0)), c(0.0, 2.0));
        assert_eq!(principal_sqrt(c(-4.0, -0.0)), c(0.0, 2.0));
        let z = principal_sqrt(c(-4.0, -1e-3));
        assert!(z.im < 0.0);
    }

    #[test]
    fn momenta_on_imaginary_axis() {
        let m = ChannelModel::new(vec![0.0, 15.0], vec![1.0, 1.0], &[], -1.0).unwrap();
        let up = m.momenta_from_k1(c(0.0, 2.0), &SheetSignature::parse("++").unwrap());
        assert!((up.k[1] - c(0.0, 19f64.sqrt())).norm() < 1e-14);
        let down = m.momenta_from_k1(c(0.0, 2.0), &SheetSignature::parse("+-").unwrap());
        assert!((down.k[1] - c(0.0, -(19f64.sqrt()))).norm() < 1e-14);
        // negative imaginary k1 gives k1^2 with a -0 imaginary part
        let neg = m.momenta_from_k1(c(0.0, -2.0), &SheetSignature::parse("++").unwrap());
        assert!(neg.k[1].im > 0.0);
    }

    #[test]
    fn momenta_feshbach_resonance_sheet() {
        // E = 0.4 + 0.01i, lower-half k1 root, sheet (+,-)
        let e = c(0.4, 0.01);
        let k1 = e.sqrt();
        let m = feshbach();
        let p = m.momenta_from_k1(k1, &SheetSignature::parse("+-").unwrap());
        assert!(p.threshold_residual(m.thresholds()) < 1e-14);
        assert!(p.k[0].re * p.k[1].re < 0.0);
    }

    #[test]
    fn b_matrix_and_jost_one_channel() {
        let m = ChannelModel::new(vec![0.0], vec![3.0], &[], -1.0).unwrap();
        let k = [c(0.0, 2.0)];
        assert_eq!(m.b_matrix(&k)[(0, 0)], c(5.0, 0.0));
        let f = m.jost_matrix(&k, &Tolerances::default()).unwrap();
        assert!((f[(0, 0)] - c(5.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn jost_cancellation_pole() {
        let m = ChannelModel::new(vec![0.0], vec![3.0], &[], -1.0).unwrap();
        let err = m.jost_matrix(&[c(0.0, -1.0)], &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::CancellationPole { channel: 1, .. }));
    }

    #[test]
    fn cox_two_channel_determinant_identity() {
        let m = feshbach();
        let (a1, a2, b) = (0.76938, -0.766853, 0.1);
        let kap = m.kappa();
        for k1 in [c(0.3, 0.7), c(-1.2, 0.1), c(0.05, -0.4)] {
            let p = m.momenta_from_k1(k1, &SheetSignature::parse("+-").unwrap());
            let f = m.jost_matrix(&p.k, &Tolerances::default()).unwrap();
            let det = linalg::complex_det(&f);
            let (k1, k2) = (p.k[0], p.k[1]);
            let expect = ((k1 + I * a1) * (k2 + I * a2) + b * b)
                / ((k1 + I * kap[0]) * (k2 + I * kap[1]));
            assert!((det - expect).norm() < 1e-13 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn sheet_enumeration_counts() {
        for n in 1..=6 {
            let sheets = SheetSignature::enumerate(n, 0);
            assert_eq!(sheets.len(), 1 << (n - 1));
            let total: usize = sheets.iter().map(|s| s.n_plus() + s.n_minus() + 1).sum();
            assert_eq!(total, n << (n - 1));
            if n >= 2 {
                let minus: usize = sheets.iter().map(|s| s.n_minus()).sum();
                let plus: usize = sheets.iter().map(|s| s.n_plus()).sum();
                assert_eq!(minus, (n - 1) << (n - 2));
                assert_eq!(plus, (n - 1) << (n - 2));
            }
            let mut dedup = sheets.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), sheets.len());
        }
    }

    #[test]
    fn sheet_parse_and_display() {
        let s = SheetSignature::parse("+-+").unwrap();
        assert_eq!(s.to_string(), "+-+");
        assert_eq!(s.n_minus(), 1);
        assert!(SheetSignature::parse("-+").is_err());
        assert!(SheetSignature::parse("+x").is_err());
    }

    #[test]
    fn tolerances_by_name() {
        let mut t = Tolerances::default();
        t.set("degenerate", 1e-5).unwrap();
        assert_eq!(t.degenerate, 1e-5);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("polish", -1.0).is_err());
    }
}
