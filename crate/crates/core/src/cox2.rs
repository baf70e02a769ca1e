//! Two-channel closed forms.
//!
//! For `N = 2` the zeros solve `k1^2 - k2^2 = Delta` and
//! `(k1 + i alpha1)(k2 + i alpha2) + beta^2 = 0`. Two prescribed zeros fix
//! `alpha1, alpha2` through a quadratic with two branches; the remaining two
//! zeros then follow from another quadratic.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{principal_sqrt, ChannelModel};
use crate::spectrum::{self, SpectralClass};

const I: Complex64 = Complex64::new(0.0, 1.0);
const REALITY_TOL: f64 = 1e-10;
const PAIRING_TOL: f64 = 1e-8;
const THRESHOLD_TOL: f64 = 1e-9;
const BOUND_MATCH_TOL: f64 = 1e-8;
const CRITICAL_LAMBDA: f64 = 1e-8;

/// Sign choice in the closed form for `alpha1` (and the matching one for `alpha2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(Branch::Upper),
            "lower" => Ok(Branch::Lower),
            _ => Err(Error::InvalidInput(format!("branch must be 'upper' or 'lower', got '{s}'"))),
        }
    }
}

/// Sign of `Im k1` for the resonance zeros: `Upper` gives `Im k1 > 0, Im k2 < 0`.
pub type ResonanceSign = Branch;

/// One zero `(k1, k2)` of the two-channel system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroPair {
    pub k1: Complex64,
    pub k2: Complex64,
}

impl ZeroPair {
    pub fn energy(&self) -> Complex64 {
        self.k1 * self.k1
    }

    /// `|k1^2 - k2^2 - Delta|`.
    pub fn threshold_residual(&self, delta: f64) -> f64 {
        (self.k1 * self.k1 - self.k2 * self.k2 - delta).norm()
    }

    /// `|(k1 + i alpha1)(k2 + i alpha2) + beta^2|`.
    pub fn determinant_residual(&self, alpha1: f64, alpha2: f64, beta: f64) -> f64 {
        ((self.k1 + I * alpha1) * (self.k2 + I * alpha2) + beta * beta).norm()
    }
}

/// Two prescribed zeros with the fixed `Delta`, `beta` and branch.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoChannelSpec {
    pub delta: f64,
    pub beta: f64,
    pub zeros: [ZeroPair; 2],
    pub branch: Branch,
}

impl TwoChannelSpec {
    pub fn new(delta: f64, beta: f64, zeros: [ZeroPair; 2], branch: Branch) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidInput("beta must be finite".into()));
        }
        for (i, z) in zeros.iter().enumerate() {
            let scale = 1.0 + z.k1.norm_sqr() + z.k2.norm_sqr();
            if z.threshold_residual(delta) > THRESHOLD_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "zero {} violates k1^2 - k2^2 = delta (residual {:.3e})",
                    i + 1,
                    z.threshold_residual(delta)
                )));
            }
        }
        let spec = Self { delta, beta, zeros, branch };
        if spec.r1().norm() == 0.0 || spec.r2().norm() == 0.0 {
            return Err(Error::InvalidInput("the two prescribed zeros must differ in both channels".into()));
        }
        Ok(spec)
    }

    /// Two zeros forming a resonance at `E_r +- i E_i`.
    pub fn from_resonance(
        er: f64,
        ei: f64,
        delta: f64,
        beta: f64,
        sign: ResonanceSign,
        branch: Branch,
    ) -> Result<Self> {
        Self::new(delta, beta, resonance_momenta(er, ei, delta, sign)?, branch)
    }

    /// Two bound states at `k1 = i lambda1, i lambda2`.
    pub fn from_bound_states(lambda1: f64, lambda2: f64, delta: f64, beta: f64, branch: Branch) -> Result<Self> {
        let zeros = [bound_zero(lambda1, delta)?, bound_zero(lambda2, delta)?];
        Self::new(delta, beta, zeros, branch)
    }

    /// `R1 = k1^(2) - k1^(1)`.
    pub fn r1(&self) -> Complex64 {
        self.zeros[1].k1 - self.zeros[0].k1
    }

    /// `R2 = k2^(2) - k2^(1)`.
    pub fn r2(&self) -> Complex64 {
        self.zeros[1].k2 - self.zeros[0].k2
    }
}

/// `k1 = i lambda`, `k2 = i sqrt(lambda^2 + Delta)`.
pub fn bound_zero(lambda: f64, delta: f64) -> Result<ZeroPair> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("bound-state momentum must be nonnegative, got {lambda}")));
    }
    Ok(ZeroPair {
        k1: Complex64::new(0.0, lambda),
        k2: Complex64::new(0.0, (lambda * lambda + delta).sqrt()),
    })
}

/// Resonance zeros `k1 = +-k_r + i k_i`, `k2 = +-p_r + i p_i` with
/// `k1^2 = E_r +- i E_i` and `k1^2 - k2^2 = Delta`.
///
/// `k_r > 0`, `p_r < 0`, and `k_i`, `p_i` have opposite signs fixed by `sign`.
pub fn resonance_momenta(er: f64, ei: f64, delta: f64, sign: ResonanceSign) -> Result<[ZeroPair; 2]> {
    if !(ei.is_finite() && ei > 0.0) || !er.is_finite() || !delta.is_finite() {
        return Err(Error::InvalidInput(format!(
            "resonance needs finite E_r, delta and E_i > 0, got E_r = {er}, E_i = {ei}"
        )));
    }
    let s = sign.sign();
    // g = sqrt(E_r^2 + E_i^2) - E_r and h = sqrt(E_i^2 + (E_r - Delta)^2) + E_r - Delta,
    // each written without cancellation
    let g = stable_gap(er, ei, false);
    let h = stable_gap(er - delta, ei, true);
    let r2 = std::f64::consts::SQRT_2;
    let kr = ei / (r2 * g.sqrt());
    let ki = s * g.sqrt() / r2;
    let pr = -h.sqrt() / r2;
    let pi = -s * ei / (r2 * h.sqrt());
    Ok([
        ZeroPair {
            k1: Complex64::new(kr, ki),
            k2: Complex64::new(pr, pi),
        },
        ZeroPair {
            k1: Complex64::new(-kr, ki),
            k2: Complex64::new(-pr, pi),
        },
    ])
}

/// `sqrt(x^2 + y^2) - x` (or `+ x` when `plus`), evaluated stably.
fn stable_gap(x: f64, y: f64, plus: bool) -> f64 {
    let x = if plus { -x } else { x };
    let r = x.hypot(y);
    if x > 0.0 {
        y * y / (r + x)
    } else {
        r - x
    }
}

/// `sqrt(-k_r p_r)`: the smallest coupling for which the resonance is realizable.
pub fn beta_lower_bound(er: f64, ei: f64, delta: f64) -> Result<f64> {
    let z = resonance_momenta(er, ei, delta, Branch::Upper)?;
    Ok((-z[0].k1.re * z[0].k2.re).sqrt())
}

/// Resonance below the upper threshold with width smaller than its energy.
pub fn is_visible_feshbach(er: f64, ei: f64, delta: f64) -> bool {
    0.0 < er && er < delta && ei < er
}

/// `alpha1, alpha2` for which both prescribed zeros solve the system.
///
/// `alpha1 = [i(k1^(1) + k1^(2)) +- sqrt(-R1^2 - 4 beta^2 R1/R2)] / 2`; `alpha2`
/// then follows from the difference of the two determinant conditions, which
/// is linear in `alpha2`.
pub fn invert_two_roots(spec: &TwoChannelSpec) -> Result<(f64, f64)> {
    let [a, b] = spec.zeros;
    let r1 = spec.r1();
    let r2 = spec.r2();
    let beta2 = spec.beta * spec.beta;
    let radicand = -r1 * r1 - 4.0 * beta2 * r1 / r2;
    let alpha1 = 0.5 * (I * (a.k1 + b.k1) + spec.branch.sign() * principal_sqrt(radicand));
    let alpha2 = (I * (b.k1 * b.k2 - a.k1 * a.k2) - alpha1 * r2) / r1;
    let im1 = alpha1.im.abs();
    let im2 = alpha2.im.abs();
    if im1 > REALITY_TOL * (1.0 + alpha1.norm()) || im2 > REALITY_TOL * (1.0 + alpha2.norm()) {
        return Err(Error::NonRealAlpha { im1, im2 });
    }
    Ok((alpha1.re, alpha2.re))
}

/// The other two zeros for the `alpha`s of the prescribed pair.
///
/// `k1^(3,4) = [-(2 i alpha1 + k1^(1) + k1^(2)) +- sqrt(D1)] / 2` with
/// `D1 = R1^2 + 4 beta^2 R2/R1 + 4 k1^(1) k1^(2)`, and the same with the
/// channels swapped for `k2`. Each `k1` is paired with the `k2` candidate
/// that satisfies the threshold relation and the determinant condition.
pub fn complete_roots(spec: &TwoChannelSpec, alpha1: f64, alpha2: f64) -> Result<[ZeroPair; 2]> {
    let [a, b] = spec.zeros;
    let r1 = spec.r1();
    let r2 = spec.r2();
    let beta2 = spec.beta * spec.beta;
    let d1 = r1 * r1 + 4.0 * beta2 * r2 / r1 + 4.0 * a.k1 * b.k1;
    let d2 = r2 * r2 + 4.0 * beta2 * r1 / r2 + 4.0 * a.k2 * b.k2;
    let m1 = -(2.0 * I * alpha1 + a.k1 + b.k1);
    let m2 = -(2.0 * I * alpha2 + a.k2 + b.k2);
    let s1 = principal_sqrt(d1);
    let s2 = principal_sqrt(d2);
    let k1s = [0.5 * (m1 + s1), 0.5 * (m1 - s1)];
    let k2s = [0.5 * (m2 - s2), 0.5 * (m2 + s2)];

    let mut out = [ZeroPair { k1: k1s[0], k2: k2s[0] }; 2];
    for (slot, &k1) in out.iter_mut().zip(&k1s) {
        let (bad, k2) = k2s
            .iter()
            .map(|&k2| {
                let z = ZeroPair { k1, k2 };
                let scale = 1.0 + k1.norm_sqr() + k2.norm_sqr() + beta2;
                let r = z
                    .threshold_residual(spec.delta)
                    .max(z.determinant_residual(alpha1, alpha2, spec.beta))
                    / scale;
                (r, k2)
            })
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .expect("two candidates");
        if bad > PAIRING_TOL {
            return Err(Error::PairingFailure);
        }
        *slot = ZeroPair { k1, k2 };
    }
    Ok(out)
}

/// One admissible coupling for a prescribed bound state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaSolution {
    pub beta: f64,
    /// The bound state sits at the lowest threshold.
    pub threshold_critical: bool,
}

/// Couplings `beta >= sqrt(-k_r p_r)` for which the lower-branch completion of
/// the resonance contains `k1 = i lambda`.
///
/// With `x = beta^2`, `a = R1/R2`, `u = 1/a - a` and
/// `c0 = 4 (k1^(1) k1^(2) + lambda^2)`, squaring `k1^(3)(beta) = i lambda`
/// gives `16 u^2 x^2 + (8 u c0 + 64 lambda^2 a) x + c0^2 + 16 lambda^2 R1^2 = 0`.
/// Every positive root is checked by completing the roots forward.
pub fn beta_for_bound_state(
    er: f64,
    ei: f64,
    delta: f64,
    sign: ResonanceSign,
    lambda: f64,
) -> Result<Vec<BetaSolution>> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("bound-state momentum must be nonnegative, got {lambda}")));
    }
    let zeros = resonance_momenta(er, ei, delta, sign)?;
    let lower = beta_lower_bound(er, ei, delta)?;
    let r1 = (zeros[1].k1 - zeros[0].k1).re;
    let r2 = (zeros[1].k2 - zeros[0].k2).re;
    let p = (zeros[0].k1 * zeros[1].k1).re;
    let a = r1 / r2;
    let u = 1.0 / a - a;
    let l2 = lambda * lambda;
    let c0 = 4.0 * (p + l2);
    let qa = 16.0 * u * u;
    let qb = 8.0 * u * c0 + 64.0 * l2 * a;
    let qc = c0 * c0 + 16.0 * l2 * r1 * r1;

    let candidates = real_quadratic_roots(qa, qb, qc);
    let target = Complex64::new(0.0, lambda);
    let mut out: Vec<BetaSolution> = Vec::new();
    for x in candidates.into_iter().filter(|&x| x > 0.0) {
        let beta = x.sqrt();
        if beta < lower * (1.0 - 1e-12) {
            continue;
        }
        let beta = beta.max(lower);
        let Ok(spec) = TwoChannelSpec::new(delta, beta, zeros, Branch::Lower) else {
            continue;
        };
        let Ok((a1, a2)) = invert_two_roots(&spec) else {
            continue;
        };
        let Ok(rest) = complete_roots(&spec, a1, a2) else {
            continue;
        };
        if rest
            .iter()
            .any(|z| (z.k1 - target).norm() < BOUND_MATCH_TOL * (1.0 + lambda))
            && !out.iter().any(|s| (s.beta - beta).abs() < 1e-12 * (1.0 + beta))
        {
            out.push(BetaSolution {
                beta,
                threshold_critical: lambda < CRITICAL_LAMBDA,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::NoAdmissibleBeta);
    }
    out.sort_by(|x, y| x.beta.total_cmp(&y.beta));
    Ok(out)
}

fn real_quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-14 * b * b {
        return Vec::new();
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// `alpha2` that puts a bound state at `k1 = i lambda` for given `alpha1`, `beta`.
pub fn alpha2_for_bound_state(lambda: f64, delta: f64, alpha1: f64, beta: f64) -> Result<f64> {
    let denom = lambda + alpha1;
    if denom.abs() < 1e-12 * (1.0 + lambda.abs() + alpha1.abs()) {
        return Err(Error::Restriction("alpha1 = -lambda leaves alpha2 undetermined".into()));
    }
    Ok(beta * beta / denom - (lambda * lambda + delta).sqrt())
}

/// Two-channel model with `Delta = (0, delta)` and factorization energy `-kappa1^2`.
pub fn two_channel_model(delta: f64, alpha1: f64, alpha2: f64, beta: f64, kappa1: f64) -> Result<ChannelModel> {
    ChannelModel::new(vec![0.0, delta], vec![alpha1, alpha2], &[(1, 0, beta)], -kappa1 * kappa1)
}

/// The rows of the table of experimental-data mappings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `Delta, E_r, E_i` fix `alpha1, alpha2`; free `kappa1, beta >= sqrt(-k_r p_r)`.
    ResonanceOnly,
    /// `Delta, E_b, E_r, E_i` fix `alpha1, alpha2, beta`; free `kappa1 > lambda_b`.
    ResonancePlusBound,
    /// `Delta, E_1, E_2` fix `alpha1, alpha2`; free `kappa1 > lambda_2 > lambda_1`, `beta`.
    TwoBound,
    /// `Delta, E_b` fix `alpha2`; free `kappa1 > lambda_b`, `beta`, `alpha1`.
    OneBound,
}

impl Scenario {
    pub const NAMES: [&'static str; 4] = ["resonance-only", "resonance-plus-bound", "two-bound", "one-bound"];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::ResonanceOnly => "resonance-only",
            Scenario::ResonancePlusBound => "resonance-plus-bound",
            Scenario::TwoBound => "two-bound",
            Scenario::OneBound => "one-bound",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resonance-only" => Ok(Scenario::ResonanceOnly),
            "resonance-plus-bound" => Ok(Scenario::ResonancePlusBound),
            "two-bound" => Ok(Scenario::TwoBound),
            "one-bound" => Ok(Scenario::OneBound),
            _ => Err(Error::InvalidInput(format!(
                "unknown scenario '{s}' (known: {})",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Data for an inverse run. Which fields are needed depends on the scenario.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InverseInput {
    pub delta: f64,
    pub beta: Option<f64>,
    /// Explicit prescribed zeros.
    pub zeros: Option<[ZeroPair; 2]>,
    /// `(E_r, E_i, sign)`.
    pub resonance: Option<(f64, f64, ResonanceSign)>,
    /// Bound-state momenta `lambda` (energies `-lambda^2`).
    pub bound: Vec<f64>,
    pub alpha1: Option<f64>,
    pub kappa1: Option<f64>,
    pub branch: Option<Branch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseSolution {
    pub scenario: Option<Scenario>,
    pub model: ChannelModel,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub branch: Option<Branch>,
    pub kappa1: f64,
    /// Prescribed zeros first, then the completed ones.
    pub zeros: Vec<ZeroPair>,
    /// Other couplings that also satisfy the data (resonance-plus-bound).
    pub beta_alternatives: Vec<f64>,
    pub visible_feshbach: Option<bool>,
    pub threshold_critical: bool,
}

/// Solves an inverse problem, enforcing the scenario's restrictions when one is given.
///
/// Without a scenario the input must carry explicit `zeros` or a `resonance`,
/// and a `beta`. When `kappa1` is absent the smallest admissible value is
/// taken from `max(lambda) * 1.01` (or 0.5 without bound states), raised by
/// factors of 1.25 until the model is regular.
pub fn solve_inverse(scenario: Option<Scenario>, input: &InverseInput) -> Result<InverseSolution> {
    let delta = input.delta;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    let need_beta = || {
        input
            .beta
            .ok_or_else(|| Error::InvalidInput("this inverse problem needs 'beta'".into()))
    };
    let lambda_max = input.bound.iter().copied().fold(f64::NAN, f64::max);
    let mut beta_alternatives = Vec::new();
    let mut threshold_critical = false;
    let mut visible = None;
    let branch;
    let spec_or_alphas: std::result::Result<TwoChannelSpec, (f64, f64, f64)>;

    match scenario {
        Some(Scenario::ResonanceOnly) | None if input.resonance.is_some() && input.zeros.is_none() => {
            if !input.bound.is_empty() && scenario.is_some() {
                return Err(Error::Restriction("resonance-only takes no bound states".into()));
            }
            let (er, ei, sign) = input.resonance.expect("checked");
            let beta = need_beta()?;
            let bound = beta_lower_bound(er, ei, delta)?;
            if scenario.is_some() && beta.abs() < bound {
                return Err(Error::Restriction(format!(
                    "beta = {beta} is below the realizability bound sqrt(-k_r p_r) = {bound}"
                )));
            }
            branch = input.branch.unwrap_or(Branch::Upper);
            visible = Some(is_visible_feshbach(er, ei, delta));
            spec_or_alphas = Ok(TwoChannelSpec::from_resonance(er, ei, delta, beta, sign, branch)?);
        }
        None => {
            let zeros = input.zeros.ok_or_else(|| {
                Error::InvalidInput("inverse input needs 'zeros', 'resonance' or a scenario".into())
            })?;
            branch = input.branch.unwrap_or(Branch::Upper);
            spec_or_alphas = Ok(TwoChannelSpec::new(delta, need_beta()?, zeros, branch)?);
        }
        Some(Scenario::ResonanceOnly) => {
            return Err(Error::InvalidInput("resonance-only needs 'resonance'".into()));
        }
        Some(Scenario::ResonancePlusBound) => {
            let (er, ei, sign) = input
                .resonance
                .ok_or_else(|| Error::InvalidInput("resonance-plus-bound needs 'resonance'".into()))?;
            let [lambda] = input.bound[..] else {
                return Err(Error::InvalidInput("resonance-plus-bound needs exactly one bound state".into()));
            };
            if input.branch == Some(Branch::Upper) {
                return Err(Error::Restriction("resonance-plus-bound uses the lower branch".into()));
            }
            let solutions = beta_for_bound_state(er, ei, delta, sign, lambda)?;
            let chosen = match input.beta {
                Some(b) => *solutions
                    .iter()
                    .find(|s| (s.beta - b.abs()).abs() < 1e-8 * (1.0 + b.abs()))
                    .ok_or_else(|| Error::Restriction(format!("beta = {b} does not produce the bound state")))?,
                None => solutions[0],
            };
            beta_alternatives = solutions.iter().map(|s| s.beta).filter(|&b| b != chosen.beta).collect();
            threshold_critical = chosen.threshold_critical;
            branch = Branch::Lower;
            visible = Some(is_visible_feshbach(er, ei, delta));
            spec_or_alphas = Ok(TwoChannelSpec::from_resonance(er, ei, delta, chosen.beta, sign, branch)?);
        }
        Some(Scenario::TwoBound) => {
            let [l1, l2] = input.bound[..] else {
                return Err(Error::InvalidInput("two-bound needs exactly two bound states".into()));
            };
            let (l1, l2) = (l1.min(l2), l1.max(l2));
            if !(l2 > l1) {
                return Err(Error::Restriction("two-bound needs lambda_2 > lambda_1".into()));
            }
            branch = input.branch.unwrap_or(Branch::Upper);
            threshold_critical = l1 < CRITICAL_LAMBDA;
            spec_or_alphas = Ok(TwoChannelSpec::from_bound_states(l1, l2, delta, need_beta()?, branch)?);
        }
        Some(Scenario::OneBound) => {
            let [lambda] = input.bound[..] else {
                return Err(Error::InvalidInput("one-bound needs exactly one bound state".into()));
            };
            let beta = need_beta()?;
            let alpha1 = input
                .alpha1
                .ok_or_else(|| Error::InvalidInput("one-bound needs 'alpha1'".into()))?;
            branch = input.branch.unwrap_or(Branch::Upper);
            threshold_critical = lambda < CRITICAL_LAMBDA;
            let alpha2 = alpha2_for_bound_state(lambda, delta, alpha1, beta)?;
            spec_or_alphas = Err((alpha1, alpha2, beta));
        }
    }

    let (alpha1, alpha2, beta, prescribed) = match &spec_or_alphas {
        Ok(spec) => {
            let (a1, a2) = invert_two_roots(spec)?;
            (a1, a2, spec.beta, Some(spec))
        }
        Err((a1, a2, b)) => (*a1, *a2, *b, None),
    };

    let kappa1 = match input.kappa1 {
        Some(k) => {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::InvalidInput(format!("kappa1 must be positive, got {k}")));
            }
            if lambda_max.is_finite() && !(k > lambda_max) {
                return Err(Error::Restriction(format!(
                    "kappa1 = {k} must exceed the largest bound-state momentum {lambda_max}"
                )));
            }
            k
        }
        None => {
            let mut k = if lambda_max.is_finite() { 1.01 * lambda_max.max(1e-3) } else { 0.5 };
            for _ in 0..400 {
                if two_channel_model(delta, alpha1, alpha2, beta, k)?.regularity_margin() > 0.0 {
                    break;
                }
                k *= 1.25;
            }
            k
        }
    };
    let model = two_channel_model(delta, alpha1, alpha2, beta, kappa1)?;

    let zeros = match prescribed {
        Some(spec) => {
            let rest = complete_roots(spec, alpha1, alpha2)?;
            vec![spec.zeros[0], spec.zeros[1], rest[0], rest[1]]
        }
        None => {
            let s = spectrum::solve_spectrum(&model)?;
            let mut z: Vec<ZeroPair> = s
                .points
                .iter()
                .map(|p| ZeroPair {
                    k1: p.momenta.k[0],
                    k2: p.momenta.k[1],
                })
                .collect();
            // the prescribed bound state first
            if let Some(lambda) = input.bound.first() {
                let target = Complex64::new(0.0, *lambda);
                if let Some(pos) = s.points.iter().position(|p| {
                    p.class == SpectralClass::Bound && (p.k1() - target).norm() < BOUND_MATCH_TOL * (1.0 + lambda)
                }) {
                    let first = z.remove(pos);
                    z.insert(0, first);
                }
            }
            z
        }
    };

    Ok(InverseSolution {
        scenario,
        model,
        alpha1,
        alpha2,
        beta,
        branch: prescribed.map(|_| branch),
        kappa1,
        zeros,
        beta_alternatives,
        visible_feshbach: visible,
        threshold_critical,
    })
}
