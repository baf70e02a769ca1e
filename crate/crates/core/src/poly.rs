//! Dense univariate polynomials with complex coefficients and an
//! Aberth-Ehrlich simultaneous root finder.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients in ascending powers. Trailing zeros are allowed; see [`UniPoly::degree`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    /// `k1^2 - d`.
    pub fn shifted_square(d: f64) -> Self {
        Self::from_real(&[-d, 0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the highest coefficient that is exactly nonzero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn leading(&self) -> Complex64 {
        self.degree().map_or(ZERO, |d| self.coeffs[d])
    }

    pub fn trimmed(mut self) -> Self {
        let len = self.degree().map_or(0, |d| d + 1);
        self.coeffs.truncate(len);
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `sum |c_i| x^i`, the magnitude envelope used for relative tests.
    pub fn eval_abs(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        }
    }

    fn add_scaled_into(&mut self, other: &UniPoly, s: Complex64) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), ZERO);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    pub(crate) fn add_assign(&mut self, other: &UniPoly) {
        self.add_scaled_into(other, ONE);
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        out.add_scaled_into(rhs, ONE);
        out
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        out.add_scaled_into(rhs, -ONE);
        out
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        self.scale(-ONE)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return UniPoly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly { coeffs: out }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AberthConfig {
    pub max_iterations: usize,
    /// Relative correction size at which a root is frozen.
    pub tolerance: f64,
}

impl Default for AberthConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-13,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Unique positive root of `|a_n| x^n - sum_{i<n} |a_i| x^i`; every root of
/// `p` lies in the disc of that radius.
pub fn cauchy_radius(p: &UniPoly) -> f64 {
    let n = match p.degree() {
        Some(0) | None => return 0.0,
        Some(n) => n,
    };
    let mags: Vec<f64> = p.coeffs[..=n].iter().map(|c| c.norm()).collect();
    // |a_n| - sum |a_i| x^(i-n) is increasing in x: bracket, then bisect on a log scale.
    let g = |x: f64| {
        mags[n]
            - mags[..n]
                .iter()
                .enumerate()
                .map(|(i, m)| m * x.powi(i as i32 - n as i32))
                .sum::<f64>()
    };
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while lo > 1e-300 && g(lo) > 0.0 {
        lo *= 0.5;
    }
    if g(lo) > 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    hi
}

// Newton ratio p(z)/p'(z); for |z| > 1 evaluated through the reversed
// polynomial so high degrees do not overflow.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let n = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        p / dp
    } else {
        let w = z.inv();
        // reversed: q(w) = sum c_i w^{n-i}
        let mut q = ZERO;
        let mut dq = ZERO;
        for &c in coeffs.iter() {
            dq = dq * w + q;
            q = q * w + c;
        }
        // p(z) = z^n q(w), p'(z) = z^{n-1} (n q(w) - w q'(w))
        z * q / (q * n as f64 - w * dq)
    }
}

/// All roots of `p` by Aberth-Ehrlich iteration (Gauss-Seidel updates).
///
/// Initial guesses are equally spaced on the Cauchy circle with a fixed
/// angular offset, so the output is deterministic.
pub fn aberth_roots(p: &UniPoly, cfg: &AberthConfig) -> RootSet {
    let n = match p.degree() {
        None | Some(0) => {
            return RootSet {
                roots: Vec::new(),
                iterations: 0,
                converged: true,
            }
        }
        Some(n) => n,
    };
    let coeffs: Vec<Complex64> = {
        let lead = p.coeffs[n];
        p.coeffs[..=n].iter().map(|c| c / lead).collect()
    };
    if n == 1 {
        return RootSet {
            roots: vec![-coeffs[0]],
            iterations: 0,
            converged: true,
        };
    }

    let radius = cauchy_radius(p).max(f64::MIN_POSITIVE);
    let offset = 0.4;
    let z: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + offset;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    aberth_iterate(z, |w| newton_ratio(&coeffs, w), cfg)
}

/// Aberth-Ehrlich iteration from the given approximations, for any function
/// whose Newton ratio `f/f'` can be evaluated. `f` must have exactly as many
/// zeros as there are approximations.
pub fn aberth_iterate<F>(mut z: Vec<Complex64>, ratio_of: F, cfg: &AberthConfig) -> RootSet
where
    F: Fn(Complex64) -> Complex64,
{
    let n = z.len();
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < cfg.max_iterations && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let ratio = ratio_of(z[i]);
            if !ratio.is_finite() {
                // landed on a critical point
                let nudge = Complex64::from_polar(1e-8 * (1.0 + z[i].norm()), i as f64);
                z[i] += nudge;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let denom = ONE - ratio * repulsion;
            let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            z[i] -= step;
            if step.norm() <= cfg.tolerance * z[i].norm().max(1e-300) || ratio == ZERO {
                done[i] = true;
            }
        }
    }
    RootSet {
        roots: z,
        iterations,
        converged: done.iter().all(|&d| d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(roots: &[Complex64]) -> UniPoly {
        roots.iter().fold(UniPoly::constant(ONE), |acc, &r| {
            &acc * &UniPoly::from_coeffs(vec![-r, ONE])
        })
    }

    fn assert_root_sets_match(found: &[Complex64], expected: &[Complex64], tol: f64) {
        assert_eq!(found.len(), expected.len());
        let mut used = vec![false; found.len()];
        for e in expected {
            let (idx, d) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, (f - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "root {e} missed by {d}");
            used[idx] = true;
        }
    }

    #[test]
    fn arithmetic_basics() {
        let a = UniPoly::from_real(&[1.0, 2.0]);
        let b = UniPoly::from_real(&[-1.0, 0.0, 3.0]);
        assert_eq!((&a * &b).coeffs(), UniPoly::from_real(&[-1.0, -2.0, 3.0, 6.0]).coeffs());
        assert_eq!((&a + &b).degree(), Some(2));
        assert!((&a - &a).is_zero());
        assert_eq!(b.derivative().coeffs(), UniPoly::from_real(&[0.0, 6.0]).coeffs());
        assert_eq!(b.eval(c(2.0, 0.0)), c(11.0, 0.0));
    }

    #[test]
    fn cauchy_radius_bounds_roots() {
        let roots = [c(3.0, 1.0), c(-0.5, 0.0), c(0.0, -7.0), c(1.0, 1.0)];
        let p = from_roots(&roots);
        let r = cauchy_radius(&p);
        assert!(roots.iter().all(|z| z.norm() <= r * (1.0 + 1e-12)));
        assert!(r < 20.0);
    }

    #[test]
    fn aberth_recovers_known_roots() {
        let roots = [
            c(3.0, 1.0),
            c(-0.5, 0.0),
            c(0.0, -7.0),
            c(1.0, 1.0),
            c(-2.0, 4.0),
            c(0.25, 0.1),
        ];
        let p = from_roots(&roots).scale(c(0.3, -2.0));
        let rs = aberth_roots(&p, &AberthConfig::default());
        assert!(rs.converged);
        assert_root_sets_match(&rs.roots, &roots, 1e-11);
    }

    #[test]
    fn aberth_high_degree_unit_roots() {
        // z^40 - 1
        let mut coeffs = vec![ZERO; 41];
        coeffs[0] = -ONE;
        coeffs[40] = ONE;
        let p = UniPoly::from_coeffs(coeffs);
        let expected: Vec<Complex64> = (0..40)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 40.0))
            .collect();
        let rs = aberth_roots(&p, &AberthConfig::default());
        assert_root_sets_match(&rs.roots, &expected, 1e-12);
    }

    #[test]
    fn aberth_widely_spread_magnitudes() {
        let roots: Vec<Complex64> = (0..12)
            .map(|j| Complex64::from_polar(10f64.powf(j as f64 / 2.0 - 3.0), 0.7 * j as f64))
            .collect();
        let p = from_roots(&roots);
        let rs = aberth_roots(&p, &AberthConfig::default());
        assert!(rs.converged);
        let found = rs.roots.clone();
        for e in &roots {
            let d = found.iter().map(|f| (f - e).norm() / e.norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10, "root {e} missed, relative {d}");
        }
    }

    #[test]
    fn linear_and_constant() {
        let p = UniPoly::from_coeffs(vec![c(3.0, 0.0), c(0.0, -1.0)]);
        let rs = aberth_roots(&p, &AberthConfig::default());
        assert!((rs.roots[0] - c(0.0, -3.0)).norm() < 1e-15);
        assert!(aberth_roots(&UniPoly::constant(ONE), &AberthConfig::default()).roots.is_empty());
    }
}
