//! File formats: model and inverse-problem JSON, the spectrum report, CSV
//! helpers, and the small parsers behind command-line flags.
//!
//! Every number written goes through [`round12`] so repeated runs produce
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cox2::{Branch, InverseInput, InverseSolution, Scenario, ZeroPair};
use crate::error::{Error, Result};
use crate::model::{principal_sqrt, ChannelModel, Tolerances};
use crate::spectrum::Spectrum;

/// Rounds to 12 significant digits; negative zero becomes zero.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `x` with 12 significant digits and a lowercase exponent, for CSV cells.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn num(x: f64) -> Value {
    json!(round12(x))
}

fn complex(z: Complex64) -> Value {
    json!([round12(z.re), round12(z.im)])
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    thresholds: Vec<f64>,
    alpha: Vec<f64>,
    #[serde(default)]
    beta: Vec<(usize, usize, f64)>,
    factorization_energy: f64,
}

/// Parses a model file. Coupling indices are one-based; either order is accepted.
pub fn model_from_json(text: &str) -> Result<ChannelModel> {
    let f: ModelFile = serde_json::from_str(text)?;
    if f.n != f.thresholds.len() || f.n != f.alpha.len() {
        return Err(Error::InvalidInput(format!(
            "n = {} but {} thresholds and {} alphas given",
            f.n,
            f.thresholds.len(),
            f.alpha.len()
        )));
    }
    let mut beta = Vec::with_capacity(f.beta.len());
    for (j, l, v) in f.beta {
        if j == 0 || l == 0 || j > f.n || l > f.n || j == l {
            return Err(Error::InvalidInput(format!(
                "coupling index ({j}, {l}) must be two distinct channels in 1..={}",
                f.n
            )));
        }
        beta.push((j.max(l) - 1, j.min(l) - 1, v));
    }
    ChannelModel::new(f.thresholds, f.alpha, &beta, f.factorization_energy)
}

pub fn read_model(path: &Path) -> Result<ChannelModel> {
    model_from_json(&fs::read_to_string(path)?)
}

/// Parameters at full precision, so the written model reads back unchanged.
pub fn model_to_json(model: &ChannelModel) -> Value {
    let beta: Vec<Value> = model
        .couplings()
        .iter()
        .map(|&(j, l, v)| json!([j + 1, l + 1, v]))
        .collect();
    json!({
        "n": model.n_channels(),
        "thresholds": model.thresholds(),
        "alpha": model.alpha(),
        "beta": beta,
        "factorization_energy": model.factorization_energy(),
    })
}

pub fn spectrum_to_json(spectrum: &Spectrum) -> Value {
    let points: Vec<Value> = spectrum
        .points
        .iter()
        .map(|p| {
            json!({
                "class": p.class.as_str(),
                "energy": complex(p.energy),
                "momenta": p.momenta.k.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
                "sheet": p.sheet.to_string(),
                "residual": num(p.residual),
            })
        })
        .collect();
    let t = &spectrum.tally;
    json!({
        "points": points,
        "tally": {
            "n_b": t.n_b,
            "n_v": t.n_v,
            "n_r": t.n_r,
            "n_cancelled": t.n_cancelled,
            "n_degenerate": t.n_degenerate,
            "expected_total": t.expected_total,
        },
    })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ZerosFile {
    /// Channel-1 momenta only; channel 2 follows from the principal root.
    K1Only(Vec<[f64; 2]>),
    Both {
        k1: Vec<[f64; 2]>,
        #[serde(default)]
        k2: Option<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResonanceFile {
    er: f64,
    ei: f64,
    #[serde(default)]
    sign: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InverseFile {
    delta: f64,
    #[serde(default)]
    beta: Option<f64>,
    #[serde(default)]
    zeros: Option<ZerosFile>,
    #[serde(default)]
    resonance: Option<ResonanceFile>,
    #[serde(default)]
    bound: Vec<f64>,
    #[serde(default)]
    alpha1: Option<f64>,
    #[serde(default)]
    kappa1: Option<f64>,
    #[serde(default)]
    branch: Option<String>,
    #[serde(default)]
    scenario: Option<String>,
}

/// Parses an inverse-problem file into the input and the scenario it names, if any.
pub fn inverse_from_json(text: &str) -> Result<(InverseInput, Option<Scenario>)> {
    let f: InverseFile = serde_json::from_str(text)?;
    let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
    let zeros = match f.zeros {
        None => None,
        Some(z) => {
            let (k1, k2) = match z {
                ZerosFile::K1Only(k1) => (k1, None),
                ZerosFile::Both { k1, k2 } => (k1, k2),
            };
            if k1.len() != 2 || k2.as_ref().is_some_and(|k| k.len() != 2) {
                return Err(Error::InvalidInput("exactly two prescribed zeros are needed".into()));
            }
            let pair = |i: usize| {
                let a = c(k1[i]);
                let b = match &k2 {
                    Some(k2) => c(k2[i]),
                    None => principal_sqrt(a * a - f.delta),
                };
                ZeroPair { k1: a, k2: b }
            };
            Some([pair(0), pair(1)])
        }
    };
    let resonance = match f.resonance {
        None => None,
        Some(r) => {
            let sign = match r.sign.as_deref() {
                None => Branch::Lower,
                Some(s) => s.parse()?,
            };
            Some((r.er, r.ei, sign))
        }
    };
    let branch = f.branch.as_deref().map(str::parse).transpose()?;
    let scenario = f.scenario.as_deref().map(str::parse).transpose()?;
    Ok((
        InverseInput {
            delta: f.delta,
            beta: f.beta,
            zeros,
            resonance,
            bound: f.bound,
            alpha1: f.alpha1,
            kappa1: f.kappa1,
            branch,
        },
        scenario,
    ))
}

pub fn inverse_to_json(solution: &InverseSolution, spectrum: &Spectrum) -> Value {
    let zeros: Vec<Value> = solution
        .zeros
        .iter()
        .map(|z| {
            json!({
                "k1": complex(z.k1),
                "k2": complex(z.k2),
                "energy": complex(z.energy()),
            })
        })
        .collect();
    json!({
        "scenario": solution.scenario.map(|s| s.as_str()),
        "model": model_to_json(&solution.model),
        "alpha1": num(solution.alpha1),
        "alpha2": num(solution.alpha2),
        "beta": num(solution.beta),
        "beta_alternatives": solution.beta_alternatives.iter().map(|&b| round12(b)).collect::<Vec<_>>(),
        "branch": solution.branch.map(|b| b.as_str()),
        "kappa1": num(solution.kappa1),
        "zeros": zeros,
        "visible_feshbach": solution.visible_feshbach,
        "threshold_critical": solution.threshold_critical,
        "spectrum": spectrum_to_json(spectrum),
    })
}

/// Pretty JSON with a trailing newline.
pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values built here always serialize");
    s.push('\n');
    s
}

/// CSV text from a header and rows of already formatted cells.
pub fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("output path '{}' has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(Error::from)
}

/// `MIN:MAX:N` to `N` evenly spaced points including both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("grid must look like MIN:MAX:N, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo && n >= 2) {
        return Err(Error::InvalidInput(format!(
            "grid needs finite MIN < MAX and N >= 2, got '{s}'"
        )));
    }
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect())
}

/// Applies `NAME=VALUE` overrides.
pub fn apply_tolerances(tol: &mut Tolerances, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("tolerance must look like NAME=VALUE, got '{item}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("tolerance value '{value}' is not a number")))?;
        tol.set(name.trim(), value)?;
    }
    Ok(())
}
