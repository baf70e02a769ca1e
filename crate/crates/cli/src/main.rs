//! `coxspec`: spectra, eigenvalue curves, weak-coupling comparison, two-channel
//! inversion, potentials and scattering observables for multichannel Cox
//! potentials.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coxspec::cox2::{self, Branch};
use coxspec::io::{self, fmt_num};
use coxspec::perturbation::{self, CouplingSplit};
use coxspec::{potential, scattering, spectrum};
use coxspec::{ChannelModel, Error, SheetSignature, Tolerances};
use serde_json::json;

#[derive(Parser)]
#[command(name = "coxspec", version, about = "Zeros, potentials and observables of multichannel Cox potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Input JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Output file, written atomically.
    #[arg(long)]
    out: PathBuf,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classified zeros of the Jost determinant on all sheets (JSON).
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of B on the imaginary k1 axis, per sheet (CSV).
    Curves {
        #[command(flatten)]
        common: Common,
        /// Channel signs such as `+-+`; all sheets when omitted.
        #[arg(long)]
        sheet: Option<String>,
        /// `MIN:MAX:N` in Im k1.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Second-order weak-coupling zeros against the exact ones (CSV).
    Perturb {
        #[command(flatten)]
        common: Common,
    },
    /// Two-channel inverse problem from prescribed zeros (JSON).
    Invert2 {
        #[command(flatten)]
        common: Common,
        /// `upper` or `lower`; overrides the input file.
        #[arg(long)]
        branch: Option<Branch>,
        /// resonance-only, resonance-plus-bound, two-bound or one-bound; overrides the input file.
        #[arg(long)]
        scenario: Option<cox2::Scenario>,
    },
    /// Transformed potential on a radial grid (CSV).
    Potential {
        #[command(flatten)]
        common: Common,
        /// `MIN:MAX:N` in r.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// S-matrix, phase shift and cross section on an energy grid (CSV).
    Scatter {
        #[command(flatten)]
        common: Common,
        /// `MIN:MAX:N` in E.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
}

/// A failure with the model's validation report attached when there is one.
struct Failure {
    error: Error,
    violations: Vec<String>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            error,
            violations: Vec::new(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut report = json!({"error": f.error.kind(), "message": f.error.to_string()});
            if !f.violations.is_empty() {
                report["violations"] = json!(f.violations);
            }
            eprintln!("{report}");
            ExitCode::from(if f.error.is_input_error() { 1 } else { 2 })
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Analyze { common } => analyze(&common),
        Command::Curves { common, sheet, grid } => curves(&common, sheet.as_deref(), grid.as_deref()),
        Command::Perturb { common } => perturb(&common),
        Command::Invert2 {
            common,
            branch,
            scenario,
        } => invert2(&common, branch, scenario),
        Command::Potential { common, grid } => potential_cmd(&common, grid.as_deref()),
        Command::Scatter { common, grid } => scatter(&common, grid.as_deref()),
    }
}

fn tolerances(common: &Common) -> CliResult<Tolerances> {
    let mut tol = Tolerances::default();
    io::apply_tolerances(&mut tol, &common.tol)?;
    Ok(tol)
}

/// Reads and validates the model. Regularity violations are fatal only when
/// `need_regular`; otherwise they come back as warnings.
fn load_model(path: &Path, need_regular: bool) -> CliResult<(ChannelModel, Vec<String>)> {
    let model = io::read_model(path)?;
    let report = model.validate();
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    if report.is_ok() || (report.only_regularity() && !need_regular) {
        return Ok((model, violations));
    }
    Err(Failure {
        error: Error::InvalidInput(format!("model fails validation: {}", violations.join("; "))),
        violations,
    })
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn analyze(common: &Common) -> CliResult<()> {
    let tol = tolerances(common)?;
    // the solver repeats any regularity warning
    let (model, _) = load_model(&common.model, false)?;
    let spec = spectrum::solve_spectrum_with(&model, &tol)?;
    warn_all(&spec.warnings);
    io::write_atomic(&common.out, &io::json_text(&io::spectrum_to_json(&spec)))?;
    print_tally(&spec);
    Ok(())
}

fn print_tally(spec: &spectrum::Spectrum) {
    let t = &spec.tally;
    println!(
        "zeros: {} (degree {})  bound: {}  virtual: {}  resonances: {}  cancelled: {}  degenerate: {}",
        t.total(),
        spec.degree,
        t.n_b,
        t.n_v,
        t.n_r,
        t.n_cancelled,
        t.n_degenerate
    );
    for p in &spec.points {
        println!(
            "  {:<16} {:<8} E = ({}, {})",
            p.class.as_str(),
            p.sheet.to_string(),
            fmt_num(p.energy.re),
            fmt_num(p.energy.im)
        );
    }
}

fn curves(common: &Common, sheet: Option<&str>, grid: Option<&str>) -> CliResult<()> {
    tolerances(common)?;
    let (model, warnings) = load_model(&common.model, false)?;
    warn_all(&warnings);
    let n = model.n_channels();
    let sheets = match sheet {
        Some(s) => {
            let parsed = SheetSignature::parse(s)?;
            if parsed.len() != n || parsed.anchor() != 0 {
                return Err(Error::InvalidInput(format!(
                    "sheet '{s}' must have {n} signs with a leading '+'"
                ))
                .into());
            }
            vec![parsed]
        }
        None => SheetSignature::enumerate(n, 0),
    };
    let grid = match grid {
        Some(g) => io::parse_grid(g)?,
        None => {
            let b = spectrum::imaginary_zero_bound(&model) + 1.0;
            io::parse_grid(&format!("{}:{}:2001", -b, b))?
        }
    };

    let mut header = vec!["sheet".to_string(), "kbar1".to_string()];
    header.extend((1..=n).map(|j| format!("lambda_{j}")));
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for s in &sheets {
        let curve = spectrum::eigenvalue_curves(&model, s, &grid)?;
        for (t, eig) in curve.grid.iter().zip(&curve.eigenvalues) {
            let mut row = vec![s.to_string(), fmt_num(*t)];
            row.extend(eig.iter().map(|&v| fmt_num(v)));
            rows.push(row);
        }
        for c in &curve.crossings {
            lines.push(format!("  {s}  lambda_{} = 0 at kbar1 = {}", c.index + 1, fmt_num(c.kbar1)));
        }
    }
    io::write_atomic(&common.out, &io::csv_text(&header, &rows))?;
    println!("crossings: {}", lines.len());
    for l in lines {
        println!("{l}");
    }
    Ok(())
}

fn perturb(common: &Common) -> CliResult<()> {
    let tol = tolerances(common)?;
    let (model, _) = load_model(&common.model, false)?;
    let split = CouplingSplit::from_model(&model);
    let approx = perturbation::perturbed_roots(&model, &split)?;
    let exact = spectrum::solve_spectrum_with(&model, &tol)?;
    warn_all(&exact.warnings);
    let matched = perturbation::match_roots(&approx, &exact.points);

    let header: Vec<String> = [
        "level",
        "level_sheet",
        "sheet",
        "zero_width",
        "approx_k1_re",
        "approx_k1_im",
        "approx_E_re",
        "approx_E_im",
        "exact_k1_re",
        "exact_k1_im",
        "exact_E_re",
        "exact_E_im",
        "exact_class",
        "distance",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (root, m) in approx.iter().zip(&matched) {
        let k1 = root.momenta.k[0];
        let e = root.momenta.energy;
        let mut row = vec![
            (root.level + 1).to_string(),
            root.sheet.to_string(),
            root.channel1_sheet(model.thresholds(), &tol).to_string(),
            root.zero_width.to_string(),
            fmt_num(k1.re),
            fmt_num(k1.im),
            fmt_num(e.re),
            fmt_num(e.im),
        ];
        match m {
            Some(i) => {
                let p = &exact.points[*i];
                let d = root.momenta.distance(&p.momenta);
                worst = worst.max(d);
                row.extend([
                    fmt_num(p.k1().re),
                    fmt_num(p.k1().im),
                    fmt_num(p.energy.re),
                    fmt_num(p.energy.im),
                    p.class.as_str().to_string(),
                    fmt_num(d),
                ]);
            }
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        rows.push(row);
    }
    io::write_atomic(&common.out, &io::csv_text(&header, &rows))?;
    println!(
        "beta = {}  roots: {}  largest momentum distance: {}",
        fmt_num(split.beta),
        approx.len(),
        fmt_num(worst)
    );
    Ok(())
}

fn invert2(common: &Common, branch: Option<Branch>, scenario: Option<cox2::Scenario>) -> CliResult<()> {
    let tol = tolerances(common)?;
    let text = std::fs::read_to_string(&common.model).map_err(Error::from)?;
    let (mut input, file_scenario) = io::inverse_from_json(&text)?;
    if branch.is_some() {
        input.branch = branch;
    }
    let scenario = scenario.or(file_scenario);
    let solution = cox2::solve_inverse(scenario, &input)?;
    let spec = spectrum::solve_spectrum_with(&solution.model, &tol)?;
    warn_all(&spec.warnings);
    io::write_atomic(&common.out, &io::json_text(&io::inverse_to_json(&solution, &spec)))?;
    println!(
        "alpha1 = {}  alpha2 = {}  beta = {}  kappa1 = {}",
        fmt_num(solution.alpha1),
        fmt_num(solution.alpha2),
        fmt_num(solution.beta),
        fmt_num(solution.kappa1)
    );
    print_tally(&spec);
    Ok(())
}

fn potential_cmd(common: &Common, grid: Option<&str>) -> CliResult<()> {
    tolerances(common)?;
    let (model, _) = load_model(&common.model, true)?;
    let grid = match grid {
        Some(g) => io::parse_grid(g)?,
        None => potential::default_grid(&model),
    };
    let samples = potential::potential_on_grid(&grid, &model)?;
    let n = model.n_channels();
    let mut header = vec!["r".to_string()];
    for i in 1..=n {
        for j in i..=n {
            header.push(format!("V_{i}_{j}"));
        }
    }
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            let mut row = vec![fmt_num(s.r)];
            for i in 0..n {
                for j in i..n {
                    row.push(fmt_num(s.v[(i, j)]));
                }
            }
            row
        })
        .collect();
    io::write_atomic(&common.out, &io::csv_text(&header, &rows))?;
    let asym = samples.iter().map(|s| s.asymmetry).fold(0.0, f64::max);
    match potential::tail_log_slope(&samples) {
        Some(slope) => println!(
            "points: {}  max asymmetry: {}  tail log-slope: {}",
            samples.len(),
            fmt_num(asym),
            fmt_num(slope)
        ),
        None => println!("points: {}  max asymmetry: {}", samples.len(), fmt_num(asym)),
    }
    Ok(())
}

fn scatter(common: &Common, grid: Option<&str>) -> CliResult<()> {
    tolerances(common)?;
    let (model, warnings) = load_model(&common.model, false)?;
    warn_all(&warnings);
    let grid = match grid {
        Some(g) => io::parse_grid(g)?,
        None => {
            let top = 2.0 * model.thresholds().last().copied().unwrap_or(0.0).max(1.0);
            io::parse_grid(&format!("{}:{}:2000", top / 2000.0, top))?
        }
    };
    let sweep = scattering::observable_sweep(&grid, &model)?;
    for (e, err) in &sweep.errors {
        eprintln!("warning: skipped E = {}: {err}", fmt_num(*e));
    }
    let n = model.n_channels();
    let mut header: Vec<String> = ["E", "delta1", "sigma11", "open_count"].iter().map(|s| s.to_string()).collect();
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("S_{i}_{j}_re"));
            header.push(format!("S_{i}_{j}_im"));
        }
    }
    let rows: Vec<Vec<String>> = sweep
        .samples
        .iter()
        .map(|s| {
            let mut row = vec![
                fmt_num(s.energy),
                fmt_num(s.delta1),
                fmt_num(s.sigma11),
                s.open_count.to_string(),
            ];
            for i in 0..n {
                for j in 0..n {
                    let a = s.open.iter().position(|&c| c == i);
                    let b = s.open.iter().position(|&c| c == j);
                    match (a, b) {
                        (Some(a), Some(b)) => {
                            row.push(fmt_num(s.s[(a, b)].re));
                            row.push(fmt_num(s.s[(a, b)].im));
                        }
                        _ => row.extend([String::new(), String::new()]),
                    }
                }
            }
            row
        })
        .collect();
    io::write_atomic(&common.out, &io::csv_text(&header, &rows))?;
    println!("energies: {}  skipped: {}", sweep.samples.len(), sweep.errors.len());
    Ok(())
}
