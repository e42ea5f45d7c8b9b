use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use peierls_core::numerics::Tolerance;

use crate::error::CliError;

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-12;

const GRID_HELP: &str = "\
Grids: a value list is comma separated; each item is a number or a range
start:stop:step. A range runs from start in steps of step and ends at the
step nearest to stop, so stop itself is included up to rounding.
Sweeps over several flags use every combination, with mu varying slowest
and L fastest.

Config files hold key=value lines (keys: mu, theta, L, out, workers,
abs-tol, rel-tol); '#' starts a comment. Command-line flags override file
values.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 every point failed.";

const PHASE_HELP: &str = "Columns: mu,theta_c,W_star,x,status";
const BIFURCATION_HELP: &str =
    "Columns: mu,theta,L,W,delta,energy,status (L empty for the infinite chain)";
const GAP_HELP: &str = "Columns: mu,W1,f0_per,f0,gap,W_opt,delta_opt,resolved,status";
const FINITE_HELP: &str = "Columns: mu,L,theta_c,W_star,x,status (theta_c = 0 and empty W_star,x when the ring never dimerizes)";
const MU_CRITICAL_HELP: &str = "Columns: L,mu_c,threshold,status (threshold = sup of the ring's critical-point function, 2*mu_c)";
const SOLVE_HELP: &str = "Columns: mu,theta,L,W,delta,energy,status (energy per atom; theta = 0 without L uses the zero-temperature chain)";
const CONSTANTS_HELP: &str = "Columns: c1,c2,C,status";

#[derive(Debug, Parser)]
#[command(
    name = "peierls",
    version,
    about = "Critical temperatures, bifurcations and gaps of the Peierls model",
    after_help = GRID_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical temperature of the infinite chain over a stiffness grid
    #[command(after_help = PHASE_HELP)]
    PhaseDiagram(SweepArgs),
    /// Minimizing dimer state over a (mu, theta) grid
    #[command(after_help = BIFURCATION_HELP)]
    Bifurcation(SweepArgs),
    /// Zero-temperature dimerization energy gain over a stiffness grid
    #[command(after_help = GAP_HELP)]
    Gap(SweepArgs),
    /// Critical temperature of finite rings over (mu, L)
    #[command(after_help = FINITE_HELP)]
    FiniteThetac(SweepArgs),
    /// Critical stiffness of rings with L = 2 mod 4
    #[command(after_help = MU_CRITICAL_HELP)]
    MuCritical(SweepArgs),
    /// Minimizer at single (mu, theta[, L]) points
    #[command(after_help = SOLVE_HELP)]
    Solve(SweepArgs),
    /// Large-stiffness constants c1, c2, C
    #[command(after_help = CONSTANTS_HELP)]
    Constants(SweepArgs),
}

#[derive(Debug, Args, Default)]
struct SweepArgs {
    /// Stiffness values
    #[arg(long)]
    mu: Option<String>,
    /// Temperature values
    #[arg(long)]
    theta: Option<String>,
    /// Ring lengths
    #[arg(long = "L", value_name = "L")]
    len: Option<String>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    workers: Option<String>,
    /// Absolute tolerance of the root solves [default: 1e-10]
    #[arg(long = "abs-tol")]
    abs_tol: Option<String>,
    /// Relative tolerance of the root solves [default: 1e-12]
    #[arg(long = "rel-tol")]
    rel_tol: Option<String>,
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    PhaseDiagram,
    Bifurcation,
    Gap,
    FiniteThetac,
    MuCritical,
    Solve,
    Constants,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::PhaseDiagram => "phase-diagram",
            SweepKind::Bifurcation => "bifurcation",
            SweepKind::Gap => "gap",
            SweepKind::FiniteThetac => "finite-thetac",
            SweepKind::MuCritical => "mu-critical",
            SweepKind::Solve => "solve",
            SweepKind::Constants => "constants",
        }
    }
}

/// One grid point; unused coordinates are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridPoint {
    pub mu: Option<f64>,
    pub theta: Option<f64>,
    pub len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Vec<GridPoint>,
    pub output_path: Option<PathBuf>,
    pub workers: usize,
    pub tolerances: Tolerance,
}

const FILE_KEYS: [&str; 7] = ["mu", "theta", "L", "out", "workers", "abs-tol", "rel-tol"];

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}

/// Parses `key=value` lines.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!(
                "config line {}: expected key=value, got '{line}'",
                no + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        let key = if key.eq_ignore_ascii_case("l") {
            "L".to_string()
        } else {
            key
        };
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!(
                "config line {}: unknown key '{}'",
                no + 1,
                key
            )));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn parse_number(token: &str, flag: &str) -> Result<f64, CliError> {
    token
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::usage(format!("--{flag}: malformed number '{}'", token.trim())))
}

/// Expands `a,b,start:stop:step,...`.
pub fn parse_values(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(CliError::usage(format!(
                "--{flag}: empty list item in '{text}'"
            )));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_number(v, flag)?),
            [a, b, s] => {
                let (start, stop, step) = (
                    parse_number(a, flag)?,
                    parse_number(b, flag)?,
                    parse_number(s, flag)?,
                );
                if !(step > 0.0) || stop < start {
                    return Err(CliError::usage(format!(
                        "--{flag}: range '{item}' needs step > 0 and stop >= start"
                    )));
                }
                let count = ((stop - start) / step + 0.5).floor() as usize + 1;
                if count > 1_000_000 {
                    return Err(CliError::usage(format!(
                        "--{flag}: range '{item}' is too long"
                    )));
                }
                out.extend((0..count).map(|i| start + i as f64 * step));
            }
            _ => {
                return Err(CliError::usage(format!(
                    "--{flag}: '{item}' is neither a number nor start:stop:step"
                )))
            }
        }
    }
    Ok(out)
}

fn parse_lengths(text: &str) -> Result<Vec<usize>, CliError> {
    parse_values(text, "L")?
        .into_iter()
        .map(|v| {
            if v.fract() != 0.0 || v < 0.0 {
                Err(CliError::usage(format!(
                    "--L: '{v}' is not a non-negative integer"
                )))
            } else {
                Ok(v as usize)
            }
        })
        .collect()
}

fn merged(flag: Option<String>, file: &BTreeMap<String, String>, key: &str) -> Option<String> {
    flag.or_else(|| file.get(key).cloned())
}

fn require<T>(v: Option<T>, flag: &str, kind: SweepKind) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("{} needs --{flag}", kind.name())))
}

fn check_mu(values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|&&m| !(m > 0.0)) {
        Some(bad) => Err(CliError::usage(format!("--mu: '{bad}' must be > 0"))),
        None => Ok(()),
    }
}

fn check_theta(values: &[f64], positive: bool) -> Result<(), CliError> {
    let bad = values
        .iter()
        .find(|&&t| if positive { !(t > 0.0) } else { !(t >= 0.0) });
    match bad {
        Some(b) if positive => Err(CliError::usage(format!("--theta: '{b}' must be > 0"))),
        Some(b) => Err(CliError::usage(format!("--theta: '{b}' must be >= 0"))),
        None => Ok(()),
    }
}

fn check_even(values: &[usize]) -> Result<(), CliError> {
    match values.iter().find(|&&l| l < 4 || l % 2 != 0) {
        Some(bad) => Err(CliError::usage(format!(
            "--L: '{bad}' must be even and >= 4"
        ))),
        None => Ok(()),
    }
}

fn product(mus: &[Option<f64>], thetas: &[Option<f64>], lens: &[Option<usize>]) -> Vec<GridPoint> {
    let mut out = Vec::with_capacity(mus.len() * thetas.len() * lens.len());
    for &mu in mus {
        for &theta in thetas {
            for &len in lens {
                out.push(GridPoint { mu, theta, len });
            }
        }
    }
    out
}

fn some<T: Copy>(v: &[T]) -> Vec<Option<T>> {
    v.iter().map(|&x| Some(x)).collect()
}

/// Builds a validated [`SweepSpec`] from command-line tokens (without the
/// program name). A `--config` file supplies defaults for absent flags.
pub fn parse_config<I, T>(args: I) -> Result<SweepSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("peierls")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let text = e.render().to_string();
        if e.use_stderr() {
            CliError::Usage(text)
        } else {
            CliError::Info(text)
        }
    })?;
    let (kind, a) = match cli.command {
        Command::PhaseDiagram(a) => (SweepKind::PhaseDiagram, a),
        Command::Bifurcation(a) => (SweepKind::Bifurcation, a),
        Command::Gap(a) => (SweepKind::Gap, a),
        Command::FiniteThetac(a) => (SweepKind::FiniteThetac, a),
        Command::MuCritical(a) => (SweepKind::MuCritical, a),
        Command::Solve(a) => (SweepKind::Solve, a),
        Command::Constants(a) => (SweepKind::Constants, a),
    };
    let file = match &a.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };

    let mu = merged(a.mu, &file, "mu")
        .map(|s| parse_values(&s, "mu"))
        .transpose()?;
    let theta = merged(a.theta, &file, "theta")
        .map(|s| parse_values(&s, "theta"))
        .transpose()?;
    let len = merged(a.len, &file, "L")
        .map(|s| parse_lengths(&s))
        .transpose()?;
    let output_path = a.out.or_else(|| file.get("out").map(PathBuf::from));
    let workers = match merged(a.workers, &file, "workers") {
        Some(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w >= 1)
            .ok_or_else(|| CliError::usage(format!("--workers: '{s}' must be an integer >= 1")))?,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let abs_tol = merged(a.abs_tol, &file, "abs-tol")
        .map(|s| parse_number(&s, "abs-tol"))
        .transpose()?
        .unwrap_or(DEFAULT_ABS_TOL);
    let rel_tol = merged(a.rel_tol, &file, "rel-tol")
        .map(|s| parse_number(&s, "rel-tol"))
        .transpose()?
        .unwrap_or(DEFAULT_REL_TOL);
    let tolerances = Tolerance::new(abs_tol, rel_tol, 400)
        .map_err(|e| CliError::usage(format!("--abs-tol/--rel-tol: {e}")))?;

    if let Some(m) = &mu {
        check_mu(m)?;
    }
    if let Some(l) = &len {
        check_even(l)?;
    }

    let grid = match kind {
        SweepKind::PhaseDiagram | SweepKind::Gap => {
            let m = require(mu, "mu", kind)?;
            product(&some(&m), &[None], &[None])
        }
        SweepKind::Bifurcation => {
            let m = require(mu, "mu", kind)?;
            let t = require(theta, "theta", kind)?;
            check_theta(&t, true)?;
            let l = len.map_or(vec![None], |l| some(&l));
            product(&some(&m), &some(&t), &l)
        }
        SweepKind::FiniteThetac => {
            let m = require(mu, "mu", kind)?;
            let l = require(len, "L", kind)?;
            product(&some(&m), &[None], &some(&l))
        }
        SweepKind::MuCritical => {
            let l = require(len, "L", kind)?;
            if let Some(bad) = l.iter().find(|&&v| v % 4 != 2) {
                return Err(CliError::usage(format!(
                    "--L: '{bad}' must satisfy L = 2 mod 4"
                )));
            }
            product(&[None], &[None], &some(&l))
        }
        SweepKind::Solve => {
            let m = require(mu, "mu", kind)?;
            let t = require(theta, "theta", kind)?;
            check_theta(&t, false)?;
            let l = len.map_or(vec![None], |l| some(&l));
            product(&some(&m), &some(&t), &l)
        }
        SweepKind::Constants => vec![GridPoint::default()],
    };
    if grid.is_empty() {
        return Err(CliError::usage(format!("{}: empty grid", kind.name())));
    }
    Ok(SweepSpec {
        kind,
        grid,
        output_path,
        workers,
        tolerances,
    })
}
