use std::fmt;

use peierls_core::finite_chain::{
    dimerization_threshold, minimize_dimer_finite, mu_critical, theta_critical_finite_with,
};
use peierls_core::thermodynamic::{
    asymptotic_constants, minimize_dimer_thermo, theta_critical_thermo_with,
};
use peierls_core::zero_temperature::dimer_optimum_zero;
use peierls_core::{DimerState, ModelParams};
use rayon::prelude::*;

use crate::config::{GridPoint, SweepKind, SweepSpec};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Bool(bool),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    Error(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Error(msg) => write!(f, "error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub inputs: Vec<(String, Cell)>,
    pub outputs: Vec<(String, Cell)>,
    pub status: Status,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// Looks up a cell by column name.
    pub fn get(&self, name: &str) -> Option<Cell> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .find(|(n, _)| n == name)
            .map(|(_, c)| *c)
    }

    pub fn float(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }
}

/// Rows with a shared header (status excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| !r.is_ok())
    }
}

fn input_columns(kind: SweepKind) -> &'static [&'static str] {
    match kind {
        SweepKind::PhaseDiagram | SweepKind::Gap => &["mu"],
        SweepKind::Bifurcation | SweepKind::Solve => &["mu", "theta", "L"],
        SweepKind::FiniteThetac => &["mu", "L"],
        SweepKind::MuCritical => &["L"],
        SweepKind::Constants => &[],
    }
}

fn output_columns(kind: SweepKind) -> &'static [&'static str] {
    match kind {
        SweepKind::PhaseDiagram | SweepKind::FiniteThetac => &["theta_c", "W_star", "x"],
        SweepKind::Bifurcation | SweepKind::Solve => &["W", "delta", "energy"],
        SweepKind::Gap => &[
            "W1",
            "f0_per",
            "f0",
            "gap",
            "W_opt",
            "delta_opt",
            "resolved",
        ],
        SweepKind::MuCritical => &["mu_c", "threshold"],
        SweepKind::Constants => &["c1", "c2", "C"],
    }
}

fn input_cell(p: &GridPoint, name: &str) -> Cell {
    let cell = match name {
        "mu" => p.mu.map(Cell::Float),
        "theta" => p.theta.map(Cell::Float),
        "L" => p.len.map(Cell::Int),
        _ => None,
    };
    cell.unwrap_or(Cell::Empty)
}

fn state_cells(state: DimerState, energy: f64) -> Vec<Cell> {
    vec![
        Cell::Float(state.w()),
        Cell::Float(state.delta()),
        Cell::Float(energy),
    ]
}

fn missing(name: &str) -> peierls_core::Error {
    peierls_core::Error::Invalid(format!("grid point lacks {name}"))
}

fn evaluate(kind: SweepKind, p: &GridPoint, spec: &SweepSpec) -> peierls_core::Result<Vec<Cell>> {
    let mu = || p.mu.ok_or_else(|| missing("mu"));
    let theta = || p.theta.ok_or_else(|| missing("theta"));
    let len = || p.len.ok_or_else(|| missing("L"));
    let tol = &spec.tolerances;
    Ok(match kind {
        SweepKind::PhaseDiagram => {
            let c = theta_critical_thermo_with(mu()?, tol)?;
            vec![
                Cell::Float(c.theta_c()),
                Cell::Float(c.w_star()),
                Cell::Float(c.x()),
            ]
        }
        SweepKind::FiniteThetac => match theta_critical_finite_with(mu()?, len()?, tol)? {
            Some(c) => vec![
                Cell::Float(c.theta_c()),
                Cell::Float(c.w_star()),
                Cell::Float(c.x()),
            ],
            None => vec![Cell::Float(0.0), Cell::Empty, Cell::Empty],
        },
        SweepKind::Bifurcation | SweepKind::Solve => {
            let (mu, theta) = (mu()?, theta()?);
            match (p.len, theta > 0.0) {
                (None, false) => {
                    let g = dimer_optimum_zero(mu)?;
                    vec![
                        Cell::Float(g.w_opt),
                        Cell::Float(g.delta_opt),
                        Cell::Float(g.f0),
                    ]
                }
                (None, true) => {
                    let (s, e) = minimize_dimer_thermo(&ModelParams::infinite(mu, theta)?)?;
                    state_cells(s, e)
                }
                (Some(l), _) => {
                    let (s, e) = minimize_dimer_finite(&ModelParams::ring(mu, theta, l)?)?;
                    state_cells(s, e)
                }
            }
        }
        SweepKind::Gap => {
            let g = dimer_optimum_zero(mu()?)?;
            vec![
                Cell::Float(g.w1),
                Cell::Float(g.f0_per),
                Cell::Float(g.f0),
                Cell::Float(g.gap),
                Cell::Float(g.w_opt),
                Cell::Float(g.delta_opt),
                Cell::Bool(g.resolved),
            ]
        }
        SweepKind::MuCritical => {
            let l = len()?;
            vec![
                Cell::Float(mu_critical(l)?),
                Cell::Float(dimerization_threshold(l)?),
            ]
        }
        SweepKind::Constants => {
            let c = asymptotic_constants()?;
            vec![
                Cell::Float(c.c1),
                Cell::Float(c.c2),
                Cell::Float(c.c_prefactor),
            ]
        }
    })
}

fn run_point(spec: &SweepSpec, p: &GridPoint) -> ResultRow {
    let inputs = input_columns(spec.kind)
        .iter()
        .map(|&n| (n.to_string(), input_cell(p, n)))
        .collect();
    let names = output_columns(spec.kind);
    let (cells, status) = match evaluate(spec.kind, p, spec) {
        Ok(cells) => (cells, Status::Ok),
        Err(e) => (vec![Cell::Empty; names.len()], Status::Error(e.to_string())),
    };
    let outputs = names.iter().map(|n| n.to_string()).zip(cells).collect();
    ResultRow {
        inputs,
        outputs,
        status,
    }
}

/// Evaluates every grid point on a pool of `spec.workers` threads. Rows come
/// back in grid order; numeric failures become error rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {} workers: {e}", spec.workers)))?;
    let rows = pool.install(|| spec.grid.par_iter().map(|p| run_point(spec, p)).collect());
    let columns = input_columns(spec.kind)
        .iter()
        .chain(output_columns(spec.kind))
        .map(|s| s.to_string())
        .collect();
    Ok(ResultTable { columns, rows })
}
