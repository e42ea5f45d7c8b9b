//! Parameter sweeps over the Peierls model with CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use config::{parse_config, GridPoint, SweepKind, SweepSpec};
pub use error::CliError;
pub use output::{csv_string, emit_csv, write_csv};
pub use sweep::{run_sweep, Cell, ResultRow, ResultTable, Status};

/// Parses, runs and writes one invocation. Returns the table on success.
pub fn run<I, T>(args: I) -> Result<ResultTable, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = parse_config(args)?;
    let table = run_sweep(&spec)?;
    match &spec.output_path {
        Some(path) => emit_csv(&table, path)?,
        None => {
            let stdout = std::io::stdout();
            write_csv(&table, stdout.lock()).map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: std::io::Error::other(e),
            })?;
        }
    }
    if table.all_failed() {
        return Err(CliError::AllFailed(table.rows.len()));
    }
    Ok(table)
}
