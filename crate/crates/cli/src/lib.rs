//! Command-line front end: fits, Monte Carlo runs, curves and predictions.
//!
//! Exit codes: 0 success, 2 bad input (file, format, flags), 3 fit or
//! domain failure, including a prediction at or past t_c.

pub mod args;
pub mod commands;
pub mod error;
pub mod fixtures;
pub mod report;

pub use args::Cli;
pub use error::{CliError, CliResult, EXIT_FIT, EXIT_INPUT};
pub use report::AnalysisReport;

/// Runs one command and returns its standard output.
pub fn run(cli: &Cli) -> CliResult<String> {
    use args::Command::*;
    match &cli.command {
        Fit(a) => commands::cmd_fit(a),
        Mc(a) => commands::cmd_mc(a),
        Curve(a) => commands::cmd_curve(a),
        Predict(a) => commands::cmd_predict(a),
    }
}
