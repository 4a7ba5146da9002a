//! Command-line front end for the `qradial` library.
//!
//! Exit codes: 0 on success, 1 on internal errors or a failed acceptance
//! criterion, 2 on invalid input, 3 on numerical non-convergence.

pub mod args;
pub mod commands;
pub mod io;

use std::io::Write;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Numeric(#[from] qradial::error::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qradial::error::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(E::NonConvergent { .. }) => 3,
            CliError::Numeric(E::InvalidParameter(_) | E::Pole(_) | E::DivisionByZero(_) | E::Capacity { .. }) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

/// Each subcommand with the library operations it reaches.
pub const DISPATCH: &[(&str, &[&str])] = &[
    ("qs eval", &["qpochhammer", "qpochhammer_inf", "qgamma", "qpascal_psi", "qintegral_radial", "bminus", "bplus"]),
    ("phi eval", &["phi_l", "phi_series", "phi_l_bridged", "lambda_of_l"]),
    ("asc eval", &["asc_eval_recurrence", "asc_eval_hypergeometric"]),
    ("measure build", &["build_spectral_measure", "lambda_of_z"]),
    ("measure quadrature", &["build_spectral_measure", "measure_quadrature"]),
    ("radial rho", &["rho", "norm_fj", "basis_ej_coeff"]),
    ("radial integrate", &["radial_integral"]),
    ("box apply", &["box_pointwise", "box_divergence"]),
    ("box matrix", &["box_matrix"]),
    ("box spectrum", &["truncated_spectrum", "build_spectral_measure", "lambda_of_z"]),
    ("box lambda", &["lambda_of_l", "lambda_of_z"]),
    ("box dirichlet", &["dirichlet_form", "box_pointwise"]),
    ("transform forward", &["build_spectral_measure", "transform_forward"]),
    ("transform inverse", &["build_spectral_measure", "transform_inverse"]),
    ("transform plancherel", &["build_spectral_measure", "plancherel_check"]),
    ("transform multcheck", &["build_spectral_measure", "multiplication_equivalence_check"]),
    ("cfun eval", &["c_function"]),
    ("cfun asymptotics", &["asymptotics_check"]),
    ("cfun wc", &["build_spectral_measure", "wc_identity_check"]),
    ("rep build", &["build_rep"]),
    ("rep relations", &["build_rep", "check_relations"]),
    ("rep integral", &["build_rep", "trace_integral", "radial_equivalence_check"]),
    ("verify all", &["run_all"]),
];

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T, O, E>(argv: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let finished = match commands::execute(&cli) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    for note in &finished.notes {
        let _ = writeln!(err, "{note}");
    }
    let written = match cli.global.format {
        Format::Json => serde_json::to_writer_pretty(&mut *out, &finished.report.to_json())
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(out))
            .map_err(CliError::from),
        Format::Csv => finished.report.write_csv(&mut *out),
    };
    match written {
        Ok(()) => finished.code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
