use std::f64::consts::PI;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use tripartite_cli::{run, Mode, SweepConfig};
use tripartite_cqed::tavis_cummings::ClosedFormVariant;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    Corrected,
    Uncorrected,
}

/// Entanglement dynamics of two atoms in one cavity and one atom in a remote
/// cavity, driven by a two-mode squeezed vacuum.
#[derive(Debug, Parser)]
#[command(name = "tripartite", version)]
struct Args {
    #[arg(long, value_enum, default_value = "tau-sweep")]
    mode: Mode,
    /// Squeezing parameter.
    #[arg(long, default_value_t = 1.2)]
    s: f64,
    /// Beam-splitter angle in radians, in [0, pi].
    #[arg(long, default_value_t = PI)]
    theta: f64,
    /// Photon-number truncation of the injected field.
    #[arg(long, default_value_t = 80)]
    n_max: usize,
    #[arg(long, default_value_t = 0.0)]
    tau_start: f64,
    #[arg(long, default_value_t = 20.0)]
    tau_end: f64,
    /// Number of tau points, endpoints included.
    #[arg(long, default_value_t = 600)]
    tau_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    s_start: f64,
    #[arg(long, default_value_t = 2.0)]
    s_end: f64,
    /// Number of s points, endpoints included.
    #[arg(long, default_value_t = 200)]
    s_steps: usize,
    /// Interaction time for s-sweep and single-point.
    #[arg(long, default_value_t = 14.5)]
    tau: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncation used by oracle-check.
    #[arg(long, default_value_t = 40)]
    oracle_n_max: usize,
    /// Largest accepted elementwise difference in oracle-check.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Comma-separated tau values for oracle-check.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.8, 2.0, 14.5])]
    grid_tau: Vec<f64>,
    /// Comma-separated s values for oracle-check.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.6, 0.9])]
    grid_s: Vec<f64>,
    /// Comma-separated theta values for oracle-check.
    #[arg(long, value_delimiter = ',', default_values_t = [PI / 3.0, PI / 2.0, PI])]
    grid_theta: Vec<f64>,
    /// Markdown file receiving oracle-check disagreements.
    #[arg(long)]
    discrepancies: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "corrected", hide = true)]
    closed_form: Variant,
}

impl From<Args> for SweepConfig {
    fn from(a: Args) -> Self {
        SweepConfig {
            mode: a.mode,
            s: a.s,
            theta: a.theta,
            n_max: a.n_max,
            tau_start: a.tau_start,
            tau_end: a.tau_end,
            tau_steps: a.tau_steps,
            s_start: a.s_start,
            s_end: a.s_end,
            s_steps: a.s_steps,
            tau: a.tau,
            out: a.out,
            oracle_n_max: a.oracle_n_max,
            tolerance: a.tolerance,
            grid_tau: a.grid_tau,
            grid_s: a.grid_s,
            grid_theta: a.grid_theta,
            discrepancies: a.discrepancies,
            closed_form: match a.closed_form {
                Variant::Corrected => ClosedFormVariant::OracleConsistent,
                Variant::Uncorrected => ClosedFormVariant::Uncorrected,
            },
        }
    }
}

fn main() -> ExitCode {
    let config = SweepConfig::from(Args::parse());
    let mut stdout = io::stdout().lock();
    match run(&config, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
