//! Parameter sweeps and brute-force validation for the three-qubit cavity model.
//!
//! Every run mode produces plain text: CSV with a `#` header block recording
//! the configuration, or a comparison report for `oracle-check`. Grid points
//! are evaluated in parallel and emitted in grid order, so output is
//! byte-identical between runs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use tripartite_cqed::entanglement::NegativityReport;
use tripartite_cqed::fock_field::FieldConfig;
use tripartite_cqed::oracle::{compare_states, full_evolution, ComparisonReport};
use tripartite_cqed::tavis_cummings::{
    diagonal_probabilities, ClosedFormEvaluator, ClosedFormVariant, EvolutionParams,
};

/// Largest truncation accepted for the brute-force comparison.
pub const ORACLE_N_MAX_LIMIT: usize = 40;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Model(#[from] tripartite_cqed::Error),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    TauSweep,
    SSweep,
    SinglePoint,
    OracleCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::TauSweep => "tau-sweep",
            Mode::SSweep => "s-sweep",
            Mode::SinglePoint => "single-point",
            Mode::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub s: f64,
    pub theta: f64,
    pub n_max: usize,
    pub tau_start: f64,
    pub tau_end: f64,
    pub tau_steps: usize,
    pub s_start: f64,
    pub s_end: f64,
    pub s_steps: usize,
    /// Fixed `tau` for `s-sweep` and `single-point`.
    pub tau: f64,
    pub out: Option<PathBuf>,
    pub oracle_n_max: usize,
    pub tolerance: f64,
    pub grid_tau: Vec<f64>,
    pub grid_s: Vec<f64>,
    pub grid_theta: Vec<f64>,
    pub discrepancies: Option<PathBuf>,
    pub closed_form: ClosedFormVariant,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: Mode::TauSweep,
            s: 1.2,
            theta: PI,
            n_max: 80,
            tau_start: 0.0,
            tau_end: 20.0,
            tau_steps: 600,
            s_start: 0.0,
            s_end: 2.0,
            s_steps: 200,
            tau: 14.5,
            out: None,
            oracle_n_max: 40,
            tolerance: 1e-8,
            grid_tau: vec![0.3, 0.8, 2.0, 14.5],
            grid_s: vec![0.3, 0.6, 0.9],
            grid_theta: vec![PI / 3.0, PI / 2.0, PI],
            discrepancies: None,
            closed_form: ClosedFormVariant::OracleConsistent,
        }
    }
}

fn check_range(name: &str, start: f64, end: f64, steps: usize) -> CliResult<()> {
    if !(start.is_finite() && end.is_finite()) {
        return Err(usage(format!("{name} range must be finite")));
    }
    if end < start {
        return Err(usage(format!(
            "{name} range is empty: end {end} < start {start}"
        )));
    }
    if steps == 0 {
        return Err(usage(format!("{name} steps must be >= 1")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> CliResult<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(usage(format!("theta must lie in [0, pi], got {theta}")));
    }
    Ok(())
}

fn check_s(s: f64) -> CliResult<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(usage(format!("s must be finite and >= 0, got {s}")));
    }
    Ok(())
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        check_theta(self.theta)?;
        check_s(self.s)?;
        if !self.tau.is_finite() {
            return Err(usage("tau must be finite"));
        }
        match self.mode {
            Mode::TauSweep => check_range("tau", self.tau_start, self.tau_end, self.tau_steps),
            Mode::SSweep => {
                check_range("s", self.s_start, self.s_end, self.s_steps)?;
                check_s(self.s_start)
            }
            Mode::SinglePoint => Ok(()),
            Mode::OracleCheck => {
                if self.oracle_n_max > ORACLE_N_MAX_LIMIT {
                    return Err(usage(format!(
                        "oracle n_max must be <= {ORACLE_N_MAX_LIMIT}, got {}",
                        self.oracle_n_max
                    )));
                }
                if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
                    return Err(usage("tolerance must be positive"));
                }
                if self.grid_tau.is_empty() || self.grid_s.is_empty() || self.grid_theta.is_empty()
                {
                    return Err(usage("oracle grid lists must be non-empty"));
                }
                self.grid_theta.iter().try_for_each(|&t| check_theta(t))?;
                self.grid_s.iter().try_for_each(|&s| check_s(s))?;
                if self.grid_tau.iter().any(|t| !t.is_finite()) {
                    return Err(usage("grid tau values must be finite"));
                }
                Ok(())
            }
        }
    }

    fn field(&self, s: f64) -> CliResult<FieldConfig> {
        Ok(FieldConfig::new(s, self.theta, self.n_max)?)
    }

    fn header(&self) -> Vec<String> {
        let mut lines = vec![
            format!("mode={}", self.mode.name()),
            format!("theta={} n_max={}", self.theta, self.n_max),
        ];
        match self.mode {
            Mode::TauSweep => {
                lines.push(format!("s={}", self.s));
                lines.push(format!(
                    "tau_start={} tau_end={} tau_steps={}",
                    self.tau_start, self.tau_end, self.tau_steps
                ));
            }
            Mode::SSweep => {
                lines.push(format!("tau={}", self.tau));
                lines.push(format!(
                    "s_start={} s_end={} s_steps={}",
                    self.s_start, self.s_end, self.s_steps
                ));
            }
            _ => lines.push(format!("s={} tau={}", self.s, self.tau)),
        }
        if self.closed_form != ClosedFormVariant::OracleConsistent {
            lines.push(format!("closed_form={:?}", self.closed_form));
        }
        lines
    }
}

/// `steps` evenly spaced points from `start` to `end` inclusive; a single
/// point when `steps == 1` or the range is degenerate.
pub fn linear_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 || start == end {
        return vec![start];
    }
    let width = end - start;
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| start + width * (i as f64 / last))
        .collect()
}

pub const COLUMNS: [&str; 26] = [
    "tau",
    "s",
    "P1",
    "P2",
    "P3",
    "P4",
    "P5",
    "P6",
    "P7",
    "P8",
    "NG_B_eig",
    "NG_B_closed",
    "NPSDG_B",
    "NPSDG_A1",
    "E3_B",
    "E0_B",
    "EPSD_B_BA1",
    "EPSD_A1_A1A2",
    "EPSD_A1_A1B",
    "SL_B",
    "F_W1",
    "P_bell",
    "deficit",
    "NG_A1",
    "EPSD_B_BA2",
    "E3_max_pure",
];

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub tau: f64,
    pub s: f64,
    pub probabilities: [f64; 8],
    pub ng_b_eig: f64,
    /// NaN when the state lacks the layout required by the closed form.
    pub ng_b_closed: f64,
    pub npsdg_b: f64,
    pub npsdg_a1: f64,
    pub e3_b: f64,
    pub e0_b: f64,
    pub epsd_b_ba1: f64,
    pub epsd_a1_a1a2: f64,
    pub epsd_a1_a1b: f64,
    pub sl_b: f64,
    pub f_w1: f64,
    pub p_bell: f64,
    pub deficit: f64,
    pub ng_a1: f64,
    pub epsd_b_ba2: f64,
    pub e3_max_pure: f64,
}

impl Row {
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.tau, self.s];
        v.extend_from_slice(&self.probabilities);
        v.extend_from_slice(&[
            self.ng_b_eig,
            self.ng_b_closed,
            self.npsdg_b,
            self.npsdg_a1,
            self.e3_b,
            self.e0_b,
            self.epsd_b_ba1,
            self.epsd_a1_a1a2,
            self.epsd_a1_a1b,
            self.sl_b,
            self.f_w1,
            self.p_bell,
            self.deficit,
            self.ng_a1,
            self.epsd_b_ba2,
            self.e3_max_pure,
        ]);
        v
    }
}

/// Evaluates every reported quantity at one `tau`.
pub fn evaluate_point(evaluator: &ClosedFormEvaluator, tau: f64) -> CliResult<Row> {
    let state = evaluator.rho(EvolutionParams::new(tau)?);
    let report = NegativityReport::compute(&state)?;
    Ok(Row {
        tau,
        s: evaluator.config().s(),
        probabilities: diagonal_probabilities(&state),
        ng_b_eig: report.kway.b.global,
        ng_b_closed: report.closed_form_global_b.unwrap_or(f64::NAN),
        npsdg_b: report.psdg.b,
        npsdg_a1: report.psdg.a1,
        e3_b: report.kway.b.e3,
        e0_b: report.kway.b.e0,
        epsd_b_ba1: report.psd_b_ba1,
        epsd_a1_a1a2: report.psd_a1_a1a2,
        epsd_a1_a1b: report.psd_a1_a1b,
        sl_b: report.linear_entropy_b,
        f_w1: report.w1_fidelity,
        p_bell: report.bell_projection,
        deficit: evaluator.deficit(),
        ng_a1: report.kway.a1.global,
        epsd_b_ba2: report.psd_b_ba2,
        e3_max_pure: report.max_pure_three_way,
    })
}

/// Fixed-width scientific notation with 12 significant digits; `-0` prints as `0`.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

/// Rows plus the configuration they were produced from.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: Vec<String>,
    pub rows: Vec<Row>,
}

impl Dataset {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.values().into_iter().map(format_value).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Row maximizing `key`; the first one on ties.
    pub fn argmax_by<F: Fn(&Row) -> f64>(&self, key: F) -> Option<&Row> {
        self.rows
            .iter()
            .fold(None, |best: Option<&Row>, row| match best {
                Some(b) if key(b) >= key(row) => Some(b),
                _ => Some(row),
            })
    }
}

pub fn run_tau_sweep(config: &SweepConfig) -> CliResult<Dataset> {
    config.validate()?;
    let evaluator = ClosedFormEvaluator::with_variant(config.field(config.s)?, config.closed_form);
    let rows = linear_grid(config.tau_start, config.tau_end, config.tau_steps)
        .into_par_iter()
        .map(|tau| evaluate_point(&evaluator, tau))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Dataset {
        header: config.header(),
        rows,
    })
}

pub fn run_s_sweep(config: &SweepConfig) -> CliResult<Dataset> {
    config.validate()?;
    let rows = linear_grid(config.s_start, config.s_end, config.s_steps)
        .into_par_iter()
        .map(|s| {
            let evaluator = ClosedFormEvaluator::with_variant(config.field(s)?, config.closed_form);
            evaluate_point(&evaluator, config.tau)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Dataset {
        header: config.header(),
        rows,
    })
}

pub fn run_single_point(config: &SweepConfig) -> CliResult<Dataset> {
    config.validate()?;
    let evaluator = ClosedFormEvaluator::with_variant(config.field(config.s)?, config.closed_form);
    let row = evaluate_point(&evaluator, config.tau)?;
    Ok(Dataset {
        header: config.header(),
        rows: vec![row],
    })
}

/// Comparison at one `(tau, s, theta)`.
#[derive(Debug, Clone)]
pub struct OracleCheckPoint {
    pub tau: f64,
    pub s: f64,
    pub theta: f64,
    pub report: ComparisonReport,
}

#[derive(Debug, Clone)]
pub struct OracleCheckReport {
    pub n_max: usize,
    pub tolerance: f64,
    pub points: Vec<OracleCheckPoint>,
}

impl OracleCheckReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.report.passed())
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.report.max_abs_diff)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &OracleCheckPoint> {
        self.points.iter().filter(|p| !p.report.passed())
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "oracle check: {} points, n_max={}, tolerance={:e}, max |diff|={:.3e}, {}",
            self.points.len(),
            self.n_max,
            self.tolerance,
            self.max_abs_diff(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for p in &self.points {
            let _ = writeln!(
                out,
                "tau={} s={} theta={:.6}: max |diff|={:.3e} at ({}, {}){}",
                p.tau,
                p.s,
                p.theta,
                p.report.max_abs_diff,
                p.report.argmax.0,
                p.report.argmax.1,
                if p.report.passed() { "" } else { "  FAIL" }
            );
        }
        for p in self.failures() {
            let _ = writeln!(out, "\ntau={} s={} theta={:.6}", p.tau, p.s, p.theta);
            out.push_str(&p.report.to_string());
        }
        out
    }

    /// Markdown listing of every disagreeing point and element.
    pub fn discrepancy_entries(&self) -> String {
        let mut out = String::from("# Closed form vs brute-force evolution\n\n");
        if self.passed() {
            let _ = writeln!(
                out,
                "No element differs by more than {:e} (max {:.3e}, n_max = {}).",
                self.tolerance,
                self.max_abs_diff(),
                self.n_max
            );
            return out;
        }
        out.push_str("| tau | s | theta | entry | closed form | brute force | abs diff |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for p in self.failures() {
            for e in p
                .report
                .entries
                .iter()
                .filter(|e| e.abs_diff() >= self.tolerance)
            {
                let _ = writeln!(
                    out,
                    "| {} | {} | {:.6} | ({}, {}) | {:.12e}{:+.12e}i | {:.12e}{:+.12e}i | {:.3e} |",
                    p.tau,
                    p.s,
                    p.theta,
                    e.i,
                    e.j,
                    e.candidate.re,
                    e.candidate.im,
                    e.reference.re,
                    e.reference.im,
                    e.abs_diff()
                );
            }
        }
        out
    }
}

pub fn run_oracle_check(config: &SweepConfig) -> CliResult<OracleCheckReport> {
    let config = SweepConfig {
        mode: Mode::OracleCheck,
        ..config.clone()
    };
    config.validate()?;
    let mut grid = Vec::new();
    for &theta in &config.grid_theta {
        for &s in &config.grid_s {
            for &tau in &config.grid_tau {
                grid.push((tau, s, theta));
            }
        }
    }
    let points = grid
        .into_par_iter()
        .map(|(tau, s, theta)| {
            let field = FieldConfig::new(s, theta, config.oracle_n_max)?;
            let closed = ClosedFormEvaluator::with_variant(field, config.closed_form)
                .rho(EvolutionParams::new(tau)?);
            let brute = full_evolution(&field, tau)?;
            let report = compare_states(&closed, &brute.rho, config.tolerance)?;
            Ok(OracleCheckPoint {
                tau,
                s,
                theta,
                report,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(OracleCheckReport {
        n_max: config.oracle_n_max,
        tolerance: config.tolerance,
        points,
    })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the configured mode, writing to `config.out` or `stdout`.
pub fn run(config: &SweepConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let emit = |text: &str, stdout: &mut dyn Write| -> CliResult<()> {
        match &config.out {
            Some(path) => write_file(path, text),
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                }),
        }
    };
    match config.mode {
        Mode::TauSweep => emit(&run_tau_sweep(config)?.to_csv(), stdout),
        Mode::SSweep => emit(&run_s_sweep(config)?.to_csv(), stdout),
        Mode::SinglePoint => emit(&run_single_point(config)?.to_csv(), stdout),
        Mode::OracleCheck => {
            let report = run_oracle_check(config)?;
            emit(&report.summary(), stdout)?;
            if let Some(path) = &config.discrepancies {
                write_file(path, &report.discrepancy_entries())?;
            }
            if report.passed() {
                Ok(())
            } else {
                let first = report
                    .failures()
                    .next()
                    .expect("failed report has a failing point");
                Err(CliError::Tolerance(format!(
                    "tau={} s={} theta={} entry ({}, {}) |diff|={:.3e} >= {:e}",
                    first.tau,
                    first.s,
                    first.theta,
                    first.report.argmax.0,
                    first.report.argmax.1,
                    first.report.max_abs_diff,
                    report.tolerance
                )))
            }
        }
    }
}
