//! Command-line front end: configuration, preset pipelines and export.

mod export;
pub mod presets;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::diagnostics::{
    check_optimality_with_beta, check_slater, check_slater_on, default_slater_weight, mass_bound,
    sparsity_stats,
};
use crate::mesh::{select_nodes, Region};
use crate::oracle1d::{self, OracleError};
use crate::sparse::{SparseError, DEFAULT_LINEAR_TOL};
use crate::ssn::{
    continuation_path_with_beta, ContinuationOptions, SolverError, SolverOptions,
    DEFAULT_NEWTON_TOL, SUPPORT_THRESHOLD_REL,
};

pub use export::{export_results, write_path_csv, ExportError};
pub use presets::{build_preset, Preset, PresetError};

/// Slack allowed in the Slater mass bound.
pub const MASS_BOUND_SLACK: f64 = 1e-6;
/// Dirac weights for the 1D minimizing sequence.
pub const NONATTAINMENT_N: [usize; 5] = [2, 4, 8, 16, 32];
/// Width of the excluded boundary layer in the well-posed 1D problem.
pub const ORACLE_DELTA: f64 = 0.125;

#[derive(Debug, Parser, Default, Clone)]
#[command(
    name = "measure-control",
    about = "Optimal control with non-negative measure-valued controls"
)]
pub struct CliArgs {
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long = "alpha-start")]
    pub alpha_start: Option<f64>,
    #[arg(long = "alpha-factor")]
    pub alpha_factor: Option<f64>,
    #[arg(long = "alpha-min")]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "newton-tol")]
    pub newton_tol: Option<f64>,
    #[arg(long = "linear-tol")]
    pub linear_tol: Option<f64>,
    #[arg(long = "output-dir")]
    pub output_dir: Option<PathBuf>,
    /// TOML file with the same keys as the flags (snake_case)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "emit-matrices")]
    pub emit_matrices: bool,
    #[arg(long = "log-file")]
    pub log_file: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    preset: Option<String>,
    nx: Option<usize>,
    ny: Option<usize>,
    alpha_start: Option<f64>,
    alpha_factor: Option<f64>,
    alpha_min: Option<f64>,
    beta: Option<f64>,
    newton_tol: Option<f64>,
    linear_tol: Option<f64>,
    output_dir: Option<PathBuf>,
    emit_matrices: Option<bool>,
    log_file: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid value for {key}: {value}")]
    Invalid { key: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Preset,
    pub nx: usize,
    pub ny: usize,
    pub alpha_start: f64,
    pub alpha_factor: f64,
    pub alpha_min: f64,
    pub beta: f64,
    pub newton_tol: f64,
    pub linear_tol: f64,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub emit_matrices: bool,
    #[serde(skip)]
    pub log_file: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for `preset` at desk scale (64 x 64 nodes).
    pub fn for_preset(preset: Preset) -> Self {
        let cont = ContinuationOptions::default();
        RunConfig {
            preset,
            nx: 64,
            ny: 64,
            alpha_start: cont.alpha_start,
            alpha_factor: cont.alpha_factor,
            alpha_min: cont.alpha_min,
            beta: 0.0,
            newton_tol: DEFAULT_NEWTON_TOL,
            linear_tol: DEFAULT_LINEAR_TOL,
            output_dir: PathBuf::from("output"),
            emit_matrices: false,
            log_file: None,
        }
    }

    pub fn continuation(&self) -> ContinuationOptions {
        ContinuationOptions {
            alpha_start: self.alpha_start,
            alpha_factor: self.alpha_factor,
            alpha_min: self.alpha_min,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            newton_tol: self.newton_tol,
            linear_tol: self.linear_tol,
            ..SolverOptions::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key, value: &dyn std::fmt::Display| ConfigError::Invalid {
            key,
            value: value.to_string(),
        };
        if self.nx < 2 {
            return Err(invalid("nx", &self.nx));
        }
        if self.ny < 2 {
            return Err(invalid("ny", &self.ny));
        }
        if !(self.alpha_factor > 0.0 && self.alpha_factor < 1.0) {
            return Err(invalid("alpha_factor", &self.alpha_factor));
        }
        if !(self.alpha_min > 0.0) {
            return Err(invalid("alpha_min", &self.alpha_min));
        }
        if !(self.alpha_start > self.alpha_min) {
            return Err(invalid("alpha_start", &self.alpha_start));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(invalid("beta", &self.beta));
        }
        if !(self.newton_tol > 0.0) {
            return Err(invalid("newton_tol", &self.newton_tol));
        }
        if !(self.linear_tol > 0.0) {
            return Err(invalid("linear_tol", &self.linear_tol));
        }
        Ok(())
    }
}

fn parse_preset(s: &str) -> Result<Preset, ConfigError> {
    s.parse().map_err(|_| ConfigError::Invalid {
        key: "preset",
        value: s.to_string(),
    })
}

/// Merges flags over the config file over preset defaults.
pub fn load_config(args: &CliArgs) -> Result<RunConfig, ConfigError> {
    let text = match &args.config {
        Some(path) => Some(
            fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?,
        ),
        None => None,
    };
    load_config_with_file(args, text.as_deref())
}

/// [`load_config`] with the config file contents supplied directly.
pub fn load_config_with_file(args: &CliArgs, file: Option<&str>) -> Result<RunConfig, ConfigError> {
    let file: FileConfig = match file {
        Some(text) => toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?,
        None => FileConfig::default(),
    };
    let preset = match args.preset.as_deref().or(file.preset.as_deref()) {
        Some(name) => parse_preset(name)?,
        None => Preset::TwoBoxDirichlet,
    };
    let defaults = RunConfig::for_preset(preset);
    let nx = args.nx.or(file.nx).unwrap_or(defaults.nx);
    let config = RunConfig {
        preset,
        nx,
        ny: args.ny.or(file.ny).unwrap_or(nx),
        alpha_start: args
            .alpha_start
            .or(file.alpha_start)
            .unwrap_or(defaults.alpha_start),
        alpha_factor: args
            .alpha_factor
            .or(file.alpha_factor)
            .unwrap_or(defaults.alpha_factor),
        alpha_min: args
            .alpha_min
            .or(file.alpha_min)
            .unwrap_or(defaults.alpha_min),
        beta: args.beta.or(file.beta).unwrap_or(defaults.beta),
        newton_tol: args
            .newton_tol
            .or(file.newton_tol)
            .unwrap_or(defaults.newton_tol),
        linear_tol: args
            .linear_tol
            .or(file.linear_tol)
            .unwrap_or(defaults.linear_tol),
        output_dir: args
            .output_dir
            .clone()
            .or(file.output_dir)
            .unwrap_or(defaults.output_dir),
        emit_matrices: args.emit_matrices || file.emit_matrices.unwrap_or(false),
        log_file: args.log_file.clone().or(file.log_file),
    };
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Preset(#[from] PresetError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

impl RunError {
    /// `1` for configuration and IO problems, `2` for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Export(_) | RunError::Preset(_) => 1,
            RunError::Solver(_) | RunError::Oracle(_) | RunError::Sparse(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub converged: bool,
    pub files: Vec<PathBuf>,
}

/// Runs the pipeline and maps the outcome to an exit code:
/// `0` converged, `2` not converged, `1` configuration or IO error.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(outcome) if outcome.converged => 0,
        Ok(_) => {
            eprintln!("solver did not converge");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn prepare_output_dir(dir: &Path) -> Result<(), ExportError> {
    if !dir.is_dir() {
        // only the leaf directory is created
        fs::create_dir(dir).map_err(|source| ExportError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

fn write_log(config: &RunConfig, lines: &[String]) -> Result<(), ExportError> {
    match &config.log_file {
        Some(path) => {
            let mut text = String::new();
            for l in lines {
                text.push_str(l);
                text.push('\n');
            }
            fs::write(path, text).map_err(|source| ExportError::Io {
                path: path.clone(),
                source,
            })
        }
        None => {
            let mut err = std::io::stderr().lock();
            for l in lines {
                let _ = writeln!(err, "{l}");
            }
            Ok(())
        }
    }
}

/// Executes the preset pipeline and writes all artifacts.
pub fn execute(config: &RunConfig) -> Result<RunOutcome, RunError> {
    config.validate()?;
    prepare_output_dir(&config.output_dir)?;
    match config.preset {
        Preset::Oracle1d => run_oracle(config),
        Preset::SlaterCheck => run_slater(config),
        _ => run_control(config),
    }
}

fn run_control(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let (mesh, problem) = build_preset(config.preset, config.nx, config.ny)?;
    let (state, report, path) = continuation_path_with_beta(
        &problem,
        config.beta,
        &config.continuation(),
        &config.solver_options(),
    )?;
    write_log(config, &report.log_lines())?;
    eprintln!(
        "{}: {} stages, converged = {}, final residual {:e}, {:.3} s",
        config.preset,
        report.stages.len(),
        report.converged,
        report.final_residual,
        report.wall_time_secs
    );

    let optimality = check_optimality_with_beta(&state, &problem, config.beta);
    let h = default_slater_weight(&problem);
    let slater = check_slater(&problem, &h)?;
    let bound = mass_bound(&state, &problem, &slater, &h, MASS_BOUND_SLACK)?;
    let sparsity = sparsity_stats(&state, problem.control_nodes(), SUPPORT_THRESHOLD_REL);
    let report_json = json!({
        "config": config,
        "solve": report,
        "optimality": optimality,
        "slater": slater,
        "mass_bound": bound,
        "sparsity": {
            "support_size": sparsity.support_size,
            "support_fraction": sparsity.support_fraction,
        },
    });
    let files = export_results(
        &config.output_dir,
        &mesh,
        &problem,
        &state,
        &path,
        &sparsity,
        &report_json,
        config.emit_matrices,
    )?;
    Ok(RunOutcome {
        converged: report.converged,
        files,
    })
}

fn run_oracle(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let dir = &config.output_dir;
    let rows = oracle1d::nonattainment_demo(&NONATTAINMENT_N)?;
    let mut files = Vec::new();
    let mut buf = Vec::new();
    oracle1d::write_nonattainment_csv(&rows, &mut buf).expect("in-memory write");
    files.push(export::write_file(dir, "nonattainment.csv", &buf)?);

    // every 1/n of the sequence must be a node
    let cells = config.nx.div_ceil(32).max(1) * 32;
    let nodes = oracle1d::uniform_nodes(cells);
    let mut fem_csv = String::from("n,x,fem,exact\n");
    let mut max_err = 0.0f64;
    for &n in &NONATTAINMENT_N {
        let fem = oracle1d::fem_point_source_1d(n, &nodes)?;
        for (&x, &v) in nodes.iter().zip(&fem) {
            let exact = oracle1d::exact_counterexample_state(n, x)?;
            max_err = max_err.max((v - exact).abs());
            fem_csv.push_str(&format!("{n},{x:.16e},{v:.16e},{exact:.16e}\n"));
        }
    }
    files.push(export::write_file(
        dir,
        "oracle_fem.csv",
        fem_csv.as_bytes(),
    )?);

    let problem = oracle1d::dirichlet_problem_1d(
        &nodes,
        &|x| 1.0 - x,
        (ORACLE_DELTA, 1.0 - ORACLE_DELTA),
        (ORACLE_DELTA, 1.0 - ORACLE_DELTA),
    )?;
    let (state, report, path) = continuation_path_with_beta(
        &problem,
        config.beta,
        &config.continuation(),
        &config.solver_options(),
    )?;
    write_log(config, &report.log_lines())?;
    let h = default_slater_weight(&problem);
    let slater = check_slater(&problem, &h)?;
    let optimality = check_optimality_with_beta(&state, &problem, config.beta);
    let bound = mass_bound(&state, &problem, &slater, &h, MASS_BOUND_SLACK)?;
    let mut path_buf = Vec::new();
    write_path_csv(&path, &mut path_buf).expect("in-memory write");
    files.push(export::write_file(dir, "path.csv", &path_buf)?);

    let report_json = json!({
        "config": config,
        "fem_max_abs_error": max_err,
        "nonattainment": rows.iter().map(|r| json!({"n": r.n, "objective": r.objective, "mass": r.mass})).collect::<Vec<_>>(),
        "delta": ORACLE_DELTA,
        "solve": report,
        "optimality": optimality,
        "slater": slater,
        "mass_bound": bound,
    });
    files.push(export::write_json(dir, "report.json", &report_json)?);
    Ok(RunOutcome {
        converged: report.converged && max_err <= 1e-10,
        files,
    })
}

fn run_slater(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let (mesh, box_problem) = build_preset(Preset::TwoBoxDirichlet, config.nx, config.ny)?;
    let h = default_slater_weight(&box_problem);
    let whole = check_slater_on(&box_problem, &select_nodes(&mesh, &Region::Whole), &h)?;
    let boxed = check_slater(&box_problem, &h)?;
    let (_, neumann_problem) = build_preset(Preset::NeumannBoundary, config.nx, config.ny)?;
    let neumann = check_slater(&neumann_problem, &default_slater_weight(&neumann_problem))?;
    let report_json = json!({
        "config": config,
        "whole_domain_dirichlet": whole,
        "box_dirichlet": boxed,
        "neumann_boundary": neumann,
    });
    let files = vec![export::write_json(
        &config.output_dir,
        "report.json",
        &report_json,
    )?];
    Ok(RunOutcome {
        converged: !whole.satisfied && boxed.satisfied && neumann.satisfied,
        files,
    })
}
