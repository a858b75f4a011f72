use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use assim_core::var3d::{GdConfig, Solver};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_methods, ExperimentConfig, Method};
use crate::error::HarnessError;
use crate::experiment::run_experiment;
use crate::output::{render_metrics, write_csv, write_metrics};

#[derive(Debug, Parser)]
#[command(name = "assim", version, about = "Spring-mass twin experiment for KF, EnKF and 3D-Var")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate truth and observations, run the selected estimators, write results.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Analytic,
    Gd,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    /// Comma-separated subset of kf,enkf,var3d (`none` for truth and observations only).
    #[arg(long, default_value = "kf,enkf,var3d", value_parser = parse_method_list)]
    methods: BTreeSet<Method>,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Observation noise variance.
    #[arg(long, default_value_t = 0.01)]
    r_var: f64,
    #[arg(long, default_value_t = 100)]
    ensemble_size: usize,
    /// 3D-Var background covariance is d-scale times the identity.
    #[arg(long, default_value_t = 0.05)]
    d_scale: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Analytic)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1e-6)]
    gd_eps: f64,
    #[arg(long, default_value_t = 0.1)]
    gd_step: f64,
    #[arg(long, default_value_t = 1000)]
    gd_maxiter: usize,
    /// Observe every N-th step, starting at step 0.
    #[arg(long, default_value_t = 1)]
    obs_stride: usize,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Metrics go to stdout when omitted.
    #[arg(long)]
    out_metrics: Option<PathBuf>,
    /// Assimilate the step-0 observation too.
    #[arg(long)]
    initial_analysis: bool,
    /// Forecast EnKF members without process noise.
    #[arg(long)]
    enkf_no_process_noise: bool,
    /// Compute the EnKF gain from the previous analysis ensemble.
    #[arg(long)]
    enkf_lagged_covariance: bool,
}

// clap wants a function returning a displayable error type.
fn parse_method_list(s: &str) -> Result<BTreeSet<Method>, String> {
    parse_methods(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn into_config(self) -> (ExperimentConfig, Option<PathBuf>, Option<PathBuf>) {
        let cfg = ExperimentConfig {
            dt: self.dt,
            steps: self.steps,
            seed: self.seed,
            r_var: self.r_var,
            ensemble_size: self.ensemble_size,
            d_scale: self.d_scale,
            methods: self.methods,
            solver: match self.solver {
                SolverArg::Analytic => Solver::Analytic,
                SolverArg::Gd => Solver::GradientDescent,
            },
            gd: GdConfig { step_size: self.gd_step, epsilon: self.gd_eps, n_max: self.gd_maxiter },
            obs_stride: self.obs_stride,
            initial_analysis: self.initial_analysis,
            enkf_process_noise: !self.enkf_no_process_noise,
            enkf_lagged_covariance: self.enkf_lagged_covariance,
        };
        (cfg, self.out_csv, self.out_metrics)
    }
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let (cfg, out_csv, out_metrics) = args.into_config();
    cfg.validate()?;
    let result = run_experiment(&cfg)?;
    if let Some(path) = &out_csv {
        write_csv(&result, path)?;
    }
    match &out_metrics {
        Some(path) => write_metrics(&result, path)?,
        None => print!("{}", render_metrics(&result)),
    }
    Ok(())
}

/// Parses `argv` (program name first), runs, and returns the process exit
/// code: 0 on success, 2 on bad arguments or configuration, 1 otherwise.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let Command::Run(args) = cli.command;
    match run(args) {
        Ok(()) => 0,
        Err(e @ HarnessError::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
