//! CLI for PAVP analysis of cell-free sensing/communication networks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfaoi::cli::{self, CommandSpec, ExperimentSpec};
use cfaoi::numerics::QuadratureSpec;

#[derive(Parser)]
#[command(
    name = "cfaoi",
    about = "Peak-AoI violation analysis for cell-free networks with sensing/communication coexistence",
    version
)]
struct Cli {
    /// Parameter file (JSON with {value, unit} pairs); built-in defaults when omitted.
    #[arg(long, global = true)]
    params: Option<PathBuf>,

    /// Override a parameter: key=value[:unit]; repeatable. Without a unit the
    /// field's declared unit is kept.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE[:UNIT]")]
    set: Vec<String>,

    /// Output directory for CSV results and metadata sidecars.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,

    /// Master seed for all Monte Carlo substreams.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Quadrature absolute tolerance (relative tolerance scales by 100x).
    #[arg(long = "quad-tol", global = true)]
    quad_tol: Option<f64>,

    /// Fix the Chernoff parameter theta (1/s) instead of optimizing it.
    #[arg(long, global = true)]
    theta: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AxisArgs {
    /// Parameter name to sweep (value list in the field's declared unit).
    #[arg(long)]
    axis: Option<String>,

    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit analytical curves: P_cv_s, P_cv_c, and the PAVP bound vs. an axis.
    Analyze {
        #[command(flatten)]
        axis: AxisArgs,
    },
    /// Emit empirical PAVP estimates with standard errors.
    Simulate {
        #[command(flatten)]
        axis: AxisArgs,
        /// Spatial realizations per point.
        #[arg(long)]
        realizations: usize,
        /// Packets per realization.
        #[arg(long)]
        packets: usize,
        /// Also export one realization's per-packet trace CSV.
        #[arg(long)]
        trace: bool,
        /// Sample arrivals from fresh physical sensing trials per scan.
        #[arg(long)]
        physical_arrivals: bool,
        /// Per-attempt Rayleigh fading on top of the hardened SINR.
        #[arg(long)]
        rayleigh_service: bool,
    },
    /// Solve the partition-factor line search and emit the beta curve.
    Optimize {
        /// Coarse grid size over (0,1).
        #[arg(long, default_value_t = 33)]
        grid_points: usize,
    },
    /// Partition solutions while one parameter sweeps.
    Sweep {
        /// Parameter name to sweep (value list in the field's declared unit).
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        /// Coarse grid size over (0,1).
        #[arg(long, default_value_t = 33)]
        grid_points: usize,
    },
}

fn axis_spec(axis: AxisArgs) -> Option<(String, Vec<f64>)> {
    axis.axis.map(|name| (name, axis.values))
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let params_json = match &cli.params {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("E_IO: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => cli::DEFAULT_PARAMS_JSON.to_string(),
    };

    let mut quad = QuadratureSpec::default();
    if let Some(tol) = cli.quad_tol {
        quad.abs_tol = tol;
        quad.rel_tol = tol * 100.0;
    }

    let command = match cli.command {
        Command::Analyze { axis } => CommandSpec::Analyze {
            axis: axis_spec(axis),
        },
        Command::Simulate {
            axis,
            realizations,
            packets,
            trace,
            physical_arrivals,
            rayleigh_service,
        } => CommandSpec::Simulate {
            axis: axis_spec(axis),
            realizations,
            packets,
            trace,
            physical_arrivals,
            rayleigh_service,
        },
        Command::Optimize { grid_points } => CommandSpec::Optimize { grid_points },
        Command::Sweep {
            axis,
            values,
            grid_points,
        } => CommandSpec::Sweep {
            axis,
            values,
            grid_points,
        },
    };

    let spec = ExperimentSpec {
        command,
        params_json,
        overrides: cli.set,
        output_dir: cli.out,
        seed: cli.seed,
        quad,
        theta: cli.theta,
    };

    match cli::run(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.code_str());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
