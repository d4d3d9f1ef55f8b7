use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use groverlab::cli::{
    self, cmd_figures, cmd_fit, cmd_run, FiguresRequest, FitMode, FitRequest, RawRunConfig,
};
use groverlab::error::Error;

/// Numerical laboratory for Grover search under randomly tilted Hadamard
/// gates: full-register simulation, a stochastic two-level model, closed-form
/// decay predictions, Monte Carlo ensembles and parameter fitting.
#[derive(Parser)]
#[command(name = "groverlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one model and write its curves as CSV.
    Run(Box<RunArgs>),
    /// Fit effective-model parameters to a CSV produced by `run --model ga`.
    Fit(FitArgs),
    /// Produce the standard comparison figure set (CSVs + SVG panels).
    Figures(FiguresArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Model to run: ga | stlm | walk | analytic.
    #[arg(long)]
    model: Option<String>,
    /// Number of qubits (default 13).
    #[arg(long)]
    nq: Option<u32>,
    /// Hadamard tilt bound for the register model.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Decay per iteration (two-level / walk / analytic models).
    #[arg(long)]
    gamma: Option<f64>,
    /// Phase box width of the two-level model.
    #[arg(long)]
    wphi: Option<f64>,
    /// Gaussian width of the per-iteration angle noise (walk / analytic).
    #[arg(long = "delta-theta")]
    delta_theta: Option<f64>,
    /// Gaussian width of the relative phase (walk / analytic).
    #[arg(long = "delta-phi")]
    delta_phi: Option<f64>,
    /// Last iteration simulated (default 1400).
    #[arg(long)]
    tmax: Option<u32>,
    /// Sampling cadence in iterations (default 20).
    #[arg(long = "sample-every")]
    sample_every: Option<u32>,
    /// Ensemble size (defaults: ga 100, stlm 1000, walk 100000).
    #[arg(long)]
    m: Option<usize>,
    /// Master seed; every run is bit-reproducible given it (default 7).
    #[arg(long)]
    seed: Option<u64>,
    /// Marked basis state of the register model (default 0).
    #[arg(long = "target-j")]
    target_j: Option<usize>,
    /// Reuse one tilt draw for both Hadamard layers of an iteration.
    #[arg(long = "shared-layer-draws")]
    shared_layer_draws: bool,
    /// Worker threads for ensemble realizations (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path (default: <model>.csv in $GROVERLAB_OUT_DIR or .).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional key=value config file; flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV file with ensemble curves (from `run --model ga`).
    csv: PathBuf,
    /// Which model to fit: stlm | analytic.
    #[arg(long)]
    mode: String,
    /// Number of qubits the data was produced with (default 13).
    #[arg(long)]
    nq: Option<u32>,
    /// Fit the analytic forms with the relative-phase width pinned to zero.
    #[arg(long = "fix-delta-phi-zero")]
    fix_delta_phi_zero: bool,
    /// Two-level ensemble size per objective evaluation (default 1000).
    #[arg(long = "m-stlm")]
    m_stlm: Option<usize>,
    /// Seed of the frozen noise streams used by the stlm objective
    /// (default 7).
    #[arg(long)]
    seed: Option<u64>,
    /// Relative weight of fidelity residuals (default 1).
    #[arg(long = "f-weight")]
    f_weight: Option<f64>,
    /// Override the automatic fit window: lower bound.
    #[arg(long = "window-lo")]
    window_lo: Option<u32>,
    /// Override the automatic fit window: upper bound.
    #[arg(long = "window-hi")]
    window_hi: Option<u32>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Write the fitted model curve to this CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Output directory (default $GROVERLAB_OUT_DIR or .).
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Master seed (default 7).
    #[arg(long)]
    seed: Option<u64>,
    /// Register ensemble size per panel (default 100).
    #[arg(long)]
    m: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(cli::exit_code(&error))
        }
    }
}

fn init_workers(workers: Option<usize>) {
    if let Some(n) = workers {
        if n > 0 {
            // Ignore failure: the global pool can only be set once.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run(args) => {
            let mut flags = RawRunConfig {
                model: args.model,
                nq: args.nq,
                epsilon: args.epsilon,
                gamma: args.gamma,
                wphi: args.wphi,
                delta_theta: args.delta_theta,
                delta_phi: args.delta_phi,
                tmax: args.tmax,
                sample_every: args.sample_every,
                m: args.m,
                seed: args.seed,
                target_j: args.target_j,
                shared_layer_draws: if args.shared_layer_draws {
                    Some(true)
                } else {
                    None
                },
                workers: args.workers,
                out: args.out,
            };
            if let Some(path) = &args.config {
                let text = std::fs::read_to_string(path)?;
                flags = flags.merged_over(RawRunConfig::from_key_values(&text)?);
            }
            init_workers(flags.workers);
            let config = flags.resolve()?;
            let summary = cmd_run(&config)?;
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit(args) => {
            init_workers(args.workers);
            let window = match (args.window_lo, args.window_hi) {
                (None, None) => None,
                (lo, hi) => Some((lo.unwrap_or(0), hi.unwrap_or(u32::MAX))),
            };
            let request = FitRequest {
                csv_path: args.csv,
                mode: FitMode::parse(&args.mode)?,
                n_qubits: args.nq.unwrap_or(13),
                fix_delta_phi_zero: args.fix_delta_phi_zero,
                m_stlm: args.m_stlm.unwrap_or(1000),
                seed: args.seed.unwrap_or(7),
                f_weight: args.f_weight.unwrap_or(1.0),
                window,
                out: args.out,
            };
            let fit = cmd_fit(&request)?;
            for (name, value) in &fit.params {
                println!("{name} = {value:.6e}");
            }
            println!("sse = {:.6e}", fit.sse);
            println!(
                "n_points = {}; window = [{}, {}]; evaluations = {}",
                fit.n_points, fit.fit_window.0, fit.fit_window.1, fit.evaluations
            );
            println!("converged = {}", fit.converged);
            if fit.converged {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Figures(args) => {
            init_workers(args.workers);
            let request = FiguresRequest {
                out_dir: args.out_dir.unwrap_or_else(cli::default_out_dir),
                seed: args.seed.unwrap_or(7),
                m_ga: args.m.unwrap_or(100),
            };
            let written = cmd_figures(&request)?;
            for path in &written {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
