//! `rodlab`: reproducible experiments on framed elastic rods.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rodlab::export::DEFAULT_TUBE_SCALE;
use rodlab::framed::DEFAULT_GRID;
use rodlab::variational::FlowParams;

use config::{
    load_config, CommandConfig, CurveConfig, CurveSpec, ExperimentConfig, ExportConfig, ExportFormat, FamilyConfig,
    FlowConfig, FlowInit, ParityChoice, SpectrumConfig,
};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "rodlab", version, about = "Framed elastic rods in quaternionic Fourier coordinates")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Samples per curve on [0, 2].
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    grid_size: usize,
    /// Log as JSON lines on stderr.
    #[arg(long, global = true)]
    json_logs: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the one-parameter critical family q_u.
    Family(FamilyArgs),
    /// Run the projected gradient flow.
    Flow(FlowArgs),
    /// Closure, criticality, normal form and knot type of a curve file.
    Classify { curve: PathBuf },
    /// Write framed-curve and invariant CSVs for a curve file.
    Invariants { curve: PathBuf },
    /// List the critical energy levels.
    Spectrum {
        #[arg(long, default_value_t = 5)]
        c_max: i32,
    },
    /// Export a curve file as CSV, OBJ, PD code or coefficient JSON.
    Export {
        curve: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long, default_value_t = DEFAULT_TUBE_SCALE)]
        tube_scale: f64,
    },
    /// Rerun the config embedded in a summary (or a bare config file).
    Replay { config: PathBuf },
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    h: i32,
    #[arg(long, allow_hyphen_values = true)]
    k: i32,
    /// Comma-separated u values.
    #[arg(long, value_delimiter = ',', conflicts_with = "u_range", required_unless_present = "u_range")]
    u: Vec<f64>,
    /// `start:stop:count`, endpoints included.
    #[arg(long)]
    u_range: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TUBE_SCALE)]
    tube_scale: f64,
    /// Pushoff distance for linking numbers.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
}

#[derive(Args)]
struct FlowArgs {
    /// `random` or a curve file.
    #[arg(long, default_value = "random")]
    init: String,
    #[arg(long, value_enum, default_value = "random")]
    parity: ParityArg,
    #[arg(long, default_value_t = 5)]
    max_freq: i32,
    #[arg(long, default_value_t = FlowParams::default().step)]
    step: f64,
    #[arg(long, default_value_t = FlowParams::default().grad_tol)]
    tol: f64,
    #[arg(long, default_value_t = FlowParams::default().max_iter)]
    max_iter: usize,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ParityArg {
    Odd,
    Even,
    Random,
}

fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Input(format!("expected start:stop:count, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    })
}

fn build_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let command = match &cli.command {
        Command::Family(a) => CommandConfig::Family(FamilyConfig {
            h: a.h,
            k: a.k,
            u: match &a.u_range {
                Some(r) => parse_range(r)?,
                None => a.u.clone(),
            },
            tube_scale: a.tube_scale,
            epsilon: a.epsilon,
        }),
        Command::Flow(a) => CommandConfig::Flow(FlowConfig {
            init: if a.init == "random" {
                let parity = match a.parity {
                    ParityArg::Odd => ParityChoice::Odd,
                    ParityArg::Even => ParityChoice::Even,
                    ParityArg::Random => ParityChoice::Random,
                };
                FlowInit::Random { parity, max_freq: a.max_freq }
            } else {
                FlowInit::Curve(CurveSpec::load(a.init.as_ref())?)
            },
            params: FlowParams { step: a.step, grad_tol: a.tol, max_iter: a.max_iter },
        }),
        Command::Classify { curve } => CommandConfig::Classify(CurveConfig { curve: CurveSpec::load(curve)? }),
        Command::Invariants { curve } => CommandConfig::Invariants(CurveConfig { curve: CurveSpec::load(curve)? }),
        Command::Spectrum { c_max } => CommandConfig::Spectrum(SpectrumConfig { c_max: *c_max }),
        Command::Export { curve, format, tube_scale } => {
            CommandConfig::Export(ExportConfig { curve: CurveSpec::load(curve)?, format: *format, tube_scale: *tube_scale })
        }
        Command::Replay { config } => {
            let mut cfg = load_config(config)?;
            if let Some(out) = &cli.out {
                cfg.output_dir = out.clone();
            }
            return Ok(cfg);
        }
    };
    Ok(ExperimentConfig {
        seed: cli.seed,
        output_dir: cli.out.clone().unwrap_or_else(|| "out".into()),
        grid_size: cli.grid_size,
        command,
    })
}

fn init_logging(json: bool) {
    let mut b = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"));
    if json {
        b.format(|buf, r| {
            let line = serde_json::json!({ "level": r.level().as_str(), "target": r.target(), "message": r.args().to_string() });
            writeln!(buf, "{line}")
        });
    }
    b.init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.json_logs);
    let result = build_config(&cli).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            // a closed pipe (`| head`) is not an error; the files are already written
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
