//! `hetnet`: simulate, validate and inspect four-tier dependent HetNets.

mod check;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hetnet_core::model::GridSpec;
use hetnet_core::{preset, HetnetError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "hetnet", version, about = "Four-tier dependent HetNet simulator")]
struct Cli {
    /// Worker threads for realization and raster loops.
    #[arg(long, env = "HETNET_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network, compute coverage and write all outputs.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Realizations for the Monte Carlo summary; outputs are from the first.
        #[arg(long, default_value_t = 1)]
        realizations: usize,
        /// Also write the macro Voronoi edges.
        #[arg(long)]
        edges: bool,
    },
    /// Check empirical estimators against their theoretical values.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 200)]
        realizations: usize,
        /// Rejection threshold in standard errors.
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
    },
    /// Print a named scenario as JSON.
    Preset { name: String },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Raster size as NXxNY, e.g. 500x500.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Path-loss exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Coverage threshold in dB.
    #[arg(long, allow_negative_numbers = true)]
    threshold_db: Option<f64>,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NXxNY, got {s:?}"))?;
    let nx = a.trim().parse().map_err(|e| format!("bad NX {a:?}: {e}"))?;
    let ny = b.trim().parse().map_err(|e| format!("bad NY {b:?}: {e}"))?;
    Ok(GridSpec { nx, ny })
}

pub(crate) enum CliError {
    Config(String),
    Io(String),
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Validation(m) => m,
        }
    }
}

impl From<HetnetError> for CliError {
    fn from(e: HetnetError) -> Self {
        match e {
            HetnetError::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
                let cfg: ScenarioConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                cfg
            }
            (None, Some(name)) => preset(name)?,
            (None, None) => return Err(CliError::Config("either --config or --preset is required".into())),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if let Some(a) = self.alpha {
            cfg.path_loss.exponent = a;
        }
        if let Some(t) = self.threshold_db {
            cfg.threshold_db = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("HETNET_THREADS must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            realizations,
            edges,
        } => {
            let cfg = scenario.load()?;
            let manifest = run::simulate(&cfg, &out, realizations, edges)?;
            println!("wrote {} files to {}", manifest.files.len(), out.display());
            Ok(())
        }
        Command::Validate {
            scenario,
            realizations,
            sigma,
        } => {
            let cfg = scenario.load()?;
            check::validate(&cfg, realizations, sigma)
        }
        Command::Preset { name } => {
            let cfg = preset(&name)?;
            println!("{}", cfg.to_json_pretty());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
