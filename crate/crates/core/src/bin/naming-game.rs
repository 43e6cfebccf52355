use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use naming_game::config::{ConfigOverrides, ExperimentConfig, SnapshotAgent, OUT_DIR_ENV};
use naming_game::runner::run_batch;
use naming_game::Error;

#[derive(Parser)]
#[command(name = "naming-game", version, about = "Grounded colour naming game simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more seeded experiments and write their outputs.
    Run(Box<RunArgs>),
    /// Print the built-in configuration as JSON.
    PrintDefaultConfig,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long)]
    objects_per_scene: Option<usize>,
    #[arg(long)]
    num_interactions: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    initial_score: Option<f64>,
    #[arg(long)]
    inc: Option<f64>,
    #[arg(long)]
    inh: Option<f64>,
    #[arg(long)]
    dec: Option<f64>,
    #[arg(long)]
    shift_rate: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    /// Comma-separated interaction numbers at which to snapshot lexicons.
    #[arg(long, value_delimiter = ',')]
    snapshot_at: Option<Vec<usize>>,
    /// Agent index to snapshot, or "all".
    #[arg(long)]
    snapshot_agent: Option<SnapshotAgent>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Maximum number of runs executed concurrently.
    #[arg(long)]
    parallel: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            population_size: self.population_size,
            objects_per_scene: self.objects_per_scene,
            num_interactions: self.num_interactions,
            runs: self.runs,
            seed: self.seed,
            noise_std: self.noise_std,
            initial_score: self.initial_score,
            inc: self.inc,
            inh: self.inh,
            dec: self.dec,
            shift_rate: self.shift_rate,
            window: self.window,
            snapshot_points: self.snapshot_at.clone(),
            snapshot_agent: self.snapshot_agent,
            out_dir: self.out_dir.clone(),
            parallel: self.parallel,
        }
    }
}

fn run(args: RunArgs) -> ExitCode {
    let env_out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let config = match ExperimentConfig::resolve(args.config.as_deref(), &args.overrides(), env_out_dir) {
        Ok(config) => config,
        Err(Error::Io { path, source }) => {
            eprintln!("error: {}: {source}", path.display());
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_batch(&config) {
        Ok(summaries) => {
            for summary in summaries {
                println!("{}", summary.line());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(*args),
        Command::PrintDefaultConfig => {
            print!("{}", ExperimentConfig::default().to_json());
            ExitCode::SUCCESS
        }
    }
}
