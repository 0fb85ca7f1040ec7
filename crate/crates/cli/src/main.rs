mod commands;
mod provenance;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loopsampler::tomography::GradientMode;
use loopsampler::validation::PhotonSelection;
use loopsampler::{Error, Feedback};

/// Loopback boson sampler: simulation, sampling, validation and tomography.
#[derive(Parser, Debug)]
#[command(name = "loopsampler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact output distributions of a device
    Simulate(Common),
    /// Draw samples from a model distribution
    Sample(SampleArgs),
    /// Bayesian validation trajectories for the standard hypothesis pairs
    Validate(ValidateArgs),
    /// Reconstruct a unitary from moduli and two-photon visibilities
    Tomo(TomoArgs),
    /// Size of the equivalent conventional sampler
    Info(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Device file (TOML)
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker thread limit
    #[arg(long)]
    pub threads: Option<usize>,
    /// Random fiber phase draws for phase averaging
    #[arg(long, default_value_t = 200)]
    pub phase_samples: usize,
    /// Largest number of outcomes to enumerate
    #[arg(long)]
    pub cap: Option<u128>,
    /// Override a device-file field, e.g. `--set iterations=3`
    #[arg(long = "set", value_name = "KEY=VAL")]
    pub overrides: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// quantum, distinguishable, uniform or partial
    #[arg(long, default_value = "quantum")]
    pub kind: String,
    #[arg(long, default_value = "looped")]
    pub feedback: Feedback,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Independent sample sets per pair
    #[arg(long, default_value_t = 1000)]
    pub sets: usize,
    /// Samples per set
    #[arg(long, default_value_t = 200)]
    pub set_size: usize,
    /// Central band level
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,
    /// Post-selection for the photon-statistics pairs
    #[arg(long, default_value = "per-iteration")]
    pub selection: PhotonSelection,
    /// Post-selection for the feedback pairs
    #[arg(long, default_value = "detected")]
    pub feedback_selection: PhotonSelection,
    /// Use the lossy distributions of the device
    #[arg(long)]
    pub lossy: bool,
}

#[derive(Args, Debug)]
pub struct TomoArgs {
    #[command(flatten)]
    pub common: Common,
    /// Ground-truth unitary file (synthetic mode)
    #[arg(long, conflicts_with = "synthetic")]
    pub truth: Option<PathBuf>,
    /// Random ground truth with this many modes (synthetic mode)
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Measured moduli matrix (data mode)
    #[arg(long, requires = "visibilities")]
    pub moduli: Option<PathBuf>,
    /// Measured visibilities, `i,j,k,l,V` lines (data mode)
    #[arg(long, requires = "moduli")]
    pub visibilities: Option<PathBuf>,
    /// Synthetic noise level
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Synthetic input pairs probed (default 2M)
    #[arg(long)]
    pub pair_budget: Option<usize>,
    /// Synthetic two-photon indistinguishability
    #[arg(long, default_value_t = 1.0)]
    pub indistinguishability: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 3000)]
    pub max_iterations: u64,
    /// Visibility weight
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value = "analytic")]
    pub gradient: GradientMode,
    /// Fit a global visibility scale
    #[arg(long)]
    pub fit_scale: bool,
}

/// 1 usage or parse, 2 resource cap, 3 numerical failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource { .. } => 2,
        Error::Degenerate(_) | Error::ImpossibleSample { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let result = match cli.command {
        Command::Simulate(c) => commands::simulate(&c, &argv),
        Command::Sample(a) => commands::sample(&a, &argv),
        Command::Validate(a) => commands::validate(&a, &argv),
        Command::Tomo(a) => commands::tomo(&a, &argv),
        Command::Info(c) => commands::info(&c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
