mod commands;
mod config;
mod plot;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Converts quantum-state tomograms between spin and continuous-variable
/// representations and checks every conversion against a density-matrix oracle.
#[derive(Parser, Debug)]
#[command(name = "tomobridge", version)]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Create or inspect a density matrix.
    State {
        #[command(subcommand)]
        source: StateSource,
    },
    /// Compute a tomogram of a state file.
    Tomogram(TomogramArgs),
    /// Convert a tomogram to another representation with the transition kernels.
    Transform(TransformArgs),
    /// Regenerate the photon-number and symplectic figures for the reference spin states.
    Reproduce(ReproduceArgs),
    /// Run the oracle verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct StateOut {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the two-mode Fock embedding of a spin state instead of the spin state.
    #[arg(long)]
    pub embed: bool,
    /// Fock cutoff for --embed.
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum StateSource {
    /// Reference superposition for j = 1/2, 1 or 3/2.
    Paper {
        #[arg(long)]
        j: String,
        #[command(flatten)]
        out: StateOut,
    },
    /// Seeded random pure spin state.
    Random {
        #[arg(long)]
        j: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: StateOut,
    },
    /// Read, check and re-emit a density-matrix file.
    File {
        /// Density-matrix JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Clip negative eigenvalues and renormalize instead of rejecting the state.
        #[arg(long)]
        repair: bool,
        #[command(flatten)]
        out: StateOut,
    },
    /// Fock state; one occupation per mode (one or two modes).
    Fock {
        #[arg(long, num_args = 1..=2, required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        out: StateOut,
    },
    /// Single-mode coherent state |gamma>, gamma given as "re,im".
    Coherent {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[command(flatten)]
        out: StateOut,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Spin,
    Symplectic,
    Photon,
    Wigner,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneRuleChoice {
    /// Two-mode product rule consumed by photon-to-spin / wigner-to-spin.
    ToSpin,
    /// Single-mode rule consumed by photon reconstruction and photon-to-symplectic.
    Reconstruct,
    /// Single-mode square lattice (radius 4, spacing 0.1).
    Square,
}

/// Grid and sampling flags shared by `tomogram` and `transform`.
#[derive(Args, Debug, Clone, Default)]
pub struct SamplingArgs {
    /// x lattice as min:max:step.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// mu value per mode (one frame).
    #[arg(long, num_args = 1..=2, allow_negative_numbers = true)]
    pub mu: Vec<f64>,
    /// nu value per mode (one frame).
    #[arg(long, num_args = 1..=2, allow_negative_numbers = true)]
    pub nu: Vec<f64>,
    /// Use optical frames (cos t, sin t) with this many angles per mode instead of --mu/--nu.
    #[arg(long, num_args = 0..=1)]
    pub optical: Option<Option<usize>>,
    /// Displacement point: "re,im" for every mode or "re,im;re,im" per mode. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Vec<String>,
    /// Real amplitudes a giving points alpha1 = alpha2 = a.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_diag: Option<Vec<f64>>,
    /// Sample on a quadrature rule instead of explicit points.
    #[arg(long, value_enum)]
    pub rule: Option<PlaneRuleChoice>,
    /// Photon-number cutoff per mode.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Ordering parameter, 0 < s < 1.
    #[arg(long)]
    pub s: Option<f64>,
    /// Spin label j (for rules tied to a sector and for CV -> spin).
    #[arg(long)]
    pub j: Option<String>,
}

#[derive(Args, Debug)]
pub struct TomogramArgs {
    #[arg(value_enum)]
    pub representation: Representation,
    /// Density-matrix JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the values as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Euler rule node counts alpha,beta,gamma (exact rule for j when absent).
    #[arg(long, value_delimiter = ',', num_args = 1..=3)]
    pub orders: Option<Vec<usize>>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    SpinToSymplectic,
    SpinToPhoton,
    SpinToWigner,
    SymplecticToSpin,
    PhotonToSpin,
    WignerToSpin,
    PhotonToSymplectic,
    SymplecticToPhoton,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizationChoice {
    Raw,
    Renormalized,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenominatorChoice {
    Full,
    Sector,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(value_enum)]
    pub direction: Direction,
    /// Tomogram JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the values as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Output normalization for CV -> spin.
    #[arg(long, value_enum)]
    pub normalization: Option<NormalizationChoice>,
    /// Photon-number labels entering the photon -> spin denominator.
    #[arg(long, value_enum)]
    pub denominator: Option<DenominatorChoice>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Output directory; files go to <dir>/fig3 or <dir>/fig4.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Oracle tolerance (default 1e-6).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Restrict to "kernels", "transforms" or one transform name (e.g. photon-to-spin).
    #[arg(long)]
    pub only: Option<String>,
    /// Emit one JSON report per line instead of the summary table.
    #[arg(long)]
    pub json: bool,
    /// Seed for the random states and kernel draws.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace every tolerance by this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Also write the reports as a JSON array to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
