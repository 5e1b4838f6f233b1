use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamming_shift_core::ModulusKind;

#[derive(Debug, Parser)]
#[command(
    name = "hamming-shift",
    version,
    about = "How adding a constant moves the Hamming weight of random bit strings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shifting statistics, joint weight table and block structure of one alpha
    Analyze(AnalyzeArgs),
    /// Check the DP and the block laws against brute-force enumeration
    Verify(VerifyArgs),
    /// Sweep a family of alphas over a grid of widths
    Scan(ScanArgs),
    /// Monte Carlo estimate of the light-to-heavy fraction
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModArg {
    Pow2,
    Pow2m1,
}

impl From<ModArg> for ModulusKind {
    fn from(m: ModArg) -> Self {
        match m {
            ModArg::Pow2 => ModulusKind::Pow2,
            ModArg::Pow2m1 => ModulusKind::Pow2Minus1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    /// 0b.., 0x.., decimal, rat:a,b,q or pat:(01)^8
    #[arg(long)]
    pub alpha: String,
    /// Width in bits; inferred from binary, hex and pattern forms
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "mod", value_enum, default_value = "pow2")]
    pub modulus: ModArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Estimate by sampling instead of the exact DP
    #[arg(long, conflicts_with = "exact")]
    pub sample: bool,
    /// Use the exact DP even above the default width limits
    #[arg(long)]
    pub exact: bool,
    /// Also run the lower-bound walkthrough
    #[arg(long)]
    pub walkthrough: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Draws of S used to study carry fixings in the walkthrough
    #[arg(long, default_value_t = 10_000)]
    pub carry_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write report files into this directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// DP against enumeration for every alpha up to --max-n
    #[arg(long)]
    pub dp: bool,
    /// Block laws against block enumeration up to --max-L
    #[arg(long)]
    pub lemmas: bool,
    /// Type 4 moments against closed forms up to --max-L
    #[arg(long)]
    pub moments: bool,
    /// Covariance and ellipse bounds up to length 64
    #[arg(long)]
    pub bounds: bool,
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    #[arg(long = "max-L", default_value_t = 12)]
    pub max_l: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// sparse:1..4, blocks:n,n/2,3..5, periodic:1100,110 or random:1,2,3
    #[arg(long)]
    pub family: String,
    /// Widths such as 16,32,64 or 16..64:16
    #[arg(long, allow_hyphen_values = true)]
    pub n_grid: String,
    #[arg(long = "mod", value_enum, default_value = "pow2")]
    pub modulus: ModArg,
    /// Sample every point, even where the exact DP applies
    #[arg(long)]
    pub sample: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the sampled joint weight table
    #[arg(long)]
    pub joint: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
