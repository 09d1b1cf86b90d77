use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use keyrate::ad::Family;

use crate::verify::QuantumFamily;

#[derive(Debug, Parser)]
#[command(
    name = "keyrate",
    version,
    about = "Secret-key rates of Werner and symmetric-state distributions"
)]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Globals {
    /// Root seed; the optimizer and simulator derive their own streams from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the command's document or CSV (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Bisection width for `threshold`, landmark tolerance for `verify-quantum`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

fn family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one of the closed-form tables as a JSON document.
    Dist {
        #[arg(value_parser = family)]
        family: Family,
        #[arg(long)]
        p: Option<f64>,
        /// Symmetric weight; the activated family defaults to 0.2.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Reduce a Werner or symmetric table to bits.
    Binaryze {
        input: PathBuf,
        /// Werner symbol both parties drop.
        #[arg(long, default_value_t = 2)]
        discard: usize,
    },
    /// Combine a Werner and a symmetric table into the activated bit table.
    Activate { werner: PathBuf, symmetric: PathBuf },
    /// Search Eve's channels for the smallest I(X;Y|Z̄).
    Intrinsic {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        starts: usize,
    },
    /// Solve for the parameter where the distillation condition turns.
    Threshold {
        #[arg(value_parser = family)]
        family: Family,
        /// Fixed symmetric weight of the activated family.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
    },
    /// Tabulate the condition over a parameter grid as CSV.
    Sweep {
        #[arg(value_parser = family)]
        family: Family,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        /// `q` of the activated family.
        #[arg(long)]
        fixed: Option<f64>,
    },
    /// Monte Carlo run of the block protocol on a family's bit table.
    Simulate {
        #[arg(value_parser = family)]
        family: Family,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long = "block-size", short = 'n', default_value_t = 4)]
        block_size: u32,
        /// Accepted blocks to collect.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Check the entanglement landmarks on the quantum states.
    VerifyQuantum {
        #[arg(long, value_enum, default_value_t = QuantumFamily::All)]
        family: QuantumFamily,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
}
