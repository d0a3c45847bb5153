use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "harnack", version, about = "Certified bounds on the Harnack distance in Euclidean domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact distance from the centre of a ball.
    Ball {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        rho: f64,
    },
    /// Lower, upper and (on disks) exact values for one pair of points.
    Sandwich {
        #[arg(long)]
        domain: PathBuf,
        /// "x1,y1;x2,y2"
        #[arg(long, allow_hyphen_values = true)]
        pair: String,
        #[arg(long, default_value_t = 2)]
        hops: usize,
        /// Lattice step; defaults to diam(D)/50.
        #[arg(long)]
        grid: Option<f64>,
        /// Boundary samples of the Poisson witness.
        #[arg(long, default_value_t = harnack_core::exact::DEFAULT_WITNESS_SAMPLES)]
        samples: usize,
    },
    /// Set-level estimates and bounds.
    Set {
        #[command(subcommand)]
        command: SetCommand,
    },
    /// Render a planar domain and artifacts to SVG.
    Plot {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSON files: point sets, command reports, ball chains.
        artifacts: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SetCommand {
    /// Entropy of linear connectivity and the bound derived from it.
    Eac {
        #[command(flatten)]
        common: SetArgs,
        #[command(flatten)]
        hull: HullArgs,
        /// Build a ball chain for the worst pair with this constant.
        #[arg(long)]
        chain: Option<f64>,
    },
    /// Hop-limited set separation and the bounds derived from it.
    Sep {
        #[command(flatten)]
        common: SetArgs,
        #[command(flatten)]
        hops: HopArgs,
    },
    /// Both set bounds side by side.
    Bound {
        #[command(flatten)]
        common: SetArgs,
        #[command(flatten)]
        hops: HopArgs,
        #[command(flatten)]
        hull: HullArgs,
    },
}

#[derive(Debug, Args)]
pub struct SetArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub set: PathBuf,
    /// Lattice step; defaults to diam(D)/50.
    #[arg(long)]
    pub grid: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HopArgs {
    /// Start point "x,y[,z]"; defaults to the first point of the set.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub hops: usize,
    /// Pair bound used along each witness chain.
    #[arg(long, value_enum, default_value_t = VariantArg::Stated)]
    pub variant: VariantArg,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    #[arg(long, value_enum)]
    pub hull: Option<HullArg>,
    /// Origin of the star hull.
    #[arg(long, allow_hyphen_values = true)]
    pub star_center: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HullArg {
    Convex,
    Segmental,
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum VariantArg {
    Stated,
    ProofSharp,
}
