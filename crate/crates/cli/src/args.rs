use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "resolab", version, about = "Spectral studies of boundary-concentrated Schrödinger operators")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Directory for result files; nothing is written when unset.
    #[arg(long, global = true, env = "RESOLAB_OUT_DIR")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    /// Seed of the inverse-iteration start vectors.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    /// JSON file whose keys mirror the command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zero-energy resonance tools.
    #[command(subcommand)]
    Resonance(ResonanceCmd),
    /// Potential diagnostics.
    #[command(subcommand)]
    Potential(PotentialCmd),
    /// Half-line model studies.
    #[command(subcommand)]
    Halfline(HalflineCmd),
    /// Boundary-curve geometry.
    #[command(subcommand)]
    Geometry(GeometryCmd),
    /// Unit-disk fibre studies.
    #[command(subcommand)]
    Disk(DiskCmd),
}

#[derive(Debug, Args)]
pub struct PotentialArg {
    /// Potential file (JSON) or preset name.
    #[arg(long)]
    pub potential: String,
}

#[derive(Debug, Subcommand)]
pub enum ResonanceCmd {
    /// Resonant couplings alpha in (0, alpha_max].
    Scan {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long)]
        alpha_max: f64,
    },
    /// Shooting data, resonance test and bound-state count.
    Check {
        #[command(flatten)]
        potential: PotentialArg,
    },
    /// The canonical solution psi_0 on [0, a].
    Solution {
        #[command(flatten)]
        potential: PotentialArg,
        /// Number of output intervals.
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum PotentialCmd {
    /// Sup norm, Hardy ratio and the small-negative-part test.
    Classify {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, default_value_t = 0.25)]
        c_omega: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum HalflineCmd {
    /// Eigenvalue and resolvent convergence of H_eps to its limit.
    Seba {
        #[command(flatten)]
        potential: PotentialArg,
        /// Strictly descending scales.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeometryCmd {
    /// Curvature and Robin coefficient table plus tube width.
    Curve {
        /// Curve file (JSON), `circle:R` or `ellipse:A:B`.
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitArg {
    /// Robin if the potential is resonant, Dirichlet otherwise.
    Auto,
    Robin,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeArg {
    /// u = 1.
    One,
    /// u = 1 - r^2.
    OneMinusR2,
}

#[derive(Debug, Subcommand)]
pub enum DiskCmd {
    /// lambda_1^(m)(eps) over a grid of angular indices and scales.
    #[command(name = "lambda1-map")]
    Lambda1Map {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        m: Vec<i64>,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// Pairs (m_k, eps_k) with lambda_1 = beta.
    Counterexample {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Fibre resolvent gaps against a limit fibre.
    Converge {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = LimitArg::Auto)]
        limit: LimitArg,
        /// Robin coefficient of the limit fibre.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = ProbeArg::OneMinusR2)]
        probe: ProbeArg,
    },
    /// Discrete Hardy constant of the disk at N and 2N cells.
    Hardy {
        #[arg(long, default_value_t = 8000)]
        n: usize,
    },
    /// Both sides of the identification-operator bound.
    Identify {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ProbeArg::One)]
        probe: ProbeArg,
        #[arg(long, default_value_t = 4000)]
        n: usize,
    },
}
