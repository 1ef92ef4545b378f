use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use fracmt_core::{BuiltinWeight, GammaMethod, Normalization, OutputFormat, RateMode, Variant};

#[derive(Debug, Parser)]
#[command(
    name = "fracmt",
    version,
    about = "Fractional seminorms and Moser–Trudinger functionals in one dimension"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, default_value = "csv")]
    pub format: OutputFormat,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, value_name = "REAL")]
    pub rel_tol: Option<f64>,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true, value_name = "REAL")]
    pub abs_tol: Option<f64>,

    /// Panel budget of each adaptive integral.
    #[arg(long, global = true, value_name = "N")]
    pub max_panels: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// γ_s and the blow-up threshold α*.
    Constants {
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        /// series|integral
        #[arg(long, default_value = "series")]
        method: GammaMethod,
    },
    /// Seminorm of a piecewise-linear function read from CSV (columns x,u).
    Seminorm {
        /// Function as CSV with columns x,u.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
    },
    /// I₁…I₄ decomposition of the Moser family over an ε grid.
    MoserTable {
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        /// Strictly decreasing ε values in (0, 0.5), comma separated.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        eps: Vec<f64>,
    },
    /// Convergence rate of the seminorm or full norm towards γ_s.
    Rate {
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        /// Strictly decreasing ε values in (0, 0.5), comma separated.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        eps: Vec<f64>,
        /// seminorm|full
        #[arg(long, default_value = "seminorm")]
        mode: RateMode,
    },
    /// Symmetric decreasing rearrangement of a uniform-grid function.
    Rearrange {
        /// Function as CSV with columns x,u.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        /// Destination of the rearranged function.
        #[arg(long, value_name = "CSV")]
        output: PathBuf,
    },
    /// Seminorm before and after rearrangement.
    PolyaSzego {
        /// Function as CSV with columns x,u.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
    },
    /// Exponential functional of a function read from CSV.
    Mt {
        /// Function as CSV with columns x,u.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// exp (bounded interval) or phi (whole line)
        #[arg(long, default_value = "exp")]
        variant: Variant,
        /// log1p|pow4|cap
        #[arg(long)]
        weight: Option<BuiltinWeight>,
        /// seminorm|full|none
        #[arg(long, default_value = "seminorm")]
        norm: Normalization,
    },
    /// Functional values along the Moser family.
    Sharpness {
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Strictly decreasing ε values in (0, 0.5), comma separated.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        eps: Vec<f64>,
        /// log1p|pow4|cap
        #[arg(long)]
        weight: Option<BuiltinWeight>,
        /// seminorm|full|none
        #[arg(long, default_value = "seminorm")]
        norm: Normalization,
        /// exp (bounded interval) or phi (whole line)
        #[arg(long, default_value = "exp")]
        variant: Variant,
    },
    /// Concentration function check of the truncation construction.
    RufCheck {
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        /// Truncation level, above the admissible threshold.
        #[arg(long)]
        r0: f64,
        /// Number of equispaced samples in (0, 1).
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Gradient ascent for near-extremal functions on a uniform grid.
    Extremal {
        /// Smoothness s in (0, 1); p = 1/s.
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Uniform cells on [-1, 1].
        #[arg(long)]
        cells: usize,
        /// Iteration cap.
        #[arg(long)]
        iters: usize,
        /// Seed of the random start.
        #[arg(long)]
        seed: u64,
        /// seminorm|full|none
        #[arg(long, default_value = "seminorm")]
        norm: Normalization,
        /// exp (bounded interval) or phi (whole line)
        #[arg(long, default_value = "exp")]
        variant: Variant,
        /// Also write the best function found as CSV.
        #[arg(long, value_name = "CSV")]
        best: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
#[command(group(ArgGroup::new("alpha_choice").required(true).args(["alpha", "alpha_mult"])))]
pub struct AlphaArgs {
    /// Absolute exponent α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// α as a multiple of α*.
    #[arg(long)]
    pub alpha_mult: Option<f64>,
}
