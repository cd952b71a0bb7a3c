use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rashba", version, about = "Propagators, Green functions and point-interaction diagnostics for the 3D Rashba Hamiltonian")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command. With `--config`, values present in the
/// file replace the corresponding flags.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Rashba coupling α ≥ 0
    #[arg(long, global = true, default_value_t = 0.0)]
    pub alpha: f64,
    /// Zeeman coupling β ≥ 0
    #[arg(long, global = true, default_value_t = 0.0)]
    pub beta: f64,
    /// Real part of the propagation time
    #[arg(long = "t-re", global = true, default_value_t = 0.5, allow_negative_numbers = true)]
    pub t_re: f64,
    /// Imaginary part of the propagation time
    #[arg(long = "t-im", global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t_im: f64,
    /// Grid points per axis (power of two, ≥ 8)
    #[arg(long = "grid-n", global = true, default_value_t = 32)]
    pub grid_n: usize,
    /// Side length of the periodic box
    #[arg(long = "box", global = true, default_value_t = 16.0)]
    pub box_length: f64,
    /// Absolute tolerance of the quadrature oracle
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Bin,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the propagator kernel G_t(x) at given points
    Kernel(KernelArgs),
    /// Evaluate two-particle Green function elements for a batch of queries
    Green(GreenArgs),
    /// Propagate a spinor field on the grid
    Evolve(EvolveArgs),
    /// Normalization, H₋₄/H₋₃ diagnostics and λ roots per spin channel
    Report(ReportArgs),
    /// Run verification suites
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// CSV file with columns x1,x2,x3
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// A single point "x1,x2,x3"; may be repeated
    #[arg(long = "point", allow_negative_numbers = true)]
    pub point: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GreenArgs {
    /// CSV query file: re_z,im_z,x1,x2,x3,X1,X2,X3,S_out,s_out,S_in,s_in
    pub queries: PathBuf,
    /// Append the quadrature value and |closed form − quadrature|
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Multiply Fourier modes by exp(−tĥ)
    Symbol,
    /// Convolve with the sampled kernel (Re t > 0)
    Convolution,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// Initial grid (.bin or .csv); a Gaussian when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Width w of the initial Gaussian e^{−|x|²/(4w²)}
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    /// Spin-up and spin-down amplitudes of the initial Gaussian, "re,im,re,im"
    #[arg(long, default_value = "1,0,0,0", allow_negative_numbers = true)]
    pub spin: String,
    /// Number of steps of length t
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Method::Symbol)]
    pub method: Method,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Spin channel "S,s", or "all"
    #[arg(long, default_value = "all", allow_negative_numbers = true)]
    pub sigma: String,
    /// Coupling constant γ of the singular-point relation
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Lower end of the λ search interval
    #[arg(long = "lambda-min", default_value_t = -20.0, allow_negative_numbers = true)]
    pub lambda_min: f64,
    /// Upper end of the λ search interval (< 0)
    #[arg(long = "lambda-max", default_value_t = -1e-3, allow_negative_numbers = true)]
    pub lambda_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Specfun,
    Kernel,
    Evolve,
    Green,
    Perturb,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    /// Negate closed-form Green function values
    GreenSignFlip,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Seed of the random sample points
    #[arg(long, default_value_t = rashba::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Break the build on purpose to confirm the suite notices
    #[arg(long = "inject-fault", value_enum)]
    pub inject_fault: Option<FaultArg>,
}
