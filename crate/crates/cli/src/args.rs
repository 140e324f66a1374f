use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Finite-temperature Casimir interaction between metal surfaces",
    long_about = "Lifshitz-theory pressures, energies, forces and entropies for Drude, plasma, \
                  infrared-impedance, ideal-metal and modified-ideal-metal descriptions, plus a \
                  theory-versus-experiment comparison harness.\n\nTables are CSV with units in the \
                  column headers (nm, K, mPa, pN); JSON output uses SI units."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plate–plate pressure
    Pressure(PointArgs),
    /// Plate–plate free energy per unit area
    Energy(PointArgs),
    /// Sphere–plate force in the proximity-force approximation
    Force(ForceArgs),
    /// Entropy per unit area, S = −∂F/∂T (T ≥ 2 K)
    Entropy(PointArgs),
    /// Entropy trajectory toward T = 0 and a Nernst-theorem verdict
    Nernst(NernstArgs),
    /// Compare a measured dataset with theory and report exclusion
    Compare(CompareArgs),
    /// Exclusion verdicts for a series of uniform separation shifts
    ShiftScan(ShiftScanArgs),
    /// Generate a synthetic dataset from theory plus Gaussian noise
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    /// drude, plasma, impedance-ir, ideal-metal, mim or tabulated
    #[arg(long, default_value = "drude")]
    pub model: String,
    /// Built-in alias (au-19a, au-7, cu-example) or path to a JSON material file
    #[arg(long, default_value = "au-19a")]
    pub material: String,
    /// Permittivity table CSV (xi_ev,eps); requires --model tabulated
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Low-frequency extension below the table
    #[arg(long, value_parser = ["drude", "plasma"], default_value = "drude")]
    pub table_extension: String,
    /// Impurity relaxation, eV (recalibrates the Bloch–Grüneisen amplitude)
    #[arg(long, allow_negative_numbers = true)]
    pub nu_residual: Option<f64>,
    /// Allow T = 0 Drude evaluations with nonzero --nu-residual (ν(0) = ν_residual)
    #[arg(long)]
    pub allow_residual_t0: bool,
    /// Use the erroneous 1.537e15 rad/s per eV factor (reproduction studies only)
    #[arg(long)]
    pub legacy_conversion: bool,
    /// Relative tolerance of the frequency integrals
    #[arg(long, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    /// Maximum adaptive subdivisions per integral
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Single separation, nm
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["z_min", "z_max", "z_steps"])]
    pub z: Option<f64>,
    /// Start of a linear separation grid, nm
    #[arg(long, allow_negative_numbers = true, requires_all = ["z_max", "z_steps"])]
    pub z_min: Option<f64>,
    /// End of the separation grid, nm
    #[arg(long, allow_negative_numbers = true, requires_all = ["z_min", "z_steps"])]
    pub z_max: Option<f64>,
    /// Number of grid points
    #[arg(long, requires_all = ["z_min", "z_max"])]
    pub z_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Temperature, K
    #[arg(long = "T", allow_negative_numbers = true, default_value_t = 300.0)]
    pub temperature: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ForceArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Sphere radius, μm
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NernstArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    /// Separation, nm
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
    /// Descending temperatures, K (comma separated, at least 5, lowest ≥ 2)
    #[arg(long = "T-grid", value_delimiter = ',', allow_hyphen_values = true)]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ComparisonArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    /// Dataset CSV: z_nm,value_mPa,sigma_mPa (or z_nm,value_pN,sigma_pN with --R)
    #[arg(long)]
    pub data: PathBuf,
    /// Temperature, K
    #[arg(long = "T", allow_negative_numbers = true, default_value_t = 300.0)]
    pub temperature: f64,
    /// Sphere radius, μm; selects a sphere–plate force dataset
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Confidence level
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Bin width, nm
    #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
    pub bin_width: f64,
    /// Lower end of the exclusion range, nm (default: first data point)
    #[arg(long, allow_negative_numbers = true)]
    pub range_min: Option<f64>,
    /// Upper end of the exclusion range, nm (default: last data point)
    #[arg(long, allow_negative_numbers = true)]
    pub range_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: ComparisonArgs,
    /// Uniform shift applied to the data separations before comparison, nm
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub shift: f64,
    /// What to print with --format csv
    #[arg(long, value_parser = ["band", "diff"], default_value = "band")]
    pub table_kind: String,
    /// Also write the difference series CSV to this file
    #[arg(long)]
    pub diff_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ShiftScanArgs {
    #[command(flatten)]
    pub common: ComparisonArgs,
    /// Shifts to scan, nm (comma separated)
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-2,-1,0,1,2"
    )]
    pub shifts: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Temperature, K
    #[arg(long = "T", allow_negative_numbers = true, default_value_t = 300.0)]
    pub temperature: f64,
    /// Sphere radius, μm; produces a force dataset
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Noise: "ladder" (deviation ladder, pressure only) or a constant σ in mPa/pN
    #[arg(long, default_value = "ladder")]
    pub noise: String,
    /// Multiplier of the ladder profile
    #[arg(long, allow_negative_numbers = true)]
    pub noise_scale: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
