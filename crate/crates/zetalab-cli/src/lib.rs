//! Command-line front door to the zetalab numerical laboratory.
//!
//! One binary, one subcommand per module family. Reports go to stdout by
//! default; `--out` redirects them to a file. JSON is the machine contract
//! and CSV the plotting contract, and both carry a schema-version marker.
//! Exit codes: 0 on success, 1 on usage errors (unknown flags or
//! subcommands), 2 on domain errors (bad arguments, missing files,
//! numerical preconditions).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zetalab_core::eval::EvalConfig;

mod commands;
mod emit;
mod tuple;

pub use tuple::load_tuple;

/// Environment variable naming a directory in which relative input files
/// (functional-equation tuples) are looked up when they are not found
/// directly.
pub const CONFIG_DIR_VAR: &str = "ZETALAB_CONFIG_DIR";

/// Schema version stamped into every JSON and CSV report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    /// Malformed invocation; maps to exit code 1.
    Usage(String),
    /// Well-formed invocation that cannot be executed; maps to exit code 2.
    Domain(String),
}

impl From<zetalab_core::Error> for CliError {
    fn from(e: zetalab_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("i/o failure: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Resolved run-wide configuration shared by every subcommand: the output
/// sink, the evaluation backend accuracy, the root seed for Monte-Carlo
/// subcommands and the parallelism degree. A fixed seed makes every
/// Monte-Carlo-bearing subcommand produce byte-identical reports.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub threads: usize,
    pub eval: EvalConfig,
}

#[derive(Parser, Debug)]
#[command(
    name = "zetalab",
    version,
    about = "Numerical laboratory for value-distribution of zeta-like functions",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format where both are supported (coefficient tables, scan
    /// records); JSON otherwise.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Root seed for Monte-Carlo subcommands; a fixed seed fixes the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel scans; 0 uses one per logical core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Absolute error target of the evaluation backend.
    #[arg(long, global = true, default_value_t = 1e-10)]
    abs_error: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit Dirichlet-series coefficient tables.
    Coeffs {
        /// Which sequence: generalized divisor, Euler-product power,
        /// logarithm or logarithmic derivative of zeta.
        #[arg(long, value_enum, default_value_t = CoeffKind::Divisor)]
        kind: CoeffKind,
        /// Exponent kappa for divisor/power sequences.
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Number of coefficients.
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Inspect the functional-equation factor of a tuple file.
    Funceq {
        #[command(subcommand)]
        action: FunceqAction,
    },
    /// Evaluate zeta or a derivative in the critical strip.
    Zeta {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        t: f64,
        /// Derivative order; 0 evaluates the function itself.
        #[arg(long, default_value_t = 0)]
        derivative: u32,
    },
    /// a-point counts against the Riemann-von Mangoldt main term.
    Apoints {
        #[command(subcommand)]
        action: ApointsAction,
    },
    /// Rescaling-window scans: tau sequences, limit shapes, filling discs.
    Scan {
        #[command(subcommand)]
        action: ScanAction,
    },
    /// Continuous or discrete moments of zeta with block exclusion.
    Moments {
        #[arg(long)]
        sigma: f64,
        /// Moment order; the average is of |zeta|^(2k).
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Time horizon for continuous averages; for discrete averages the
        /// sample count is floor((T - lambda) / l).
        #[arg(long = "T")]
        big_t: f64,
        /// Arithmetic-progression step; absent means a continuous average.
        #[arg(long)]
        l: Option<f64>,
        /// Offset of the progression within [0, l].
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Sup threshold for the block exclusion set; absent means no
        /// exclusion.
        #[arg(long = "M")]
        threshold: Option<f64>,
        /// Also write the exclusion set as a bitmap CSV to this path.
        #[arg(long)]
        excl_out: Option<PathBuf>,
    },
    /// Selberg central-limit statistics of log zeta on (T, 2T].
    Clt {
        #[arg(long = "T")]
        big_t: f64,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// W-set threshold parameter.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 20_000)]
        re_samples: usize,
        #[arg(long, default_value_t = 500)]
        im_samples: usize,
        /// Also write the real-part histogram as CSV to this path.
        #[arg(long)]
        hist_out: Option<PathBuf>,
    },
    /// Averages over the finite coordinate torus.
    Torus {
        #[command(subcommand)]
        action: TorusAction,
    },
    /// Health battery for a functional-equation tuple.
    Report {
        /// Tuple file (JSON with omega, q, lambdas, mus).
        #[arg(long)]
        file: PathBuf,
        /// Grid points per check.
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffKind {
    Divisor,
    Power,
    Log,
    Logderiv,
}

#[derive(Subcommand, Debug)]
enum FunceqAction {
    /// Derived invariants of the tuple: degree, Q^2 lambda_p, Im mu_p, root
    /// number.
    Invariants {
        #[arg(long)]
        file: PathBuf,
    },
    /// Evaluate Delta_p and its Stirling asymptotic at one point.
    Eval {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ApointsAction {
    /// Compare located a-point counts for 0 < gamma <= T with the
    /// Riemann-von Mangoldt-type main term.
    Rvm {
        /// Real part of the target value a.
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        /// Imaginary part of the target value a.
        #[arg(long, default_value_t = 0.0)]
        a_im: f64,
        #[arg(long = "T")]
        big_t: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ScanAction {
    /// Filling-disc records: windows where the rescaled function stays in a
    /// modulus band with its spherical-derivative score.
    Lehto {
        #[arg(long, default_value_t = 20.0)]
        t_lo: f64,
        #[arg(long, default_value_t = 100.0)]
        t_hi: f64,
        #[arg(long, default_value_t = 0.5)]
        band_lo: f64,
        #[arg(long, default_value_t = 2.0)]
        band_hi: f64,
        /// Scaling profile: constant:C, loglog:P or logpower:C,P.
        #[arg(long, default_value = "loglog:1.0")]
        profile: String,
    },
    /// Scales tau at which the central rotation nu_p(tau) sits on a target
    /// phase class.
    Taus {
        /// Target phase ell in [0, 2 pi).
        #[arg(long, default_value_t = 0.0)]
        ell: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1000.0)]
        tau_min: f64,
        /// Tuple file; the zeta tuple when absent.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Deviation of the rescaled Delta factor from its limit-shape model.
    Shape {
        /// Scales tau (repeatable).
        #[arg(long, required = true)]
        tau: Vec<f64>,
        #[arg(long, default_value = "constant:1.0")]
        profile: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum TorusAction {
    /// Monte-Carlo mean of |L(sigma, x)|^2 over random torus points against
    /// the Plancherel target.
    Plancherel {
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Length of the coefficient prefix (zeta coefficients).
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Ergodic time average along the vertical flow against the Plancherel
    /// space average.
    Birkhoff {
        #[arg(long)]
        sigma: f64,
        #[arg(long = "T")]
        big_t: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

/// Parse `argv` and execute. Returns the process exit status: 0 on
/// success, 1 on usage errors, 2 on domain errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let eval = match EvalConfig::new(cli.global.abs_error, 2_000_000, 1e6) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cfg = RunConfig {
        out: cli.global.out,
        format: cli.global.format,
        seed: cli.global.seed,
        threads: cli.global.threads,
        eval,
    };
    if cfg.threads > 0 {
        // A failure here means a pool already exists (repeated calls inside
        // one process); the default pool is then used.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }

    match commands::execute(&cfg, cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
