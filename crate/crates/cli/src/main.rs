//! `elimsolve`: derive elimination generators, build templates, solve and benchmark.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elimsolve::elimderive::ProblemId;
use elimsolve::solvers::SolveOptions;

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "elimsolve", version, about = "Elimination-ideal minimal solvers for partially calibrated two-view geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the elimination-ideal generators from the constraint system.
    Derive(DeriveArgs),
    /// Check the bundled generators and template against the reference data.
    Verify(VerifyArgs),
    /// Build an elimination template.
    Template(TemplateArgs),
    /// Solve one minimal instance read from a correspondence CSV.
    Solve(SolveArgs),
    /// Run the solver on synthetic scenes and summarize the errors.
    Bench(BenchArgs),
    /// Generate a synthetic scene.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct ProblemArg {
    /// fef, ef, efk or hf
    #[arg(value_name = "PROBLEM")]
    positional: Option<ProblemId>,
    #[arg(long = "problem", value_name = "PROBLEM", conflicts_with = "positional")]
    flag: Option<ProblemId>,
}

impl ProblemArg {
    fn get(&self) -> Result<ProblemId, CliError> {
        self.positional.or(self.flag).ok_or_else(|| CliError::Usage("a problem (fef, ef, efk or hf) is required".into()))
    }
}

#[derive(Args, Debug, Clone)]
struct Tolerances {
    /// Newton-polish raw solutions against the instantiated generators.
    #[arg(long)]
    polish: bool,
    /// Max normalized generator residual of a reported solution.
    #[arg(long, value_name = "TOL")]
    tol_residual: Option<f64>,
    /// Relative imaginary part below which an eigenvalue counts as real.
    #[arg(long, value_name = "TOL")]
    tol_imag: Option<f64>,
    /// Relative pivot threshold of the template elimination.
    #[arg(long, value_name = "TOL")]
    tol_pivot: Option<f64>,
    /// Relative singular value below which the measurements are rank deficient.
    #[arg(long, value_name = "TOL")]
    tol_rank: Option<f64>,
    /// Number of affine charts tried on badly conditioned instances.
    #[arg(long, value_name = "N")]
    max_charts: Option<usize>,
}

impl Tolerances {
    fn options(&self) -> Result<SolveOptions, CliError> {
        let mut o = SolveOptions { polish: self.polish, ..Default::default() };
        for (slot, v, name) in [
            (&mut o.residual_tol, self.tol_residual, "tol-residual"),
            (&mut o.imag_tol, self.tol_imag, "tol-imag"),
            (&mut o.pivot_tol, self.tol_pivot, "tol-pivot"),
            (&mut o.rank_tol, self.tol_rank, "tol-rank"),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("--{name} must be positive")));
                }
                *slot = v;
            }
        }
        if let Some(k) = self.max_charts {
            if k == 0 {
                return Err(CliError::Usage("--max-charts must be at least 1".into()));
            }
            o.max_charts = k;
        }
        Ok(o)
    }
}

#[derive(Args, Debug)]
struct DeriveArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Compare with the reference polynomials and the bundled golden file.
    #[arg(long)]
    verify: bool,
    /// Directory for the golden generator file.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Critical-pair budget of each Gröbner run.
    #[arg(long, value_name = "N")]
    max_pairs: Option<usize>,
    /// Coefficient size budget in bits.
    #[arg(long, value_name = "BITS")]
    max_coeff_bits: Option<u64>,
    /// E+f+k only: derive from the E+f generators plus the lifting.
    #[arg(long)]
    staged: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Random exact instances for the quotient-basis count.
    #[arg(long, default_value_t = 3)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TemplateArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Maximal total degree of template rows.
    #[arg(long, value_name = "D")]
    degree_cap: Option<u32>,
    /// Exact validation instances.
    #[arg(long, default_value_t = 3)]
    validations: usize,
    /// Write the template JSON here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Correspondence CSV with header x1,y1,x2,y2.
    #[arg(long, short, value_name = "CSV")]
    input: PathBuf,
    /// Template JSON (defaults to the bundled one).
    #[arg(long, value_name = "FILE")]
    template: Option<PathBuf>,
    /// Write the solution JSON here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Instances per noise level.
    #[arg(short = 'n', long = "instances", default_value_t = 1000)]
    n: usize,
    /// Noise levels in pixels (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    sigma: Vec<f64>,
    /// First scene seed; instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fix the ground-truth distortion (E+f+k).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Fix the ground-truth focal length.
    #[arg(long)]
    focal: Option<f64>,
    #[arg(long, value_name = "FILE")]
    template: Option<PathBuf>,
    /// Directory for metrics.csv and summary.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise in pixels added to the written correspondences.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    focal: Option<f64>,
    /// Directory for `<problem>_<seed>.json` and `.csv`; the CSV goes to stdout otherwise.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Derive(a) => commands::derive(a),
        Command::Verify(a) => commands::verify(a),
        Command::Template(a) => commands::template(a),
        Command::Solve(a) => commands::solve(a),
        Command::Bench(a) => commands::bench(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::from(error::exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
