mod commands;
mod input;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "multitest", version, about = "Multiple testing procedures and their Monte Carlo verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a procedure to a file of p-values.
    Reject {
        #[command(flatten)]
        procedure: ProcedureArgs,
        /// One p-value per line, optional header on the first line.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Aggregate p-values of a common null into one p-value.
    Aggregate {
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export the FDP threshold families as a table over l = 1..m.
    Thresholds {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate error rates by Monte Carlo.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ProcedureArgs {
    /// bh, by, bonferroni, uncorrected, adaptive, one-stage, beta, holm,
    /// generalized-holm, lehmann-romano, quantile-binomial, reject-nothing
    #[arg(long)]
    procedure: String,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Clone)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// storey:<lambda> | quantile:<k0> | constant:<f>
    #[arg(long, default_value = "storey:0.5")]
    pub estimator: String,
    /// Reshaping weights, one nonnegative value per line, summing to 1.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CurveArg::Br)]
    pub curve: CurveArg,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CurveArg {
    Br,
    Aorc,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Gaussian,
    DiracUniform,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Repeatable; one block of rows per procedure.
    #[arg(long, required = true)]
    pub procedure: Vec<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = ModelArg::Gaussian)]
    pub model: ModelArg,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub m0: usize,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub replicates: u64,
    /// fdr | kfwer | fdp-tail; repeatable. kfwer uses --k, fdp-tail uses --gamma.
    #[arg(long, default_value = "fdr")]
    pub metric: Vec<String>,
    /// Run replicates on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reject {
            procedure,
            input,
            output,
        } => commands::reject(&procedure.procedure, &procedure.params, &input, output.as_deref()),
        Command::Aggregate {
            gamma,
            input,
            output,
        } => commands::aggregate(gamma, &input, output.as_deref()),
        Command::Thresholds {
            m,
            gamma,
            alpha,
            output,
        } => commands::thresholds(m, gamma, alpha, output.as_deref()),
        Command::Simulate(args) => commands::simulate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("multitest: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
