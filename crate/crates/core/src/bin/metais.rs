use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use metais::pipeline::{self, BenchRow, RunConfig};

#[derive(Parser)]
#[command(
    name = "metais",
    about = "Metamodel-based importance sampling for rare events"
)]
struct Cli {
    /// Directory for result.json and the CSV artifacts.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a TOML configuration file.
    Run { config: PathBuf },
    /// Crude Monte-Carlo oracle and meta-IS side by side on a catalog problem.
    Bench {
        problem: String,
        /// Total limit-state evaluations for refinement (initial DOE included).
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Reliability index for `linear`.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        oracle_samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> metais::Result<()> {
    match cli.command {
        Command::Run { config } => {
            let mut config = RunConfig::load(&config)?;
            if cli.output.is_some() {
                config.output = cli.output;
            }
            let artifacts = pipeline::run(&config)?;
            let dir = config
                .output
                .unwrap_or_else(|| PathBuf::from("metais-output"));
            artifacts.write(&dir)?;
            let r = &artifacts.report;
            println!(
                "{}: pf = {:.4e} (pf_eps = {:.4e}, alpha_corr = {:.4}), cov = {}, g evaluations = {}",
                r.problem,
                r.result.pf,
                r.result.pf_eps.estimate,
                r.result.alpha_corr.estimate,
                r.result
                    .cov_combined
                    .map_or_else(|| "undefined".to_owned(), |c| format!("{:.2}%", 100.0 * c)),
                r.budgets.total_g_evals
            );
            println!("artifacts written to {}", dir.display());
        }
        Command::Bench {
            problem,
            budget,
            seed,
            beta,
            oracle_samples,
        } => {
            let mut config = RunConfig::preset(&problem, seed)?;
            config.problem.beta = beta;
            if let Some(b) = budget {
                config.refinement.budget = b;
            }
            let (row, artifacts) = pipeline::bench(&config, oracle_samples)?;
            println!("{}", BenchRow::HEADER);
            println!("{}", row.to_csv_line());
            if let Some(dir) = cli.output {
                artifacts.write(&dir)?;
            }
        }
    }
    Ok(())
}
