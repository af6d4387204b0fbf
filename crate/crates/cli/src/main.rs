use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coreset_cli::{cmd_prep, cmd_report, cmd_run, ReportMode, RESULTS_FILE};

#[derive(Parser)]
#[command(name = "coreset", version, about = "Subsampling benchmark for logistic regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess a CSV dataset from the config into train/test files.
    Prep {
        #[arg(long)]
        config: PathBuf,
        /// Name of the dataset entry to prepare.
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "prepared")]
        out: PathBuf,
    },
    /// Run the experiment and write results.csv plus manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads; the output does not depend on it.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
    },
    /// Aggregate a results file and optionally compute the comparison tables.
    Report {
        /// Results CSV; defaults to `<out>/results.csv`.
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "stats")]
        mode: ReportMode,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Prep { config, dataset, out } => cmd_prep(&config, &dataset, &out).map(|s| {
            println!(
                "{}: n_train={} n_test={} d={} pct_positive_train={:.1} pct_positive_all={:.1}",
                s.name, s.n_train, s.n_test, s.d, s.pct_positive_train, s.pct_positive_all
            );
        }),
        Command::Run {
            config,
            out,
            parallelism,
        } => cmd_run(&config, &out, parallelism).map(|m| println!("{}", m.results.display())),
        Command::Report { results, mode, out } => {
            let results = results.unwrap_or_else(|| out.join(RESULTS_FILE));
            cmd_report(&results, mode, &out).map(|r| {
                println!("{}", r.aggregates.display());
                for p in r.comparisons {
                    println!("{}", p.display());
                }
            })
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
