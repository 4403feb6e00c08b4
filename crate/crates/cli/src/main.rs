//! `stackrobust` — batch experiments for robust Stackelberg commitments.
//!
//! Subcommands: `solve`, `eval`, `robust`, `brute`, `sweep`, `ensemble`,
//! `examples`. Single-shot commands print JSON to stdout; `sweep` writes a
//! CSV/JSON report file. Exit codes: 0 success, 2 configuration or input
//! error, 3 solver/computation error. `STACKROBUST_THREADS` caps the number
//! of worker threads used by `sweep`.

mod config;
mod error;
mod load;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use stackrobust::ensembles::{example_game, generate_ensemble};
use stackrobust::observation::{
    brute_force_optimum_2xn, exact_expected_payoff, mc_expected_payoff, DEFAULT_ENUM_LIMIT,
    DEFAULT_TRIALS,
};
use stackrobust::robust::{build_robust_from_solution, payoff_gap_bound};
use stackrobust::{solve_stackelberg, Error, MixedStrategy};

use crate::error::{CliError, Result};
use crate::load::load_game;

#[derive(Parser)]
#[command(
    name = "stackrobust",
    version,
    about = "Stackelberg commitments that stay optimal under noisy observation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// `<GAME>` arguments accept `example:1|2|3` or a path to a JSON game file.
#[derive(Subcommand)]
enum Command {
    /// Compute the ideal-observation Stackelberg commitment of a game
    Solve {
        /// Game source (`example:<id>` or JSON file)
        game: String,
    },
    /// Evaluate the expected leader payoff f_N(x) for a given commitment
    Eval {
        /// Game source (`example:<id>` or JSON file)
        game: String,
        /// Commitment weights, comma-separated (must sum to 1)
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        /// Number of observed plays
        #[arg(long = "N")]
        n: u64,
        /// Force exact enumeration
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Force Monte Carlo evaluation
        #[arg(long)]
        mc: bool,
        /// Monte Carlo trials
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        /// Base seed for Monte Carlo streams
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Count-vector cap for exact enumeration
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        enum_limit: u64,
    },
    /// Build the deviation-robust commitment x_{N,p} with its certificates
    Robust {
        /// Game source (`example:<id>` or JSON file)
        game: String,
        /// Number of observed plays
        #[arg(long = "N")]
        n: u64,
        /// Schedule exponent in (0, 1/2)
        #[arg(long, default_value_t = 0.25)]
        p: f64,
    },
    /// Brute-force the optimal commitment under N observations (2-row games)
    Brute {
        /// Game source (`example:<id>` or JSON file)
        game: String,
        /// Number of observed plays
        #[arg(long = "N")]
        n: u64,
        /// Grid resolution for the initial scan
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Run a batch sweep from a JSON config and write a CSV/JSON report
    Sweep {
        /// Path to the sweep configuration (JSON)
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate a seeded ensemble of random security games as JSON files
    Ensemble {
        /// Number of games
        #[arg(long)]
        count: usize,
        /// Targets (= strategies = responses) per game
        #[arg(long)]
        targets: usize,
        /// Master seed
        #[arg(long)]
        seed: u64,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Print one of the built-in example games as JSON
    Examples {
        /// Example id (1, 2 or 3)
        #[arg(long)]
        id: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            error.exit_code()
        }
    }
}

fn run(command: Command) -> Result<()> {
    init_thread_pool()?;
    match command {
        Command::Solve { game } => {
            let game = load_game(&game)?;
            let solution = solve_stackelberg(&game)?;
            print_json(&solution)
        }
        Command::Eval { game, x, n, exact, mc, trials, seed, enum_limit } => {
            let game = load_game(&game)?;
            if x.len() != game.num_strategies() {
                return Err(CliError::Config(format!(
                    "--x has {} weights but the game has {} strategies",
                    x.len(),
                    game.num_strategies()
                )));
            }
            let x = MixedStrategy::new(x).map_err(|e| CliError::Config(e.to_string()))?;
            let estimate = if exact {
                exact_expected_payoff(&game, &x, n, enum_limit)?
            } else if mc {
                mc_expected_payoff(&game, &x, n, trials, seed)?
            } else {
                match exact_expected_payoff(&game, &x, n, enum_limit) {
                    Err(Error::EnumerationTooLarge { .. }) => {
                        mc_expected_payoff(&game, &x, n, trials, seed)?
                    }
                    other => other?,
                }
            };
            print_json(&estimate)
        }
        Command::Robust { game, n, p } => {
            let game = load_game(&game)?;
            let solution = solve_stackelberg(&game)?;
            let robust = build_robust_from_solution(&game, &solution, n, p)?;
            let gap_bound = payoff_gap_bound(&game, solution.value, robust.l1_step, robust.epsilon);
            print_json(&json!({
                "solution": solution,
                "robust": robust,
                "gap_bound": gap_bound,
            }))
        }
        Command::Brute { game, n, grid } => {
            let game = load_game(&game)?;
            let (commitment, value) = brute_force_optimum_2xn(&game, n, grid, 64)?;
            print_json(&json!({
                "commitment": commitment.weights(),
                "value": value,
                "N": n,
            }))
        }
        Command::Sweep { config } => {
            let config = config::SweepConfig::from_file(&config)?;
            let rows = sweep::run_sweep(&config)?;
            sweep::emit_report(&rows, config.format, &config.output)?;
            print_line(&format!("wrote {} rows to {}", rows.len(), config.output.display()))
        }
        Command::Ensemble { count, targets, seed, out } => {
            let games = generate_ensemble(count, targets, seed)?;
            std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
            for game in &games {
                let path = out.join(format!("{}.json", game.name));
                let mut body = serde_json::to_string_pretty(game)
                    .map_err(|e| CliError::Config(format!("serializing game: {e}")))?;
                body.push('\n');
                sweep::atomic_write(&path, body.as_bytes())?;
                print_line(&path.display().to_string())?;
            }
            Ok(())
        }
        Command::Examples { id } => {
            let game = example_game(id).map_err(|e| CliError::Config(e.to_string()))?;
            print_json(&game)
        }
    }
}

/// Cap rayon's worker count when `STACKROBUST_THREADS` is set.
fn init_thread_pool() -> Result<()> {
    match std::env::var("STACKROBUST_THREADS") {
        Ok(raw) => {
            let threads: usize = raw.parse().map_err(|_| {
                CliError::Config(format!("STACKROBUST_THREADS must be a positive integer, got {raw:?}"))
            })?;
            if threads == 0 {
                return Err(CliError::Config(
                    "STACKROBUST_THREADS must be a positive integer".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Config(format!("STACKROBUST_THREADS: {e}"))),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serializing output: {e}")))?;
    print_line(&text)
}

/// Write one line to stdout. A consumer that closed the pipe early
/// (`stackrobust ... | head`) ends the process quietly instead of panicking.
fn print_line(text: &str) -> Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::io(std::path::Path::new("<stdout>"), e)),
    }
}
