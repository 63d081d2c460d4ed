//! `led`: experiments with list encoding/decoding codes from the command
//! line.
//!
//! Every subcommand reads channel and schedule descriptions from JSON
//! files, prints machine-readable JSON or CSV, and is deterministic given
//! its `--seed`. Exit codes: 0 on success, 2 on validation problems (bad
//! flags, malformed files, invalid parameters), 1 on runtime failures
//! (guards, non-convergence).

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn validation(msg: impl ToString) -> Self {
        CliError::Validation(msg.to_string())
    }

    fn runtime(msg: impl ToString) -> Self {
        CliError::Runtime(msg.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "led",
    about = "List encoding/decoding codes over noisy channels: capacity, feasibility, packings, simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shannon capacity of a channel, in nats and bits.
    Capacity {
        /// Channel description file (JSON).
        #[arg(long)]
        channel: String,
        /// Termination gap for the iterative solver.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Finite-n sufficient/necessary statistics for one parameter tuple.
    Feasibility {
        #[arg(long = "M")]
        m: u64,
        #[arg(long = "K")]
        k: u64,
        #[arg(long = "L")]
        l: u64,
        #[arg(long = "T")]
        t: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Asymptotic rate, gap, and feasibility verdict for a schedule.
    Classify {
        /// Schedule file (JSON growth laws for M, K, L, T).
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Build a packing of K-subsets with pairwise overlap below T.
    Packing {
        #[arg(long = "M")]
        m: u64,
        #[arg(long = "K")]
        k: u64,
        #[arg(long = "T")]
        t: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded Monte Carlo sweep over a block-length grid; emits CSV.
    Simulate {
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        channel: String,
        /// Inner code rate in nats.
        #[arg(long = "rate-inner")]
        rate_inner: f64,
        #[arg(long)]
        trials: u64,
        /// Comma-separated strictly increasing block lengths, e.g. 8,16,24.
        #[arg(long = "n-grid")]
        n_grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Exact vs approximate overlap log-probabilities; emits CSV.
    Asymptotics {
        #[arg(long = "M")]
        m: u64,
        #[arg(long = "K")]
        k: u64,
        #[arg(long = "L")]
        l: u64,
        /// Largest overlap j to tabulate.
        #[arg(long)]
        jmax: u64,
        /// Correction series truncation depth.
        #[arg(long, default_value_t = 10)]
        kmax: u32,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Capacity { channel, tol } => commands::capacity(&channel, tol),
        Command::Feasibility {
            m,
            k,
            l,
            t,
            n,
            channel,
            tol,
        } => commands::feasibility(m, k, l, t, n, &channel, tol),
        Command::Classify {
            schedule,
            channel,
            tol,
        } => commands::classify(&schedule, &channel, tol),
        Command::Packing { m, k, t, seed } => commands::packing(m, k, t, seed),
        Command::Simulate {
            schedule,
            channel,
            rate_inner,
            trials,
            n_grid,
            seed,
            out,
        } => commands::simulate(&schedule, &channel, rate_inner, trials, &n_grid, seed, out.as_deref()),
        Command::Asymptotics { m, k, l, jmax, kmax } => commands::asymptotics(m, k, l, jmax, kmax),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
