use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtd_bench::{bench, trace, verify, BenchConfig, BenchError};

#[derive(Parser)]
#[command(name = "mtd-bench", version, about = "Verify and benchmark MTD(f) against alpha-beta and NegaScout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant against brute-force minimax; exit 1 on a violation.
    Verify(Opts),
    /// Node and leaf counts per instance and algorithm, with a summary.
    Bench(Opts),
    /// Pass-by-pass listing of one MTD search on the first instance.
    Trace(Opts),
}

#[derive(Args)]
struct Opts {
    /// key=value file; relative paths also resolve under $MTD_SUITE_DIR
    #[arg(long)]
    config: Option<PathBuf>,
    /// synthetic | connect4
    #[arg(long)]
    game: Option<String>,
    /// Comma list or range, e.g. 2..5
    #[arg(long)]
    branching: Option<String>,
    /// Comma list or range, e.g. 2..8
    #[arg(long)]
    depth: Option<String>,
    /// Instances per parameter combination
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    seed_base: Option<String>,
    /// Comma list of probabilities
    #[arg(long)]
    ordering_quality: Option<String>,
    #[arg(long)]
    value_span: Option<String>,
    /// Random opening length for Connect-Four
    #[arg(long)]
    plies: Option<String>,
    /// Comma list, or `all`
    #[arg(long)]
    algorithms: Option<String>,
    /// zero | previous_iteration | two_plies_ago
    #[arg(long)]
    guess: Option<String>,
    /// mtd_f | plus_inf | minus_inf | bisect
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    step_bonus: Option<String>,
    #[arg(long)]
    bonus_period: Option<String>,
    /// Number, or `oracle` (trace only)
    #[arg(long)]
    first_guess: Option<String>,
    #[arg(long)]
    tt_log2_slots: Option<String>,
    /// on | off
    #[arg(long)]
    store_leaves: Option<String>,
    #[arg(long)]
    node_budget: Option<String>,
    /// Append per-pass traces of the MTD runs
    #[arg(long)]
    verbose_trace: bool,
    /// Check bench values against the oracle
    #[arg(long)]
    verify: bool,
    /// csv | text
    #[arg(long)]
    format: Option<String>,
}

impl Opts {
    fn config(&self) -> Result<BenchConfig, BenchError> {
        let mut cfg = BenchConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("game", &self.game),
            ("branching", &self.branching),
            ("depth", &self.depth),
            ("seeds", &self.seeds),
            ("seed_base", &self.seed_base),
            ("ordering_quality", &self.ordering_quality),
            ("value_span", &self.value_span),
            ("plies", &self.plies),
            ("algorithms", &self.algorithms),
            ("guess", &self.guess),
            ("policy", &self.policy),
            ("step_bonus", &self.step_bonus),
            ("bonus_period", &self.bonus_period),
            ("first_guess", &self.first_guess),
            ("tt_log2_slots", &self.tt_log2_slots),
            ("store_leaves", &self.store_leaves),
            ("node_budget", &self.node_budget),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.verbose_trace {
            cfg.verbose_trace = true;
        }
        if self.verify {
            cfg.verify = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(command: Command) -> Result<ExitCode, BenchError> {
    match command {
        Command::Verify(opts) => {
            let report = verify(&opts.config()?)?;
            print!("{}", report.render());
            Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench(opts) => {
            let cfg = opts.config()?;
            let report = bench(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", report.render(cfg.format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace(opts) => {
            print!("{}", trace(&opts.config()?)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // clap reports usage errors itself, with status 2
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
