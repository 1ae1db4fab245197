//! `cardguess`: exact laws, moments, limits, simulation and self-checks for
//! two-color card guessing, printed as JSON (default) or CSV.
//!
//! Exit codes: 0 success, 1 failed verification or I/O error, 2 usage error,
//! 3 domain error, 4 refusal on resource caps.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Environment variable consulted for the default simulation seed.
pub const SEED_ENV: &str = "CARDGUESS_SEED";

#[derive(Debug, Parser)]
#[command(name = "cardguess", version, about = "Two-color card guessing with complete information")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct DeckArgs {
    /// Cards of the first (majority) color.
    #[arg(long)]
    pub m1: u32,
    /// Cards of the second (minority) color; must not exceed m1.
    #[arg(long)]
    pub m2: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PmfKind {
    /// Joint law of (W, T).
    Joint,
    #[value(name = "T")]
    T,
    #[value(name = "W")]
    W,
    #[value(name = "L")]
    L,
    #[value(name = "P")]
    P,
    #[value(name = "C")]
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CdfKind {
    /// P{W <= k, T <= l}.
    Joint,
    /// P{W <= k, T = l}.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeKind {
    /// m2 fixed (set --fixed-m2): T/m1 -> Beta(1, m2).
    TFixedM2,
    /// m2 -> inf, m2 = o(m1): m2 T/m1 -> Exp(1).
    TSublinear,
    /// m2 ~ rho m1 (set --rho in (0, 1]): T -> geometric mixture.
    TLinear,
    /// m2 = o(m1): W -> 0.
    WSublinear,
    /// m2 ~ rho m1 (set --rho in (0, 1)): W -> Geom - 1.
    WLinear,
    /// sqrt(m1) << d << m1: d W/m1 -> Exp(1/2).
    WLargeD,
    /// d ~ alpha sqrt(m1) (set --alpha): W/sqrt(m1) -> LinExp(alpha/2, 1/2).
    WAlpha,
    /// d = o(sqrt(m1)): W/sqrt(m1) -> Rayleigh.
    WSmallD,
    /// m2 ~ rho m1 (set --rho in (0, 1)): (W, T) jointly.
    JointCentral,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RegimeArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeKind,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub fixed_m2: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact probability mass function.
    Pmf {
        #[arg(value_enum)]
        law: PmfKind,
        #[command(flatten)]
        deck: DeckArgs,
    },
    /// Closed-form cumulative probabilities of (W, T).
    Cdf {
        #[arg(value_enum)]
        kind: CdfKind,
        #[command(flatten)]
        deck: DeckArgs,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
    },
    /// Exact factorial and raw moments, with asymptotics on balanced decks.
    Moments {
        #[command(flatten)]
        deck: DeckArgs,
        /// Highest moment order.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=commands::MAX_MOMENT_ORDER as i64))]
        max_order: u32,
    },
    /// Seeded Monte Carlo plays of the majority guesser.
    Simulate {
        #[command(flatten)]
        deck: DeckArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = cardguess::simulate::DEFAULT_STREAMS)]
        streams: u32,
        /// Also run chi-square goodness-of-fit tests of W, T and C against the exact laws.
        #[arg(long)]
        check: bool,
    },
    /// Limit laws and distances to them.
    Limits {
        #[command(subcommand)]
        command: LimitsCommand,
    },
    /// Correlation of the joint central limit.
    Correlate {
        #[command(subcommand)]
        command: CorrelateCommand,
    },
    /// Self-checks against independent oracles.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
}

#[derive(Debug, Subcommand)]
enum LimitsCommand {
    /// The limit law of a regime, tabulated.
    Law {
        #[command(flatten)]
        regime: RegimeArgs,
        /// Number of tabulation points.
        #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u32).range(1..=10_000))]
        points: u32,
        /// Right end of the tabulation range (default: the 0.999 quantile).
        #[arg(long)]
        upper: Option<f64>,
    },
    /// Distance between exact laws on given decks and the regime's limit.
    Distance {
        #[command(flatten)]
        regime: RegimeArgs,
        /// A deck as "m1,m2"; repeat for a sequence.
        #[arg(long = "deck", required = true, value_parser = commands::parse_deck)]
        decks: Vec<(u32, u32)>,
        /// Measure (W, T) jointly against the independent product limit.
        #[arg(long)]
        joint: bool,
    },
}

#[derive(Debug, Subcommand)]
enum CorrelateCommand {
    /// (rho, C_rho) pairs on an even grid of [0, 1].
    Curve {
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..=1_000_000))]
        points: u32,
    },
    /// Location and value of the minimum correlation.
    Min,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Closed forms against enumeration, the recurrence and series extraction.
    Oracles {
        /// Check all decks with at most this many cards.
        #[arg(long, default_value_t = 10)]
        max_total: u32,
        /// Refuse enumeration above this many cards.
        #[arg(long, default_value_t = cardguess::oracles::DEFAULT_ENUMERATION_CAP,
              value_parser = clap::value_parser!(u32).range(1..=commands::MAX_ENUMERATION_CAP as i64))]
        enumeration_cap: u32,
        /// Largest m1 for series extraction.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(0..=commands::MAX_SERIES_M1 as i64))]
        series_max_m1: u32,
    },
    /// Urn, Dyck and mirror-map models against the law of W.
    Bijections {
        #[arg(long, default_value_t = 14)]
        max_total: u32,
        /// Largest deck for the mirror-map fiber check.
        #[arg(long, default_value_t = 12)]
        mirror_max_total: u32,
        /// Refuse path enumeration above this many cards.
        #[arg(long, default_value_t = cardguess::combinatorial::DEFAULT_URN_CAP,
              value_parser = clap::value_parser!(u32).range(1..=cardguess::combinatorial::MAX_ENUMERATION_CAP as i64))]
        cap: u32,
    },
    /// The balanced local form of P{W = k} against the exact law.
    LocalLimit {
        #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(2..=2000))]
        max_m: u32,
    },
}

/// Errors mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(cardguess::Error),
    Failed(String),
    Io(std::io::Error),
}

impl From<cardguess::Error> for CliError {
    fn from(e: cardguess::Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Library(e) if e.is_cap() => 4,
            CliError::Library(cardguess::Error::Verification(_)) => 1,
            CliError::Library(_) => 3,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Failed(msg) => write!(f, "verification failed: {msg}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(output::Record, bool), CliError> {
    match cli.command {
        Command::Pmf { law, deck } => commands::pmf(law, deck).map(|r| (r, true)),
        Command::Cdf { kind, deck, k, l } => commands::cdf(kind, deck, k, l).map(|r| (r, true)),
        Command::Moments { deck, max_order } => commands::moments(deck, max_order).map(|r| (r, true)),
        Command::Simulate { deck, trials, seed, streams, check } => {
            commands::simulate(deck, trials, seed, streams, check)
        }
        Command::Limits { command } => match command {
            LimitsCommand::Law { regime, points, upper } => commands::limit_law(regime, points, upper).map(|r| (r, true)),
            LimitsCommand::Distance { regime, decks, joint } => {
                commands::limit_distance(regime, &decks, joint).map(|r| (r, true))
            }
        },
        Command::Correlate { command } => match command {
            CorrelateCommand::Curve { points } => commands::correlate_curve(points).map(|r| (r, true)),
            CorrelateCommand::Min => commands::correlate_min().map(|r| (r, true)),
        },
        Command::Verify { command } => match command {
            VerifyCommand::Oracles { max_total, enumeration_cap, series_max_m1 } => {
                commands::verify_oracles(max_total, enumeration_cap, series_max_m1)
            }
            VerifyCommand::Bijections { max_total, mirror_max_total, cap } => {
                commands::verify_bijections(max_total, mirror_max_total, cap)
            }
            VerifyCommand::LocalLimit { max_m } => commands::verify_local_limit(max_m),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok((record, passed)) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if let Err(e) = record.write(format, &mut lock).and_then(|_| lock.flush()) {
                eprintln!("{}", CliError::Io(e));
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed; see the report on standard output");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("cardguess: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
