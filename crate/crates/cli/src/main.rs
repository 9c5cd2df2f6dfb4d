//! `chanent`: run the library's measures, constructions and check suites
//! from the command line.
//!
//! Exit status: 0 when every internal check holds, 1 when a check or the
//! solver fails, 2 on bad input.

mod commands;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use chanent::measures::SolverSettings;
use chanent::sdp::DEFAULT_MAX_ITER;
use chanent::{Error, VERSION};

use commands::Common;

const CHANNEL_HELP: &str = "Channel: swap:K, identity:AxB, depolarizing:AxB:p, random:A0xB0xA1xB1:seed, \
sep-random:A0xB0xA1xB1:seed:terms, or a channel JSON file";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "chanent", version, about = "Entanglement of bipartite quantum channels: measures, constructions and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Solver iteration cap.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Robustness of the swap channels against the closed form K^2 - 1 and the
    /// unitary Schmidt formula; isotropic PPT threshold and PPT overlap with
    /// the maximally entangled state.
    GoldenUnits {
        /// Largest swap size (2 to 4; 3 takes seconds, 4 minutes).
        #[arg(long, default_value_t = 3)]
        max_k: usize,
    },
    /// Standard and generalized log-robustness, smoothed over the diamond
    /// ball of radius eps.
    Robustness {
        #[arg(long, help = CHANNEL_HELP)]
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Half diamond-norm distance between two channels with a certified
    /// bracket.
    Diamond {
        #[arg(long, help = CHANNEL_HELP)]
        channel: String,
        #[arg(long, help = CHANNEL_HELP)]
        other: String,
    },
    /// Hypothesis-testing entanglement E_H^eps, maximized heuristically over
    /// probe states.
    Eh {
        #[arg(long, help = CHANNEL_HELP)]
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
    },
    /// Simulate the channel from a swap channel and compare the swap size
    /// used with the smoothed standard log-robustness and that value plus 2.
    CostBounds {
        #[arg(long, help = CHANNEL_HELP)]
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Separable probes for the certificate.
        #[arg(long, default_value_t = 10)]
        probes: usize,
    },
    /// Distill a swap channel with the optimal hypothesis test and compare
    /// the yield with E_H at eps and 2 eps.
    DistillBounds {
        #[arg(long, help = CHANNEL_HELP)]
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
    },
    /// Simulate the channel with a swap catalyst of size l under a
    /// superchannel that may create robustness up to delta.
    Catalysis {
        #[arg(long, help = CHANNEL_HELP)]
        channel: String,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Separable probes for the certificate (0 to skip).
        #[arg(long, default_value_t = 10)]
        probes: usize,
    },
    /// Twisted twirl: fixes the swap channel, is idempotent, image of rank 4.
    Twirl {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        probes: usize,
    },
    /// Fuchs-van de Graaf, diamond/Choi sandwich and fidelity transfer on
    /// random pairs.
    Inequalities {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Robustness and E_H under random local superchannels, and robustness
    /// growth under an approximately separability-preserving one.
    Monotonicity {
        #[arg(long, default_value_t = 10)]
        channels: usize,
        #[arg(long, default_value_t = 20)]
        superchannels: usize,
        /// Smoothing for the E_H check.
        #[arg(long, default_value_t = 0.0)]
        eh_eps: f64,
        /// Weight of F^2 in the miss channel of the growth superchannel.
        #[arg(long, default_value_t = 0.3)]
        w: f64,
    },
    /// Sample separable channels through a superchannel and check the output
    /// robustness against delta.
    Certify {
        /// Superchannel: isotropic:K:w or a superchannel JSON file.
        #[arg(long)]
        superchannel: String,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GoldenUnits { .. } => "golden-units",
            Command::Robustness { .. } => "robustness",
            Command::Diamond { .. } => "diamond",
            Command::Eh { .. } => "eh",
            Command::CostBounds { .. } => "cost-bounds",
            Command::DistillBounds { .. } => "distill-bounds",
            Command::Catalysis { .. } => "catalysis",
            Command::Twirl { .. } => "twirl",
            Command::Inequalities { .. } => "inequalities",
            Command::Monotonicity { .. } => "monotonicity",
            Command::Certify { .. } => "certify",
        }
    }
}

fn run(cli: &Cli) -> chanent::Result<chanent::report::RunReport> {
    if !(cli.tol > 0.0 && cli.tol < 1e-2) || cli.max_iter == 0 {
        return Err(Error::Invalid("--tol must be in (0, 0.01) and --max-iter positive".into()));
    }
    let c = Common { settings: SolverSettings { tol: cli.tol, max_iter: cli.max_iter }, seed: cli.seed };
    match &cli.command {
        Command::GoldenUnits { max_k } => commands::golden_units(&c, *max_k),
        Command::Robustness { channel, eps } => commands::robustness(&c, channel, *eps),
        Command::Diamond { channel, other } => commands::diamond(&c, channel, other),
        Command::Eh { channel, eps, restarts } => commands::eh(&c, channel, *eps, *restarts),
        Command::CostBounds { channel, eps, probes } => commands::cost_bounds(&c, channel, *eps, *probes),
        Command::DistillBounds { channel, eps, restarts } => commands::distill_bounds(&c, channel, *eps, *restarts),
        Command::Catalysis { channel, l, delta, eps, probes } => {
            commands::catalysis(&c, channel, *l, *delta, *eps, *probes)
        }
        Command::Twirl { k, probes } => commands::twirl(&c, *k, *probes),
        Command::Inequalities { pairs } => commands::inequalities(&c, *pairs),
        Command::Monotonicity { channels, superchannels, eh_eps, w } => {
            commands::monotonicity(&c, *channels, *superchannels, *eh_eps, *w)
        }
        Command::Certify { superchannel, delta, samples } => commands::certify(&c, superchannel, *delta, *samples),
    }
}

/// Bad input exits 2; solver and numerical failures exit 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Solver(_) | Error::NonFinite => 1,
        _ => 2,
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> bool {
    match path {
        Some(p) => match std::fs::write(p, text) {
            Ok(()) => true,
            Err(e) => {
                eprintln!("cannot write {}: {e}", p.display());
                false
            }
        },
        None => true,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = report.to_json();
            match cli.format {
                Format::Json => println!("{text}"),
                Format::Table => print!("{}", report.to_table()),
            }
            if !write_out(&cli.out, &text) {
                return ExitCode::from(2);
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            let code = exit_code(&e);
            let record = json!({
                "version": VERSION,
                "command": cli.command.name(),
                "error": format!("{e}"),
                "exit_code": code,
            });
            let text = serde_json::to_string_pretty(&record).expect("plain data serializes");
            eprintln!("{text}");
            write_out(&cli.out, &text);
            ExitCode::from(code)
        }
    }
}
