mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fddi_errlab::fcs::CheckPolynomial;
use fddi_errlab::frame::ValidityMode;

use report::Format;

const GRAMMAR: &str = "usage: fddi-lab [--format json|csv|markdown] <command>
  tables {2|3|4|5}
  rates [--links N] [--ber P] [--frame-octets N | --frame-bits F] [--latency S] [--bandwidth B] [--mode M]
  verify {table6|table8|table9|fcs-multiples|tables|rates}
  search --events K --symbols N [--check fddi|weak8|weak16] [--patterns default|FILE]
  parse --stream SYMBOLS [--mode enhanced|baseline|option-a]
  simulate [--kind frames|tokens|merge|compare] [--trials N] [--seed S] [ring flags] [--mode M] [--check C]";

/// Error analysis for FDDI line coding, frame check sequence and frame
/// validity rules.
#[derive(Parser, Debug)]
#[command(name = "fddi-lab", version, after_help = GRAMMAR)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json", alias = "report")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one of the code-effect tables.
    Tables {
        #[arg(value_parser = ["2", "3", "4", "5"])]
        table: String,
    },
    /// Error rates and mean times for one ring configuration.
    Rates {
        #[command(flatten)]
        ring: RingArgs,
        /// Only the rows that apply under these validity rules.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Check listed values against independent recomputation.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        /// Seed for the random shift in the triple check.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also check the four- and five-event frame limits.
        #[arg(long)]
        all: bool,
    },
    /// Exhaustive search for undetected error-pattern combinations.
    Search {
        #[arg(long)]
        events: usize,
        /// Data symbols in the frame (FC through FCS).
        #[arg(long)]
        symbols: u32,
        #[arg(long, value_enum, default_value = "fddi")]
        check: CheckArg,
        /// `default` for the ten-pattern alphabet, or a file with one pattern
        /// per line (e.g. 1010 or 0001-0110).
        #[arg(long, default_value = "default")]
        patterns: String,
    },
    /// Parse a symbol stream and judge each frame.
    Parse {
        #[arg(long)]
        stream: String,
        #[arg(long, value_enum, default_value = "enhanced")]
        mode: ModeArg,
        /// Skip the FCS for the exempt FC classes.
        #[arg(long)]
        honor_exempt_fc: bool,
    },
    /// Monte Carlo runs.
    Simulate(SimArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RingArgs {
    #[arg(long, default_value_t = 1000)]
    pub links: u32,
    /// Noise events per code cell per link.
    #[arg(long, default_value_t = 2.5e-10)]
    pub ber: f64,
    #[arg(long, conflicts_with = "frame_bits")]
    pub frame_octets: Option<f64>,
    /// Frame size in code-bits, preamble included.
    #[arg(long)]
    pub frame_bits: Option<f64>,
    /// Ring latency in seconds (default 1.773 us per link).
    #[arg(long)]
    pub latency: Option<f64>,
    /// Code-bits per second.
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, value_enum, default_value = "frames")]
    pub kind: SimKind,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Seeds for `--kind compare` (seed, seed+1, ...).
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value = "enhanced")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "fddi")]
    pub check: CheckArg,
    /// Links crossed by each frame: a number, or `uniform` for 1..L-1.
    #[arg(long)]
    pub destination: Option<String>,
    #[command(flatten)]
    pub ring: RingArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Table6,
    Table8,
    Table9,
    FcsMultiples,
    Tables,
    Rates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Frames,
    Tokens,
    Merge,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Enhanced,
    Baseline,
    OptionA,
}

impl From<ModeArg> for ValidityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Enhanced => ValidityMode::Enhanced,
            ModeArg::Baseline => ValidityMode::Baseline,
            ModeArg::OptionA => ValidityMode::OptionA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Fddi,
    Weak8,
    Weak16,
}

impl CheckArg {
    pub fn polynomial(self) -> CheckPolynomial {
        match self {
            CheckArg::Fddi => CheckPolynomial::fddi().clone(),
            CheckArg::Weak8 => CheckPolynomial::weak8(),
            CheckArg::Weak16 => CheckPolynomial::weak16(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CheckArg::Fddi => "fddi",
            CheckArg::Weak8 => "weak8",
            CheckArg::Weak16 => "weak16",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tables { table } => commands::tables(&table),
        Command::Rates { ring, mode } => commands::rates(&ring, mode),
        Command::Verify { target, seed, all } => commands::verify(target, seed, all),
        Command::Search {
            events,
            symbols,
            check,
            patterns,
        } => commands::search(events, symbols, check, &patterns),
        Command::Parse {
            stream,
            mode,
            honor_exempt_fc,
        } => commands::parse(&stream, mode, honor_exempt_fc),
        Command::Simulate(args) => commands::simulate(&args),
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            if report.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}\n\n{GRAMMAR}");
            ExitCode::from(2)
        }
    }
}
