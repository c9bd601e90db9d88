use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtbf::{run, Command, Format, RunOptions};

/// Distributed transmit beamforming: theory, simulation, design and trace
/// emulation.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Theoretical gain statistics over a grid of fleet sizes and errors.
    Analyze(Common),
    /// Monte Carlo simulation of full beamforming cycles.
    Simulate(Common),
    /// Preamble and fleet-size design over a set of distances.
    Design(Common),
    /// Replays the protocol over a recorded channel trace.
    Emulate {
        #[command(flatten)]
        common: Common,
        /// Trace file: binary with a JSON header line, or `.csv` with `i,q`.
        #[arg(long)]
        trace: PathBuf,
        /// Sample rate of a CSV trace, Hz.
        #[arg(long)]
        sample_rate: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, one per core by default.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl Common {
    fn options(self) -> RunOptions {
        RunOptions {
            config: self.config,
            out_dir: self.out,
            seed: self.seed,
            threads: self.threads,
            format: match self.format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            },
            trace: None,
            sample_rate_hz: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, opts) = match cli.command {
        Cmd::Analyze(c) => (Command::Analyze, c.options()),
        Cmd::Simulate(c) => (Command::Simulate, c.options()),
        Cmd::Design(c) => (Command::Design, c.options()),
        Cmd::Emulate {
            common,
            trace,
            sample_rate,
        } => {
            let mut o = common.options();
            o.trace = Some(trace);
            o.sample_rate_hz = sample_rate;
            (Command::Emulate, o)
        }
    };
    match run(cmd, &opts) {
        Ok(m) => {
            for path in &m.outputs {
                println!("{path}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
