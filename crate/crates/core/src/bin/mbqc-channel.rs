use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mbqc_channel::experiment::{
    cmd_bloch, cmd_channel, cmd_cluster_fidelity, cmd_sweep, write_csv, write_report, Engine,
    OutputFormat, RunConfig, SweepAxis, SweepConfig, DEFAULT_GAMMA_GRID,
};
use mbqc_channel::{ChannelMode, Error, NoiseSpec, Result};

#[derive(Parser)]
#[command(
    name = "mbqc-channel",
    version,
    about = "Decoherence channels on a four-qubit cluster state"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Realise one channel and report its process matrix.
    Channel {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Process fidelity over a grid of damping values.
    Sweep {
        #[arg(long, value_parser = parse_mode)]
        mode: ChannelMode,
        /// Comma-separated Γ values; defaults to 0,0.25,0.5,0.75,1.
        #[arg(long, value_delimiter = ',', conflicts_with = "betas")]
        gammas: Vec<f64>,
        /// Fixed α for a β sweep.
        #[arg(long, requires = "betas")]
        alpha: Option<f64>,
        /// Comma-separated β values, swept at fixed --alpha.
        #[arg(long, value_delimiter = ',', requires = "alpha")]
        betas: Vec<f64>,
        #[arg(long, value_parser = parse_engine, default_value = "mbqc")]
        engine: Engine,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Uniform Bloch-sphere points and their images under a channel.
    Bloch {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Local-Pauli fidelity estimate of the cluster resource and the witness.
    ClusterFidelity {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long, value_parser = parse_mode)]
    mode: ChannelMode,
    /// Damping Γ in [0, 1] (amplitude and phase modes).
    #[arg(long)]
    gamma: Option<f64>,
    /// Kraus angle α in radians.
    #[arg(long)]
    alpha: Option<f64>,
    /// Kraus angle β in radians.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = parse_engine, default_value = "mbqc")]
    engine: Engine,
    /// Keep only runs whose first two outcomes are s1 s2.
    #[arg(long, num_args = 2, value_names = ["S1", "S2"])]
    postselect: Option<Vec<u8>>,
}

#[derive(Args)]
struct CommonArgs {
    /// White-noise weight v of the resource state.
    #[arg(long)]
    noise_v: Option<f64>,
    /// Interference visibility of the path qubit.
    #[arg(long)]
    visibility: Option<f64>,
    /// Shots per measurement setting; exact expectations when absent.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
}

impl CommonArgs {
    fn noise(&self) -> NoiseSpec {
        let mut n = NoiseSpec::white(self.noise_v.unwrap_or(1.0));
        if let Some(v) = self.visibility {
            n = n.with_visibility(v);
        }
        n
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

impl ChannelArgs {
    fn config(&self, common: &CommonArgs) -> RunConfig {
        RunConfig {
            mode: self.mode,
            gamma: self.gamma,
            alpha: self.alpha,
            beta: self.beta,
            engine: self.engine,
            postselect: self.postselect.as_ref().map(|v| (v[0], v[1])),
            noise: common.noise(),
            shots: common.shots,
            seed: common.seed,
        }
    }
}

fn parse_mode(s: &str) -> std::result::Result<ChannelMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> std::result::Result<Engine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Channel { channel, common } => {
            let report = cmd_channel(&channel.config(&common))?;
            match common.format.unwrap_or(OutputFormat::Report) {
                OutputFormat::Report => write_report(&report, common.sink()?),
                OutputFormat::Csv => write_csv(&report.entries(), common.sink()?),
            }
        }
        Command::Sweep {
            mode,
            gammas,
            alpha,
            betas,
            engine,
            common,
        } => {
            let axis = match alpha {
                Some(alpha) => SweepAxis::Beta { alpha, betas },
                None if gammas.is_empty() => SweepAxis::Gamma(DEFAULT_GAMMA_GRID.to_vec()),
                None => SweepAxis::Gamma(gammas),
            };
            let rows = cmd_sweep(&SweepConfig {
                mode,
                axis,
                engine,
                noise: common.noise(),
                shots: common.shots,
                seed: common.seed,
            })?;
            match common.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Report => write_report(&rows, common.sink()?),
                OutputFormat::Csv => write_csv(&rows, common.sink()?),
            }
        }
        Command::Bloch {
            channel,
            samples,
            common,
        } => {
            let rows = cmd_bloch(&channel.config(&common), samples)?;
            match common.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Report => write_report(&rows, common.sink()?),
                OutputFormat::Csv => write_csv(&rows, common.sink()?),
            }
        }
        Command::ClusterFidelity { common } => {
            let report = cmd_cluster_fidelity(&common.noise(), common.shots, common.seed)?;
            match common.format.unwrap_or(OutputFormat::Report) {
                OutputFormat::Report => write_report(&report, common.sink()?),
                OutputFormat::Csv => write_csv(&report.terms, common.sink()?),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                ref e if e.is_numerical() => 3,
                Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
