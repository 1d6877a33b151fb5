//! `djrsp`: sweeps, verification and optimization runs for the DJRSP
//! simulator, emitting machine-readable CSV or JSON.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 I/O error,
//! 3 verification failure.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use djrsp::channels::NoiseKind;
use djrsp::protocol::ProtocolMode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Verification,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(err) => write!(f, "{err}"),
            CliError::Verification => write!(f, "verification failed"),
        }
    }
}

impl From<djrsp::Error> for CliError {
    fn from(err: djrsp::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Verification => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NoiseArg {
    Ad,
    Bf,
    Pf,
    De,
}

impl NoiseArg {
    fn kind(self) -> NoiseKind {
        match self {
            NoiseArg::Ad => NoiseKind::AmplitudeDamping,
            NoiseArg::Bf => NoiseKind::BitFlip,
            NoiseArg::Pf => NoiseKind::PhaseFlip,
            NoiseArg::De => NoiseKind::Depolarizing,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Djrsp,
    Jrsp,
    Rsp,
}

impl ModeArg {
    fn mode(self) -> ProtocolMode {
        match self {
            ModeArg::Djrsp => ProtocolMode::Djrsp,
            ModeArg::Jrsp => ProtocolMode::JrspM0,
            ModeArg::Rsp => ProtocolMode::Rsp,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parameter range `start:stop:steps`, or a bare value for a single point.
#[derive(Debug, Clone, Copy)]
pub struct Range {
    start: f64,
    stop: f64,
    steps: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| self.start + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = text.split(':').collect();
        let (start, stop, steps) = match parts.as_slice() {
            [single] => {
                let v: f64 = single.parse().map_err(|_| format!("bad number {single}"))?;
                (v, v, 1)
            }
            [start, stop, steps] => {
                let start: f64 = start.parse().map_err(|_| format!("bad number {start}"))?;
                let stop: f64 = stop.parse().map_err(|_| format!("bad number {stop}"))?;
                let steps: usize = steps
                    .parse()
                    .map_err(|_| format!("bad step count {steps}"))?;
                (start, stop, steps)
            }
            _ => {
                return Err(format!(
                    "expected start:stop:steps or a single value, got {text}"
                ))
            }
        };
        if steps < 1 {
            return Err("steps must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || stop < start {
            return Err(format!("range [{start}, {stop}] must lie within [0, 1]"));
        }
        Ok(Range { start, stop, steps })
    }
}

/// Reversal-strength policy: `fixed:<v>`, `opt` or `eq-s`.
#[derive(Debug, Clone, Copy)]
pub enum RPolicy {
    Fixed(f64),
    Optimal,
    EqualS,
}

impl FromStr for RPolicy {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        if text == "opt" {
            return Ok(RPolicy::Optimal);
        }
        if text == "eq-s" {
            return Ok(RPolicy::EqualS);
        }
        if let Some(value) = text.strip_prefix("fixed:") {
            let v: f64 = value.parse().map_err(|_| format!("bad number {value}"))?;
            if !(0.0..1.0).contains(&v) {
                return Err(format!("fixed r = {v} must lie within [0, 1)"));
            }
            return Ok(RPolicy::Fixed(v));
        }
        Err(format!("expected fixed:<v>, opt or eq-s, got {text}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "djrsp",
    about = "Deterministic joint remote state preparation under noise: \
             sweeps, verification and reversal-strength optimization",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the (lambda, s) grid and emit per-point fidelity records.
    Sweep {
        #[arg(long = "noise", value_enum)]
        noise: NoiseArg,
        #[arg(long = "mode", value_enum, default_value = "djrsp")]
        mode: ModeArg,
        /// Noise-rate range start:stop:steps (or one value).
        #[arg(long = "lambda")]
        lambda: Range,
        /// Weak-strength range start:stop:steps (or one value).
        #[arg(long = "s")]
        s: Range,
        /// Reversal policy: `fixed:<v>`, `opt` or `eq-s`.
        #[arg(long = "r", default_value = "eq-s")]
        r: RPolicy,
        #[arg(long = "format", value_enum, default_value = "csv")]
        format: Format,
        /// Output path; stdout when omitted.
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Compare the simulator against every closed form on a parameter grid.
    Verify {
        /// Points per noise-rate grid.
        #[arg(long = "density", default_value_t = 5)]
        density: usize,
        /// Self-test: corrupt one closed-form constant and require the
        /// comparison to fail (exit 3).
        #[arg(long = "negative-control", default_value_t = false)]
        negative_control: bool,
    },
    /// Maximize the protected fidelity over the reversal strength at one
    /// (lambda, s) point and print a JSON record.
    Optimize {
        #[arg(long = "noise", value_enum)]
        noise: NoiseArg,
        #[arg(long = "mode", value_enum, default_value = "djrsp")]
        mode: ModeArg,
        #[arg(long = "lambda")]
        lambda: f64,
        #[arg(long = "s")]
        s: f64,
    },
    /// Map the depolarizing improvement region over a (lambda, s) grid.
    Region {
        #[arg(long = "lambda")]
        lambda: Range,
        #[arg(long = "s")]
        s: Range,
        #[arg(long = "format", value_enum, default_value = "csv")]
        format: Format,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes, not usage errors.
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign { 0 } else { 1 };
        }
    };
    let outcome = match cli.command {
        Command::Sweep {
            noise,
            mode,
            lambda,
            s,
            r,
            format,
            out,
        } => commands::sweep(noise.kind(), mode.mode(), lambda, s, r, format, out),
        Command::Verify {
            density,
            negative_control,
        } => commands::verify(density, negative_control),
        Command::Optimize {
            noise,
            mode,
            lambda,
            s,
        } => commands::optimize(noise.kind(), mode.mode(), lambda, s),
        Command::Region {
            lambda,
            s,
            format,
            out,
        } => commands::region(lambda, s, format, out),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
