// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecs_core::C64;

#[derive(Debug, Parser)]
#[command(
    name = "ecs",
    version,
    about = "Entangled coherent states: Wigner grids, peaks, concurrence, loss and the cavity protocol"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function of mode 1 on a rectangular grid (CSV), with a JSON summary.
    Wigner(WignerArgs),
    /// Maxima of the Wigner function along a horizontal cut.
    Peaks(PeaksArgs),
    /// Concurrence by every applicable method, with pairwise deviations.
    Concurrence(ConcurrenceArgs),
    /// Concurrence and peak separation of the qubit state under photon loss.
    NoiseSweep(NoiseSweepArgs),
    /// Conditional cavity protocol that prepares a three-component superposition.
    Protocol(ProtocolArgs),
    /// Closed forms and pipelines against the truncated number-basis oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Qubit,
    Qutrit,
    QutritQed,
}

/// Accepts `2`, `-1.5`, `3i`, `1-0.5i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z: C64 = compact
        .parse()
        .map_err(|_| format!("`{s}` is not a number of the form a+bi"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(z)
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn parse_step(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v <= 0.0 {
        return Err(format!("step must be positive, got {v}"));
    }
    Ok(v)
}

fn parse_eta(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("eta must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, value_enum, default_value = "qubit")]
    pub kind: Kind,
    /// First amplitude (defaults: qubit 2, qutrit 0, qutrit-qed 2).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<C64>,
    /// Second amplitude (defaults: qubit 4, qutrit 3, qutrit-qed 7).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<C64>,
    /// Third amplitude of the qutrit state (default 8).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<C64>,
    /// Weight of the second qubit component.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub mu: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub mu1: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub mu2: C64,
    /// qutrit-qed: use the weights produced by the protocol instead of (1, 1.35, 1).
    #[arg(long)]
    pub protocol_weights: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    pub ymin: Option<f64>,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    pub ymax: Option<f64>,
    #[arg(long, value_parser = parse_step)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Also evaluate the truncated number-basis oracle and report deviations.
    #[arg(long)]
    pub oracle: bool,
    /// Number-basis cutoff for the oracle (default: adequate for the amplitudes).
    #[arg(long)]
    pub ncut: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Evaluate the literal closed-form expression instead of the kernel.
    #[arg(long)]
    pub closed_form: bool,
    /// Horizontal cut used for the peak report.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "0")]
    pub y: f64,
    /// Grid CSV destination (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON destination (default stdout when --out is given).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PeaksArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "0")]
    pub y: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConcurrenceArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Qutrit closed form from three separation parameters, e.g. `10,10,10`.
    #[arg(long, value_delimiter = ',', value_parser = parse_finite, allow_hyphen_values = true)]
    pub deltas: Option<Vec<f64>>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseSweepArgs {
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "2")]
    pub alpha: f64,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "4")]
    pub beta: f64,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "1")]
    pub mu: f64,
    /// Single noise value instead of a sweep.
    #[arg(long, value_parser = parse_eta)]
    pub eta: Option<f64>,
    /// Spacing of the sweep over [0, 1].
    #[arg(long, value_parser = parse_step, default_value = "0.05")]
    pub eta_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    /// Classical-field pulse amplitudes, one more than the number of cycles
    /// (default -0.82,2.1184,-0.472).
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub eps: Option<Vec<C64>>,
    /// Displacement applied in each cycle.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub alpha: C64,
    /// Displacement applied before the beam splitter.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub beta: C64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Amplitudes of the qubit state used by the oracle checks.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "2")]
    pub alpha: f64,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "4")]
    pub beta: f64,
    /// Cutoff for every oracle check (default: adequate per check).
    #[arg(long)]
    pub ncut: Option<usize>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}
