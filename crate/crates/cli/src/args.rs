use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "qchan",
    version,
    about = "Product-state capacities of qubit channels"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Solver tolerance on the bracket width.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for grid work.
    #[arg(long, global = true, env = "QCHAN_THREADS")]
    pub threads: Option<usize>,
    /// TOML file with default values; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity and maximizer of a single channel.
    Capacity(ChannelArgs),
    /// Capacity as a function of the channel parameter.
    Curve(CurveArgs),
    /// χ of both channels over the mirror-pair family.
    ChiCurves(ChiCurvesArgs),
    /// Pure input states and their images under amplitude damping.
    Ellipse(EllipseArgs),
    /// Sup-min capacity of a two-channel mixture.
    Minimax(MinimaxArgs),
    /// Compare a solver capacity against the brute-force oracle.
    Certify(CertifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Amplitude damping, parameter `--gamma`.
    Ad,
    /// Depolarizing, parameter `--lambda`.
    Dep,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Ad => "ad",
            ChannelKind::Dep => "dep",
        })
    }
}

/// A channel written as `kind:param`, e.g. `ad:0.52` or `dep:0.25`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub param: f64,
}

impl FromStr for ChannelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| format!("expected kind:param, got {s:?}"))?;
        let kind = ChannelKind::from_str(kind, true)?;
        let param = param
            .parse::<f64>()
            .map_err(|e| format!("{param:?}: {e}"))?;
        Ok(Self { kind, param })
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.param)
    }
}

impl<'de> Deserialize<'de> for ChannelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum)]
    pub channel: Option<ChannelKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub channel: Option<ChannelKind>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub end: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChiCurvesArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Spacing of the `a` grid; `1/step` must be an integer.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EllipseArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Sampled pure states on the boundary circle.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MinimaxArgs {
    /// First branch; overrides `--gamma`.
    #[arg(long)]
    pub ch1: Option<ChannelSpec>,
    /// Second branch; overrides `--lambda`.
    #[arg(long)]
    pub ch2: Option<ChannelSpec>,
    /// Shorthand for `--ch1 ad:GAMMA`.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Shorthand for `--ch2 dep:LAMBDA`.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Probability of the first branch.
    #[arg(long)]
    pub weight: Option<f64>,
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Also run the brute-force oracle.
    #[arg(long)]
    pub certify: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n_states: Option<usize>,
    #[arg(long)]
    pub a_grid: Option<usize>,
    #[arg(long)]
    pub phase_grid: Option<usize>,
    #[arg(long)]
    pub prob_grid: Option<usize>,
    /// Search complex coherences on the phase grid instead of real ones.
    #[arg(long)]
    pub complex_b: bool,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Disable pruning and enumerate every grid ensemble.
    #[arg(long)]
    pub exhaustive: bool,
    /// Largest accepted shortfall of the oracle below the solver.
    #[arg(long)]
    pub bound: Option<f64>,
}
