// SPDX-License-Identifier: Apache-2.0
//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Seed used when `--seed` is not given, so documented outputs reproduce.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "fbl", version, about = "Fixed block-length coding of correlated sources over MAC and IC")]
pub struct Cli {
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, mutual informations and the common part of a pmf, joint or channel.
    Info(InfoArgs),
    /// Random coding exponent of a constant-composition ensemble.
    Exponent(ExponentArgs),
    /// Closed forms for the generalized Dueck source.
    #[command(subcommand)]
    Dueck(DueckCommand),
    /// Evaluate one sufficient-condition system on a configuration.
    Check(CheckArgs),
    /// Search for the smallest Dueck parameters where the classical conditions fail.
    ///
    /// CSV columns: mode,k,a,lemma_holds,lemma_slack,step1_holds,ln_phi,min_slack.
    Scan(ScanArgs),
    /// Monte Carlo of the matrix scheme.
    ///
    /// Per-trial CSV columns: trial,seed,disagreements,inner_errors,bad_rows,
    /// outer_errors,sw_success,success,e1,e2,e3,budget_abort. Vector fields
    /// are joined with ';'.
    Simulate(SimulateArgs),
    /// Exact and statistical verifications.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Print a built-in configuration as a starting point for --config.
    Toy(ToyArgs),
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    /// binary-adder, gkw-noiseless, gkw-noiseless-ic or dueck-small.
    pub name: String,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Emit `{"assignment", "params"}` for `check` instead of a simulation spec.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// JSON file holding one of `pmf`, `joint` or `channel` (+ `input`).
    #[arg(long, conflicts_with = "pmf")]
    pub config: Option<PathBuf>,
    /// Inline pmf: `uniform:N` or comma-separated probabilities.
    #[arg(long)]
    pub pmf: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    /// `bsc:EPS`, `bec:EPS`, `z:P`, `noiseless:N` or a channel JSON file.
    #[arg(long)]
    pub channel: String,
    /// Rate in nats.
    #[arg(long)]
    pub rate: f64,
    /// `uniform`, comma-separated probabilities or a pmf JSON file.
    #[arg(long, default_value = "uniform")]
    pub pu: String,
    /// Use the grid oracle instead of the dual solver.
    #[arg(long)]
    pub primal: bool,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
}

#[derive(Debug, Subcommand)]
pub enum DueckCommand {
    /// Source statistics and satellite channel models.
    Stats(DueckArgs),
}

#[derive(Debug, Args)]
pub struct DueckArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 6)]
    pub eta: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Mac)]
    pub mode: ModeArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Mac,
    Ic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Ces,
    Lc,
    Isolated,
    Mac1,
    Mac2,
    Ic1,
    Ic2,
    Chk,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    /// Configuration JSON: `{"assignment": .., "params": ..}`, or
    /// `{"a", "k", "eta", "mode"}` for `isolated`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// SchemeParams JSON overriding the config's `params`.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// `isolated` without a config: Dueck parameters.
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 6)]
    pub eta: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Mac)]
    pub mode: ModeArg,
    /// `isolated`: natural log of the block length (default `k^4 a^(eta k/2)`).
    #[arg(long)]
    pub ln_l: Option<f64>,
    /// `isolated`: typicality tolerance (default `1/k`).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Exit with status 1 when the conditions fail.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 6)]
    pub eta: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Mac)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1 << 20)]
    pub amax: u64,
    #[arg(long, default_value_t = 64)]
    pub kmax: u32,
    /// Also write every grid row as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Exit with status 1 when no pair is found.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Mac1,
    Ic2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimModeArg {
    Component,
    EndToEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieArg {
    Uniform,
    Strict,
}

/// Where a simulation spec comes from, plus overrides.
#[derive(Debug, Args)]
pub struct SpecArgs {
    /// CodeEnsembleSpec JSON.
    #[arg(long, conflicts_with = "toy", required_unless_present = "toy")]
    pub config: Option<PathBuf>,
    /// Built-in configuration: binary-adder, gkw-noiseless, gkw-noiseless-ic, dueck-small.
    #[arg(long)]
    pub toy: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<SimModeArg>,
    #[arg(long, value_enum)]
    pub tie: Option<TieArg>,
    /// Hold the decoder tolerance at its value for this many rows.
    #[arg(long)]
    pub calibration_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub variant: Variant,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 400)]
    pub trials: u64,
    /// Per-trial outcomes as CSV.
    #[arg(long)]
    pub trials_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    A,
    B,
    G,
    All,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Exact lemma identities by enumeration.
    Lemmas {
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        strict: bool,
    },
    /// Pooled rows and columns against the exact decoding pmfs.
    Rows {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Block error of the constant-composition ensemble against the exponent.
    Inner {
        #[arg(long, default_value = "bsc:0.05")]
        channel: String,
        #[arg(long, default_value = "uniform")]
        pu: String,
        #[arg(long, default_value_t = 0.2)]
        rate: f64,
        #[arg(long, default_value_t = 0.05)]
        rho: f64,
        /// Block lengths, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
        ls: Vec<usize>,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}
