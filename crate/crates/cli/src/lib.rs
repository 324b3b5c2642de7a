//! Batch frontend for the `chronoq` simulator.
//!
//! Every command produces a [`Report`]: a JSON document with the run configuration, the
//! command's result and its pass/fail checks. JSON is canonical; `--csv` and the default table
//! are rendered from it. Exit codes: 0 when every check passes, 1 when a check fails or the
//! simulation itself fails, 2 on usage errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chronoq::games::{Eavesdropper, QkdProtocol, Strategy};
use chronoq::qcore::{BellLabel, Module, RandomSource};
use chronoq::{Error, Rational};

pub mod commands;
pub mod report;

#[cfg(test)]
mod tests;

pub use report::{render, Check, ConfigEcho, Format, Outcome, Report};

#[derive(Parser, Debug, Clone)]
#[command(name = "chronoq", version, about = "Seeded batch runs of the chronoq quantum-information simulator")]
pub struct Cli {
    /// Global seed, expanded into per-module streams.
    #[arg(long, global = true, env = "CHRONOQ_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Monte Carlo trials for sampling commands.
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Emit the canonical JSON report.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the result table as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the tolerance of deterministic checks.
    #[arg(long, global = true, value_parser = parse_tol)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be finite and non-negative, got {s}"))
    }
}

impl Cli {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Table
        }
    }

    pub fn context(&self) -> Ctx {
        Ctx { seed: self.seed, trials: self.trials, tol: self.tol }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Inspect Bell and GHZ states.
    #[command(subcommand)]
    State(StateCmd),
    /// PPT, CHSH and concurrence scans.
    #[command(subcommand)]
    Entangle(EntangleCmd),
    /// Typical-set codec and entropic uncertainty.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Entanglement swapping across time with its event log.
    Swap(SwapArgs),
    /// Temporal-GHZ chain demos.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// GHZ-verification consensus.
    #[command(subcommand)]
    Consensus(ConsensusCmd),
    /// Quantum games and protocols.
    #[command(subcommand)]
    Game(GameCmd),
    /// Density reconstruction from frame valuations.
    #[command(subcommand)]
    Gleason(GleasonCmd),
    /// Leggett-Garg and temporal Bell inequalities.
    #[command(subcommand)]
    Lg(LgCmd),
}

#[derive(Subcommand, Debug, Clone)]
pub enum StateCmd {
    Bell {
        #[arg(long, default_value = "phi+")]
        label: BellLabel,
    },
    Ghz {
        #[arg(long, default_value_t = 3)]
        qubits: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChshSource {
    Singlet,
    Werner,
}

#[derive(Subcommand, Debug, Clone)]
pub enum EntangleCmd {
    /// PPT spectrum, entanglement and optimized CHSH over a grid of Werner parameters.
    Werner {
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..))]
        points: u64,
    },
    /// Analytic and sampled CHSH value under the standard settings.
    Chsh {
        #[arg(long, value_enum, default_value = "singlet")]
        source: ChshSource,
        /// Werner parameter when `--source werner`.
        #[arg(long, default_value_t = 1.0)]
        f: f64,
    },
    /// Concurrence and PPT of random pure two-qubit states.
    Concurrence {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum EntropyCmd {
    /// Fixed-rate typical-set codec on a Bernoulli source.
    Codec {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0.11)]
        p: f64,
        #[arg(long, default_value_t = 0.75)]
        rate: f64,
    },
    /// H(X) + H(Z) on random qubit states against the Maassen-Uffink bound.
    Uncertainty {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SwapArgs {
    #[arg(long, default_value = "psi-")]
    pub label: BellLabel,
    /// Measure photon 1 at t=0, before photons 3 and 4 exist.
    #[arg(long)]
    pub early: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PauliOp {
    X,
    Y,
    Z,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ChainCmd {
    /// Encode, export and decode a chain.
    Demo {
        #[arg(long, default_value = "00,10,11")]
        records: String,
    },
    /// Apply a Pauli to a photon and attempt to decode.
    Tamper {
        #[arg(long, default_value = "00,10,11")]
        records: String,
        #[arg(long, value_enum, default_value = "x")]
        op: PauliOp,
        /// Spatial label of the target photon; defaults to the last live photon.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Tamper one block of both a classical hash chain and the quantum chain.
    Contrast {
        #[arg(long, default_value = "00,10,11,01")]
        records: String,
        #[arg(long, default_value_t = 1)]
        index: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct NetworkArgs {
    #[arg(long, default_value_t = 4)]
    pub nodes: usize,
    /// White-noise weight mixed into the GHZ candidate.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ConsensusCmd {
    /// Estimate the verification pass rate; the last `dishonest` nodes apply random rotations.
    Run {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, default_value_t = 1000)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        dishonest: usize,
    },
    /// Honest and dishonest fidelity bounds.
    Bounds {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, default_value_t = 2000)]
        rounds: u64,
        /// Number of honest nodes; the rest are dishonest.
        #[arg(long, default_value_t = 2)]
        honest: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Verify a candidate and append a record on acceptance.
    Admit {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, default_value_t = 100)]
        rounds: u64,
        #[arg(long, default_value_t = 0.99)]
        threshold: f64,
        #[arg(long, default_value = "01")]
        record: chronoq::chain::Record,
        #[arg(long, default_value_t = 0)]
        dishonest: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChshPlayer {
    Classical,
    Quantum,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct StrategyArg {
    /// `stick`, `switch` or `mixed:<p>` (switch with rational probability p).
    #[arg(long, default_value = "switch")]
    pub strategy: Strategy,
}

#[derive(Subcommand, Debug, Clone)]
pub enum GameCmd {
    MontyClassic(StrategyArg),
    MontyIgnorant(StrategyArg),
    /// Standard teleportation of random input states.
    Teleport,
    MontyTeleport {
        #[command(flatten)]
        s: StrategyArg,
        #[arg(long, default_value = "phi+")]
        bell: BellLabel,
    },
    UnreliableTeleport(StrategyArg),
    Superdense,
    Chsh {
        #[arg(long, value_enum, default_value = "both")]
        player: ChshPlayer,
    },
    PbrOntic(StrategyArg),
    PbrEpistemic {
        #[command(flatten)]
        s: StrategyArg,
        #[arg(long, default_value = "1/4")]
        q: Rational,
        /// Explicit `q1,q2,q3` split (overrides `--q`).
        #[arg(long)]
        split: Option<String>,
    },
    Qkd {
        #[arg(long, default_value = "bb84")]
        protocol: QkdProtocol,
        #[arg(long, default_value = "none")]
        eve: Eavesdropper,
        #[arg(long, default_value_t = 1024)]
        key_bits: usize,
    },
    /// Every game under both pure strategies, as one table.
    All,
}

#[derive(Subcommand, Debug, Clone)]
pub enum GleasonCmd {
    /// Reconstruct random density matrices from their valuations; frame-averaged decoherence.
    Roundtrip {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Haar frames for the decoherence average (0 skips it).
        #[arg(long, default_value_t = 10_000)]
        frames: u64,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum LgCmd {
    /// K3 of a precessing qubit: at `--tau`, or maximized over τ.
    K3 {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long)]
        tau: Option<f64>,
        /// Also tabulate K3 on this many points over one period.
        #[arg(long, default_value_t = 0)]
        points: usize,
    },
    TemporalChsh {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 0.0)]
        t1: f64,
        #[arg(long, default_value_t = 1.0)]
        t2: f64,
    },
    Entropic {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 2000)]
        points: usize,
    },
}

/// Run-wide settings shared by every command.
#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub trials: u64,
    pub tol: Option<f64>,
}

impl Ctx {
    pub fn rng(&self, module: Module) -> RandomSource {
        RandomSource::for_trial(self.seed, module, 0)
    }

    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Failure to produce a report.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Sim(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Sim(Error::InvalidArgument(_)) => 2,
            CliError::Sim(_) => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (code, message) = match self {
            CliError::Usage(m) => ("USAGE", m.clone()),
            CliError::Sim(e) => (e.code(), e.to_string()),
            CliError::Io(e) => ("IO", e.to_string()),
        };
        serde_json::json!({ "error": { "code": code, "message": message } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Sim(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the command and builds its report.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let ctx = cli.context();
    let (name, outcome) = commands::dispatch(&cli.command, &ctx)?;
    let config = ConfigEcho { seed: cli.seed, trials: cli.trials, tol: cli.tol };
    Ok(Report::new(name, config, outcome))
}

/// Runs, renders and writes the output; returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    match run(cli) {
        Ok(report) => {
            let text = render(&report, cli.format());
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(CliError::Io),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) if report.pass => 0,
                Ok(()) => 1,
                Err(e) => fail(&e),
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> u8 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}
