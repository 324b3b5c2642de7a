//! Probabilistic games and communication protocols, each with an exact probability tree
//! and an independent Monte Carlo engine.

mod chsh_game;
mod monty;
mod qkd;
mod teleport;
mod tree;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub use chsh_game::{best_classical_chsh, chsh_game, chsh_quantum_analytic, ChshStrategy};
pub use monty::{monty_classic, monty_ignorant, pbr_game, Ontology};
pub use qkd::{qkd_session, Eavesdropper, QkdProtocol, QkdReport};
pub use teleport::{
    monty_teleport, superdense_roundtrip, teleport_branch, teleport_correction, teleport_standard,
    unreliable_teleport, TeleportReport,
};
pub use tree::{
    frac, monty_classic_tree, monty_ignorant_tree, monty_teleport_tree, pbr_prize, pbr_tree,
    unreliable_teleport_tree, Leaf, Probability, ProbabilityTree,
};

use crate::error::{Error, Result};
use crate::qcore::{RandomSource, TOL_ALG};
use crate::Rational;

/// Contestant behaviour once Monty has opened a door.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Stick,
    /// Switch uniformly to one of the other unopened doors.
    Switch,
    /// Switch with the given probability, else stick.
    Mixed(Rational),
}

impl Strategy {
    pub(crate) fn decide(&self, chosen: usize, alternatives: &[usize], rng: &mut RandomSource) -> usize {
        let switch = match self {
            Strategy::Stick => false,
            Strategy::Switch => true,
            Strategy::Mixed(r) => rng.uniform() < *r.numer() as f64 / *r.denom() as f64,
        };
        if switch {
            alternatives[rng.below(alternatives.len())]
        } else {
            chosen
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Strategy::Mixed(r) if *r < Rational::from(0) || *r > Rational::from(1) => {
                Err(Error::InvalidArgument(format!("switch probability {r} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Stick => write!(f, "stick"),
            Strategy::Switch => write!(f, "switch"),
            Strategy::Mixed(r) => write!(f, "mixed:{r}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stick" => Ok(Strategy::Stick),
            "switch" => Ok(Strategy::Switch),
            _ => {
                let r = s
                    .strip_prefix("mixed:")
                    .and_then(|r| r.parse::<Rational>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{s}`")))?;
                let strategy = Strategy::Mixed(r);
                strategy.validate()?;
                Ok(strategy)
            }
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Frequency of an auxiliary event (e.g. Monty opening the prize door) over all trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateStats {
    pub event: String,
    pub count: u64,
    pub attempts: u64,
    pub empirical: f64,
    pub analytic: f64,
    pub analytic_exact: Option<String>,
    pub std_err: f64,
    pub pass: bool,
}

/// Monte Carlo result next to its analytic value. For conditioned games `trials` counts
/// the trials in which the conditioning event occurred, out of `attempts`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameStats {
    pub game: String,
    pub strategy: String,
    pub attempts: u64,
    pub trials: u64,
    pub wins: u64,
    pub empirical: f64,
    pub analytic: f64,
    pub analytic_exact: Option<String>,
    pub std_err: f64,
    pub pass: bool,
    pub conditioned_on: Option<String>,
    pub event: Option<RateStats>,
}

pub(crate) fn binomial_std_err(count: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = count as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

pub(crate) fn within_three_se(empirical: f64, analytic: f64, std_err: f64) -> bool {
    (empirical - analytic).abs() <= 3.0 * std_err + TOL_ALG
}

pub(crate) fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Outcome of one simulated trial.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Trial {
    pub observed: bool,
    pub win: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Tally {
    pub attempts: u64,
    pub observed: u64,
    pub wins: u64,
}

/// Runs `trials` independent trials in parallel; trial `t` draws from `rng.fork(t)`.
pub(crate) fn run_trials(
    trials: u64,
    rng: &RandomSource,
    trial: impl Fn(&mut RandomSource) -> Result<Trial> + Sync,
) -> Result<Tally> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = trial(&mut rng.fork(t))?;
            Ok(Tally { attempts: 1, observed: r.observed as u64, wins: (r.observed && r.win) as u64 })
        })
        .try_reduce(Tally::default, |a, b| {
            Ok(Tally { attempts: a.attempts + b.attempts, observed: a.observed + b.observed, wins: a.wins + b.wins })
        })
}

pub(crate) struct Analytic {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl From<Rational> for Analytic {
    fn from(r: Rational) -> Self {
        Self { value: to_f64(r), exact: Some(r) }
    }
}

impl GameStats {
    pub(crate) fn from_tally(
        game: &str,
        strategy: String,
        tally: Tally,
        analytic: Analytic,
        conditioned_on: Option<&str>,
    ) -> Self {
        let empirical = if tally.observed == 0 { 0.0 } else { tally.wins as f64 / tally.observed as f64 };
        let std_err = binomial_std_err(tally.wins, tally.observed);
        Self {
            game: game.into(),
            strategy,
            attempts: tally.attempts,
            trials: tally.observed,
            wins: tally.wins,
            empirical,
            analytic: analytic.value,
            analytic_exact: analytic.exact.map(|r| r.to_string()),
            std_err,
            pass: tally.observed > 0 && within_three_se(empirical, analytic.value, std_err),
            conditioned_on: conditioned_on.map(str::to_string),
            event: None,
        }
    }

    /// Attaches an auxiliary event rate; the overall pass requires both checks.
    pub(crate) fn with_event(mut self, event: &str, count: u64, analytic: Rational) -> Self {
        let attempts = self.attempts;
        let empirical = count as f64 / attempts as f64;
        let std_err = binomial_std_err(count, attempts);
        let analytic_f = to_f64(analytic);
        let pass = within_three_se(empirical, analytic_f, std_err);
        self.pass &= pass;
        self.event = Some(RateStats {
            event: event.into(),
            count,
            attempts,
            empirical,
            analytic: analytic_f,
            analytic_exact: Some(analytic.to_string()),
            std_err,
            pass,
        });
        self
    }
}
