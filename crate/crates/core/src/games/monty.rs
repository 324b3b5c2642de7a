use serde::Serialize;

use super::tree::{monty_classic_tree, monty_ignorant_tree, pbr_prize, pbr_tree};
use super::{run_trials, to_f64, GameStats, Strategy, Trial};
use crate::error::{Error, Result};
use crate::qcore::RandomSource;
use crate::Rational;

fn other_doors(n: usize, exclude: &[usize]) -> Vec<usize> {
    (0..n).filter(|d| !exclude.contains(d)).collect()
}

/// Three-door game with an informed host.
pub fn monty_classic(strategy: &Strategy, trials: u64, rng: &RandomSource) -> Result<GameStats> {
    strategy.validate()?;
    let tree = monty_classic_tree::<Rational>(strategy);
    tree.check(&Rational::from(0))?;
    let tally = run_trials(trials, rng, |r| {
        let prize = r.below(3);
        let chosen = r.below(3);
        let goats = other_doors(3, &[prize, chosen]);
        let opened = goats[r.below(goats.len())];
        let fin = strategy.decide(chosen, &other_doors(3, &[chosen, opened]), r);
        Ok(Trial { observed: true, win: fin == prize })
    })?;
    Ok(GameStats::from_tally("monty-classic", strategy.to_string(), tally, tree.conditional_win()?.into(), None))
}

/// Three-door game with a host who opens a random non-chosen door; results are conditioned on
/// a goat being revealed, and the prize-door accident rate is reported alongside.
pub fn monty_ignorant(strategy: &Strategy, trials: u64, rng: &RandomSource) -> Result<GameStats> {
    strategy.validate()?;
    let tree = monty_ignorant_tree::<Rational>(strategy);
    tree.check(&Rational::from(0))?;
    let tally = run_trials(trials, rng, |r| {
        let prize = r.below(3);
        let chosen = r.below(3);
        let closed = other_doors(3, &[chosen]);
        let opened = closed[r.below(2)];
        if opened == prize {
            return Ok(Trial::default());
        }
        let fin = strategy.decide(chosen, &other_doors(3, &[chosen, opened]), r);
        Ok(Trial { observed: true, win: fin == prize })
    })?;
    let accident = Rational::from(1) - tree.observed();
    Ok(GameStats::from_tally(
        "monty-ignorant",
        strategy.to_string(),
        tally,
        tree.conditional_win()?.into(),
        Some("goat door opened"),
    )
    .with_event("monty opens prize door", tally.attempts - tally.observed, accident))
}

/// Prize distribution model for the PBR door game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ontology {
    /// Born probabilities `(0, 1/4, 1/4, 1/2)`.
    Ontic,
    /// Door 1 carries `q = q₁+q₂+q₃`, taken from doors 2, 3 and 4 respectively.
    Epistemic {
        #[serde(serialize_with = "serialize_split")]
        split: [Rational; 3],
    },
}

fn serialize_split<S: serde::Serializer>(split: &[Rational; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(split.iter().map(|q| q.to_string()))
}

impl Ontology {
    /// Epistemic model with the default split `q/3` per door.
    pub fn epistemic(q: Rational) -> Result<Self> {
        Self::epistemic_split([q / 3, q / 3, q / 3])
    }

    pub fn epistemic_split(split: [Rational; 3]) -> Result<Self> {
        let o = Ontology::Epistemic { split };
        o.prize()?;
        Ok(o)
    }

    pub fn q(&self) -> Rational {
        match self {
            Ontology::Ontic => Rational::from(0),
            Ontology::Epistemic { split } => split.iter().sum(),
        }
    }

    /// Prize-door distribution; fails on a negative `qᵢ` or door probability.
    pub fn prize(&self) -> Result<[Rational; 4]> {
        let split = match self {
            Ontology::Ontic => [Rational::from(0); 3],
            Ontology::Epistemic { split } => *split,
        };
        if split.iter().any(|q| *q < Rational::from(0)) {
            return Err(Error::InvalidArgument(format!("negative epistemic split {split:?}")));
        }
        let prize = pbr_prize(split);
        if prize.iter().any(|p| *p < Rational::from(0)) {
            return Err(Error::InvalidArgument(format!("split {split:?} gives a negative door probability")));
        }
        Ok(prize)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ontology::Ontic => "pbr-ontic",
            Ontology::Epistemic { .. } => "pbr-epistemic",
        }
    }
}

/// Four-door PBR game conditioned on Monty revealing a goat.
pub fn pbr_game(ontology: &Ontology, strategy: &Strategy, trials: u64, rng: &RandomSource) -> Result<GameStats> {
    strategy.validate()?;
    let prize = ontology.prize()?;
    let tree = pbr_tree(&prize, strategy);
    tree.check(&Rational::from(0))?;
    let weights: Vec<f64> = prize.iter().map(|p| to_f64(*p)).collect();
    let tally = run_trials(trials, rng, |r| {
        let a = r.categorical(&weights);
        let chosen = r.below(4);
        let opened = if chosen == 0 { 1 + r.below(3) } else { 0 };
        if opened == a {
            return Ok(Trial::default());
        }
        let fin = strategy.decide(chosen, &other_doors(4, &[chosen, opened]), r);
        Ok(Trial { observed: true, win: fin == a })
    })?;
    let accident = Rational::from(1) - tree.observed();
    Ok(GameStats::from_tally(
        ontology.name(),
        strategy.to_string(),
        tally,
        tree.conditional_win()?.into(),
        Some("goat door opened"),
    )
    .with_event("monty opens prize door", tally.attempts - tally.observed, accident))
}
