use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed};

use super::Strategy;
use crate::error::{Error, Result};
use crate::Rational;

/// Numeric field the probability trees are evaluated in (`Rational` for exact values, `f64`).
pub trait Probability: Num + Clone + FromPrimitive + Signed + PartialOrd + Debug {}

impl<T: Num + Clone + FromPrimitive + Signed + PartialOrd + Debug> Probability for T {}

/// `n/d` in the field `P`.
pub fn frac<P: Probability>(n: i64, d: i64) -> P {
    P::from_i64(n).expect("integer in field") / P::from_i64(d).expect("integer in field")
}

pub fn from_rational<P: Probability>(r: Rational) -> P {
    frac(*r.numer(), *r.denom())
}

/// One path through a game: its probability, whether the conditioning event occurred
/// and whether the contestant won.
#[derive(Clone, Debug, PartialEq)]
pub struct Leaf<P> {
    pub probability: P,
    pub observed: bool,
    pub win: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTree<P> {
    leaves: Vec<Leaf<P>>,
}

impl<P: Probability> ProbabilityTree<P> {
    pub fn new(leaves: Vec<Leaf<P>>) -> Self {
        Self { leaves: leaves.into_iter().filter(|l| !l.probability.is_zero()).collect() }
    }

    pub fn leaves(&self) -> &[Leaf<P>] {
        &self.leaves
    }

    fn sum(&self, keep: impl Fn(&Leaf<P>) -> bool) -> P {
        self.leaves.iter().filter(|l| keep(l)).fold(P::zero(), |acc, l| acc + l.probability.clone())
    }

    pub fn total(&self) -> P {
        self.sum(|_| true)
    }

    /// Leaf-sum check: probabilities are nonnegative and total 1 within `tol`.
    pub fn check(&self, tol: &P) -> Result<()> {
        if let Some(l) = self.leaves.iter().find(|l| l.probability.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative leaf {:?}", l.probability)));
        }
        let total = self.total();
        if (total.clone() - P::one()).abs() > *tol {
            return Err(Error::InvalidDistribution(format!("leaves sum to {total:?}")));
        }
        Ok(())
    }

    /// Probability of the conditioning event.
    pub fn observed(&self) -> P {
        self.sum(|l| l.observed)
    }

    /// Joint probability of the conditioning event and a win.
    pub fn joint_win(&self) -> P {
        self.sum(|l| l.observed && l.win)
    }

    pub fn conditional_win(&self) -> Result<P> {
        let obs = self.observed();
        if obs.is_zero() {
            return Err(Error::DegenerateMeasurement(0.0));
        }
        Ok(self.joint_win() / obs)
    }
}

/// Final door distribution for a contestant who holds `chosen` and may switch to `alternatives`.
pub(crate) fn choice_weights<P: Probability>(
    strategy: &Strategy,
    chosen: usize,
    alternatives: &[usize],
) -> Vec<(usize, P)> {
    let spread = |w: P| -> Vec<(usize, P)> {
        let n = P::from_usize(alternatives.len()).expect("count");
        alternatives.iter().map(|&d| (d, w.clone() / n.clone())).collect()
    };
    match strategy {
        Strategy::Stick => vec![(chosen, P::one())],
        Strategy::Switch => spread(P::one()),
        Strategy::Mixed(r) => {
            let r: P = from_rational(*r);
            let mut out = spread(r.clone());
            out.push((chosen, P::one() - r));
            out
        }
    }
}

/// Generic door game: prize `A`, contestant `B`, Monty's door `C` from `monty(a, b)`,
/// final door `D` from the strategy over the doors other than `B` and `C`.
/// The conditioning event is "Monty opened a goat door".
pub(crate) fn door_tree<P: Probability>(
    prize: &[P],
    chosen: &[P],
    monty: impl Fn(usize, usize) -> Vec<(usize, P)>,
    strategy: &Strategy,
) -> ProbabilityTree<P> {
    let n = prize.len();
    let mut leaves = Vec::new();
    for (a, pa) in prize.iter().enumerate() {
        for (b, pb) in chosen.iter().enumerate() {
            for (k, pk) in monty(a, b) {
                let alternatives: Vec<usize> = (0..n).filter(|&d| d != b && d != k).collect();
                for (d, pd) in choice_weights::<P>(strategy, b, &alternatives) {
                    leaves.push(Leaf {
                        probability: pa.clone() * pb.clone() * pk.clone() * pd,
                        observed: k != a,
                        win: d == a,
                    });
                }
            }
        }
    }
    ProbabilityTree::new(leaves)
}

fn uniform<P: Probability>(n: usize) -> Vec<P> {
    vec![frac(1, n as i64); n]
}

fn uniform_over<P: Probability>(doors: impl Iterator<Item = usize>) -> Vec<(usize, P)> {
    let doors: Vec<usize> = doors.collect();
    let n = doors.len() as i64;
    doors.into_iter().map(|d| (d, frac(1, n))).collect()
}

/// Monty knows the prize and opens a goat door other than the contestant's.
fn informed_monty<P: Probability>(n: usize) -> impl Fn(usize, usize) -> Vec<(usize, P)> {
    move |a, b| uniform_over((0..n).filter(|&k| k != a && k != b))
}

/// Three doors, informed Monty.
pub fn monty_classic_tree<P: Probability>(strategy: &Strategy) -> ProbabilityTree<P> {
    door_tree(&uniform(3), &uniform(3), informed_monty(3), strategy)
}

/// Three doors; Monty opens either door the contestant did not pick.
pub fn monty_ignorant_tree<P: Probability>(strategy: &Strategy) -> ProbabilityTree<P> {
    door_tree(&uniform(3), &uniform(3), |_, b| uniform_over((0..3).filter(|&k| k != b)), strategy)
}

/// Four doors `ab ∈ {00,01,10,11}` (index `2a+b`); the contestant's door is the Bell label
/// `door`; the prize is Alice's Born outcome (uniform).
pub fn monty_teleport_tree<P: Probability>(strategy: &Strategy, door: usize) -> ProbabilityTree<P> {
    let chosen: Vec<P> = (0..4).map(|d| if d == door { P::one() } else { P::zero() }).collect();
    door_tree(&uniform(4), &chosen, informed_monty(4), strategy)
}

/// Bob holds `β₀₀`, Alice's prize outcome is uniform; one bit (first or second, 1/2 each)
/// arrives. Conditioned on receiving the bit value 0, switching picks among `01` and `10`.
pub fn unreliable_teleport_tree<P: Probability>(strategy: &Strategy) -> ProbabilityTree<P> {
    let mut leaves = Vec::new();
    for a in 0..4usize {
        for position in 0..2 {
            let bit = if position == 0 { a >> 1 } else { a & 1 };
            let base = frac::<P>(1, 4) * frac(1, 2);
            if bit == 0 {
                for (d, pd) in choice_weights::<P>(strategy, 0, &[1, 2]) {
                    leaves.push(Leaf { probability: base.clone() * pd, observed: true, win: d == a });
                }
            } else {
                leaves.push(Leaf { probability: base, observed: false, win: false });
            }
        }
    }
    ProbabilityTree::new(leaves)
}

/// PBR door game. Door `i` is outcome `Φ_{i+1}`; `prize` is the prize distribution for `Ψ₁`.
/// Monty opens door 1 unless the contestant chose it, else one of doors 2–4 uniformly.
pub fn pbr_tree<P: Probability>(prize: &[P; 4], strategy: &Strategy) -> ProbabilityTree<P> {
    let monty = |_: usize, b: usize| {
        if b == 0 {
            uniform_over(1..4)
        } else {
            vec![(0, P::one())]
        }
    };
    door_tree(prize, &uniform(4), monty, strategy)
}

/// Ontic prize distribution `(0, 1/4, 1/4, 1/2)`; epistemic shifts `q = q₁+q₂+q₃` onto door 1.
pub fn pbr_prize<P: Probability>(split: [P; 3]) -> [P; 4] {
    let [q1, q2, q3] = split;
    let q = q1.clone() + q2.clone() + q3.clone();
    [q, frac::<P>(1, 4) - q1, frac::<P>(1, 4) - q2, frac::<P>(1, 2) - q3]
}
