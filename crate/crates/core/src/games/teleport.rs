use serde::Serialize;

use super::tree::{monty_teleport_tree, unreliable_teleport_tree};
use super::{run_trials, GameStats, Strategy, Trial};
use crate::error::{Error, Result};
use crate::qcore::{
    cnot, computational_basis, hadamard, measure, measure_and_discard, pauli_x, pauli_z, random_state, BellLabel,
    DensityOperator, Operator, RandomSource, StateVector, TOL_ALG,
};
use crate::Rational;

fn power(op: Operator, bit: u8) -> Operator {
    if bit & 1 == 1 {
        op
    } else {
        Operator::identity(2)
    }
}

/// Bob's correction for door `ef` when the shared pair was `β_xy`: `Z^e X^f Z^x X^y`.
/// For `β₀₀` this is the standard table `00→I, 01→X, 10→Z, 11→ZX`.
pub fn teleport_correction(door: (u8, u8), bell: BellLabel) -> Operator {
    let (e, f) = door;
    let (x, y) = bell.bits();
    let ops = [power(pauli_z(), e), power(pauli_x(), f), power(pauli_z(), x), power(pauli_x(), y)];
    ops.iter().skip(1).fold(ops[0].clone(), |acc, op| &acc * op)
}

/// `|ψ⟩|β⟩` after Alice's CNOT and Hadamard; qubits (ψ, Alice's half, Bob).
fn premeasure(psi: &StateVector, bell: BellLabel) -> Result<StateVector> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("teleportation input must be one qubit, got dim {}", psi.dim())));
    }
    psi.tensor(&bell.state())?.apply_on(&cnot(), &[0, 1])?.apply_on(&hadamard(), &[0])
}

fn bits_of(index: usize) -> (u8, u8) {
    ((index >> 1) as u8, (index & 1) as u8)
}

/// Forces Alice's outcome `ab` on a `β₀₀` run; returns its probability and Bob's corrected state.
pub fn teleport_branch(psi: &StateVector, a: u8, b: u8) -> Result<(f64, StateVector)> {
    let state = premeasure(psi, BellLabel::PhiPlus)?;
    let bra = StateVector::from_bits(&[a & 1, b & 1])?;
    let (p, bob) = state.contract(&bra, &[0, 1])?;
    let bob = bob.ok_or(Error::DegenerateMeasurement(p))?;
    Ok((p, bob.apply(&teleport_correction((a, b), BellLabel::PhiPlus))?))
}

#[derive(Clone, Debug, Serialize)]
pub struct TeleportReport {
    pub branch: (u8, u8),
    pub probability: f64,
    pub fidelity: f64,
    /// Bob's reduced state before Alice's bits arrive.
    #[serde(skip)]
    pub bob_premeasure_reduced: DensityOperator,
}

/// Standard teleportation over `β₀₀` with a sampled measurement branch.
pub fn teleport_standard(psi: &StateVector, rng: &mut RandomSource) -> Result<TeleportReport> {
    let state = premeasure(psi, BellLabel::PhiPlus)?;
    let bob_premeasure_reduced = DensityOperator::from_pure(&state).partial_trace(&[2, 2, 2], &[2])?;
    let out = measure_and_discard(&state, &computational_basis(4), &[0, 1], rng)?;
    let branch = bits_of(out.index);
    let bob = out.post_state.apply(&teleport_correction(branch, BellLabel::PhiPlus))?;
    Ok(TeleportReport { branch, probability: out.probability, fidelity: bob.fidelity(psi)?, bob_premeasure_reduced })
}

fn door_index((a, b): (u8, u8)) -> usize {
    2 * a as usize + b as usize
}

/// Sends a random `ψ` through the full protocol and returns it with Bob's uncorrected qubit
/// and Alice's outcome.
fn run_protocol(bell: BellLabel, r: &mut RandomSource) -> Result<(StateVector, StateVector, usize)> {
    let psi = random_state(2, r);
    let state = premeasure(&psi, bell)?;
    let out = measure_and_discard(&state, &computational_basis(4), &[0, 1], r)?;
    Ok((psi, out.post_state, out.index))
}

fn recovers(psi: &StateVector, bob: &StateVector, door: usize, bell: BellLabel) -> Result<bool> {
    let fixed = bob.apply(&teleport_correction(bits_of(door), bell))?;
    Ok(fixed.fidelity(psi)? >= 1.0 - TOL_ALG)
}

/// Teleportation as a four-door game: the contestant's door is the Bell label `bell`, the prize
/// is Alice's outcome, and Alice opens a door that is neither. Bob wins when his correction
/// returns `ψ`.
pub fn monty_teleport(strategy: &Strategy, bell: BellLabel, trials: u64, rng: &RandomSource) -> Result<GameStats> {
    strategy.validate()?;
    let chosen = door_index(bell.bits());
    let tree = monty_teleport_tree::<Rational>(strategy, chosen);
    tree.check(&Rational::from(0))?;
    let tally = run_trials(trials, rng, |r| {
        let (psi, bob, prize) = run_protocol(bell, r)?;
        let goats: Vec<usize> = (0..4).filter(|&d| d != prize && d != chosen).collect();
        let opened = goats[r.below(goats.len())];
        let alternatives: Vec<usize> = (0..4).filter(|&d| d != chosen && d != opened).collect();
        let door = strategy.decide(chosen, &alternatives, r);
        Ok(Trial { observed: true, win: recovers(&psi, &bob, door, bell)? })
    })?;
    Ok(GameStats::from_tally("monty-teleport", strategy.to_string(), tally, tree.conditional_win()?.into(), None))
}

/// Teleportation over `β₀₀` where only one of Alice's two bits arrives (each with probability
/// 1/2). Conditioned on the received bit being 0; switching picks `01` or `10`.
pub fn unreliable_teleport(strategy: &Strategy, trials: u64, rng: &RandomSource) -> Result<GameStats> {
    strategy.validate()?;
    let tree = unreliable_teleport_tree::<Rational>(strategy);
    tree.check(&Rational::from(0))?;
    let bell = BellLabel::PhiPlus;
    let tally = run_trials(trials, rng, |r| {
        let (psi, bob, prize) = run_protocol(bell, r)?;
        let (a, b) = bits_of(prize);
        let received = if r.bit() == 0 { a } else { b };
        if received != 0 {
            return Ok(Trial::default());
        }
        let door = strategy.decide(0, &[1, 2], r);
        Ok(Trial { observed: true, win: recovers(&psi, &bob, door, bell)? })
    })?;
    let received_zero = tree.observed();
    Ok(GameStats::from_tally(
        "unreliable-teleport",
        strategy.to_string(),
        tally,
        tree.conditional_win()?.into(),
        Some("received bit 0"),
    )
    .with_event("received bit 0", tally.observed, received_zero))
}

/// Superdense coding over `|Φ⁺⟩`: Alice encodes `xy` with `I, X, Z, ZX`; Bob decodes with
/// CNOT and Hadamard and measures both qubits.
pub fn superdense_roundtrip(bits: (u8, u8), rng: &mut RandomSource) -> Result<(u8, u8)> {
    let (x, y) = bits;
    if x > 1 || y > 1 {
        return Err(Error::InvalidArgument(format!("superdense input must be two bits, got {x}{y}")));
    }
    let encode = &power(pauli_z(), x) * &power(pauli_x(), y);
    let sent = BellLabel::PhiPlus.state::<f64>().apply_on(&encode, &[0])?;
    let decoded = sent.apply(&cnot())?.apply_on(&hadamard(), &[0])?;
    Ok(bits_of(measure(&decoded, &computational_basis(4), rng)?.index))
}
