use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{measure_and_discard, DensityOperator, Operator, RandomSource, StateVector};
use crate::scalar::Cx;

/// Verifier angles with `Σθ_j = multiple · π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaAngles {
    pub angles: Vec<f64>,
    pub multiple: u64,
}

impl ThetaAngles {
    /// Checks `θ_j ∈ [0, π)` and recomputes the multiple.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.iter().any(|t| !(0.0..PI).contains(t)) {
            return Err(Error::InvalidArgument("angles must lie in [0, π)".into()));
        }
        let sum: f64 = angles.iter().sum();
        let m = (sum / PI).round();
        if (sum - m * PI).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("angle sum {sum} is not a multiple of π")));
        }
        Ok(Self { angles, multiple: m as u64 })
    }

    /// Parity the outcomes must have: `m mod 2`.
    pub fn required_parity(&self) -> u8 {
        (self.multiple % 2) as u8
    }
}

/// `n-1` uniform angles on `[0, π)`; the last closes the sum to `⌈S/π⌉π`.
pub fn sample_theta_angles(n: usize, rng: &mut RandomSource) -> Result<ThetaAngles> {
    if n < 2 {
        return Err(Error::InvalidArgument("θ-protocol needs at least two nodes".into()));
    }
    let mut angles: Vec<f64> = (0..n - 1).map(|_| PI * rng.uniform()).collect();
    let partial: f64 = angles.iter().sum();
    let mut m = (partial / PI).ceil();
    let mut last = (m * PI - partial).max(0.0);
    if last >= PI {
        last = 0.0;
        m += 1.0;
    }
    angles.push(last);
    Ok(ThetaAngles { angles, multiple: m as u64 })
}

/// `|±_θ⟩ = (|0⟩ ± e^{iθ}|1⟩)/√2`.
pub fn theta_basis(theta: f64) -> [StateVector; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = Cx::new(theta.cos(), theta.sin()) * h;
    [
        StateVector::new(vec![Cx::new(h, 0.0), e]).expect("normalized"),
        StateVector::new(vec![Cx::new(h, 0.0), -e]).expect("normalized"),
    ]
}

/// Rows `⟨+_θ|`, `⟨-_θ|`: maps the θ basis onto `|0⟩, |1⟩`.
pub(crate) fn theta_rotation(theta: f64) -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = Cx::new(theta.cos(), -theta.sin()) * h;
    Operator::new(2, vec![Cx::new(h, 0.0), e, Cx::new(h, 0.0), -e]).expect("2x2")
}

/// Measures `qubit` in the `θ` basis: `Y = 0` for `+_θ`. The qubit is removed from the state.
pub fn theta_measure(
    state: &StateVector,
    qubit: usize,
    theta: f64,
    rng: &mut RandomSource,
) -> Result<(u8, Option<StateVector>)> {
    if !(0.0..PI).contains(&theta) {
        return Err(Error::InvalidArgument("θ must lie in [0, π)".into()));
    }
    let n = state.num_qubits().ok_or_else(|| Error::DimensionMismatch("not a qubit register".into()))?;
    if qubit >= n {
        return Err(Error::DimensionMismatch(format!("qubit {qubit} of {n}")));
    }
    let outcome = measure_and_discard(state, &theta_basis(theta), &[qubit], rng)?;
    Ok((outcome.index as u8, (n > 1).then_some(outcome.post_state)))
}

/// Joint distribution of `(Y_1 … Y_n)` (big-endian index) for fixed angles.
pub fn outcome_distribution(rho: &DensityOperator, angles: &ThetaAngles) -> Result<Vec<f64>> {
    let n = qubits_of(rho)?;
    if angles.angles.len() != n {
        return Err(Error::DimensionMismatch(format!("{} angles for {n} qubits", angles.angles.len())));
    }
    let mut u = Operator::identity(1);
    for &t in &angles.angles {
        u = u.tensor(&theta_rotation(t))?;
    }
    let rotated = rho.evolve(&u)?;
    Ok((0..rho.dim()).map(|i| rotated.entry(i, i).re.max(0.0)).collect())
}

/// Probability that the parity condition fails for fixed angles, by enumeration.
pub fn violation_probability(rho: &DensityOperator, angles: &ThetaAngles) -> Result<f64> {
    let dist = outcome_distribution(rho, angles)?;
    let want = angles.required_parity() as u32;
    Ok(dist.iter().enumerate().filter(|(y, _)| y.count_ones() % 2 != want).map(|(_, p)| p).sum())
}

/// Pass probability averaged over the angle sampler: `½ + Re ρ_{0…0,1…1}`.
pub fn averaged_pass_probability(rho: &DensityOperator) -> Result<f64> {
    qubits_of(rho)?;
    Ok(0.5 + rho.entry(0, rho.dim() - 1).re)
}

pub(crate) fn qubits_of(rho: &DensityOperator) -> Result<usize> {
    let d = rho.dim();
    if !d.is_power_of_two() || d < 4 {
        return Err(Error::DimensionMismatch(format!("dim {d} is not a register of at least two qubits")));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Eigen-ensemble of a density operator, for fast per-round sampling.
#[derive(Clone, Debug)]
pub(crate) struct Ensemble {
    weights: Vec<f64>,
    states: Vec<StateVector>,
    n: usize,
}

impl Ensemble {
    pub(crate) fn new(rho: &DensityOperator) -> Result<Self> {
        let n = qubits_of(rho)?;
        let (vals, vecs) = rho.eigen();
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for (k, &w) in vals.iter().enumerate() {
            if w > 1e-12 {
                weights.push(w);
                states.push(StateVector::normalized(vecs.column(k).iter().copied().collect())?);
            }
        }
        Ok(Self { weights, states, n })
    }

    pub(crate) fn num_qubits(&self) -> usize {
        self.n
    }

    /// Samples `Y_1 … Y_n` for the given angles.
    pub(crate) fn sample(&self, angles: &[f64], rng: &mut RandomSource) -> Result<Vec<u8>> {
        let k = rng.categorical(&self.weights);
        let mut psi = self.states[k].clone();
        for (q, &t) in angles.iter().enumerate() {
            psi = psi.apply_on(&theta_rotation(t), &[q])?;
        }
        let probs: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let y = rng.categorical(&probs);
        Ok((0..self.n).map(|q| ((y >> (self.n - 1 - q)) & 1) as u8).collect())
    }
}
