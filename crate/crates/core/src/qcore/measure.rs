use super::{check_targets, DensityOperator, Operator, RandomSource, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{modulus, Cx, Real};

/// Drift beyond which a measurement whose probabilities do not sum to one is rejected.
pub const DRIFT_TOL: f64 = 1e-6;

/// Result of a sampled projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome<S, T: Real = f64> {
    pub index: usize,
    pub probability: T,
    pub post_state: S,
}

/// Checks that `basis` is a complete orthonormal basis of dimension `dim`.
pub fn check_basis<T: Real>(basis: &[StateVector<T>], dim: usize) -> Result<()> {
    if basis.len() != dim || basis.iter().any(|b| b.dim() != dim) {
        return Err(Error::NonOrthonormalBasis);
    }
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = a.inner(b)?;
            let expect = if i == j { T::one() } else { T::zero() };
            if modulus(g - Cx::new(expect, T::zero())) > T::tol() {
                return Err(Error::NonOrthonormalBasis);
            }
        }
    }
    Ok(())
}

/// Born probabilities `|⟨m|ψ⟩|²` over a complete orthonormal basis.
pub fn born_distribution<T: Real>(state: &StateVector<T>, basis: &[StateVector<T>]) -> Result<Vec<T>> {
    check_basis(basis, state.dim())?;
    basis.iter().map(|b| b.fidelity(state)).collect()
}

/// Born probabilities for a basis acting on `targets` of a qubit register.
pub fn local_born_distribution<T: Real>(
    state: &StateVector<T>,
    basis: &[StateVector<T>],
    targets: &[usize],
) -> Result<Vec<T>> {
    let n = state.qubits()?;
    check_targets(n, targets)?;
    check_basis(basis, 1 << targets.len())?;
    basis
        .iter()
        .map(|b| {
            let p = Operator::projector(b);
            let amps = state.raw_apply_on(&p, targets)?;
            Ok(amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y))
        })
        .collect()
}

fn sample_index<T: Real>(probs: &[T], rng: &mut RandomSource) -> Result<usize> {
    let total: f64 = probs.iter().map(|p| p.as_f64()).sum();
    if (total - 1.0).abs() > DRIFT_TOL {
        return Err(Error::DegenerateMeasurement(total));
    }
    let weights: Vec<f64> = probs.iter().map(|p| p.as_f64().max(0.0)).collect();
    Ok(rng.categorical(&weights))
}

/// Samples an outcome and collapses to the chosen basis vector.
pub fn measure<T: Real>(
    state: &StateVector<T>,
    basis: &[StateVector<T>],
    rng: &mut RandomSource,
) -> Result<MeasurementOutcome<StateVector<T>, T>> {
    let probs = born_distribution(state, basis)?;
    let index = sample_index(&probs, rng)?;
    Ok(MeasurementOutcome { index, probability: probs[index], post_state: basis[index].clone() })
}

/// Measures `targets` in a local basis; the post-state keeps every qubit.
pub fn measure_local<T: Real>(
    state: &StateVector<T>,
    basis: &[StateVector<T>],
    targets: &[usize],
    rng: &mut RandomSource,
) -> Result<MeasurementOutcome<StateVector<T>, T>> {
    let probs = local_born_distribution(state, basis, targets)?;
    let index = sample_index(&probs, rng)?;
    let (p, post) = state.project_on(&Operator::projector(&basis[index]), targets)?;
    let post = post.ok_or(Error::DegenerateMeasurement(p.as_f64()))?;
    Ok(MeasurementOutcome { index, probability: probs[index], post_state: post })
}

/// Measures `targets` in a local basis and removes them from the register.
/// The post-state is the normalized remainder on the other qubits.
pub fn measure_and_discard<T: Real>(
    state: &StateVector<T>,
    basis: &[StateVector<T>],
    targets: &[usize],
    rng: &mut RandomSource,
) -> Result<MeasurementOutcome<StateVector<T>, T>> {
    let probs = local_born_distribution(state, basis, targets)?;
    let index = sample_index(&probs, rng)?;
    let (p, rest) = state.contract(&basis[index], targets)?;
    let rest = rest.ok_or(Error::DegenerateMeasurement(p.as_f64()))?;
    Ok(MeasurementOutcome { index, probability: probs[index], post_state: rest })
}

/// Projective measurement of a density operator in a full basis.
pub fn measure_density<T: Real>(
    rho: &DensityOperator<T>,
    basis: &[StateVector<T>],
    rng: &mut RandomSource,
) -> Result<MeasurementOutcome<DensityOperator<T>, T>> {
    check_basis(basis, rho.dim())?;
    let probs: Vec<T> = basis
        .iter()
        .map(|b| Ok(rho.expectation(&Operator::projector(b))?.re))
        .collect::<Result<_>>()?;
    let index = sample_index(&probs, rng)?;
    Ok(MeasurementOutcome {
        index,
        probability: probs[index],
        post_state: DensityOperator::from_pure(&basis[index]),
    })
}
