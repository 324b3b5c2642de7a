//! Dense state vectors, operators, density operators and Born-rule measurement.
//!
//! Qubit registers are big-endian: qubit 0 is the leftmost tensor factor and the
//! basis index is `Σ bit_i · 2^(n-1-i)`.

mod density;
mod gates;
pub(crate) mod linalg;
mod measure;
mod operator;
mod random;
mod state;

pub use density::DensityOperator;
pub use gates::{
    bell_basis, bell_state, cnot, computational_basis, ghz_state, hadamard, minus, pauli_x, pauli_y,
    pauli_z, plus, standard_gate, x_basis, BellLabel, Gate,
};
pub use measure::{
    born_distribution, check_basis, local_born_distribution, measure, measure_and_discard,
    measure_density, measure_local, MeasurementOutcome, DRIFT_TOL,
};
pub use operator::{tensor_all, tensor_states, Operator};
pub use random::{random_basis, random_density, random_state, random_unitary, Module, RandomSource};
pub use state::StateVector;

pub(crate) use density::check_factorization;
pub(crate) use state::check_targets;

use crate::error::{Error, Result};

/// Largest qubit register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

/// Normalization tolerance.
pub const TOL_NORM: f64 = 1e-9;

/// Tolerance for algebraic identities.
pub const TOL_ALG: f64 = 1e-9;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim > 1 << MAX_QUBITS {
        return Err(Error::TooLarge { dim, max_qubits: MAX_QUBITS });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
