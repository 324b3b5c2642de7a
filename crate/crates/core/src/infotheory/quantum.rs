use super::shannon::entropy_of;
use crate::error::{Error, Result};
use crate::qcore::{check_basis, DensityOperator, StateVector};
use crate::scalar::Real;

/// `S(ρ) = -tr ρ log₂ ρ`, eigenvalues below tolerance treated as zero.
pub fn von_neumann_entropy<T: Real>(rho: &DensityOperator<T>) -> T {
    let spectrum: Vec<T> = rho
        .eigenvalues()
        .into_iter()
        .map(|v| if v < T::tol() { T::zero() } else { v })
        .collect();
    entropy_of(&spectrum)
}

/// `S(A|B) = S(A,B) - S(B)`.
pub fn quantum_conditional_entropy<T: Real>(rho_ab: &DensityOperator<T>, dims: (usize, usize)) -> Result<T> {
    let rho_b = rho_ab.partial_trace(&[dims.0, dims.1], &[1])?;
    Ok(von_neumann_entropy(rho_ab) - von_neumann_entropy(&rho_b))
}

/// `S(A:B) = S(A) + S(B) - S(A,B)`.
pub fn quantum_mutual_information<T: Real>(rho_ab: &DensityOperator<T>, dims: (usize, usize)) -> Result<T> {
    let rho_a = rho_ab.partial_trace(&[dims.0, dims.1], &[0])?;
    let rho_b = rho_ab.partial_trace(&[dims.0, dims.1], &[1])?;
    Ok(von_neumann_entropy(&rho_a) + von_neumann_entropy(&rho_b) - von_neumann_entropy(rho_ab))
}

/// `log₂(1/c)` with `c = max |⟨x|z⟩|²`.
pub fn entropic_uncertainty_bound<T: Real>(x_basis: &[StateVector<T>], z_basis: &[StateVector<T>]) -> Result<T> {
    let d = x_basis.first().map(StateVector::dim).ok_or(Error::NonOrthonormalBasis)?;
    check_basis(x_basis, d)?;
    check_basis(z_basis, d)?;
    let mut c = T::zero();
    for x in x_basis {
        for z in z_basis {
            c = c.max(x.fidelity(z)?);
        }
    }
    Ok((T::one() / c).log2().max(T::zero()))
}
