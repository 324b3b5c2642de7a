use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use super::linalg::{hermitian_eigenvalues, max_abs};
use super::{check_dim, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Square complex matrix acting on a state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real = f64> {
    m: DMatrix<Cx<T>>,
}

impl<T: Real> Operator<T> {
    /// Builds from row-major entries.
    pub fn new(dim: usize, entries: Vec<Cx<T>>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!("{} entries for dim {dim}", entries.len())));
        }
        check_dim(dim)?;
        Ok(Self { m: DMatrix::from_row_slice(dim, dim, &entries) })
    }

    /// Builds from real row-major entries.
    pub fn from_reals(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Cx::new(T::lit(x), T::zero())).collect())
    }

    pub fn from_matrix(m: DMatrix<Cx<T>>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        check_dim(m.nrows())?;
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Cx<T>>) -> Self {
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: DMatrix::zeros(dim, dim) }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector<T>, bra: &StateVector<T>) -> Self {
        Self { m: ket.as_dvector() * bra.as_dvector().adjoint() }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &StateVector<T>) -> Self {
        Self::outer(psi, psi)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Cx<T> {
        self.m[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim().saturating_mul(other.dim()))?;
        Ok(Self { m: self.m.kronecker(&other.m) })
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { m: &self.m * s }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Cx::new(s, T::zero()))
    }

    pub fn trace(&self) -> Cx<T> {
        self.m.trace()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        max_abs(&(&self.m - &other.m))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        let d = self.dim();
        max_abs(&(self.m.adjoint() * &self.m - DMatrix::<Cx<T>>::identity(d, d))) <= tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        max_abs(&(&self.m - self.m.adjoint())) <= tol
    }

    /// Positive semidefinite: Hermitian and every eigenvalue of `(M+M†)/2` at least `-tol`.
    pub fn is_psd(&self, tol: T) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.hermitian_eigenvalues()[0]
    }

    /// Checks that the operator is a ±1-valued observable: Hermitian and squaring to identity.
    pub fn is_dichotomic(&self, tol: T) -> bool {
        self.is_hermitian(tol) && (self * self).approx_eq(&Self::identity(self.dim()), tol)
    }

    /// Expectation value `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<Cx<T>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), psi.dim())));
        }
        Ok(psi.as_dvector().dotc(&(&self.m * psi.as_dvector())))
    }
}

impl<T: Real> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: Self) -> Operator<T> {
        Operator { m: &self.m * &rhs.m }
    }
}

impl<T: Real> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: Self) -> Operator<T> {
        Operator { m: &self.m + &rhs.m }
    }
}

impl<T: Real> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: Self) -> Operator<T> {
        Operator { m: &self.m - &rhs.m }
    }
}

/// Tensor product of a list of operators, leftmost first.
pub fn tensor_all<T: Real>(ops: &[Operator<T>]) -> Result<Operator<T>> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("empty tensor product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, op| acc.tensor(op))
}

/// Tensor product of a list of states, leftmost first.
pub fn tensor_states<T: Real>(states: &[StateVector<T>]) -> Result<StateVector<T>> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("empty tensor product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))
}
