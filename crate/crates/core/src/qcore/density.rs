use nalgebra::DMatrix;

use super::linalg::{digits, hermitian_eigen, hermitian_eigenvalues, max_abs, undigits};
use super::{check_dim, Operator, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T: Real = f64> {
    m: DMatrix<Cx<T>>,
}

impl<T: Real> DensityOperator<T> {
    /// Validates at the default tolerance.
    pub fn new(op: Operator<T>) -> Result<Self> {
        Self::with_tol(op, T::tol())
    }

    pub fn with_tol(op: Operator<T>, tol: T) -> Result<Self> {
        if !op.is_hermitian(tol) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = op.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {}", tr.re.as_f64())));
        }
        let min = op.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidDensity(format!("eigenvalue {}", min.as_f64())));
        }
        Ok(Self { m: op.matrix().clone() })
    }

    /// Normalizes a nonzero PSD operator by its trace.
    pub fn normalized(op: Operator<T>) -> Result<Self> {
        let tr = op.trace().re;
        if tr <= T::tol() {
            return Err(Error::InvalidDensity(format!("trace {}", tr.as_f64())));
        }
        Self::new(op.scale_real(T::one() / tr))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Cx<T>>) -> Self {
        Self { m }
    }

    pub fn from_pure(psi: &StateVector<T>) -> Self {
        Self { m: Operator::projector(psi).matrix().clone() }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { m: DMatrix::identity(dim, dim) * Cx::new(T::one() / T::lit(dim as f64), T::zero()) })
    }

    /// Convex combination `Σ p_i ρ_i`.
    pub fn mixture(parts: &[(T, DensityOperator<T>)]) -> Result<Self> {
        let dim = parts.first().map(|(_, r)| r.dim()).ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch("mixture components differ in dim".into()));
            }
            if *p < -T::tol() {
                return Err(Error::InvalidArgument("negative mixture weight".into()));
            }
            m += &rho.m * Cx::new(*p, T::zero());
        }
        Self::new(Operator::from_matrix_unchecked(m))
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

    pub fn as_operator(&self) -> Operator<T> {
        Operator::from_matrix_unchecked(self.m.clone())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim().saturating_mul(other.dim()))?;
        Ok(Self { m: self.m.kronecker(&other.m) })
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &Operator<T>) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", u.dim(), self.dim())));
        }
        Ok(Self { m: u.matrix() * &self.m * u.matrix().adjoint() })
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> T {
        (&self.m * &self.m).trace().re
    }

    /// `tr(Aρ)`.
    pub fn expectation(&self, a: &Operator<T>) -> Result<Cx<T>> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), self.dim())));
        }
        Ok((a.matrix() * &self.m).trace())
    }

    /// Outcome probabilities of a POVM whose effects sum to the identity.
    pub fn povm_probabilities(&self, effects: &[Operator<T>]) -> Result<Vec<T>> {
        let mut total = Operator::zeros(self.dim());
        for e in effects {
            if !e.is_psd(T::tol()) {
                return Err(Error::InvalidArgument("POVM effect is not PSD".into()));
            }
            total = &total + e;
        }
        if !total.approx_eq(&Operator::identity(self.dim()), T::tol()) {
            return Err(Error::InvalidArgument("POVM effects do not sum to identity".into()));
        }
        effects.iter().map(|e| Ok(self.expectation(e)?.re)).collect()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.m)
    }

    /// Eigenvalues with eigenvectors as columns, ascending.
    pub fn eigen(&self) -> (Vec<T>, DMatrix<Cx<T>>) {
        hermitian_eigen(&self.m)
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && max_abs(&(&self.m - &other.m)) <= tol
    }

    /// Partial trace keeping the subsystems listed in `keep` (in their original order).
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        check_factorization(self.dim(), dims)?;
        for (i, &k) in keep.iter().enumerate() {
            if k >= dims.len() || keep[..i].contains(&k) {
                return Err(Error::DimensionMismatch(format!("bad subsystem index {k}")));
            }
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
        let keep_dims: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
        let dk: usize = keep_dims.iter().product();
        let dt: usize = traced_dims.iter().product();
        let full_index = |kd: &[usize], td: &[usize]| {
            let mut all = vec![0; dims.len()];
            for (slot, &i) in keep_sorted.iter().enumerate() {
                all[i] = kd[slot];
            }
            for (slot, &i) in traced.iter().enumerate() {
                all[i] = td[slot];
            }
            undigits(&all, dims)
        };
        let mut out = DMatrix::zeros(dk, dk);
        for r in 0..dk {
            let rd = digits(r, &keep_dims);
            for c in 0..dk {
                let cd = digits(c, &keep_dims);
                let mut acc = Cx::new(T::zero(), T::zero());
                for t in 0..dt {
                    let td = digits(t, &traced_dims);
                    acc += self.m[(full_index(&rd, &td), full_index(&cd, &td))];
                }
                out[(r, c)] = acc;
            }
        }
        let reduced = Self { m: out };
        if keep_sorted == keep {
            Ok(reduced)
        } else {
            let order: Vec<usize> = keep.iter().map(|k| keep_sorted.iter().position(|s| s == k).unwrap()).collect();
            Ok(reduced.permute_subsystems(&keep_dims, &order))
        }
    }

    /// Reorders subsystems so that new factor `i` is old factor `order[i]`.
    pub(crate) fn permute_subsystems(&self, dims: &[usize], order: &[usize]) -> Self {
        let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
        let d = self.dim();
        let map = |idx: usize| {
            let old = digits(idx, dims);
            let new: Vec<usize> = order.iter().map(|&o| old[o]).collect();
            undigits(&new, &new_dims)
        };
        let perm: Vec<usize> = (0..d).map(map).collect();
        let mut out = DMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                out[(perm[r], perm[c])] = self.m[(r, c)];
            }
        }
        Self { m: out }
    }

    /// Partial transpose of subsystem `side` (0 or 1) of a bipartite operator.
    pub fn partial_transpose(&self, dims: (usize, usize), side: usize) -> Result<Operator<T>> {
        check_factorization(self.dim(), &[dims.0, dims.1])?;
        if side > 1 {
            return Err(Error::InvalidArgument(format!("side {side} is not 0 or 1")));
        }
        let (da, db) = dims;
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for a in 0..da {
            for b in 0..db {
                for a2 in 0..da {
                    for b2 in 0..db {
                        let v = self.m[(a * db + b, a2 * db + b2)];
                        let (r, c) = if side == 0 {
                            (a2 * db + b, a * db + b2)
                        } else {
                            (a * db + b2, a2 * db + b)
                        };
                        out[(r, c)] = v;
                    }
                }
            }
        }
        Ok(Operator::from_matrix_unchecked(out))
    }
}

pub(crate) fn check_factorization(dim: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != dim {
        return Err(Error::DimensionMismatch(format!("factors {dims:?} do not multiply to {dim}")));
    }
    Ok(())
}
