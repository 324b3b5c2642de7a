use nalgebra::DVector;

use super::linalg::{apply_on_qubits, contract_on_qubits};
use super::{check_dim, Operator, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::{czero, modulus, Cx, Real};

/// Normalized pure state. Qubit registers are big-endian: qubit 0 is the leftmost factor.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real = f64> {
    amps: DVector<Cx<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that are already normalized within the default tolerance.
    pub fn new(amps: Vec<Cx<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch("empty state".into()));
        }
        check_dim(amps.len())?;
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b);
        if (norm_sqr - T::one()).abs() > T::tol() {
            return Err(Error::NotNormalized(norm_sqr.as_f64()));
        }
        Ok(Self { amps: DVector::from_vec(amps) })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<Cx<T>>) -> Result<Self> {
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if v.is_empty() || norm <= T::tol() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        check_dim(v.len())?;
        Ok(Self { amps: v.unscale(norm) })
    }

    /// Builds from real amplitudes, normalizing.
    pub fn from_reals(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| Cx::new(T::lit(a), T::zero())).collect())
    }

    /// Computational basis vector `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch(format!("index {index} >= dim {dim}")));
        }
        check_dim(dim)?;
        let mut amps = vec![czero(); dim];
        amps[index] = Cx::new(T::one(), T::zero());
        Ok(Self { amps: DVector::from_vec(amps) })
    }

    /// `|b_0 b_1 ... b_{n-1}⟩` from a bit slice.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_QUBITS {
            return Err(Error::TooLarge { dim: 1 << bits.len().min(63), max_qubits: MAX_QUBITS });
        }
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Self::basis(1 << bits.len(), index)
    }

    /// `|0...0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_bits(&vec![0; n])
    }

    pub(crate) fn from_dvector_unchecked(amps: DVector<Cx<T>>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Number of qubits, if the dimension is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub(crate) fn qubits(&self) -> Result<usize> {
        self.num_qubits()
            .ok_or_else(|| Error::DimensionMismatch(format!("dim {} is not a qubit register", self.dim())))
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        self.amps.as_slice()
    }

    pub fn amplitude(&self, index: usize) -> Cx<T> {
        self.amps[index]
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Cx<T>> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Cx<T>> {
        self.same_dim(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim().saturating_mul(other.dim()))?;
        Ok(Self { amps: self.amps.kronecker(&other.amps) })
    }

    /// Applies a full-dimension operator; the result must stay normalized.
    pub fn apply(&self, op: &Operator<T>) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("operator {} vs state {}", op.dim(), self.dim())));
        }
        let amps = op.matrix() * &self.amps;
        Self::new(amps.as_slice().to_vec())
    }

    /// Applies a `k`-qubit operator to the listed qubits.
    pub fn apply_on(&self, op: &Operator<T>, targets: &[usize]) -> Result<Self> {
        let amps = self.raw_apply_on(op, targets)?;
        Self::new(amps)
    }

    pub(crate) fn raw_apply_on(&self, op: &Operator<T>, targets: &[usize]) -> Result<Vec<Cx<T>>> {
        let n = self.qubits()?;
        check_targets(n, targets)?;
        if op.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator dim {} on {} targets",
                op.dim(),
                targets.len()
            )));
        }
        Ok(apply_on_qubits(n, self.amplitudes(), op.matrix(), targets))
    }

    /// Applies a (generally non-unitary) operator to `targets` and renormalizes.
    /// Returns the squared norm of the projected vector and the post-state, if nonzero.
    pub fn project_on(&self, op: &Operator<T>, targets: &[usize]) -> Result<(T, Option<Self>)> {
        let amps = self.raw_apply_on(op, targets)?;
        let v = DVector::from_vec(amps);
        let p = v.norm_squared();
        if p <= T::tol() * T::tol() {
            return Ok((p, None));
        }
        let norm = p.sqrt();
        Ok((p, Some(Self { amps: v.unscale(norm) })))
    }

    /// Contracts `⟨bra|` on `targets`. Returns the probability and normalized remainder.
    pub fn contract(&self, bra: &Self, targets: &[usize]) -> Result<(T, Option<Self>)> {
        let n = self.qubits()?;
        check_targets(n, targets)?;
        if bra.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch("bra does not match targets".into()));
        }
        if targets.len() == n {
            let amp = bra.inner(&reorder(self, targets)?)?;
            let p = amp.norm_sqr();
            let phase = if p > T::zero() { amp.unscale(p.sqrt()) } else { Cx::new(T::one(), T::zero()) };
            let rest = Self { amps: DVector::from_vec(vec![phase]) };
            return Ok((p, (p > T::zero()).then_some(rest)));
        }
        let v = DVector::from_vec(contract_on_qubits(n, self.amplitudes(), bra.amplitudes(), targets));
        let p = v.norm_squared();
        if p <= T::tol() * T::tol() {
            return Ok((p, None));
        }
        let norm = p.sqrt();
        Ok((p, Some(Self { amps: v.unscale(norm) })))
    }

    /// Moves the listed qubits to the front in the given order, keeping the rest in order.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.qubits()?;
        if order.len() != n || !(0..n).all(|q| order.contains(&q)) {
            return Err(Error::DimensionMismatch("order must be a permutation".into()));
        }
        let mut amps = vec![czero(); self.dim()];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut new = 0usize;
            for &q in order {
                new = (new << 1) | ((idx >> (n - 1 - q)) & 1);
            }
            amps[new] = *a;
        }
        Ok(Self { amps: DVector::from_vec(amps) })
    }

    /// Exact amplitude comparison.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim()
            && self.amps.iter().zip(other.amps.iter()).all(|(a, b)| modulus(a - b) <= tol)
    }

    /// Comparison up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let pivot = self.amps.icamax();
        let a = self.amps[pivot];
        let b = other.amps[pivot];
        if modulus(b) <= T::tol() {
            return false;
        }
        let phase = (b / a).unscale(modulus(b / a));
        self.amps
            .iter()
            .zip(other.amps.iter())
            .all(|(x, y)| modulus(*x * phase - y) <= tol)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

fn reorder<T: Real>(s: &StateVector<T>, targets: &[usize]) -> Result<StateVector<T>> {
    s.permute_qubits(targets)
}

pub(crate) fn check_targets(n: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::DimensionMismatch("no target qubits".into()));
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::DimensionMismatch(format!("qubit {q} out of range for {n} qubits")));
        }
        if targets[..i].contains(&q) {
            return Err(Error::DimensionMismatch(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}
