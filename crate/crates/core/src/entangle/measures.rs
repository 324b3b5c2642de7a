use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{hermitian_eigenvalues, psd_sqrt};
use crate::qcore::{bell_state, check_factorization, ghz_state, BellLabel, DensityOperator, Operator, StateVector};
use crate::scalar::Cx;

/// `|ψ⟩ = Σ λ_k |α_k⟩|β_k⟩` with `λ` descending and strictly positive.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<StateVector>,
    pub right: Vec<StateVector>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> Result<StateVector> {
        let da = self.left[0].dim();
        let db = self.right[0].dim();
        let mut amps = vec![Cx::new(0.0, 0.0); da * db];
        for ((l, a), b) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for i in 0..da {
                for j in 0..db {
                    amps[i * db + j] += a.amplitude(i) * b.amplitude(j) * *l;
                }
            }
        }
        StateVector::normalized(amps)
    }
}

pub fn schmidt(state: &StateVector, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    check_factorization(state.dim(), &[dims.0, dims.1])?;
    let (da, db) = dims;
    let m = DMatrix::from_fn(da, db, |a, b| state.amplitude(a * db + b));
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut out = SchmidtDecomposition { coefficients: vec![], left: vec![], right: vec![] };
    for k in order {
        let s = svd.singular_values[k];
        if s <= 1e-9 {
            continue;
        }
        out.coefficients.push(s);
        out.left.push(StateVector::normalized(u.column(k).iter().copied().collect())?);
        out.right.push(StateVector::normalized(v_t.row(k).iter().copied().collect())?);
    }
    Ok(out)
}

/// Minimum eigenvalue of the partial transpose on `side` (0 = A, 1 = B).
pub fn ppt_min_eigenvalue(rho: &DensityOperator, dims: (usize, usize), side: usize) -> Result<f64> {
    Ok(ppt_spectrum(rho, dims, side)?[0])
}

/// Ascending spectrum of the partial transpose.
pub fn ppt_spectrum(rho: &DensityOperator, dims: (usize, usize), side: usize) -> Result<Vec<f64>> {
    Ok(rho.partial_transpose(dims, side)?.hermitian_eigenvalues())
}

/// Pure-state concurrence `√(2(1 - tr ρ_A²))`.
pub fn concurrence(state: &StateVector, dims: (usize, usize)) -> Result<f64> {
    check_factorization(state.dim(), &[dims.0, dims.1])?;
    let rho_a = DensityOperator::from_pure(state).partial_trace(&[dims.0, dims.1], &[0])?;
    Ok((2.0 * (1.0 - rho_a.purity())).max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDistance {
    /// Squared Uhlmann fidelity `(tr√(√ρ σ √ρ))²`.
    pub fidelity: f64,
    /// `½ tr|ρ - σ|`.
    pub trace_distance: f64,
}

pub fn state_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<StateDistance> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let sr = psd_sqrt(rho.matrix());
    let inner = &sr * sigma.matrix() * &sr;
    let root_fid: f64 = hermitian_eigenvalues(&inner).iter().map(|v| v.max(0.0).sqrt()).sum();
    let diff = rho.matrix() - sigma.matrix();
    let trace_distance = 0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>();
    Ok(StateDistance { fidelity: (root_fid * root_fid).min(1.0), trace_distance: trace_distance.min(1.0) })
}

/// `tr(Wρ)` for a Hermitian witness.
pub fn witness_value(w: &Operator, rho: &DensityOperator) -> Result<f64> {
    if !w.is_hermitian(1e-9) {
        return Err(Error::InvalidArgument("witness is not Hermitian".into()));
    }
    Ok(rho.expectation(w)?.re)
}

/// `W = α I - |GHZ_n⟩⟨GHZ_n|`; `α = 3/4` separates the three-qubit GHZ class.
pub fn ghz_witness(n: usize, alpha: f64) -> Result<Operator> {
    let g = ghz_state::<f64>(n)?;
    Ok(&Operator::identity(g.dim()).scale_real(alpha) - &Operator::projector(&g))
}

/// Werner family `F|Ψ⁻⟩⟨Ψ⁻| + (1-F)/3 (|Ψ⁺⟩⟨Ψ⁺| + |Φ⁺⟩⟨Φ⁺| + |Φ⁻⟩⟨Φ⁻|)`.
#[derive(Clone, Debug)]
pub struct WernerState {
    pub f: f64,
    pub rho: DensityOperator,
}

impl WernerState {
    pub fn new(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidArgument(format!("Werner parameter {f} outside [0, 1]")));
        }
        let rest = (1.0 - f) / 3.0;
        let parts: Vec<(f64, DensityOperator)> = [
            (f, BellLabel::PsiMinus),
            (rest, BellLabel::PsiPlus),
            (rest, BellLabel::PhiPlus),
            (rest, BellLabel::PhiMinus),
        ]
        .into_iter()
        .map(|(p, l)| (p, DensityOperator::from_pure(&bell_state(l))))
        .collect();
        Ok(Self { f, rho: DensityOperator::mixture(&parts)? })
    }
}
