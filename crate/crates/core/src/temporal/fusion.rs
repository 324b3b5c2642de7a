use crate::error::{Error, Result};
use crate::qcore::{ghz_state, BellLabel, DensityOperator, Operator, StateVector};
use crate::scalar::Cx;

use super::{ModeId, TemporalRegister};

/// Largest register `ghz_density_recursive` builds densely.
pub const DENSITY_MAX_QUBITS: usize = 10;

/// `σ₀ F_{2,3} ⋯ F_{2n-2,2n-1} σ₀ (ρ^{⊗n}) (…)†`, renormalized.
pub fn ghz_density_recursive(pair_rho: &DensityOperator, n_pairs: usize) -> Result<DensityOperator> {
    if pair_rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("pair density has dim {}", pair_rho.dim())));
    }
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let n = 2 * n_pairs;
    if n > DENSITY_MAX_QUBITS {
        return Err(Error::TooLarge { dim: 1 << n, max_qubits: DENSITY_MAX_QUBITS });
    }
    let mut rho = pair_rho.clone();
    for _ in 1..n_pairs {
        rho = rho.tensor(pair_rho)?;
    }
    // F is diagonal with 0/1 entries, so FρF† masks rows and columns.
    let passes = |idx: usize| {
        (1..n_pairs).all(|k| {
            let bit = |q: usize| (idx >> (n - 1 - q)) & 1;
            bit(2 * k - 1) == bit(2 * k)
        })
    };
    let mut m = rho.matrix().clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !(passes(i) && passes(j)) {
                m[(i, j)] = Cx::new(0.0, 0.0);
            }
        }
    }
    DensityOperator::normalized(Operator::from_matrix(m)?)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `2n` modes, the fused image of `n` `|Φ⁺⟩` pairs.
pub fn temporal_ghz_closed_form(n_pairs: usize) -> Result<StateVector> {
    ghz_state(2 * n_pairs)
}

/// Six-mode H-shaped graph state, kept as a fidelity target.
pub fn h_graph_state() -> StateVector {
    let mut amps = vec![0.0; 64];
    amps[0b000000] = 0.5;
    amps[0b000111] = 0.5;
    amps[0b111000] = 0.5;
    amps[0b111111] = -0.5;
    StateVector::from_reals(&amps).expect("normalized")
}

/// A temporal GHZ register grown by delay-and-fuse, with the fused modes in temporal order.
#[derive(Clone, Debug)]
pub struct FusedChain {
    pub register: TemporalRegister,
    /// `a₀@0, b₀@1, a₁@1, b₁@2, …, b_{n-1}@n`.
    pub order: Vec<ModeId>,
    /// Product of the post-selected fusion probabilities.
    pub probability: f64,
}

/// Builds `n_pairs` pairs of `label`, created one per time step on spatial modes `aₖ`/`bₖ`,
/// delays every `bₖ` by one step and fuses it with `aₖ₊₁` under post-selection.
pub fn fuse_pairs(label: BellLabel, n_pairs: usize) -> Result<FusedChain> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let mut reg = TemporalRegister::new();
    let mut order = Vec::with_capacity(2 * n_pairs);
    let mut probability = 1.0;
    let mut pending: Option<ModeId> = None;
    for k in 0..n_pairs as u64 {
        let (a, b) = reg.create_pair(label, (&format!("a{k}"), &format!("b{k}")), k)?;
        let b = reg.delay(&b, 1)?;
        if let Some(prev) = pending.take() {
            probability *= reg.fuse_postselect(&prev, &a, 0)?;
        }
        order.push(a);
        order.push(b.clone());
        pending = Some(b);
    }
    Ok(FusedChain { register: reg, order, probability })
}
