use serde::{Deserialize, Serialize};

use super::quantum::{QuantumChain, Record};
use crate::error::{Error, Result};
use crate::qcore::{pauli_x, RandomSource};

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix(prev ∥ record) = splitmix64(splitmix64(prev) ⊕ (2·r₁ + r₂))`.
pub fn mix(prev: u64, record: Record) -> u64 {
    splitmix64(splitmix64(prev) ^ u64::from(2 * record.r1 + record.r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalBlock {
    pub record: Record,
    pub prev_digest: u64,
    pub digest: u64,
}

/// Toy hash chain. The genesis block links to digest 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalChain {
    pub blocks: Vec<ClassicalBlock>,
}

impl ClassicalChain {
    pub fn from_records(records: &[Record]) -> Self {
        let mut chain = Self::default();
        for r in records {
            chain.append(*r);
        }
        chain
    }

    pub fn append(&mut self, record: Record) {
        let prev_digest = self.blocks.last().map_or(0, |b| b.digest);
        self.blocks.push(ClassicalBlock { record, prev_digest, digest: mix(prev_digest, record) });
    }

    /// Block `k` is valid when every block up to and including `k` links and hashes correctly.
    pub fn validity(&self) -> Vec<bool> {
        let mut ok = true;
        let mut expected_prev = 0;
        self.blocks
            .iter()
            .map(|b| {
                ok = ok && b.prev_digest == expected_prev && b.digest == mix(b.prev_digest, b.record);
                expected_prev = b.digest;
                ok
            })
            .collect()
    }

    /// Overwrites a stored record without touching digests.
    pub fn tamper(&mut self, index: usize, record: Record) -> Result<()> {
        let b = self
            .blocks
            .get_mut(index)
            .ok_or_else(|| Error::InvalidArgument(format!("block {index} out of range")))?;
        b.record = record;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TamperContrast {
    pub n_blocks: usize,
    pub tamper_index: usize,
    /// Half-open range of invalid blocks.
    pub invalidated_range_classical: (usize, usize),
    pub invalidated_range_quantum: (usize, usize),
    /// Error code when the targeted block's photons are already in the past.
    pub quantum_target_error: Option<String>,
    /// Fidelity after the attacker hits the last live photon with `X`.
    pub quantum_fidelity_after: f64,
}

/// Tampers block `tamper_index` of both chains built from `records`.
///
/// Classically the record is overwritten. On the quantum chain the attacker first targets the
/// block's second photon; if that photon is in the past the attempt fails with
/// `TEMPORAL_INACCESSIBLE`, and the attacker falls back to `X` on the last live photon.
pub fn classical_chain_tamper_contrast(
    records: &[Record],
    tamper_index: usize,
    rng: &mut RandomSource,
) -> Result<TamperContrast> {
    let n = records.len();
    if tamper_index >= n {
        return Err(Error::InvalidArgument(format!("tamper index {tamper_index} outside 0..{n}")));
    }
    let mut classical = ClassicalChain::from_records(records);
    let original = records[tamper_index];
    classical.tamper(tamper_index, Record { r1: 1 - original.r1, r2: original.r2 })?;
    let validity = classical.validity();
    let first_bad = validity.iter().position(|v| !v).unwrap_or(n);

    let mut quantum = QuantumChain::from_records(records, rng)?;
    let target = quantum.modes()[2 * tamper_index + 1].clone();
    let x = pauli_x();
    let quantum_target_error = match quantum.tamper(&target, &x) {
        Ok(_) => None,
        Err(e @ Error::TemporalInaccessible(_)) => Some(e.code().to_string()),
        Err(e) => return Err(e),
    };
    if quantum_target_error.is_some() {
        let last = quantum.accessible_modes().pop().ok_or(Error::InvalidChain)?;
        quantum.tamper(&last, &x)?;
    }
    let quantum_fidelity_after = quantum.fidelity()?;
    let invalidated_range_quantum = if quantum.decode().is_err() { (0, n) } else { (n, n) };
    Ok(TamperContrast {
        n_blocks: n,
        tamper_index,
        invalidated_range_classical: (first_bad, n),
        invalidated_range_quantum,
        quantum_target_error,
        quantum_fidelity_after,
    })
}
