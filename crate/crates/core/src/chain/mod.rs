//! Quantum blockchain on a temporal GHZ state, and a toy classical hash chain.

mod classical;
mod quantum;

pub use classical::{classical_chain_tamper_contrast, mix, splitmix64, ClassicalBlock, ClassicalChain, TamperContrast};
pub use quantum::{
    block_state, chain_target, encode_block, parse_records, read_chain_state, record_string, ChainExport,
    QuantumChain, Record, StatisticsDecode, FUSION_RETRY_CAP, VALIDITY_GAP,
};

#[cfg(test)]
mod tests;
