//! Gleason density-matrix reconstruction and temporal (Leggett-Garg type) inequalities.

mod gleason;
mod temporal_ineq;

pub use gleason::{
    decoherence_average, gleason_decohere, gleason_qubit_pauli, gleason_reconstruct, gleason_reconstruct_raw,
    Valuation, PSD_REPAIR_TOL, TOL_RECON,
};
pub use temporal_ineq::{
    entropic_lg_check, entropic_lg_scan, lg_k3, lg_k3_max, optimize_temporal_chsh, temporal_chsh, two_time_correlator,
    EntropicLg, EntropicScan, K3Max, MarkovModel, PrecessionModel, TemporalChshSettings, TemporalModel,
};

#[cfg(test)]
mod tests;
