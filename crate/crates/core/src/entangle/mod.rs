//! Entanglement detection and measures for bipartite states.

mod chsh;
mod measures;

pub use chsh::{
    bloch_observable, chsh_monte_carlo, chsh_value, correlation_matrix, horodecki_max, optimize_chsh,
    werner_chsh_crossing, ChshEstimate, ChshOptimum, ObservableSettings, GRID,
};
pub use measures::{
    concurrence, ghz_witness, ppt_min_eigenvalue, ppt_spectrum, schmidt, state_distance, witness_value,
    SchmidtDecomposition, StateDistance, WernerState,
};
