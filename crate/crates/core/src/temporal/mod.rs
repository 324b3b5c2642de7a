//! Photon modes labelled by space and time, entanglement swapping and PBS fusion.
//!
//! Polarization `h`/`v` is the computational `|0⟩`/`|1⟩`. Consumed modes are removed from
//! the state vector; their records stay in the register history.

mod fusion;
mod register;
mod swap;

pub use fusion::{
    fuse_pairs, ghz_density_recursive, h_graph_state, temporal_ghz_closed_form, FusedChain, DENSITY_MAX_QUBITS,
};
pub use register::{parity_projector, BellOutcome, Event, EventKind, ModeId, ModeRecord, TemporalRegister};
pub use swap::{entanglement_swap, swap_postselected, SwapRun};

#[cfg(test)]
mod tests;
