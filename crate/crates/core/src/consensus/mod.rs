//! GHZ verification by phase-rotated measurements (the θ-protocol) over a node network.

mod bounds;
mod network;
mod theta;

pub use bounds::{
    check_fidelity_bounds, ghz_fidelity, max_corrected_fidelity, CheatSample, FidelityBoundsReport, DISHONEST_SLACK,
};
pub use network::{AdmissionReport, Coalition, Network, Node, PassEstimate, RoundResult};
pub use theta::{
    averaged_pass_probability, outcome_distribution, sample_theta_angles, theta_basis, theta_measure,
    violation_probability, ThetaAngles,
};

#[cfg(test)]
mod tests;
