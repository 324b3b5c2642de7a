//! Shannon and von Neumann entropies, typical-set coding and the entropic uncertainty bound.
//!
//! All entropies are in bits.

mod quantum;
mod shannon;
mod typical;

pub use quantum::{entropic_uncertainty_bound, quantum_conditional_entropy, quantum_mutual_information, von_neumann_entropy};
pub use shannon::{
    binary_entropy, derived_entropies, relative_entropy, shannon_entropy, DerivedEntropies, JointDist, ProbDist,
};
pub use typical::{
    surprisal_rate, typical_codec_roundtrip, typical_membership, typical_set_stats, Codeword, Membership,
    RoundtripStats, TypicalCodec, TypicalSetStats, MAX_BLOCK,
};
