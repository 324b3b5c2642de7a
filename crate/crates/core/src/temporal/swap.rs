use crate::error::Result;
use crate::qcore::{BellLabel, RandomSource, StateVector};

use super::{BellOutcome, EventKind, ModeId, TemporalRegister};

/// Two-pair swap: pair `1-2` at `t=0`, pair `3-4` at `t=τ`, photons `2` and `4` delayed by `τ`,
/// Bell measurement on `2` and `3` at `t=τ`.
#[derive(Clone, Debug)]
pub struct SwapRun {
    pub register: TemporalRegister,
    pub first: ModeId,
    pub last: ModeId,
    pub middle: BellOutcome,
    /// Outcome of the optional measurement of photon `1` at `t=0`.
    pub first_outcome: Option<usize>,
}

/// Runs the swap with sampled outcomes. With `early_basis`, photon `1` is measured at `t=0`,
/// before photons `3` and `4` exist.
pub fn entanglement_swap(
    label: BellLabel,
    early_basis: Option<&[StateVector]>,
    rng: &mut RandomSource,
) -> Result<SwapRun> {
    let mut reg = TemporalRegister::new();
    let (first, m2) = reg.create_pair(label, ("1", "2"), 0)?;
    let m2 = reg.delay(&m2, 1)?;
    let first_outcome = match early_basis {
        Some(basis) => Some(reg.measure_single(&first, basis, rng)?.0),
        None => None,
    };
    let (m3, m4) = reg.create_pair(label, ("3", "4"), 1)?;
    let last = reg.delay(&m4, 1)?;
    let middle = reg.bell_measure(&m2, &m3, rng)?;
    Ok(SwapRun { register: reg, first, last, middle, first_outcome })
}

/// The swap post-selected on middle outcome `middle`. Returns the register and the outcome
/// probability; the outer photons are `1@0` and `4@2`.
pub fn swap_postselected(label: BellLabel, middle: BellLabel) -> Result<(TemporalRegister, f64)> {
    let mut reg = TemporalRegister::new();
    let (_, m2) = reg.create_pair(label, ("1", "2"), 0)?;
    let m2 = reg.delay(&m2, 1)?;
    let (m3, m4) = reg.create_pair(label, ("3", "4"), 1)?;
    reg.delay(&m4, 1)?;
    let p = reg.bell_project(&m2, &m3, middle)?;
    Ok((reg, p))
}

impl TemporalRegister {
    /// True when the log shows a measurement consuming spatial mode `consumed` strictly before,
    /// in both log order and time, the creation of spatial mode `created`.
    pub fn consumed_before_created(&self, consumed: &str, created: &str) -> bool {
        let find = |kind: EventKind, label: &str| {
            self.events()
                .iter()
                .enumerate()
                .find(|(_, e)| e.event == kind && e.modes.iter().any(|m| m.spatial == label))
                .map(|(i, e)| (i, e.t))
        };
        match (find(EventKind::Measure, consumed), find(EventKind::Create, created)) {
            (Some((i, tm)), Some((j, tc))) => i < j && tm < tc,
            _ => false,
        }
    }
}
