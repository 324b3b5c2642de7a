use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    bell_state, BellLabel, DensityOperator, Operator, RandomSource, StateVector, DRIFT_TOL, MAX_QUBITS,
};
use crate::scalar::Cx;

/// A photon mode: spatial label plus time step in units of τ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId {
    pub spatial: String,
    pub time_step: u64,
}

impl ModeId {
    pub fn new(spatial: impl Into<String>, time_step: u64) -> Self {
        Self { spatial: spatial.into(), time_step }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.spatial, self.time_step)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub id: ModeId,
    pub consumed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Create,
    Delay,
    Measure,
    Fuse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub event: EventKind,
    pub modes: Vec<ModeId>,
    pub t: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellOutcome {
    pub label: BellLabel,
    pub probability: f64,
}

/// Live photons plus the history of every mode the register ever held.
///
/// Qubit `k` of [`state`](Self::state) is the `k`-th entry of [`live_modes`](Self::live_modes).
/// Events carry non-decreasing times; `clock` is the time of the latest event.
#[derive(Clone, Debug)]
pub struct TemporalRegister {
    state: StateVector,
    modes: Vec<ModeRecord>,
    live: Vec<usize>,
    events: Vec<Event>,
    clock: u64,
    valid: bool,
}

impl Default for TemporalRegister {
    fn default() -> Self {
        Self::new()
    }
}

/// `F_c = |0c⟩⟨0c| + |1c̄⟩⟨1c̄|`; `c = 0` is the PBS projector `|hh⟩⟨hh| + |vv⟩⟨vv|`.
pub fn parity_projector(c: u8) -> Operator {
    let c = (c & 1) as usize;
    let mut entries = vec![Cx::new(0.0, 0.0); 16];
    for k in [c, 3 - c] {
        entries[k * 4 + k] = Cx::new(1.0, 0.0);
    }
    Operator::new(4, entries).expect("4x4 projector")
}

impl TemporalRegister {
    pub fn new() -> Self {
        Self {
            state: StateVector::basis(1, 0).expect("unit state"),
            modes: Vec::new(),
            live: Vec::new(),
            events: Vec::new(),
            clock: 0,
            valid: true,
        }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn modes(&self) -> &[ModeRecord] {
        &self.modes
    }

    pub fn live_modes(&self) -> Vec<ModeId> {
        self.live.iter().map(|&i| self.modes[i].id.clone()).collect()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    /// Live and not yet in the past.
    pub fn is_accessible(&self, mode: &ModeId) -> bool {
        self.qubit_of(mode).is_ok() && mode.time_step >= self.clock
    }

    /// Event log as JSON lines.
    pub fn event_log_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
            .collect()
    }

    /// Qubit index of a live mode.
    pub fn qubit_of(&self, mode: &ModeId) -> Result<usize> {
        let idx = self
            .modes
            .iter()
            .position(|r| &r.id == mode)
            .ok_or_else(|| Error::UnknownMode(mode.to_string()))?;
        if self.modes[idx].consumed {
            return Err(Error::ConsumedMode(mode.to_string()));
        }
        Ok(self.live.iter().position(|&i| i == idx).expect("live mode"))
    }

    fn check_valid(&self) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::InvalidRegister)
        }
    }

    fn check_time(&self, t: u64) -> Result<()> {
        if t < self.clock {
            return Err(Error::TimeOrder { requested: t, clock: self.clock });
        }
        Ok(())
    }

    fn log(&mut self, event: EventKind, modes: Vec<ModeId>, t: u64) {
        self.clock = t;
        self.events.push(Event { event, modes, t });
    }

    /// Moves the clock forward without an event.
    pub fn advance_clock(&mut self, t: u64) -> Result<()> {
        self.check_time(t)?;
        self.clock = t;
        Ok(())
    }

    /// Appends fresh modes in `psi`, all created at time `t`.
    pub fn create(&mut self, psi: &StateVector, spatial: &[&str], t: u64) -> Result<Vec<ModeId>> {
        self.check_valid()?;
        self.check_time(t)?;
        if psi.num_qubits() != Some(spatial.len()) {
            return Err(Error::DimensionMismatch(format!("{} labels for dim {}", spatial.len(), psi.dim())));
        }
        let total = self.live.len() + spatial.len();
        if total > MAX_QUBITS {
            return Err(Error::TooLarge { dim: 1usize << total.min(63), max_qubits: MAX_QUBITS });
        }
        let ids: Vec<ModeId> = spatial.iter().map(|s| ModeId::new(*s, t)).collect();
        for (k, id) in ids.iter().enumerate() {
            if self.modes.iter().any(|r| &r.id == id) || ids[..k].contains(id) {
                return Err(Error::DuplicateMode(id.to_string()));
            }
        }
        self.state = self.state.tensor(psi)?;
        for id in &ids {
            self.live.push(self.modes.len());
            self.modes.push(ModeRecord { id: id.clone(), consumed: false });
        }
        self.log(EventKind::Create, ids.clone(), t);
        Ok(ids)
    }

    /// Creates a Bell pair on two spatial modes at time `t`.
    pub fn create_pair(&mut self, label: BellLabel, spatial: (&str, &str), t: u64) -> Result<(ModeId, ModeId)> {
        let ids = self.create(&bell_state(label), &[spatial.0, spatial.1], t)?;
        Ok((ids[0].clone(), ids[1].clone()))
    }

    /// Sends a live mode through a delay line of `dt` steps. Returns the relabeled mode.
    pub fn delay(&mut self, mode: &ModeId, dt: u64) -> Result<ModeId> {
        self.check_valid()?;
        if dt == 0 {
            return Err(Error::InvalidArgument("delay must be positive".into()));
        }
        let q = self.qubit_of(mode)?;
        let new = ModeId::new(mode.spatial.clone(), mode.time_step + dt);
        if self.modes.iter().any(|r| r.id == new) {
            return Err(Error::DuplicateMode(new.to_string()));
        }
        self.modes[self.live[q]].id = new.clone();
        let t = self.clock;
        self.log(EventKind::Delay, vec![new.clone()], t);
        Ok(new)
    }

    fn consume(&mut self, qubits: &[usize]) {
        let mut sorted = qubits.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for q in sorted {
            let idx = self.live.remove(q);
            self.modes[idx].consumed = true;
        }
    }

    fn event_time(&self, modes: &[&ModeId]) -> Result<u64> {
        let t = modes.iter().map(|m| m.time_step).max().unwrap_or(self.clock);
        self.check_time(t)?;
        Ok(t)
    }

    /// Post-selects the Bell outcome `label` on two live modes, consuming them.
    /// Returns the outcome probability.
    pub fn bell_project(&mut self, m1: &ModeId, m2: &ModeId, label: BellLabel) -> Result<f64> {
        let (q1, q2, t) = self.pair_targets(m1, m2)?;
        let (p, rest) = self.state.contract(&bell_state(label), &[q1, q2])?;
        let rest = rest.filter(|_| p > DRIFT_TOL).ok_or(Error::DegenerateMeasurement(p))?;
        self.state = rest;
        self.consume(&[q1, q2]);
        self.log(EventKind::Measure, vec![m1.clone(), m2.clone()], t);
        Ok(p)
    }

    /// Born probabilities of the four Bell outcomes on two live modes.
    pub fn bell_distribution(&self, m1: &ModeId, m2: &ModeId) -> Result<[f64; 4]> {
        let (q1, q2, _) = self.pair_targets(m1, m2)?;
        let mut out = [0.0; 4];
        for (k, label) in BellLabel::ALL.iter().enumerate() {
            out[k] = self.state.contract(&bell_state(*label), &[q1, q2])?.0;
        }
        Ok(out)
    }

    /// Bell-state measurement at time `max(t₁, t₂)`; both modes are consumed.
    pub fn bell_measure(&mut self, m1: &ModeId, m2: &ModeId, rng: &mut RandomSource) -> Result<BellOutcome> {
        let probs = self.bell_distribution(m1, m2)?;
        let label = BellLabel::ALL[rng.categorical(&probs)];
        let probability = self.bell_project(m1, m2, label)?;
        Ok(BellOutcome { label, probability })
    }

    fn pair_targets(&self, m1: &ModeId, m2: &ModeId) -> Result<(usize, usize, u64)> {
        self.check_valid()?;
        if m1 == m2 {
            return Err(Error::SelfMeasurement);
        }
        let q1 = self.qubit_of(m1)?;
        let q2 = self.qubit_of(m2)?;
        Ok((q1, q2, self.event_time(&[m1, m2])?))
    }

    /// Projects a single live mode onto `outcome`, consuming it. Returns the probability.
    pub fn project_single(&mut self, mode: &ModeId, outcome: &StateVector) -> Result<f64> {
        self.check_valid()?;
        let q = self.qubit_of(mode)?;
        let t = self.event_time(&[mode])?;
        let (p, rest) = self.state.contract(outcome, &[q])?;
        let rest = rest.filter(|_| p > DRIFT_TOL).ok_or(Error::DegenerateMeasurement(p))?;
        self.state = rest;
        self.consume(&[q]);
        self.log(EventKind::Measure, vec![mode.clone()], t);
        Ok(p)
    }

    /// Measures one live mode in an orthonormal qubit basis. Returns `(index, probability)`.
    pub fn measure_single(
        &mut self,
        mode: &ModeId,
        basis: &[StateVector],
        rng: &mut RandomSource,
    ) -> Result<(usize, f64)> {
        crate::qcore::check_basis(basis, 2)?;
        let q = self.qubit_of(mode)?;
        let probs: Vec<f64> =
            basis.iter().map(|b| self.state.contract(b, &[q]).map(|r| r.0)).collect::<Result<_>>()?;
        let k = rng.categorical(&probs);
        let p = self.project_single(mode, &basis[k])?;
        Ok((k, p))
    }

    /// Deterministic parity fusion: projects two live modes with `F_c` and renormalizes.
    /// Both modes stay live. Returns the success probability.
    pub fn fuse_postselect(&mut self, m1: &ModeId, m2: &ModeId, c: u8) -> Result<f64> {
        let (q1, q2, t) = self.pair_targets(m1, m2)?;
        let (p, post) = self.state.project_on(&parity_projector(c), &[q1, q2])?;
        let post = post.filter(|_| p > DRIFT_TOL).ok_or(Error::DegenerateMeasurement(p))?;
        self.state = post;
        self.log(EventKind::Fuse, vec![m1.clone(), m2.clone()], t);
        Ok(p)
    }

    /// Probability that `F_c` on the two modes succeeds.
    pub fn fusion_probability(&self, m1: &ModeId, m2: &ModeId, c: u8) -> Result<f64> {
        let (q1, q2, _) = self.pair_targets(m1, m2)?;
        Ok(self.state.project_on(&parity_projector(c), &[q1, q2])?.0)
    }

    /// Sampled parity fusion. On failure the register is invalidated.
    pub fn fuse(&mut self, m1: &ModeId, m2: &ModeId, c: u8, rng: &mut RandomSource) -> Result<bool> {
        let p = self.fusion_probability(m1, m2, c)?;
        if p > DRIFT_TOL && rng.uniform() < p {
            self.fuse_postselect(m1, m2, c)?;
            Ok(true)
        } else {
            let t = self.event_time(&[m1, m2])?;
            self.log(EventKind::Fuse, vec![m1.clone(), m2.clone()], t);
            self.valid = false;
            Ok(false)
        }
    }

    /// PBS fusion: keeps `|hh⟩` and `|vv⟩` on the two modes.
    pub fn pbs_fuse(&mut self, m1: &ModeId, m2: &ModeId, rng: &mut RandomSource) -> Result<bool> {
        self.fuse(m1, m2, 0, rng)
    }

    /// Applies a unitary to live modes.
    pub fn apply_local(&mut self, op: &Operator, modes: &[ModeId]) -> Result<()> {
        self.check_valid()?;
        let targets: Vec<usize> = modes.iter().map(|m| self.qubit_of(m)).collect::<Result<_>>()?;
        if !op.is_unitary(1e-9) {
            return Err(Error::InvalidArgument("local operation must be unitary".into()));
        }
        self.state = self.state.apply_on(op, &targets)?;
        Ok(())
    }

    /// The live state with qubits reordered to follow `order` (a permutation of the live modes).
    pub fn state_in_order(&self, order: &[ModeId]) -> Result<StateVector> {
        let qubits: Vec<usize> = order.iter().map(|m| self.qubit_of(m)).collect::<Result<_>>()?;
        self.state.permute_qubits(&qubits)
    }

    /// Reduced density operator of the listed live modes, in that order.
    pub fn reduced(&self, modes: &[ModeId]) -> Result<DensityOperator> {
        let keep: Vec<usize> = modes.iter().map(|m| self.qubit_of(m)).collect::<Result<_>>()?;
        let n = self.live.len();
        let rho = DensityOperator::from_pure(&self.state);
        rho.partial_trace(&vec![2; n], &keep)
    }
}
