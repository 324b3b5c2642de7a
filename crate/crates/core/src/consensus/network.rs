use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theta::{sample_theta_angles, Ensemble};
use crate::chain::{QuantumChain, Record};
use crate::error::{Error, Result};
use crate::qcore::{DensityOperator, Operator, RandomSource};

/// A network participant. A dishonest node applies `cheat` to its qubit before measuring.
#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    pub honest: bool,
    pub cheat: Option<Operator>,
}

/// Joint unitary applied by a coalition of dishonest nodes.
#[derive(Clone, Debug)]
pub struct Coalition {
    pub nodes: Vec<usize>,
    pub unitary: Operator,
}

#[derive(Clone, Debug)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub coalition: Option<Coalition>,
    /// Each node's copy of the chain; `None` until the first admitted block.
    pub local_chains: Vec<Option<QuantumChain>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundResult {
    pub verifier: usize,
    pub angles: Vec<f64>,
    pub multiple: u64,
    pub outcomes: Vec<u8>,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassEstimate {
    pub rounds: u64,
    pub passes: u64,
    pub p_hat: f64,
    pub std_err: f64,
}

impl PassEstimate {
    fn from_counts(passes: u64, rounds: u64) -> Self {
        let p_hat = passes as f64 / rounds as f64;
        Self { rounds, passes, p_hat, std_err: (p_hat * (1.0 - p_hat) / rounds as f64).sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissionReport {
    pub accepted: bool,
    pub verifier_rounds: u64,
    pub pass_rate: f64,
    pub threshold: f64,
    pub extended_nodes: Vec<usize>,
    pub warnings: Vec<String>,
}

impl Network {
    /// `n` honest nodes.
    pub fn honest(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("network needs at least one node".into()));
        }
        Ok(Self {
            nodes: (0..n).map(|id| Node { id, honest: true, cheat: None }).collect(),
            coalition: None,
            local_chains: vec![None; n],
        })
    }

    /// Marks node `id` dishonest with a single-qubit cheat.
    pub fn with_cheat(mut self, id: usize, cheat: Operator) -> Result<Self> {
        if cheat.dim() != 2 || !cheat.is_unitary(1e-9) {
            return Err(Error::InvalidArgument("cheat must be a single-qubit unitary".into()));
        }
        let node = self.nodes.get_mut(id).ok_or_else(|| Error::InvalidArgument(format!("no node {id}")))?;
        node.honest = false;
        node.cheat = Some(cheat);
        Ok(self)
    }

    /// Installs a joint cheat on the listed (dishonest) nodes.
    pub fn with_coalition(mut self, nodes: Vec<usize>, unitary: Operator) -> Result<Self> {
        if unitary.dim() != 1 << nodes.len() || !unitary.is_unitary(1e-9) {
            return Err(Error::InvalidArgument("coalition unitary does not match its nodes".into()));
        }
        for &id in &nodes {
            self.nodes.get_mut(id).ok_or_else(|| Error::InvalidArgument(format!("no node {id}")))?.honest = false;
        }
        self.coalition = Some(Coalition { nodes, unitary });
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn select_verifier(&self, rng: &mut RandomSource) -> usize {
        rng.below(self.nodes.len())
    }

    /// The state the nodes actually measure, after every cheat.
    pub fn effective_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let n = self.nodes.len();
        if rho.dim() != 1 << n {
            return Err(Error::DimensionMismatch(format!("{n} nodes for dim {}", rho.dim())));
        }
        let mut u = Operator::identity(1);
        for node in &self.nodes {
            u = u.tensor(node.cheat.as_ref().unwrap_or(&Operator::identity(2)))?;
        }
        let mut out = rho.evolve(&u)?;
        if let Some(c) = &self.coalition {
            let full = embed(&c.unitary, &c.nodes, n)?;
            out = out.evolve(&full)?;
        }
        Ok(out)
    }

    fn run_on(&self, ens: &Ensemble, rng: &mut RandomSource) -> Result<RoundResult> {
        let verifier = self.select_verifier(rng);
        let theta = sample_theta_angles(ens.num_qubits(), rng)?;
        let outcomes = ens.sample(&theta.angles, rng)?;
        let parity = outcomes.iter().fold(0u8, |a, y| a ^ y);
        Ok(RoundResult {
            verifier,
            pass: parity == theta.required_parity(),
            angles: theta.angles,
            multiple: theta.multiple,
            outcomes,
        })
    }

    /// One verification round on a fresh copy of `candidate`.
    pub fn run_round(&self, candidate: &DensityOperator, rng: &mut RandomSource) -> Result<RoundResult> {
        let eff = self.effective_state(candidate)?;
        self.run_on(&Ensemble::new(&eff)?, rng)
    }

    /// `rounds` independent rounds; round `r` draws from `rng.fork(r)`.
    pub fn estimate_pass_probability(
        &self,
        candidate: &DensityOperator,
        rounds: u64,
        rng: &RandomSource,
    ) -> Result<PassEstimate> {
        if rounds == 0 {
            return Err(Error::InvalidArgument("need at least one round".into()));
        }
        let ens = Ensemble::new(&self.effective_state(candidate)?)?;
        let passes = (0..rounds)
            .into_par_iter()
            .map(|r| self.run_on(&ens, &mut rng.fork(r)).map(|res| res.pass as u64))
            .sum::<Result<u64>>()?;
        Ok(PassEstimate::from_counts(passes, rounds))
    }

    /// Verifies `candidate` over `rounds` copies; on acceptance every honest node appends `record`.
    pub fn admit_block(
        &mut self,
        candidate: &DensityOperator,
        record: Record,
        rounds: u64,
        threshold: f64,
        rng: &mut RandomSource,
    ) -> Result<AdmissionReport> {
        if rounds == 0 {
            return Err(Error::InvalidArgument("admission needs at least one candidate copy".into()));
        }
        let mut warnings = Vec::new();
        if threshold <= 0.0 {
            warnings.push("threshold <= 0 accepts every candidate".to_string());
        }
        let est = self.estimate_pass_probability(candidate, rounds, &rng.fork(u64::MAX))?;
        let accepted = est.p_hat >= threshold;
        let mut extended_nodes = Vec::new();
        if accepted {
            for node in self.nodes.iter().filter(|n| n.honest) {
                match &mut self.local_chains[node.id] {
                    Some(chain) => {
                        let t = chain.records().len() as u64;
                        chain.append(record, rng)?;
                        chain.advance_clock(t + 1)?;
                    }
                    slot @ None => *slot = Some(QuantumChain::from_records(&[record], rng)?),
                }
                extended_nodes.push(node.id);
            }
        }
        Ok(AdmissionReport {
            accepted,
            verifier_rounds: rounds,
            pass_rate: est.p_hat,
            threshold,
            extended_nodes,
            warnings,
        })
    }
}

/// Lifts a unitary on `targets` to the full `n`-qubit space.
pub(crate) fn embed(u: &Operator, targets: &[usize], n: usize) -> Result<Operator> {
    let dim = 1usize << n;
    let mut cols = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        let basis = crate::qcore::StateVector::basis(dim, j)?;
        cols.push(basis.apply_on(u, targets)?);
    }
    let mut entries = vec![crate::scalar::Cx::new(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            entries[i * dim + j] = col.amplitude(i);
        }
    }
    Operator::new(dim, entries)
}
