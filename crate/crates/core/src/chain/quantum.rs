use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{bell_state, hadamard, BellLabel, Operator, RandomSource, StateVector, MAX_QUBITS};
use crate::scalar::Cx;
use crate::temporal::{ModeId, TemporalRegister};

/// Fusion attempts per append before giving up.
pub const FUSION_RETRY_CAP: u32 = 64;

/// Fidelity below `1 - VALIDITY_GAP` marks a chain invalid.
pub const VALIDITY_GAP: f64 = 1e-6;

/// Two classical bits carried by one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Record {
    pub r1: u8,
    pub r2: u8,
}

impl Record {
    pub fn new(r1: u8, r2: u8) -> Result<Self> {
        if r1 > 1 || r2 > 1 {
            return Err(Error::InvalidArgument(format!("record bits must be 0/1, got {r1}{r2}")));
        }
        Ok(Self { r1, r2 })
    }

    pub fn all() -> [Record; 4] {
        [Record { r1: 0, r2: 0 }, Record { r1: 0, r2: 1 }, Record { r1: 1, r2: 0 }, Record { r1: 1, r2: 1 }]
    }

    pub fn random(rng: &mut RandomSource) -> Self {
        Record { r1: rng.bit(), r2: rng.bit() }
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.r1, self.r2)
    }
}

impl FromStr for Record {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().as_bytes() {
            [a @ (b'0' | b'1'), b @ (b'0' | b'1')] => Ok(Record { r1: a - b'0', r2: b - b'0' }),
            _ => Err(Error::InvalidArgument(format!("record must be two bits, got {s:?}"))),
        }
    }
}

impl Serialize for Record {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Record {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `"00,10,11"`.
pub fn parse_records(s: &str) -> Result<Vec<Record>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

pub fn record_string(records: &[Record]) -> String {
    records.iter().map(Record::to_string).collect()
}

/// `β_{r₁r₂} = (|0 r₂⟩ + (-1)^{r₁} |1 r̄₂⟩)/√2`.
pub fn block_state(r: Record) -> StateVector {
    bell_state(BellLabel::from_bits(r.r1, r.r2))
}

/// `(|0 r₂ … r₂ₙ⟩ + (-1)^{r₁} |1 r̄₂ … r̄₂ₙ⟩)/√2` over the chain's modes in temporal order.
pub fn chain_target(records: &[Record]) -> Result<StateVector> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    let n = 2 * records.len();
    if n > MAX_QUBITS {
        return Err(Error::TooLarge { dim: 1usize << n.min(63), max_qubits: MAX_QUBITS });
    }
    let bits: Vec<usize> = records.iter().flat_map(|r| [r.r1 as usize, r.r2 as usize]).collect();
    let mut first = 0usize;
    for &b in &bits[1..] {
        first = (first << 1) | b;
    }
    let mask = (1usize << n) - 1;
    let second = !first & mask;
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if records[0].r1 == 1 { -1.0 } else { 1.0 };
    let mut amps = vec![Cx::new(0.0, 0.0); 1 << n];
    amps[first] = Cx::new(amp, 0.0);
    amps[second] = Cx::new(sign * amp, 0.0);
    StateVector::new(amps)
}

/// `iY = [[0, 1], [-1, 0]]`.
fn iy() -> Operator {
    Operator::from_reals(2, &[0.0, 1.0, -1.0, 0.0]).expect("2x2")
}

/// The quantum blockchain: one temporal Bell block per record, fused into a temporal GHZ state.
///
/// Block `k` lives on modes `p{2k}@k` and `p{2k+1}@k+1`. Appending block `k` at `t = k` applies
/// `(iY)^{r₁}` to its first photon and fuses that photon with `p{2k-1}@k` using the parity
/// projector `F_c`, `c = r_{2k} ⊕ r₁` (the PBS projector up to local bit flips). After `n` blocks the
/// clock reads `n`, so only the last photon is accessible.
#[derive(Clone, Debug)]
pub struct QuantumChain {
    register: TemporalRegister,
    records: Vec<Record>,
    timestamps: Vec<u64>,
    modes: Vec<ModeId>,
    valid: bool,
    fusion_attempts: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainExport {
    pub records: Vec<Record>,
    pub timestamps: Vec<u64>,
    pub valid: bool,
    pub fidelity: f64,
}

/// A single block in a fresh register at time `t`.
pub fn encode_block(r: Record, t: u64) -> Result<TemporalRegister> {
    let mut reg = TemporalRegister::new();
    reg.advance_clock(t)?;
    let ids = reg.create(&block_state(r), &["p0", "p1"], t)?;
    reg.delay(&ids[1], 1)?;
    Ok(reg)
}

impl QuantumChain {
    pub fn new(first: Record) -> Result<Self> {
        let mut register = TemporalRegister::new();
        let ids = register.create(&block_state(first), &["p0", "p1"], 0)?;
        let second = register.delay(&ids[1], 1)?;
        Ok(Self {
            register,
            records: vec![first],
            timestamps: vec![0],
            modes: vec![ids[0].clone(), second],
            valid: true,
            fusion_attempts: 0,
        })
    }

    pub fn from_records(records: &[Record], rng: &mut RandomSource) -> Result<Self> {
        let (first, rest) = records.split_first().ok_or_else(|| Error::InvalidArgument("empty chain".into()))?;
        let mut chain = Self::new(*first)?;
        for r in rest {
            chain.append(*r, rng)?;
        }
        chain.register.advance_clock(records.len() as u64)?;
        Ok(chain)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn timestamps(&self) -> &[u64] {
        &self.timestamps
    }

    /// Modes in temporal order.
    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn register(&self) -> &TemporalRegister {
        &self.register
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    /// Total fusion attempts, including retries.
    pub fn fusion_attempts(&self) -> u32 {
        self.fusion_attempts
    }

    /// Chain state with qubits in temporal order.
    pub fn state(&self) -> Result<StateVector> {
        self.register.state_in_order(&self.modes)
    }

    /// Fidelity with the target state of the stored records.
    pub fn fidelity(&self) -> Result<f64> {
        self.state()?.fidelity(&chain_target(&self.records)?)
    }

    /// Appends a block, retrying failed fusions from a snapshot.
    pub fn append(&mut self, r: Record, rng: &mut RandomSource) -> Result<()> {
        if !self.valid {
            return Err(Error::InvalidChain);
        }
        let k = self.records.len();
        if 2 * (k + 1) > MAX_QUBITS {
            return Err(Error::TooLarge { dim: 1usize << (2 * k + 2), max_qubits: MAX_QUBITS });
        }
        let t = k as u64;
        let prev_last = self.modes.last().expect("nonempty chain").clone();
        let c = self.records[k - 1].r2 ^ r.r1;
        for _ in 0..FUSION_RETRY_CAP {
            self.fusion_attempts += 1;
            let mut reg = self.register.clone();
            let ids = reg.create(&block_state(r), &[&format!("p{}", 2 * k), &format!("p{}", 2 * k + 1)], t)?;
            if r.r1 == 1 {
                reg.apply_local(&iy(), &ids[..1])?;
            }
            let second = reg.delay(&ids[1], 1)?;
            if reg.fuse(&prev_last, &ids[0], c, rng)? {
                self.register = reg;
                self.records.push(r);
                self.timestamps.push(t);
                self.modes.push(ids[0].clone());
                self.modes.push(second);
                return Ok(());
            }
        }
        Err(Error::FusionRetriesExhausted(FUSION_RETRY_CAP))
    }

    /// Moves the chain clock to `t`; photons older than `t` become inaccessible.
    pub fn advance_clock(&mut self, t: u64) -> Result<()> {
        self.register.advance_clock(t)
    }

    /// Reads `r₁ … r₂ₙ` from the amplitudes, requiring the two-branch form.
    pub fn read_record_string(&self) -> Result<String> {
        let state = self.state()?;
        read_chain_state(&state)
    }

    /// Record string, checked against the stored records.
    pub fn decode(&self) -> Result<String> {
        let read = self.read_record_string()?;
        if read != record_string(&self.records) || self.fidelity()? < 1.0 - VALIDITY_GAP {
            return Err(Error::DecodeMismatch);
        }
        Ok(read)
    }

    /// Applies a unitary to one chain mode. Only photons at or after the clock can be touched.
    pub fn tamper(&mut self, mode: &ModeId, op: &Operator) -> Result<f64> {
        if !self.modes.contains(mode) {
            return Err(Error::UnknownMode(mode.to_string()));
        }
        if !self.register.is_accessible(mode) {
            return Err(Error::TemporalInaccessible(mode.to_string()));
        }
        self.register.apply_local(op, std::slice::from_ref(mode))?;
        let f = self.fidelity()?;
        self.valid = f >= 1.0 - VALIDITY_GAP;
        Ok(f)
    }

    /// Modes an attacker can still reach.
    pub fn accessible_modes(&self) -> Vec<ModeId> {
        self.modes.iter().filter(|m| self.register.is_accessible(m)).cloned().collect()
    }

    pub fn export(&self) -> Result<ChainExport> {
        Ok(ChainExport {
            records: self.records.clone(),
            timestamps: self.timestamps.clone(),
            valid: self.valid,
            fidelity: self.fidelity()?,
        })
    }

    /// Decodes from `copies` sampled copies: Z-basis shots give `r₂…r₂ₙ` relative to the first
    /// photon, the parity of X-basis shots gives `(-1)^{r₁}`. Majority vote per bit.
    pub fn statistics_decode(&self, copies: usize, rng: &mut RandomSource) -> Result<StatisticsDecode> {
        if copies == 0 {
            return Err(Error::InvalidArgument("need at least one copy".into()));
        }
        let state = self.state()?;
        let n = 2 * self.records.len();
        let z = cumulative(&state);
        let mut x_state = state.clone();
        for q in 0..n {
            x_state = x_state.apply_on(&hadamard(), &[q])?;
        }
        let x = cumulative(&x_state);
        let mut ones = vec![0usize; n];
        for _ in 0..copies {
            let shot = sample(&z, rng);
            for (j, count) in ones.iter_mut().enumerate().skip(1) {
                let bit = |q: usize| (shot >> (n - 1 - q)) & 1;
                *count += bit(j) ^ bit(0);
            }
            let parity = (sample(&x, rng).count_ones() & 1) as usize;
            ones[0] += parity;
        }
        let bits: String = ones.iter().map(|&c| if 2 * c > copies { '1' } else { '0' }).collect();
        let agreement = ones.iter().map(|&c| c.max(copies - c) as f64 / copies as f64).fold(1.0, f64::min);
        Ok(StatisticsDecode { bits, copies, agreement })
    }
}

/// Outcome of the sampling decoder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatisticsDecode {
    pub bits: String,
    pub copies: usize,
    /// Smallest per-bit majority fraction.
    pub agreement: f64,
}

fn cumulative(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn sample(cdf: &[f64], rng: &mut RandomSource) -> usize {
    let u = rng.uniform() * cdf.last().copied().unwrap_or(1.0);
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Reads a two-branch state `(|0 s⟩ ± |1 s̄⟩)/√2` as the bit string `r₁ s`.
pub fn read_chain_state(state: &StateVector) -> Result<String> {
    let n = state.num_qubits().ok_or(Error::DecodeMismatch)?;
    let support: Vec<usize> = (0..state.dim()).filter(|&i| state.amplitude(i).norm_sqr() > 1e-12).collect();
    if support.len() != 2 {
        return Err(Error::DecodeMismatch);
    }
    let (lo, hi) = (support[0], support[1]);
    let mask = (1usize << n) - 1;
    let half = 0.5;
    let (a, b) = (state.amplitude(lo), state.amplitude(hi));
    if lo ^ hi != mask || (a.norm_sqr() - half).abs() > VALIDITY_GAP || (b.norm_sqr() - half).abs() > VALIDITY_GAP {
        return Err(Error::DecodeMismatch);
    }
    let ratio = b / a;
    let r1 = if (ratio - Cx::new(1.0, 0.0)).norm() < 1e-6 {
        '0'
    } else if (ratio + Cx::new(1.0, 0.0)).norm() < 1e-6 {
        '1'
    } else {
        return Err(Error::DecodeMismatch);
    };
    let mut out = String::with_capacity(n);
    out.push(r1);
    for q in 1..n {
        out.push(if (lo >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' });
    }
    Ok(out)
}
