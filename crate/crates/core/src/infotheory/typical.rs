use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProbDist;
use crate::error::{Error, Result};
use crate::qcore::RandomSource;

/// Largest block length the explicit codec enumerates.
pub const MAX_BLOCK: usize = 24;

/// Verdict of the ε-typicality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Typical,
    Atypical,
    /// The sequence contains a zero-probability symbol.
    ZeroProbability,
}

impl Membership {
    pub fn is_typical(self) -> bool {
        self == Membership::Typical
    }
}

fn check_symbols(seq: &[usize], source: &ProbDist) -> Result<()> {
    match seq.iter().find(|&&s| s >= source.len()) {
        Some(s) => Err(Error::InvalidArgument(format!("symbol {s} outside alphabet of {}", source.len()))),
        None if seq.is_empty() => Err(Error::InvalidArgument("empty sequence".into())),
        None => Ok(()),
    }
}

/// Empirical surprisal `-(1/n) log₂ p(x₁…xₙ)` from symbol counts, or `None` if `p = 0`.
fn surprisal_from_counts(counts: &[usize], source: &ProbDist) -> Option<f64> {
    let n: usize = counts.iter().sum();
    let mut total = 0.0;
    for (c, p) in counts.iter().zip(source.probs()) {
        if *c == 0 {
            continue;
        }
        if *p <= 0.0 {
            return None;
        }
        total -= *c as f64 * p.log2();
    }
    Some(total / n as f64)
}

fn counts_of(seq: &[usize], d: usize) -> Vec<usize> {
    let mut counts = vec![0; d];
    for &s in seq {
        counts[s] += 1;
    }
    counts
}

/// Empirical surprisal of a sequence, `None` if it has probability zero.
pub fn surprisal_rate(seq: &[usize], source: &ProbDist) -> Result<Option<f64>> {
    check_symbols(seq, source)?;
    Ok(surprisal_from_counts(&counts_of(seq, source.len()), source))
}

/// Tests `|-(1/n) log₂ p(x) - H| ≤ ε`.
pub fn typical_membership(seq: &[usize], source: &ProbDist, epsilon: f64) -> Result<Membership> {
    check_epsilon(epsilon)?;
    Ok(match surprisal_rate(seq, source)? {
        None => Membership::ZeroProbability,
        Some(s) if (s - source.entropy()).abs() <= epsilon => Membership::Typical,
        Some(_) => Membership::Atypical,
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

fn check_block(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be positive".into()));
    }
    let bits = (d as f64).log2() * n as f64;
    if n > MAX_BLOCK || bits > MAX_BLOCK as f64 + 1e-9 {
        return Err(Error::InvalidArgument(format!("{d}^{n} sequences exceed the 2^{MAX_BLOCK} enumeration cap")));
    }
    Ok(())
}

/// Decodes a base-`d` sequence index (first symbol most significant).
fn index_to_seq(mut index: u64, n: usize, d: usize) -> Vec<usize> {
    let mut seq = vec![0; n];
    for slot in seq.iter_mut().rev() {
        *slot = (index % d as u64) as usize;
        index /= d as u64;
    }
    seq
}

fn seq_to_index(seq: &[usize], d: usize) -> u64 {
    seq.iter().fold(0u64, |acc, &s| acc * d as u64 + s as u64)
}

/// Per-sequence (index, |surprisal - H|, probability); zero-probability sequences omitted.
fn enumerate(n: usize, source: &ProbDist) -> Vec<(u64, f64, f64)> {
    let d = source.len();
    let h = source.entropy();
    let total = (d as u64).pow(n as u32);
    (0..total)
        .into_par_iter()
        .filter_map(|i| {
            let counts = counts_of(&index_to_seq(i, n, d), d);
            let s = surprisal_from_counts(&counts, source)?;
            Some((i, (s - h).abs(), (-(n as f64) * s).exp2()))
        })
        .collect()
}

/// Exhaustive statistics of the ε-typical set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalSetStats {
    pub n: usize,
    pub epsilon: f64,
    pub count: u64,
    pub probability: f64,
    /// `(1-δ) 2^{n(H-ε)}` with `δ = 1 - P(T)`.
    pub lower_bound: f64,
    /// `2^{n(H+ε)}`.
    pub upper_bound: f64,
}

impl TypicalSetStats {
    pub fn bounds_hold(&self) -> bool {
        let slack = 1e-9 * self.upper_bound.max(1.0);
        self.count as f64 + slack >= self.lower_bound && self.count as f64 <= self.upper_bound + slack
    }
}

pub fn typical_set_stats(n: usize, source: &ProbDist, epsilon: f64) -> Result<TypicalSetStats> {
    check_epsilon(epsilon)?;
    check_block(n, source.len())?;
    let h = source.entropy();
    let (count, probability) = enumerate(n, source)
        .into_iter()
        .filter(|(_, dev, _)| *dev <= epsilon)
        .fold((0u64, 0.0), |(c, p), (_, _, q)| (c + 1, p + q));
    let nf = n as f64;
    Ok(TypicalSetStats {
        n,
        epsilon,
        count,
        probability,
        lower_bound: probability * (nf * (h - epsilon)).exp2(),
        upper_bound: (nf * (h + epsilon)).exp2(),
    })
}

/// Fixed-width codeword; serialized as a little-endian bit string (bit 0 first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Codeword {
    pub value: u64,
    pub width: u32,
}

impl Codeword {
    pub fn to_bits(&self) -> String {
        (0..self.width).map(|i| if (self.value >> i) & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn from_bits(bits: &str) -> Result<Self> {
        if bits.len() > 64 {
            return Err(Error::InvalidArgument("codeword wider than 64 bits".into()));
        }
        let mut value = 0u64;
        for (i, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => value |= 1 << i,
                _ => return Err(Error::InvalidArgument(format!("bad bit `{ch}`"))),
            }
        }
        Ok(Self { value, width: bits.len() as u32 })
    }
}

/// Block code over an explicitly enumerated typical set.
#[derive(Clone, Debug)]
pub struct TypicalCodec {
    n: usize,
    epsilon: f64,
    source: ProbDist,
    width: u32,
    codebook: Vec<u64>,
}

impl TypicalCodec {
    /// Codes the ε-typical set with `ceil(n(H+ε))`-bit codewords.
    pub fn new(n: usize, epsilon: f64, source: ProbDist) -> Result<Self> {
        check_epsilon(epsilon)?;
        check_block(n, source.len())?;
        let width = (n as f64 * (source.entropy() + epsilon)).ceil() as u32;
        let codebook: Vec<u64> = enumerate(n, &source)
            .into_iter()
            .filter(|(_, dev, _)| *dev <= epsilon)
            .map(|(i, _, _)| i)
            .collect();
        debug_assert!((codebook.len() as f64) <= (width as f64).exp2());
        Ok(Self { n, epsilon, source, width, codebook })
    }

    /// Codes at a target rate of `R` bits per symbol: width `floor(nR)`, with the widest
    /// typical set `T(n, ε)` that still fits in `2^width` codewords.
    pub fn for_rate(n: usize, rate: f64, source: ProbDist) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!("rate must be positive, got {rate}")));
        }
        check_block(n, source.len())?;
        let width = (n as f64 * rate + 1e-9).floor() as u32;
        let capacity = if width >= 64 { u64::MAX } else { 1u64 << width };
        let mut all = enumerate(n, &source);
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        // Whole deviation classes only: a class is admitted if all of it fits.
        let mut cut = 0;
        let mut epsilon = None;
        let mut i = 0;
        while i < all.len() {
            let dev = all[i].1;
            let mut j = i;
            while j < all.len() && all[j].1 - dev <= 1e-12 {
                j += 1;
            }
            if j as u64 > capacity {
                break;
            }
            cut = j;
            epsilon = Some(all[j - 1].1);
            i = j;
        }
        let epsilon = match epsilon {
            Some(e) => e.max(f64::MIN_POSITIVE),
            None => all.first().map(|a| a.1 / 2.0).unwrap_or(0.0).max(f64::MIN_POSITIVE),
        };
        let mut codebook: Vec<u64> = all[..cut].iter().map(|a| a.0).collect();
        codebook.sort_unstable();
        Ok(Self { n, epsilon, source, width, codebook })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn source(&self) -> &ProbDist {
        &self.source
    }

    pub fn codebook_len(&self) -> usize {
        self.codebook.len()
    }

    /// Bits per source symbol.
    pub fn rate(&self) -> f64 {
        self.width as f64 / self.n as f64
    }

    /// Encodes a typical sequence; `Ok(None)` signals an atypical input (declared error).
    pub fn encode(&self, seq: &[usize]) -> Result<Option<Codeword>> {
        if seq.len() != self.n {
            return Err(Error::DimensionMismatch(format!("sequence of {} for block {}", seq.len(), self.n)));
        }
        check_symbols(seq, &self.source)?;
        let index = seq_to_index(seq, self.source.len());
        Ok(self
            .codebook
            .binary_search(&index)
            .ok()
            .map(|pos| Codeword { value: pos as u64, width: self.width }))
    }

    pub fn decode(&self, cw: &Codeword) -> Result<Vec<usize>> {
        if cw.width != self.width {
            return Err(Error::DimensionMismatch(format!("codeword width {} vs {}", cw.width, self.width)));
        }
        let index = *self
            .codebook
            .get(cw.value as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("codeword {} unused", cw.value)))?;
        Ok(index_to_seq(index, self.n, self.source.len()))
    }

    /// Draws an i.i.d. block from the source.
    pub fn sample(&self, rng: &mut RandomSource) -> Vec<usize> {
        (0..self.n).map(|_| rng.categorical(self.source.probs())).collect()
    }
}

/// Monte Carlo round-trip statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundtripStats {
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub rate_bits_per_symbol: f64,
}

/// Encodes and decodes `trials` i.i.d. blocks; trial `t` draws from `rng.fork(t)`.
pub fn typical_codec_roundtrip(codec: &TypicalCodec, trials: u64, rng: &RandomSource) -> RoundtripStats {
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut r = rng.fork(t);
            let seq = codec.sample(&mut r);
            match codec.encode(&seq) {
                Ok(Some(cw)) => codec.decode(&cw).map(|s| s == seq).unwrap_or(false),
                _ => false,
            }
        })
        .count() as u64;
    RoundtripStats {
        trials,
        successes,
        success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        rate_bits_per_symbol: codec.rate(),
    }
}
