use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{computational_basis, measure, measure_local, x_basis, BellLabel, RandomSource, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QkdProtocol {
    Bb84,
    E91,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eavesdropper {
    None,
    /// Measures each transmitted qubit in a random basis and resends the outcome state.
    InterceptResend,
}

impl FromStr for QkdProtocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bb84" => Ok(QkdProtocol::Bb84),
            "e91" => Ok(QkdProtocol::E91),
            _ => Err(Error::InvalidArgument(format!("unknown QKD protocol `{s}`"))),
        }
    }
}

impl FromStr for Eavesdropper {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Eavesdropper::None),
            "intercept-resend" => Ok(Eavesdropper::InterceptResend),
            _ => Err(Error::InvalidArgument(format!("unknown eavesdropper `{s}`"))),
        }
    }
}

impl fmt::Display for QkdProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QkdProtocol::Bb84 => "BB84",
            QkdProtocol::E91 => "E91",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QkdReport {
    pub protocol: QkdProtocol,
    pub eavesdropper: Eavesdropper,
    pub rounds: u64,
    pub discarded: u64,
    pub alice_key: String,
    pub bob_key: String,
    pub errors: u64,
    pub qber: f64,
}

fn basis(b: u8) -> Vec<StateVector> {
    if b == 0 {
        computational_basis(2)
    } else {
        x_basis()
    }
}

/// One round: `(alice basis, alice bit, bob basis, bob bit)`.
fn bb84_round(eve: Eavesdropper, r: &mut RandomSource) -> Result<(u8, u8, u8, u8)> {
    let (bit, alice_basis) = (r.bit(), r.bit());
    let mut qubit = basis(alice_basis)[bit as usize].clone();
    if eve == Eavesdropper::InterceptResend {
        qubit = measure(&qubit, &basis(r.bit()), r)?.post_state;
    }
    let bob_basis = r.bit();
    let out = measure(&qubit, &basis(bob_basis), r)?;
    Ok((alice_basis, bit, bob_basis, out.index as u8))
}

/// Both parties measure their half of `β₀₀` in a publicly agreed random basis; Eve, if present,
/// measures Bob's half in a random basis first.
fn e91_round(eve: Eavesdropper, r: &mut RandomSource) -> Result<(u8, u8, u8, u8)> {
    let mut pair = BellLabel::PhiPlus.state::<f64>();
    if eve == Eavesdropper::InterceptResend {
        pair = measure_local(&pair, &basis(r.bit()), &[1], r)?.post_state;
    }
    let agreed = r.bit();
    let alice = measure_local(&pair, &basis(agreed), &[0], r)?;
    let bob = measure_local(&alice.post_state, &basis(agreed), &[1], r)?;
    Ok((agreed, alice.index as u8, agreed, bob.index as u8))
}

/// Runs rounds until `key_bits` sifted bits are collected; round `k` draws from `rng.fork(k)`.
pub fn qkd_session(
    protocol: QkdProtocol,
    key_bits: usize,
    eve: Eavesdropper,
    rng: &RandomSource,
) -> Result<QkdReport> {
    if key_bits == 0 {
        return Err(Error::InvalidArgument("key_bits must be at least 1".into()));
    }
    let (mut alice_key, mut bob_key) = (String::with_capacity(key_bits), String::with_capacity(key_bits));
    let (mut rounds, mut discarded, mut errors) = (0u64, 0u64, 0u64);
    while alice_key.len() < key_bits {
        let mut r = rng.fork(rounds);
        rounds += 1;
        let (ab, a, bb, b) = match protocol {
            QkdProtocol::Bb84 => bb84_round(eve, &mut r)?,
            QkdProtocol::E91 => e91_round(eve, &mut r)?,
        };
        if ab != bb {
            discarded += 1;
            continue;
        }
        alice_key.push(char::from(b'0' + a));
        bob_key.push(char::from(b'0' + b));
        errors += (a != b) as u64;
    }
    Ok(QkdReport {
        protocol,
        eavesdropper: eve,
        rounds,
        discarded,
        alice_key,
        bob_key,
        errors,
        qber: errors as f64 / key_bits as f64,
    })
}
