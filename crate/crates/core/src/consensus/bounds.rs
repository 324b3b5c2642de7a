use serde::{Deserialize, Serialize};

use super::network::{embed, Network, PassEstimate};
use crate::error::{Error, Result};
use crate::qcore::{ghz_state, random_unitary, DensityOperator, Gate, Operator, RandomSource, StateVector};

/// Allowance on `4P̂ - 3 ≤ F̂'` for the optimizer gap in `F̂'`.
pub const DISHONEST_SLACK: f64 = 0.02;

/// `F(ρ) = ⟨GHZ_n|ρ|GHZ_n⟩`.
pub fn ghz_fidelity(rho: &DensityOperator) -> Result<f64> {
    let n = super::theta::qubits_of(rho)?;
    Ok(sandwich(rho, &ghz_state(n)?))
}

fn sandwich(rho: &DensityOperator, phi: &StateVector) -> f64 {
    let v = phi.amplitudes();
    let mut acc = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            acc += (v[i].conj() * rho.entry(i, j) * v[j]).re;
        }
    }
    acc
}

fn euler(p: &[f64]) -> Operator {
    let rz = |a: f64| Gate::Rz.matrix(Some(a)).expect("rz");
    let ry = Gate::Ry.matrix(Some(p[1])).expect("ry");
    &(&rz(p[0]) * &ry) * &rz(p[2])
}

/// Lower bound on `F'(ρ) = max_U F((I ⊗ U) ρ (I ⊗ U†))` with `U` acting on `dishonest`.
///
/// Maximizes over products of single-qubit Euler rotations: an 8-point grid per angle swept
/// qubit by qubit, then pattern-search refinement. Each `candidates` entry (a unitary on the
/// dishonest qubits, in listed order) also competes.
pub fn max_corrected_fidelity(rho: &DensityOperator, dishonest: &[usize], candidates: &[Operator]) -> Result<f64> {
    let n = super::theta::qubits_of(rho)?;
    let ghz = ghz_state::<f64>(n)?;
    let mut best = sandwich(rho, &ghz);
    for c in candidates {
        let phi = ghz.apply_on(&c.adjoint(), dishonest)?;
        best = best.max(sandwich(rho, &phi));
    }
    if dishonest.is_empty() {
        return Ok(best);
    }
    let eval = |params: &[f64]| -> f64 {
        let mut phi = ghz.clone();
        for (k, &q) in dishonest.iter().enumerate() {
            phi = phi.apply_on(&euler(&params[3 * k..3 * k + 3]).adjoint(), &[q]).expect("qubit in range");
        }
        sandwich(rho, &phi)
    };
    let mut x = vec![0.0; 3 * dishonest.len()];
    let mut fx = eval(&x);
    let grid: Vec<f64> = (0..8).map(|k| std::f64::consts::TAU * k as f64 / 8.0).collect();
    for _ in 0..2 {
        for k in 0..dishonest.len() {
            for &a in &grid {
                for &b in &grid {
                    for &c in &grid {
                        let mut y = x.clone();
                        y[3 * k..3 * k + 3].copy_from_slice(&[a, b, c]);
                        let fy = eval(&y);
                        if fy > fx {
                            x = y;
                            fx = fy;
                        }
                    }
                }
            }
        }
    }
    let mut step = std::f64::consts::TAU / 16.0;
    while step > 1e-8 {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += dir * step;
                let fy = eval(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best.max(fx))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheatSample {
    /// `"local"` or `"joint"`.
    pub kind: String,
    pub pass: PassEstimate,
    pub f_prime: f64,
    /// `4P̂ - 3`.
    pub lower: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityBoundsReport {
    pub n: usize,
    pub rounds: u64,
    pub honest_count: usize,
    pub pass_rate: f64,
    pub std_err: f64,
    pub fidelity: f64,
    /// `2P̂ - 1`.
    pub honest_lower: f64,
    pub honest_bound_ok: bool,
    pub slack: f64,
    pub cheats: Vec<CheatSample>,
    pub dishonest_bound_ok: bool,
}

/// Checks `F ≥ 2P̂ - 1 - 3·SE` with every node honest, then samples `cheat_samples` strategies
/// for the last `n - k` nodes and checks `4P̂ - 3 ≤ F̂' + slack` for each.
///
/// Odd samples with at least two dishonest nodes use a joint Haar unitary on the first two;
/// all others use independent Haar single-qubit rotations.
pub fn check_fidelity_bounds(
    rho: &DensityOperator,
    honest_count: usize,
    cheat_samples: usize,
    rounds: u64,
    rng: &RandomSource,
) -> Result<FidelityBoundsReport> {
    let n = super::theta::qubits_of(rho)?;
    if honest_count == 0 || honest_count > n {
        return Err(Error::InvalidArgument(format!("honest count {honest_count} outside 1..={n}")));
    }
    let honest = Network::honest(n)?;
    let est = honest.estimate_pass_probability(rho, rounds, &rng.fork(0))?;
    let fidelity = ghz_fidelity(rho)?;
    let honest_lower = 2.0 * est.p_hat - 1.0;
    let honest_bound_ok = fidelity >= honest_lower - 3.0 * 2.0 * est.std_err - crate::qcore::TOL_ALG;

    let dishonest: Vec<usize> = (honest_count..n).collect();
    let mut cheats = Vec::new();
    if !dishonest.is_empty() {
        for s in 0..cheat_samples {
            let mut r = rng.fork(1 + s as u64);
            let joint = dishonest.len() >= 2 && s % 2 == 1;
            let (network, cheat_op) = if joint {
                let u = random_unitary::<f64>(4, &mut r);
                let net = Network::honest(n)?.with_coalition(dishonest[..2].to_vec(), u.clone())?;
                let full = embed(&u, &[0, 1], dishonest.len())?;
                (net, full)
            } else {
                let mut net = Network::honest(n)?;
                let mut full = Operator::identity(1);
                for &q in &dishonest {
                    let u = random_unitary::<f64>(2, &mut r);
                    full = full.tensor(&u)?;
                    net = net.with_cheat(q, u)?;
                }
                (net, full)
            };
            let pass = network.estimate_pass_probability(rho, rounds, &r.fork(0))?;
            let f_prime = max_corrected_fidelity(rho, &dishonest, &[cheat_op])?;
            let lower = 4.0 * pass.p_hat - 3.0;
            cheats.push(CheatSample {
                kind: if joint { "joint" } else { "local" }.into(),
                pass,
                f_prime,
                lower,
                ok: lower <= f_prime + DISHONEST_SLACK,
            });
        }
    }
    let dishonest_bound_ok = cheats.iter().all(|c| c.ok);
    Ok(FidelityBoundsReport {
        n,
        rounds,
        honest_count,
        pass_rate: est.p_hat,
        std_err: est.std_err,
        fidelity,
        honest_lower,
        honest_bound_ok,
        slack: DISHONEST_SLACK,
        cheats,
        dishonest_bound_ok,
    })
}
