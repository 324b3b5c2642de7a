use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{pauli_x, pauli_y, pauli_z, DensityOperator, Operator, RandomSource};

/// Observable `n·σ` for a Bloch vector (normalized).
pub fn bloch_observable(n: [f64; 3]) -> Operator {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let x = pauli_x::<f64>().scale_real(n[0] / norm);
    let y = pauli_y::<f64>().scale_real(n[1] / norm);
    let z = pauli_z::<f64>().scale_real(n[2] / norm);
    &(&x + &y) + &z
}

fn spherical(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Two dichotomic settings per side.
#[derive(Clone, Debug)]
pub struct ObservableSettings {
    pub a1: Operator,
    pub a2: Operator,
    pub b1: Operator,
    pub b2: Operator,
}

impl ObservableSettings {
    pub fn new(a1: Operator, a2: Operator, b1: Operator, b2: Operator) -> Result<Self> {
        for (name, op) in [("A1", &a1), ("A2", &a2), ("B1", &b1), ("B2", &b2)] {
            if op.dim() != 2 || !op.is_dichotomic(1e-9) {
                return Err(Error::NotDichotomic(name.into()));
            }
        }
        Ok(Self { a1, a2, b1, b2 })
    }

    pub fn from_bloch(a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> Self {
        Self {
            a1: bloch_observable(a1),
            a2: bloch_observable(a2),
            b1: bloch_observable(b1),
            b2: bloch_observable(b2),
        }
    }

    /// `A₁ = σ_z, A₂ = σ_x, B₁ = -(σ_z+σ_x)/√2, B₂ = (σ_z-σ_x)/√2`.
    pub fn standard() -> Self {
        Self::from_bloch([0., 0., 1.], [1., 0., 0.], [-1., 0., -1.], [-1., 0., 1.])
    }
}

fn correlator(rho: &DensityOperator, a: &Operator, b: &Operator) -> Result<f64> {
    Ok(rho.expectation(&a.tensor(b)?)?.re)
}

/// `⟨A₁B₁⟩ + ⟨A₂B₁⟩ + ⟨A₂B₂⟩ - ⟨A₁B₂⟩`.
pub fn chsh_value(rho: &DensityOperator, s: &ObservableSettings) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("CHSH needs two qubits, got dim {}", rho.dim())));
    }
    let s = ObservableSettings::new(s.a1.clone(), s.a2.clone(), s.b1.clone(), s.b2.clone())?;
    Ok(correlator(rho, &s.a1, &s.b1)? + correlator(rho, &s.a2, &s.b1)? + correlator(rho, &s.a2, &s.b2)?
        - correlator(rho, &s.a1, &s.b2)?)
}

/// Correlation matrix `T_ij = tr(ρ σ_i ⊗ σ_j)`.
pub fn correlation_matrix(rho: &DensityOperator) -> Result<[[f64; 3]; 3]> {
    let paulis = [pauli_x::<f64>(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, a) in paulis.iter().enumerate() {
        for (j, b) in paulis.iter().enumerate() {
            t[i][j] = correlator(rho, a, b)?;
        }
    }
    Ok(t)
}

fn bilinear(t: &[[f64; 3]; 3], a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|i| (0..3).map(|j| a[i] * t[i][j] * b[j]).sum::<f64>()).sum()
}

/// Result of a settings optimization.
#[derive(Clone, Debug)]
pub struct ChshOptimum {
    pub value: f64,
    pub settings: ObservableSettings,
    /// Bloch vectors `[a1, a2, b1, b2]`.
    pub vectors: [[f64; 3]; 4],
}

/// Grid resolution per angle.
pub const GRID: usize = 24;

const PLANES: [[usize; 2]; 3] = [[2, 0], [0, 1], [1, 2]];

fn plane_vector(plane: [usize; 2], angle: f64) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[plane[0]] = angle.cos();
    v[plane[1]] = angle.sin();
    v
}

/// Maximizes the CHSH value over settings: a 24-angle grid over four in-plane angles
/// (each coordinate plane per side), then pattern-search refinement over all eight
/// spherical angles. Deterministic.
pub fn optimize_chsh(rho: &DensityOperator) -> Result<ChshOptimum> {
    let t = correlation_matrix(rho)?;
    let angles: Vec<f64> = (0..GRID).map(|k| std::f64::consts::TAU * k as f64 / GRID as f64).collect();
    let mut best = (f64::NEG_INFINITY, [[0.0; 3]; 4]);
    for pa in PLANES {
        for pb in PLANES {
            for &beta1 in &angles {
                for &beta2 in &angles {
                    let (b1, b2) = (plane_vector(pb, beta1), plane_vector(pb, beta2));
                    // S = a1·T(b1 - b2) + a2·T(b1 + b2): the a-angles separate.
                    let diff = [b1[0] - b2[0], b1[1] - b2[1], b1[2] - b2[2]];
                    let sum = [b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]];
                    let pick = |w: &[f64; 3]| {
                        angles
                            .iter()
                            .map(|&a| plane_vector(pa, a))
                            .map(|v| (bilinear(&t, &v, w), v))
                            .fold((f64::NEG_INFINITY, [0.0; 3]), |acc, x| if x.0 > acc.0 { x } else { acc })
                    };
                    let (s1, a1) = pick(&diff);
                    let (s2, a2) = pick(&sum);
                    if s1 + s2 > best.0 + 1e-15 {
                        best = (s1 + s2, [a1, a2, b1, b2]);
                    }
                }
            }
        }
    }
    let vectors = refine(&t, best.1);
    let value = chsh_from_vectors(&t, &vectors);
    Ok(ChshOptimum {
        value,
        settings: ObservableSettings::from_bloch(vectors[0], vectors[1], vectors[2], vectors[3]),
        vectors,
    })
}

fn chsh_from_vectors(t: &[[f64; 3]; 3], v: &[[f64; 3]; 4]) -> f64 {
    bilinear(t, &v[0], &v[2]) + bilinear(t, &v[1], &v[2]) + bilinear(t, &v[1], &v[3]) - bilinear(t, &v[0], &v[3])
}

fn to_angles(v: &[f64; 3]) -> (f64, f64) {
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

fn refine(t: &[[f64; 3]; 3], start: [[f64; 3]; 4]) -> [[f64; 3]; 4] {
    let mut x: Vec<f64> = start.iter().flat_map(|v| {
        let (th, ph) = to_angles(v);
        [th, ph]
    }).collect();
    let eval = |x: &[f64]| {
        let v: [[f64; 3]; 4] = std::array::from_fn(|k| spherical(x[2 * k], x[2 * k + 1]));
        chsh_from_vectors(t, &v)
    };
    let mut fx = eval(&x);
    let mut step = std::f64::consts::TAU / GRID as f64;
    while step > 1e-12 {
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
    std::array::from_fn(|k| spherical(x[2 * k], x[2 * k + 1]))
}

/// Closed-form maximum `2√(t₁² + t₂²)` over the two largest singular values of `T`.
pub fn horodecki_max(rho: &DensityOperator) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let m = nalgebra::Matrix3::from_fn(|i, j| t[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

/// Sampled CHSH correlators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    /// `⟨A₁B₁⟩, ⟨A₂B₁⟩, ⟨A₂B₂⟩, ⟨A₁B₂⟩`.
    pub correlators: [f64; 4],
    pub std_errs: [f64; 4],
    pub value: f64,
    pub std_err: f64,
    pub trials_per_pair: u64,
}

fn outcome_probs(rho: &DensityOperator, a: &Operator, b: &Operator) -> Result<[f64; 4]> {
    let id = Operator::identity(2);
    let proj = |o: &Operator, sign: f64| (&id + &o.scale_real(sign)).scale_real(0.5);
    let mut p = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        p[k] = rho.expectation(&proj(a, sa).tensor(&proj(b, sb))?)?.re.max(0.0);
    }
    Ok(p)
}

/// Samples `trials` joint outcomes for each of the four setting pairs; trial `t` of pair
/// `k` draws from `rng.fork(4t + k)`.
pub fn chsh_monte_carlo(
    rho: &DensityOperator,
    s: &ObservableSettings,
    trials: u64,
    rng: &RandomSource,
) -> Result<ChshEstimate> {
    let pairs = [(&s.a1, &s.b1), (&s.a2, &s.b1), (&s.a2, &s.b2), (&s.a1, &s.b2)];
    let mut correlators = [0.0; 4];
    let mut std_errs = [0.0; 4];
    for (k, (a, b)) in pairs.into_iter().enumerate() {
        let probs = outcome_probs(rho, a, b)?;
        let sum: i64 = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut r = rng.fork(4 * t + k as u64);
                match r.categorical(&probs) {
                    0 | 3 => 1,
                    _ => -1,
                }
            })
            .sum();
        let e = sum as f64 / trials as f64;
        correlators[k] = e;
        std_errs[k] = ((1.0 - e * e).max(0.0) / trials as f64).sqrt();
    }
    let value = correlators[0] + correlators[1] + correlators[2] - correlators[3];
    let std_err = std_errs.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(ChshEstimate { correlators, std_errs, value, std_err, trials_per_pair: trials })
}

/// Werner parameter where the optimized CHSH value crosses 2, by bisection.
pub fn werner_chsh_crossing(tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.5, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let rho = super::WernerState::new(mid)?.rho;
        if optimize_chsh(&rho)?.value > 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
