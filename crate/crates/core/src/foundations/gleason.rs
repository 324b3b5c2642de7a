use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::linalg::{hermitian_map, hermitian_part};
use crate::qcore::{check_basis, random_basis, DensityOperator, Operator, RandomSource, StateVector, TOL_ALG};
use crate::scalar::Cx;

/// Reconstruction tolerance for exact valuations.
pub const TOL_RECON: f64 = 1e-8;

/// Most negative eigenvalue a reconstruction may have and still be repaired.
pub const PSD_REPAIR_TOL: f64 = 1e-2;

const KEY_SCALE: f64 = 1e8;

/// Phase-independent key for the ray through `n`.
fn ray_key(n: &StateVector) -> Vec<i64> {
    let amps = n.amplitudes();
    let pivot = amps.iter().find(|a| a.norm() > 1e-6).copied().unwrap_or(Cx::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    amps.iter()
        .flat_map(|a| {
            let b = a * phase;
            [(b.re * KEY_SCALE).round() as i64, (b.im * KEY_SCALE).round() as i64]
        })
        .collect()
}

/// `(n_j + c·n_k)/√2`.
fn combo(nj: &StateVector, nk: &StateVector, c: Cx<f64>) -> StateVector {
    let amps = nj.amplitudes().iter().zip(nk.amplitudes()).map(|(a, b)| (a + c * b) * std::f64::consts::FRAC_1_SQRT_2);
    StateVector::new(amps.collect()).expect("orthonormal pair")
}

const PHASES: [Cx<f64>; 4] = [Cx::new(1.0, 0.0), Cx::new(-1.0, 0.0), Cx::new(0.0, 1.0), Cx::new(0.0, -1.0)];

/// Probability assignment to rays of `C^d`, with the orthonormal frames it was checked on.
#[derive(Clone, Debug, Default)]
pub struct Valuation {
    dim: usize,
    table: BTreeMap<Vec<i64>, f64>,
    frames: Vec<Vec<StateVector>>,
}

impl Valuation {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn frames(&self) -> &[Vec<StateVector>] {
        &self.frames
    }

    pub fn insert(&mut self, n: &StateVector, value: f64) -> Result<()> {
        if n.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector dim {} in a dim {} valuation", n.dim(), self.dim)));
        }
        if !(-TOL_ALG..=1.0 + TOL_ALG).contains(&value) {
            return Err(Error::InvalidArgument(format!("valuation {value} outside [0, 1]")));
        }
        self.table.insert(ray_key(n), value);
        Ok(())
    }

    pub fn value(&self, n: &StateVector) -> Result<f64> {
        self.table.get(&ray_key(n)).copied().ok_or_else(|| {
            let amps: Vec<String> = n.amplitudes().iter().map(|a| format!("{:.4}{:+.4}i", a.re, a.im)).collect();
            Error::MissingValuation(format!("[{}]", amps.join(", ")))
        })
    }

    /// Records an orthonormal frame whose values must sum to 1.
    pub fn add_frame(&mut self, frame: &[StateVector], values: &[f64]) -> Result<()> {
        check_basis(frame, self.dim)?;
        if values.len() != frame.len() {
            return Err(Error::DimensionMismatch(format!("{} values for a {}-vector frame", values.len(), frame.len())));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > TOL_ALG {
            return Err(Error::InvalidDistribution(format!("frame values sum to {sum}")));
        }
        for (n, v) in frame.iter().zip(values) {
            self.insert(n, *v)?;
        }
        self.frames.push(frame.to_vec());
        Ok(())
    }

    /// Checks `Σ v(nᵢ) = 1` on every stored frame.
    pub fn check_frames(&self) -> Result<()> {
        for frame in &self.frames {
            let sum = frame.iter().map(|n| self.value(n)).sum::<Result<f64>>()?;
            if (sum - 1.0).abs() > TOL_ALG {
                return Err(Error::InvalidDistribution(format!("frame values sum to {sum}")));
            }
        }
        Ok(())
    }

    /// The `2d² − d` vectors `n_j`, `(n_j ± n_k)/√2`, `(n_j ± i n_k)/√2` (j < k).
    pub fn required_vectors(frame: &[StateVector]) -> Vec<StateVector> {
        let mut out = frame.to_vec();
        for j in 0..frame.len() {
            for k in j + 1..frame.len() {
                out.extend(PHASES.iter().map(|&c| combo(&frame[j], &frame[k], c)));
            }
        }
        out
    }

    /// `v(n) = ⟨n|ρ|n⟩` on the vectors needed to reconstruct `ρ` from `frame`.
    pub fn from_density(rho: &DensityOperator, frame: &[StateVector]) -> Result<Self> {
        let d = rho.dim();
        check_basis(frame, d)?;
        let mut val = Self::new(d);
        let born = |n: &StateVector| Ok(rho.expectation(&Operator::projector(n))?.re.clamp(0.0, 1.0));
        let values = frame.iter().map(born).collect::<Result<Vec<f64>>>()?;
        val.add_frame(frame, &values)?;
        for n in Self::required_vectors(frame).iter().skip(d) {
            val.insert(n, born(n)?)?;
        }
        if d == 2 {
            for pair in [[0, 1], [2, 3]] {
                let f: Vec<StateVector> = pair.iter().map(|&i| combo(&frame[0], &frame[1], PHASES[i])).collect();
                let v = f.iter().map(born).collect::<Result<Vec<f64>>>()?;
                val.add_frame(&f, &v)?;
            }
        }
        Ok(val)
    }

    /// Adds uniform noise in `[-eps, eps]` to every entry (clamped to `[0, 1]`); the frame
    /// records are dropped since their sums no longer hold.
    pub fn perturbed(&self, eps: f64, rng: &mut RandomSource) -> Self {
        let table = self
            .table
            .iter()
            .map(|(k, v)| (k.clone(), (v + eps * (2.0 * rng.uniform() - 1.0)).clamp(0.0, 1.0)))
            .collect();
        Self { dim: self.dim, table, frames: Vec::new() }
    }
}

fn frame_matrix(frame: &[StateVector]) -> DMatrix<Cx<f64>> {
    let d = frame.len();
    DMatrix::from_fn(d, d, |r, c| frame[c].amplitude(r))
}

/// Explicit reconstruction
/// `ρ_jk = ½[v((n_j+n_k)/√2) − v((n_j−n_k)/√2)] − (i/2)[v((n_j+in_k)/√2) − v((n_j−in_k)/√2)]`,
/// `ρ_jj = v(n_j)`, in the standard basis; no positivity repair.
pub fn gleason_reconstruct_raw(val: &Valuation, frame: &[StateVector]) -> Result<Operator> {
    let d = val.dim();
    check_basis(frame, d)?;
    let mut r = DMatrix::zeros(d, d);
    for j in 0..d {
        r[(j, j)] = Cx::new(val.value(&frame[j])?, 0.0);
        for k in 0..d {
            if j == k {
                continue;
            }
            let v = |c: usize| val.value(&combo(&frame[j], &frame[k], PHASES[c]));
            let re = 0.5 * (v(0)? - v(1)?);
            let im = -0.5 * (v(2)? - v(3)?);
            r[(j, k)] = Cx::new(re, im);
        }
    }
    let n = frame_matrix(frame);
    Operator::from_matrix(&n * r * n.adjoint())
}

/// Reconstructs `ρ` from its valuation; a reconstruction with eigenvalues down to
/// `-PSD_REPAIR_TOL` is repaired by clamping negative eigenvalues and renormalizing the trace.
pub fn gleason_reconstruct(val: &Valuation, frame: &[StateVector]) -> Result<DensityOperator> {
    let raw = gleason_reconstruct_raw(val, frame)?;
    if let Ok(rho) = DensityOperator::new(raw.clone()) {
        return Ok(rho);
    }
    let h = hermitian_part(raw.matrix());
    let min = Operator::from_matrix(h.clone())?.min_eigenvalue();
    if min < -PSD_REPAIR_TOL {
        return Err(Error::NotPsd(min));
    }
    DensityOperator::normalized(Operator::from_matrix(hermitian_map(&h, |x| x.max(0.0)))?)
}

/// Qubit form `½(v_x+v_y)I + ½(v_x−v_y)σ_z + ½(v₊−v₋)σ_x + ½(v₊ᵢ−v₋ᵢ)σ_y`, with the Pauli
/// operators written in the frame `(x̂, ŷ)`.
pub fn gleason_qubit_pauli(val: &Valuation, frame: &[StateVector]) -> Result<Operator> {
    if val.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("qubit form needs d = 2, got {}", val.dim())));
    }
    check_basis(frame, 2)?;
    let (x, y) = (&frame[0], &frame[1]);
    let v = |c: usize| val.value(&combo(x, y, PHASES[c]));
    let (vx, vy) = (val.value(x)?, val.value(y)?);
    let xx = Operator::projector(x);
    let yy = Operator::projector(y);
    let xy = Operator::outer(x, y);
    let yx = Operator::outer(y, x);
    let id = &xx + &yy;
    let sz = &xx - &yy;
    let sx = &xy + &yx;
    let sy = &yx.scale(Cx::new(0.0, 1.0)) - &xy.scale(Cx::new(0.0, 1.0));
    let terms = [
        id.scale_real(0.5 * (vx + vy)),
        sz.scale_real(0.5 * (vx - vy)),
        sx.scale_real(0.5 * (v(0)? - v(1)?)),
        sy.scale_real(0.5 * (v(2)? - v(3)?)),
    ];
    Ok(terms.iter().skip(1).fold(terms[0].clone(), |acc, t| &acc + t))
}

/// Decohered state `ρ_P = Σᵢ v(Pᵢ) Pᵢ` with `v(Pᵢ) = tr(ρPᵢ)`.
pub fn gleason_decohere(rho: &DensityOperator, frame: &[StateVector]) -> Result<DensityOperator> {
    check_basis(frame, rho.dim())?;
    let mut out = Operator::zeros(rho.dim());
    for n in frame {
        let p = Operator::projector(n);
        out = &out + &p.scale_real(rho.expectation(&p)?.re);
    }
    DensityOperator::new(out)
}

const AVERAGE_CHUNK: u64 = 256;

/// `(d+1)⟨ρ_P⟩ − I` over `frames` Haar-random frames; frame `s` draws from `rng.fork(s)`.
/// Chunks are summed in a fixed order so the result is independent of thread scheduling.
pub fn decoherence_average(rho: &DensityOperator, frames: u64, rng: &RandomSource) -> Result<Operator> {
    if frames == 0 {
        return Err(Error::InvalidArgument("frames must be at least 1".into()));
    }
    let d = rho.dim();
    let chunks: Vec<DMatrix<Cx<f64>>> = (0..frames.div_ceil(AVERAGE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = DMatrix::zeros(d, d);
            for s in c * AVERAGE_CHUNK..((c + 1) * AVERAGE_CHUNK).min(frames) {
                let frame = random_basis(d, &mut rng.fork(s));
                acc += gleason_decohere(rho, &frame)?.matrix();
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let sum = chunks.into_iter().fold(DMatrix::zeros(d, d), |a, b| a + b);
    let mean = sum / Cx::new(frames as f64, 0.0);
    Operator::from_matrix(mean * Cx::new((d + 1) as f64, 0.0) - DMatrix::identity(d, d))
}
