use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::{DensityOperator, Operator, StateVector};
use crate::scalar::{modulus, Cx, Real};

/// Subsystem identifiers used to split one seed into independent streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum Module {
    Core = 1,
    Info = 2,
    Entangle = 3,
    Temporal = 4,
    Chain = 5,
    Consensus = 6,
    Games = 7,
    Foundations = 8,
    Cli = 9,
}

/// Deterministic random stream keyed by `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Stream for trial `trial` of `module`.
    pub fn for_trial(seed: u64, module: Module, trial: u64) -> Self {
        Self::new(seed, ((module as u64) << 48) | (trial & ((1 << 48) - 1)))
    }

    /// Child stream derived from this source's seed; does not advance `self`.
    pub fn fork(&self, stream: u64) -> Self {
        Self::new(self.seed, self.stream.rotate_left(17) ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bit(&mut self) -> u8 {
        self.rng.random::<bool>() as u8
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Index sampled from nonnegative weights (need not be normalized).
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.uniform() * total;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                return i;
            }
            u -= w;
        }
        weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

fn ginibre<T: Real>(rows: usize, cols: usize, rng: &mut RandomSource) -> DMatrix<Cx<T>> {
    DMatrix::from_fn(rows, cols, |_, _| Cx::new(T::lit(rng.normal()), T::lit(rng.normal())))
}

/// Haar-random pure state.
pub fn random_state<T: Real>(dim: usize, rng: &mut RandomSource) -> StateVector<T> {
    let v: Vec<Cx<T>> = (0..dim).map(|_| Cx::new(T::lit(rng.normal()), T::lit(rng.normal()))).collect();
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Haar-random unitary via phase-corrected QR of a Ginibre matrix.
pub fn random_unitary<T: Real>(dim: usize, rng: &mut RandomSource) -> Operator<T> {
    let qr = ginibre::<T>(dim, dim, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let d = r[(i, i)];
            d.unscale(modulus(d))
        } else {
            Cx::new(T::zero(), T::zero())
        }
    });
    Operator::from_matrix_unchecked(q * phases)
}

/// Random density operator of the given rank from the induced measure `GG†/tr`.
pub fn random_density<T: Real>(dim: usize, rank: usize, rng: &mut RandomSource) -> DensityOperator<T> {
    let g = ginibre::<T>(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_matrix_unchecked(m * Cx::new(T::one() / tr, T::zero()))
}

/// Random orthonormal basis (columns of a Haar unitary).
pub fn random_basis<T: Real>(dim: usize, rng: &mut RandomSource) -> Vec<StateVector<T>> {
    let u = random_unitary::<T>(dim, rng);
    (0..dim)
        .map(|c| StateVector::from_dvector_unchecked(u.matrix().column(c).into_owned()))
        .collect()
}
