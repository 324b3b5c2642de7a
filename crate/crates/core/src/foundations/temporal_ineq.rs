use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infotheory::JointDist;
use crate::qcore::{pauli_x, pauli_y, pauli_z, Operator, RandomSource, StateVector, TOL_ALG};
use crate::scalar::Cx;

/// A system measured at a sequence of times with dichotomic (±1) settings.
pub trait TemporalModel: Sync {
    type Setting: Sync;

    /// The observable used for Leggett-Garg correlators.
    fn observable(&self) -> &Self::Setting;

    /// Horizon for searches over time separations.
    fn time_scale(&self) -> f64;

    /// Probabilities of the `2^m` outcome strings when `schedule[k].1` is measured at time
    /// `schedule[k].0` (nondecreasing). Bit `m−1−k` of the index is set when step `k` gave −1.
    fn sequential_distribution(&self, schedule: &[(f64, &Self::Setting)]) -> Result<Vec<f64>>;
}

fn check_schedule<S>(schedule: &[(f64, S)]) -> Result<()> {
    if schedule.windows(2).any(|w| w[1].0 < w[0].0) || schedule.iter().any(|s| s.0 < 0.0 || !s.0.is_finite()) {
        return Err(Error::InvalidArgument("measurement times must be finite, nonnegative and ordered".into()));
    }
    Ok(())
}

fn bloch_vector(op: &Operator) -> [f64; 3] {
    let paulis = [pauli_x::<f64>(), pauli_y(), pauli_z()];
    paulis.map(|p| 0.5 * (op * &p).trace().re)
}

/// Qubit rotating about x at angular frequency `omega`, measured projectively (invasively).
#[derive(Clone, Debug)]
pub struct PrecessionModel {
    pub omega: f64,
    pub initial: StateVector,
    pub observable: Operator,
}

impl PrecessionModel {
    /// Starts in `|0⟩` and measures `σ_z`.
    pub fn new(omega: f64) -> Result<Self> {
        Self::with(omega, StateVector::basis(2, 0)?, pauli_z())
    }

    pub fn with(omega: f64, initial: StateVector, observable: Operator) -> Result<Self> {
        if initial.dim() != 2 {
            return Err(Error::DimensionMismatch(format!("precession model needs a qubit, got dim {}", initial.dim())));
        }
        Self::check_setting(&observable)?;
        if !omega.is_finite() {
            return Err(Error::InvalidArgument(format!("omega {omega}")));
        }
        Ok(Self { omega, initial, observable })
    }

    /// Settings must be traceless dichotomic qubit observables `n·σ`.
    pub fn check_setting(op: &Operator) -> Result<()> {
        if op.dim() != 2 || !op.is_dichotomic(1e-9) || op.trace().norm() > 1e-9 {
            return Err(Error::NotDichotomic("expected a traceless ±1 qubit observable".into()));
        }
        Ok(())
    }

    fn evolution(&self, dt: f64) -> DMatrix<Cx<f64>> {
        let half = 0.5 * self.omega * dt;
        let id = DMatrix::<Cx<f64>>::identity(2, 2) * Cx::new(half.cos(), 0.0);
        id + pauli_x::<f64>().matrix() * Cx::new(0.0, -half.sin())
    }

    /// `⟨Q(t)Q(t+dt)⟩ = n·R_x(ω dt) n` for observable `n·σ`, independent of the state.
    pub fn closed_form_correlator(&self, dt: f64) -> f64 {
        let n = bloch_vector(&self.observable);
        n[0] * n[0] + (n[1] * n[1] + n[2] * n[2]) * (self.omega * dt).cos()
    }
}

impl TemporalModel for PrecessionModel {
    type Setting = Operator;

    fn observable(&self) -> &Operator {
        &self.observable
    }

    fn time_scale(&self) -> f64 {
        if self.omega == 0.0 {
            1.0
        } else {
            2.0 * PI / self.omega.abs()
        }
    }

    fn sequential_distribution(&self, schedule: &[(f64, &Operator)]) -> Result<Vec<f64>> {
        check_schedule(schedule)?;
        let id = DMatrix::<Cx<f64>>::identity(2, 2);
        let mut branches: Vec<DVector<Cx<f64>>> = vec![DVector::from_column_slice(self.initial.amplitudes())];
        let mut now = 0.0;
        for (t, setting) in schedule {
            Self::check_setting(setting)?;
            let u = self.evolution(t - now);
            now = *t;
            let plus = (&id + setting.matrix()) * Cx::new(0.5, 0.0);
            let minus = (&id - setting.matrix()) * Cx::new(0.5, 0.0);
            branches = branches
                .iter()
                .flat_map(|v| {
                    let w = &u * v;
                    [&plus * &w, &minus * &w]
                })
                .collect();
        }
        Ok(branches.iter().map(|v| v.norm_squared()).collect())
    }
}

/// Classical Markov process on `n` states relaxing at `rate` towards `stationary`:
/// `T(t) = e^{−rate·t} I + (1 − e^{−rate·t}) 1πᵀ`. Measurements read a ±1 response per state
/// and do not disturb the process.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovModel {
    pub initial: Vec<f64>,
    pub stationary: Vec<f64>,
    pub rate: f64,
    pub observable: Vec<i8>,
}

fn random_simplex(n: usize, rng: &mut RandomSource) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

impl MarkovModel {
    pub fn new(initial: Vec<f64>, stationary: Vec<f64>, rate: f64, observable: Vec<i8>) -> Result<Self> {
        let n = initial.len();
        if n == 0 || stationary.len() != n || observable.len() != n {
            return Err(Error::DimensionMismatch("Markov model vectors must share a nonzero length".into()));
        }
        for p in [&initial, &stationary] {
            if p.iter().any(|x| *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > TOL_ALG {
                return Err(Error::InvalidDistribution(format!("{p:?}")));
            }
        }
        Self::check_response(&observable, n)?;
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("rate {rate}")));
        }
        Ok(Self { initial, stationary, rate, observable })
    }

    fn check_response(r: &[i8], n: usize) -> Result<()> {
        if r.len() != n || r.iter().any(|x| x.abs() != 1) {
            return Err(Error::NotDichotomic(format!("response {r:?}")));
        }
        Ok(())
    }

    pub fn states(&self) -> usize {
        self.initial.len()
    }

    pub fn random_response(&self, rng: &mut RandomSource) -> Vec<i8> {
        (0..self.states()).map(|_| if rng.bit() == 0 { 1 } else { -1 }).collect()
    }

    /// Random instance with 2–6 states.
    pub fn random(rng: &mut RandomSource) -> Self {
        let n = 2 + rng.below(5);
        let initial = random_simplex(n, rng);
        let stationary = random_simplex(n, rng);
        let rate = 0.05 + 3.0 * rng.uniform();
        let mut m = Self { initial, stationary, rate, observable: Vec::new() };
        m.observable = m.random_response(rng);
        m
    }

    fn step(&self, p: &[f64], dt: f64) -> Vec<f64> {
        let keep = (-self.rate * dt).exp();
        let mass: f64 = p.iter().sum();
        p.iter().zip(&self.stationary).map(|(x, s)| keep * x + (1.0 - keep) * mass * s).collect()
    }
}

impl TemporalModel for MarkovModel {
    type Setting = Vec<i8>;

    fn observable(&self) -> &Vec<i8> {
        &self.observable
    }

    fn time_scale(&self) -> f64 {
        if self.rate == 0.0 {
            1.0
        } else {
            5.0 / self.rate
        }
    }

    fn sequential_distribution(&self, schedule: &[(f64, &Vec<i8>)]) -> Result<Vec<f64>> {
        check_schedule(schedule)?;
        let mut branches = vec![self.initial.clone()];
        let mut now = 0.0;
        for (t, response) in schedule {
            Self::check_response(response, self.states())?;
            let dt = t - now;
            now = *t;
            branches = branches
                .iter()
                .flat_map(|p| {
                    let q = self.step(p, dt);
                    let keep = |sign: i8| q.iter().zip(response.iter()).map(|(x, r)| if *r == sign { *x } else { 0.0 }).collect();
                    [keep(1), keep(-1)]
                })
                .collect();
        }
        Ok(branches.iter().map(|p| p.iter().sum()).collect())
    }
}

fn correlator_of(dist: &[f64]) -> f64 {
    dist[0] - dist[1] - dist[2] + dist[3]
}

/// `⟨A(t₁)B(t₂)⟩` from a two-step sequential measurement.
pub fn two_time_correlator<M: TemporalModel>(
    model: &M,
    (t1, a): (f64, &M::Setting),
    (t2, b): (f64, &M::Setting),
) -> Result<f64> {
    Ok(correlator_of(&model.sequential_distribution(&[(t1, a), (t2, b)])?))
}

/// `K₃ = C₂₁ + C₃₂ − C₃₁` at times `0, τ, 2τ`, each correlator from its own two-time run.
pub fn lg_k3<M: TemporalModel>(model: &M, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let q = model.observable();
    let c = |t1: f64, t2: f64| two_time_correlator(model, (t1, q), (t2, q));
    Ok(c(0.0, tau)? + c(tau, 2.0 * tau)? - c(0.0, 2.0 * tau)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct K3Max {
    pub k3_max: f64,
    pub tau_star: f64,
}

const K3_GRID: usize = 4096;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-12 * hi.abs().max(1.0) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// Maximum of `K₃` over `τ ∈ (0, time_scale]` by grid search and golden-section refinement.
pub fn lg_k3_max<M: TemporalModel>(model: &M) -> Result<K3Max> {
    let h = model.time_scale() / K3_GRID as f64;
    let grid: Vec<f64> = (1..=K3_GRID).into_par_iter().map(|i| lg_k3(model, i as f64 * h)).collect::<Result<_>>()?;
    let best = grid.iter().enumerate().fold(0, |b, (i, v)| if *v > grid[b] { i } else { b });
    let lo = (best as f64) * h;
    let hi = (best as f64 + 2.0) * h;
    let (tau, k3) = golden_max(|t| lg_k3(model, t.max(h * 1e-6)), lo, hi)?;
    if k3 >= grid[best] {
        Ok(K3Max { k3_max: k3, tau_star: tau })
    } else {
        Ok(K3Max { k3_max: grid[best], tau_star: (best + 1) as f64 * h })
    }
}

/// Two settings at `t₁` (`a1`, `a2`) and two at `t₂` (`b1`, `b2`).
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalChshSettings<S> {
    pub a1: S,
    pub a2: S,
    pub b1: S,
    pub b2: S,
}

/// `⟨A₁B₁⟩ + ⟨A₂B₁⟩ + ⟨A₂B₂⟩ − ⟨A₁B₂⟩` with `Aᵢ` measured at `t₁` and `Bⱼ` at `t₂ ≥ t₁`.
pub fn temporal_chsh<M: TemporalModel>(
    model: &M,
    s: &TemporalChshSettings<M::Setting>,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    let c = |a: &M::Setting, b: &M::Setting| two_time_correlator(model, (t1, a), (t2, b));
    Ok(c(&s.a1, &s.b1)? + c(&s.a2, &s.b1)? + c(&s.a2, &s.b2)? - c(&s.a1, &s.b2)?)
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn bloch_op(n: [f64; 3]) -> Operator {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let ops = [pauli_x::<f64>(), pauli_y(), pauli_z()];
    let mut out = Operator::zeros(2);
    for (o, x) in ops.iter().zip(n) {
        out = &out + &o.scale_real(x / norm);
    }
    out
}

fn mat_t_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (l, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|k| m[k][l] * v[k]).sum();
    }
    out
}

fn add(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Maximises the temporal CHSH value of a precession model over qubit settings. The two-time
/// correlator is bilinear in the Bloch vectors, `C(a, b) = aᵀMb`; `M` is measured with Pauli
/// settings, the optimal `b`'s are fixed by `a₁, a₂`, and `a₁, a₂` are found by grid and
/// pattern search. The returned value is re-evaluated with the sequential simulator.
pub fn optimize_temporal_chsh(
    model: &PrecessionModel,
    t1: f64,
    t2: f64,
) -> Result<(f64, TemporalChshSettings<Operator>)> {
    let paulis = [pauli_x::<f64>(), pauli_y(), pauli_z()];
    let mut m = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            m[k][l] = two_time_correlator(model, (t1, &paulis[k]), (t2, &paulis[l]))?;
        }
    }
    let score = |x: &[f64; 4]| {
        let (a1, a2) = (unit(x[0], x[1]), unit(x[2], x[3]));
        norm(mat_t_vec(&m, add(a2, a1, 1.0))) + norm(mat_t_vec(&m, add(a2, a1, -1.0)))
    };
    const STEPS: usize = 8;
    let mut best = ([0.0; 4], f64::NEG_INFINITY);
    for i in 0..STEPS.pow(4) {
        let x = [
            PI * ((i % STEPS) as f64 + 0.5) / STEPS as f64,
            2.0 * PI * ((i / STEPS % STEPS) as f64) / STEPS as f64,
            PI * ((i / STEPS.pow(2) % STEPS) as f64 + 0.5) / STEPS as f64,
            2.0 * PI * ((i / STEPS.pow(3)) as f64) / STEPS as f64,
        ];
        let s = score(&x);
        if s > best.1 {
            best = (x, s);
        }
    }
    let mut step = PI / STEPS as f64;
    while step > 1e-10 {
        let mut improved = false;
        for d in 0..4 {
            for sign in [1.0, -1.0] {
                let mut x = best.0;
                x[d] += sign * step;
                let s = score(&x);
                if s > best.1 {
                    best = (x, s);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let (a1, a2) = (unit(best.0[0], best.0[1]), unit(best.0[2], best.0[3]));
    let settings = TemporalChshSettings {
        a1: bloch_op(a1),
        a2: bloch_op(a2),
        b1: bloch_op(mat_t_vec(&m, add(a2, a1, 1.0))),
        b2: bloch_op(mat_t_vec(&m, add(a2, a1, -1.0))),
    };
    Ok((temporal_chsh(model, &settings, t1, t2)?, settings))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropicLg {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

fn conditional_entropy<M: TemporalModel>(model: &M, ti: f64, tj: f64) -> Result<f64> {
    let q = model.observable();
    let p = model.sequential_distribution(&[(ti, q), (tj, q)])?;
    Ok(JointDist::new(vec![vec![p[0], p[1]], vec![p[2], p[3]]])?.conditional_y_given_x())
}

/// `H(Q₃|Q₁) ≤ H(Q₃|Q₂) + H(Q₂|Q₁)` with each pair distribution from its own two-time run.
pub fn entropic_lg_check<M: TemporalModel>(model: &M, t1: f64, t2: f64, t3: f64) -> Result<EntropicLg> {
    if !(t1 <= t2 && t2 <= t3) {
        return Err(Error::InvalidArgument(format!("times must be ordered, got {t1}, {t2}, {t3}")));
    }
    let lhs = conditional_entropy(model, t1, t3)?;
    let rhs = conditional_entropy(model, t2, t3)? + conditional_entropy(model, t1, t2)?;
    Ok(EntropicLg { lhs, rhs, violated: lhs > rhs + TOL_ALG })
}

/// Largest violation `lhs − rhs` over equally spaced times `0, τ, 2τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropicScan {
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
}

pub fn entropic_lg_scan<M: TemporalModel>(model: &M, points: usize) -> Result<EntropicScan> {
    if points == 0 {
        return Err(Error::InvalidArgument("points must be at least 1".into()));
    }
    let h = model.time_scale() / points as f64;
    let rows: Vec<EntropicScan> = (1..=points)
        .into_par_iter()
        .map(|i| {
            let tau = i as f64 * h;
            let e = entropic_lg_check(model, 0.0, tau, 2.0 * tau)?;
            Ok(EntropicScan { tau, lhs: e.lhs, rhs: e.rhs, margin: e.lhs - e.rhs, violated: e.violated })
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(None::<EntropicScan>, |b, r| match b {
        Some(b) if b.margin >= r.margin => Some(b),
        _ => Some(r),
    })
    .expect("nonempty scan"))
}
