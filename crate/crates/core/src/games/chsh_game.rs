use serde::Serialize;

use super::{run_trials, Analytic, GameStats, Trial};
use crate::entangle::{chsh_value, ObservableSettings};
use crate::error::Result;
use crate::qcore::{measure_local, BellLabel, DensityOperator, RandomSource, StateVector};
use crate::scalar::Cx;
use crate::Rational;

/// How Alice and Bob answer questions `x, y ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChshStrategy {
    /// Fixed answers: Alice says `a[x]`, Bob says `b[y]`.
    Classical { a: [u8; 2], b: [u8; 2] },
    /// Shared `|Ψ⁻⟩`; Alice measures `A₂` on `x=0`, `A₁` on `x=1`; Bob `B₁` on `y=0`, `B₂` on `y=1`.
    QuantumOptimal,
}

impl ChshStrategy {
    fn name(&self) -> String {
        match self {
            ChshStrategy::Classical { a, b } => format!("classical:a{}{}b{}{}", a[0], a[1], b[0], b[1]),
            ChshStrategy::QuantumOptimal => "quantum".into(),
        }
    }
}

fn wins(x: u8, y: u8, a: u8, b: u8) -> bool {
    x & y == a ^ b
}

fn classical_win_rate(a: [u8; 2], b: [u8; 2]) -> Rational {
    let won = (0..4u8).filter(|q| wins(q >> 1, q & 1, a[(q >> 1) as usize], b[(q & 1) as usize])).count();
    Rational::new(won as i64, 4)
}

/// Best of the 16 deterministic strategies.
pub fn best_classical_chsh() -> (Rational, ChshStrategy) {
    let mut best = (Rational::from(0), ChshStrategy::Classical { a: [0, 0], b: [0, 0] });
    for bits in 0..16u8 {
        let a = [bits & 1, (bits >> 1) & 1];
        let b = [(bits >> 2) & 1, (bits >> 3) & 1];
        let p = classical_win_rate(a, b);
        if p > best.0 {
            best = (p, ChshStrategy::Classical { a, b });
        }
    }
    best
}

/// `½ + S/8` with `S` evaluated on `|Ψ⁻⟩` at the standard settings.
pub fn chsh_quantum_analytic() -> Result<f64> {
    let rho = DensityOperator::from_pure(&BellLabel::PsiMinus.state());
    Ok(0.5 + chsh_value(&rho, &ObservableSettings::standard())? / 8.0)
}

/// Eigenbasis `(+1, −1)` of `n·σ` for a unit Bloch vector.
fn bloch_basis(n: [f64; 3]) -> [StateVector; 2] {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let theta = (n[2] / norm).clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Cx::from_polar(1.0, phi);
    [
        StateVector::new(vec![Cx::new(c, 0.0), e * s]).expect("unit"),
        StateVector::new(vec![Cx::new(-s, 0.0), e * c]).expect("unit"),
    ]
}

/// Referee sends uniform `x, y`; the pair wins when `x·y = a ⊕ b`.
pub fn chsh_game(strategy: &ChshStrategy, trials: u64, rng: &RandomSource) -> Result<GameStats> {
    let singlet = BellLabel::PsiMinus.state::<f64>();
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let alice = [bloch_basis([1., 0., 0.]), bloch_basis([0., 0., 1.])];
    let bob = [bloch_basis([-r2, 0., -r2]), bloch_basis([-r2, 0., r2])];
    let tally = run_trials(trials, rng, |r| {
        let (x, y) = (r.bit(), r.bit());
        let (a, b) = match strategy {
            ChshStrategy::Classical { a, b } => (a[x as usize], b[y as usize]),
            ChshStrategy::QuantumOptimal => {
                let first = measure_local(&singlet, &alice[x as usize], &[0], r)?;
                let second = measure_local(&first.post_state, &bob[y as usize], &[1], r)?;
                (first.index as u8, second.index as u8)
            }
        };
        Ok(Trial { observed: true, win: wins(x, y, a, b) })
    })?;
    let analytic = match strategy {
        ChshStrategy::Classical { a, b } => classical_win_rate(*a, *b).into(),
        ChshStrategy::QuantumOptimal => Analytic { value: chsh_quantum_analytic()?, exact: None },
    };
    Ok(GameStats::from_tally("chsh", strategy.name(), tally, analytic, None))
}
