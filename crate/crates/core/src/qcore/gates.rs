use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Operator, StateVector, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

/// Named standard gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Cnot,
    Rx,
    Ry,
    Rz,
}

impl Gate {
    pub const ALL: [Gate; 11] = [
        Gate::I,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::H,
        Gate::S,
        Gate::T,
        Gate::Cnot,
        Gate::Rx,
        Gate::Ry,
        Gate::Rz,
    ];

    pub fn is_rotation(self) -> bool {
        matches!(self, Gate::Rx | Gate::Ry | Gate::Rz)
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::I => "I",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::T => "T",
            Gate::Cnot => "CNOT",
            Gate::Rx => "Rx",
            Gate::Ry => "Ry",
            Gate::Rz => "Rz",
        }
    }

    /// Matrix of the gate. Rotations are `exp(-iθσ/2)`.
    pub fn matrix<T: Real>(self, angle: Option<T>) -> Result<Operator<T>> {
        match (self.is_rotation(), angle) {
            (false, Some(_)) => return Err(Error::UnexpectedAngle(self.name().into())),
            (true, None) => return Err(Error::MissingAngle(self.name().into())),
            _ => {}
        }
        let o = |v: [Cx<T>; 4]| Operator::new(2, v.to_vec());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Gate::I => Ok(Operator::identity(2)),
            Gate::X => o([cx(0., 0.), cx(1., 0.), cx(1., 0.), cx(0., 0.)]),
            Gate::Y => o([cx(0., 0.), cx(0., -1.), cx(0., 1.), cx(0., 0.)]),
            Gate::Z => o([cx(1., 0.), cx(0., 0.), cx(0., 0.), cx(-1., 0.)]),
            Gate::H => o([cx(r, 0.), cx(r, 0.), cx(r, 0.), cx(-r, 0.)]),
            Gate::S => o([cx(1., 0.), cx(0., 0.), cx(0., 0.), cx(0., 1.)]),
            Gate::T => o([cx(1., 0.), cx(0., 0.), cx(0., 0.), cx(r, r)]),
            Gate::Cnot => Operator::from_reals(
                4,
                &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.],
            ),
            Gate::Rx | Gate::Ry | Gate::Rz => {
                let half = angle.unwrap() / T::lit(2.0);
                let (c, s) = (half.cos(), half.sin());
                let z = T::zero();
                let v = match self {
                    Gate::Rx => [Cx::new(c, z), Cx::new(z, -s), Cx::new(z, -s), Cx::new(c, z)],
                    Gate::Ry => [Cx::new(c, z), Cx::new(-s, z), Cx::new(s, z), Cx::new(c, z)],
                    _ => [Cx::new(c, -s), Cx::new(z, z), Cx::new(z, z), Cx::new(c, s)],
                };
                o(v)
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Gate::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownGate(s.into()))
    }
}

/// Looks up a gate by name and builds its matrix.
pub fn standard_gate<T: Real>(name: &str, angle: Option<T>) -> Result<Operator<T>> {
    name.parse::<Gate>()?.matrix(angle)
}

pub fn pauli_x<T: Real>() -> Operator<T> {
    Gate::X.matrix(None).unwrap()
}

pub fn pauli_y<T: Real>() -> Operator<T> {
    Gate::Y.matrix(None).unwrap()
}

pub fn pauli_z<T: Real>() -> Operator<T> {
    Gate::Z.matrix(None).unwrap()
}

pub fn hadamard<T: Real>() -> Operator<T> {
    Gate::H.matrix(None).unwrap()
}

pub fn cnot<T: Real>() -> Operator<T> {
    Gate::Cnot.matrix(None).unwrap()
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] =
        [BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus];

    /// Superdense labelling `β_xy = (|0y⟩ + (-1)^x |1ȳ⟩)/√2`.
    pub fn from_bits(x: u8, y: u8) -> Self {
        match (x & 1, y & 1) {
            (0, 0) => BellLabel::PhiPlus,
            (0, 1) => BellLabel::PsiPlus,
            (1, 0) => BellLabel::PhiMinus,
            _ => BellLabel::PsiMinus,
        }
    }

    /// Inverse of [`BellLabel::from_bits`].
    pub fn bits(self) -> (u8, u8) {
        match self {
            BellLabel::PhiPlus => (0, 0),
            BellLabel::PsiPlus => (0, 1),
            BellLabel::PhiMinus => (1, 0),
            BellLabel::PsiMinus => (1, 1),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Φ+",
            BellLabel::PhiMinus => "Φ-",
            BellLabel::PsiPlus => "Ψ+",
            BellLabel::PsiMinus => "Ψ-",
        }
    }

    pub fn state<T: Real>(self) -> StateVector<T> {
        bell_state(self)
    }
}

impl FromStr for BellLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" | "φ+" => Ok(BellLabel::PhiPlus),
            "phi-" | "phiminus" | "φ-" => Ok(BellLabel::PhiMinus),
            "psi+" | "psiplus" | "ψ+" => Ok(BellLabel::PsiPlus),
            "psi-" | "psiminus" | "ψ-" => Ok(BellLabel::PsiMinus),
            _ => Err(Error::InvalidArgument(format!("unknown Bell label `{s}`"))),
        }
    }
}

pub fn bell_state<T: Real>(label: BellLabel) -> StateVector<T> {
    let amps: [f64; 4] = match label {
        BellLabel::PhiPlus => [1., 0., 0., 1.],
        BellLabel::PhiMinus => [1., 0., 0., -1.],
        BellLabel::PsiPlus => [0., 1., 1., 0.],
        BellLabel::PsiMinus => [0., 1., -1., 0.],
    };
    StateVector::from_reals(&amps).unwrap()
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_state<T: Real>(n: usize) -> Result<StateVector<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("GHZ needs at least 2 qubits, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooLarge { dim: 1 << n.min(63), max_qubits: MAX_QUBITS });
    }
    let mut amps = vec![0.0; 1 << n];
    amps[0] = 1.0;
    amps[(1 << n) - 1] = 1.0;
    StateVector::from_reals(&amps)
}

/// `|+⟩`.
pub fn plus<T: Real>() -> StateVector<T> {
    StateVector::from_reals(&[1., 1.]).unwrap()
}

/// `|-⟩`.
pub fn minus<T: Real>() -> StateVector<T> {
    StateVector::from_reals(&[1., -1.]).unwrap()
}

/// Computational (Z) basis of dimension `dim`.
pub fn computational_basis<T: Real>(dim: usize) -> Vec<StateVector<T>> {
    (0..dim).map(|i| StateVector::basis(dim, i).unwrap()).collect()
}

/// Qubit X basis `{|+⟩, |-⟩}`.
pub fn x_basis<T: Real>() -> Vec<StateVector<T>> {
    vec![plus(), minus()]
}

/// Bell basis in `BellLabel::ALL` order.
pub fn bell_basis<T: Real>() -> Vec<StateVector<T>> {
    BellLabel::ALL.iter().map(|l| bell_state(*l)).collect()
}
