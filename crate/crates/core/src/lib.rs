//! Quantum-information simulator built around entanglement in time.
//!
//! The [`qcore`] linear algebra is generic over the real scalar ([`Real`], implemented
//! for `f32` and `f64`); the protocol layers run at `f64`. Exact probability trees in
//! [`games`] are generic over any numeric field and are evaluated with [`Rational`].

pub mod chain;
pub mod consensus;
pub mod entangle;
pub mod error;
pub mod foundations;
pub mod games;
pub mod infotheory;
pub mod qcore;
pub mod scalar;
pub mod temporal;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Exact rational used by the analytic game trees.
pub type Rational = num_rational::Ratio<i64>;

pub type StateVector64 = qcore::StateVector<f64>;
pub type StateVector32 = qcore::StateVector<f32>;
pub type Operator64 = qcore::Operator<f64>;
pub type Operator32 = qcore::Operator<f32>;
pub type Density64 = qcore::DensityOperator<f64>;
pub type Density32 = qcore::DensityOperator<f32>;
