//! Simulation and analysis of a period-quadrupling discrete time crystal on a
//! periodically quenched spin-1/2 ladder.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the `*64` aliases below are what the studies use.

pub mod error;
pub mod evolution;
pub mod floquet;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod observables;
pub mod recompile;
pub mod scalar;
pub mod statevector;

pub use error::{Error, Result};
pub use linalg::{two_site_expm, LocalOperator, Mat2, Mat4, Pauli};
pub use model::{
    hamiltonian_terms, sample_disorder, DisorderSpec, DisorderedParams, HalfPeriod, HamiltonianTerm, Ladder,
    ModelParams, ModelSpec, SiteIndex, TermFamily,
};
pub use scalar::{Real, C};
pub use statevector::{apply_gate, GateOp, StateVector, MAX_QUBITS};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type ModelParams64 = ModelParams<f64>;
pub type DisorderedParams64 = DisorderedParams<f64>;
