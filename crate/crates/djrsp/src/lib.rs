//! Simulator and analysis toolkit for deterministic joint remote state
//! preparation (DJRSP) of a single qubit over a shared GHZ resource.
//!
//! The crate is organized around the stages of the protocol:
//!
//! * [`qmath`]: dense complex linear algebra for registers of up to three
//!   qubits: tensor products, operator embedding, partial trace, fidelity.
//! * [`channels`]: Kraus sets for the amplitude-damping, bit-flip,
//!   phase-flip and depolarizing channels, plus the weak-measurement and
//!   reversal operators used for decoherence suppression.
//! * [`protocol`]: the three-step preparation protocol itself, with
//!   optional weak-measurement protection and JRSP/RSP reduction modes.
//! * [`analysis`]: state-independent average fidelity by quadrature,
//!   closed-form fidelity/probability evaluators, a bounded scalar
//!   optimizer for the reversal strength, and inequality verdicts.
//!
//! All numerics are generic over the real scalar type through the
//! [`Scalar`] trait; `f64` is the intended production precision and the
//! aliases below pin the common types to it.

pub mod analysis;
pub mod channels;
pub mod error;
pub mod protocol;
pub mod qmath;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Crate-root aliases for the default (`f64`) instantiation.
pub type ComplexMatrix64 = qmath::ComplexMatrix<f64>;
pub type PureState64 = qmath::PureState<f64>;
pub type DensityOperator64 = qmath::DensityOperator<f64>;
pub type KrausChannel64 = channels::KrausChannel<f64>;
pub type ProtectionConfig64 = channels::ProtectionConfig<f64>;
pub type TargetState64 = protocol::TargetState<f64>;
pub type ProtocolResult64 = protocol::ProtocolResult<f64>;
pub type OptimizationResult64 = analysis::OptimizationResult<f64>;
