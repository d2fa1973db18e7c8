//! Phase-space engine for light-pulse atom interferometers in quadratic potentials.
//!
//! The external motion of the atom is described by a 6-dimensional phase-space
//! vector `ξ = (x, p)`. Every laser pulse acts as a displacement in phase space,
//! and the output of an interferometer follows from the time-evolution matrix,
//! the displacement algebra, and the characteristic function of the initial state.

pub mod error;
pub mod expansions;
pub mod frames;
pub mod oracle;
pub mod propagation;
pub mod pulses;
pub mod quadrature;
pub mod rotations;
pub mod states;
pub mod symplectic;

pub use error::{Error, Result};
pub use symplectic::{Mat3, Mat6, PhaseVector, Vec3, HBAR};
