//! Simulation of Gaussian quantum state transfer and routing through
//! networks of coupled harmonic oscillators.
//!
//! Conventions: quadratures are ordered `(q_1..q_n, p_1..p_n)`, hbar = 1 and
//! the vacuum covariance matrix is `I/2` in dimensionless units.

pub mod datasets;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod protocols;
pub mod routing;
pub mod rewire;

pub use error::{Error, Result};
pub use gaussian::{fidelity, log_negativity, GaussianState};
pub use graph::{Graph, Partition};
pub use dynamics::{NetworkModel, NormalModeBasis};
pub use protocols::{CouplingRule, Payload, ProtocolKind, Window};
pub use rewire::{RewireMode, RewireParams};
pub use routing::{FidelityTensor, PairFilter, TensorProtocol};

pub use nalgebra::{Complex, DMatrix, DVector};
