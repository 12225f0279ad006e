//! Constraint-preserving variational forms for linearly constrained binary
//! optimization, simulated on a dense statevector VQE.
//!
//! The crate is split into:
//!
//! * [`statevector`]: parameterized circuits, simulation and shot sampling.
//! * [`model`]: problems, penalty reduction, Ising form and the exhaustive oracle.
//! * [`ansatz`]: tailored variational forms, 2-Local and QAOA baselines, gate accounting.
//! * [`vqe`]: expectation estimation, derivative-free optimizers and the hybrid loop.
//! * [`report`] and [`cli`]: experiment orchestration and file output.

pub mod ansatz;
pub mod cli;
pub mod error;
pub mod model;
pub mod report;
pub mod statevector;
pub mod vqe;

pub use error::{Error, Result};
