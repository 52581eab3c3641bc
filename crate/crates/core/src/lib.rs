//! Numerical toolkit for non-stabilizerness ("magic") of one- and two-qubit
//! states, and for the machines that try to copy it.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: pure states, density matrices, Bloch vectors, Haar sampling.
//! - [`stabkit`]: Pauli and Weyl operators, stabilizer states, the
//!   single-qubit Clifford group and Bloch-ball polytope geometry.
//! - [`magic`]: the witness `D`, robustness of magic `R` (closed form and a
//!   linear-programming oracle), stabilizer Rényi entropies and the
//!   magic-generating power of two-qubit unitaries.
//! - [`cloners`]: the unrestricted broadcaster model plus the
//!   Wootters–Zurek and Buzek–Hillery cloning machines.
//! - [`optimize`]: the 15-parameter two-qubit broadcasting unitary and an
//!   ISRES-style evolution strategy that searches it.
//! - [`verify`]: randomized property suites shared by the CLI and the
//!   acceptance tests.

pub mod cloners;
mod error;
pub mod magic;
pub mod optimize;
pub mod qstate;
pub mod stabkit;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix (row/column major is nalgebra's business).
pub type CMatrix = nalgebra::DMatrix<C64>;
