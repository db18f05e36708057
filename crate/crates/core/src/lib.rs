//! Doubled-up linear quantum networks in the SLH formalism: the doubled-up
//! matrix algebra, SLH models and the cascade product, state-space
//! realization and spectra, structured uncertainty, and the `qnet.json`
//! network description format.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dup;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod netdsl;
pub mod par;
pub mod slh;
pub mod statespace;
pub mod uncertainty;

pub use error::{Error, Result};
pub use matrix::{c64, ComplexMatrix, ComplexScalar};
pub use par::Execution;
pub use slh::{Coupling, Hamiltonian, SlhModel};
pub use statespace::StateSpaceModel;

/// Default tolerance for unitarity, hermiticity and doubled-up structure checks.
pub const DEFAULT_TOL: f64 = 1e-10;
