//! Pseudo-Hermitian ladder algebras: phermions, their supersymmetric
//! oscillators, multi-mode Jordan-Wigner towers and the associated
//! three-dimensional Lie algebras.

pub mod algebra;
pub mod error;
pub mod liealg;
pub mod matops;
pub mod multiphermion;
pub mod oscillator;
pub mod properties;
pub mod pseudosusy;
pub mod random;
pub mod report;

pub use error::{Error, Result};
pub use matops::{c64, ComplexMatrix, Inertia, Tolerance, C64};
