//! Frobenius splitting numbers, F-signature estimates and graded invariants
//! of weighted-homogeneous hypersurfaces over prime fields.

pub mod catalog;
pub mod frobenius;
pub mod linalg;
pub mod qseries;
pub mod wpoly;

pub use qseries::Rational;
