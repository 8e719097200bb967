//! Exact model building for lower bounds on covering codes.
//!
//! The crate computes the combinatorial coefficients of the Hamming scheme,
//! constructs valid inequality families, solves the linear programming bound
//! exactly, and assembles the symmetry-reduced semidefinite programs as exact
//! rational data. Solving the semidefinite programs and all I/O live in the
//! companion `covbound` crate.

#![no_std]

extern crate alloc;

pub mod combinatorics;
pub mod inequalities;
pub mod linear;
pub mod lpbound;
pub mod sdpmodel;

pub use combinatorics::{CoefficientCache, CoefficientKey, OrbitIndex};
pub use inequalities::{InequalityError, InequalitySet, Provenance};
pub use linear::LinearForm;
pub use lpbound::{LpError, LpProblem, LpSolution};
pub use sdpmodel::{ObjectiveKind, PsdBlock, SdpError, SdpProblem, VariableTable};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
