//! Solver plumbing, brute-force verification and the command-line front end
//! for semidefinite lower bounds on covering codes.

// Links the system BLAS/LAPACK needed by the semidefinite cones.
extern crate openblas_src;

pub mod backend;
pub mod cli;
pub mod fixtures;
pub mod formats;
pub mod oracle;
pub mod sdpa;
pub mod solverio;
