#![forbid(unsafe_code)]

//! Numerical laboratory for measurement-disturbance relations (MDRs).
//!
//! The crate builds entangled bipartite states whose second particle mirrors
//! the observables of the first, couples a meter to the third particle,
//! evaluates measurement precision and disturbance, and derives the bound
//! each MDR places on the sum of bipartite correlations in the resulting
//! tripartite state.

pub mod bounds;
pub mod cli;
pub mod entangle;
pub mod hilbert;
pub mod mdr;
pub mod measure;
pub mod optimize;
pub mod tol;
pub mod verify;
