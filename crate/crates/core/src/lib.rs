//! Gauged fermionic Gaussian PEPS for compact U(1) lattice gauge theory,
//! with an exact state-vector engine for cross-checks.

pub mod dualizer;
pub mod exact;
pub mod fpeps;
pub mod gaussian;
pub mod lattice;
pub mod sampler;
pub mod spectra;
