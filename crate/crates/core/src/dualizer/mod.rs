//! Transformations that solve the Gauss law: the unitary gauge of Higgs
//! matter and the elimination of fermionic matter on an open chain.

mod elimination;
mod higgs;

pub use elimination::{ChainElimination, SpectrumComparison};
pub use higgs::{DecouplingReport, HiggsSystem};

use crate::exact::ExactError;
use crate::lattice::LatticeError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualizerError {
    #[error("fermion elimination needs an even link modulus, got {0}")]
    OddModulus(usize),
    #[error("fermion elimination is only defined on an open chain")]
    NotOneDimensional,
    #[error("operator leaves the hard-core image with weight {0:e}; a Majorana operator survives")]
    ResidualMajorana(f64),
    #[error("state has dimension {got}, expected {expected}")]
    StateSize { expected: usize, got: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
