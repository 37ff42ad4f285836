//! Ground-state preparation in finite Jaynes-Cummings lattices.
//!
//! The crate covers the fixed-excitation basis ([`basis`]), sparse operator
//! assembly ([`operators`]), ground states and symmetric gaps ([`spectrum`]),
//! power-law parameter ramps ([`ramp`]), time evolution ([`propagator`]),
//! analytic limiting states and initialization pulses ([`state_prep`]) and
//! the configuration-driven sweep drivers behind the `jcl` binary
//! ([`sweep`]).

pub mod basis;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod propagator;
pub mod ramp;
pub mod spectrum;
pub mod state_prep;
pub mod sweep;

pub use basis::{enumerate_basis, BasisTable, LatticeShape, Qubit, SiteState};
pub use error::{BasisError, Error};
pub use operators::{DissipationConvention, HamiltonianTemplate, LatticeParams, SparseOperator, Translation};
