//! Exact computations in modular affine vertex algebras at the critical level.
//!
//! Scalars are exact rationals or residues modulo a prime. Every algorithm is
//! deterministic given its inputs and an optional seed.

pub mod error;
pub mod harness;
pub mod jets;
pub mod linalg;
pub mod liealg;
pub mod report;
pub mod scalars;
pub mod sugawara;
pub mod vacuum;

pub use error::{Error, Result};
pub use harness::{Campaign, Command, Params, Report};
pub use liealg::{build_classical, validate_spec, Family, LieAlgebraSpec};
pub use report::{Check, Outcome};
pub use scalars::{Field, Scalar};
pub use jets::DiffPoly;
pub use vacuum::{VState, VacuumModule};
