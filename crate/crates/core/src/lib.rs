//! Numerical toolkit for virtual contact structures on `S¹ × 𝔻` covering
//! circle bundles over closed hyperbolic surfaces.
//!
//! The crate builds the genus-two deck group, Lutz-twisted contact forms and
//! their Reeb-like fields, certifies the positivity conditions by sampling,
//! and searches for contractible periodic orbits.

pub mod error;
pub mod forms;
pub mod hyperbolic;
pub mod lutz;
pub mod magnetic;
pub mod cli;
pub mod dynamics;
pub mod verifier;

pub use error::{Error, Result};
