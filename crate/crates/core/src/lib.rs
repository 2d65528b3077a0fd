//! Verification engine for the extended Kepler-Coulomb superintegrable
//! systems: exact Poisson brackets through forward-mode jets, the catalog of
//! constants of motion, structure-relation checks, orbit integration and
//! reproducible reports.

pub mod analysis;
pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod identities;
pub mod numeric;
pub mod report;
pub mod sampler;
pub mod systems;

pub use error::{Error, Result};
