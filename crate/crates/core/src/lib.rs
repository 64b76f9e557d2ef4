//! Invariant Hodge theory on 2-step nilpotent metric Lie algebras, harmonic
//! forms of constant length on circle bundles over flat tori, and the
//! systolic ratio of dual-critical lattices.

pub mod bundlenum;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod exterior;
pub mod nilalgebra;
pub mod problem;
pub mod report;
pub mod splitcalc;
pub mod systole;

pub use error::{Error, Result};
