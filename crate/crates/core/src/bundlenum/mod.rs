//! Numerical side: fields on discretized flat tori and the invariant
//! calculus of circle bundles over them.

pub mod bk;
pub mod convergence;
pub mod grid;
pub mod identity;
pub mod laplacian;
pub mod precond;
pub mod trig;

pub use bk::{bk_example_check, CoordMetric3};
pub use convergence::{ConvergenceTable, ROUNDOFF_FLOOR};
pub use grid::{Layout, TorusField, TorusGrid};
pub use identity::{awb_coclosed_check, contraction_identity_check};
pub use laplacian::{
    assemble_invariant_laplacian, harmonic_scan, left_invariance_discriminator, BundleMetric, Discrimination,
    HarmonicScan, InvariantComplex, NormStats,
};
pub use trig::{TrigForm, TrigPoly, TrigTerm, Wave};
