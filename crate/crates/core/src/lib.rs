//! Multi-source Weber problems under Minkowski gauges, solved with DCA and
//! adaptive boosted DCA.

pub mod analysis;
pub mod datasets;
pub mod error;
pub mod gauge;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod model;
pub mod sets;
pub mod solver;

pub use analysis::{
    brute_force_global, local_certificate, natural_clustering, single_source_solve, Certificate,
    CertificateStatus, Clustering, GlobalSolution,
};
pub use error::{Error, Result};
pub use gauge::{GaugeKind, GaugeSet};
pub use harness::{compare, random_init, CompareConfig, CompareReport, InitBox};
pub use matrix::{CenterMatrix, Matrix};
pub use model::{DcParts, ProblemInstance};
pub use sets::ConvexRegion;
pub use solver::{solve, SolverParams, SolverReport, Variant};
