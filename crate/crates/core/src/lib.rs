//! Solvers for ℓ1-minimization problems
//!
//! * `min ‖x‖₁ s.t. Ax = b` (primal-dual interior point, augmented Lagrangian, homotopy to λ = 0)
//! * `min ½‖b − Ax‖² + λ‖x‖₁` (homotopy, gradient projection, truncated Newton, IST, FISTA)
//! * corrupted observations `b = Ax + e` and the alignment problem `b = Bw + e`
//!
//! plus seeded synthetic generators and a benchmark harness.

pub mod alm;
pub mod bench;
pub mod error;
pub mod gradient_projection;
pub mod homotopy;
pub mod model;
pub mod numerics;
pub mod pdipa;
pub mod robust;
pub mod shrinkage;
pub mod solver;
pub mod synth;

pub use error::{L1Error, Result};
pub use model::{
    kkt_residual, kkt_residual_of, objective, objective_of, Problem, ProblemInstance, SolverConfig, SolverResult,
    StopKind, StoppingRule, TraceEntry,
};
pub use numerics::{DenseMatrix, Dictionary};
pub use robust::{AlignMethod, AlignmentProblem, AlignmentSolution, CabSolution, ExtendedDictionary};
pub use solver::{solve, Algorithm};
