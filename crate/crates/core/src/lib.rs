//! Optimal control of elliptic equations with non-negative measure-valued
//! controls.
//!
//! The pipeline discretizes `min 1/2 ||y - y_d||^2` subject to `A y = u`,
//! `u >= 0`, with P1 finite elements on a structured triangulation and
//! nodal Dirac controls, then solves the optimality system by semismooth
//! Newton with continuation in an L2 regularization weight `alpha`.
//!
//! * [`mesh`]: structured meshes and node selections
//! * [`sparse`]: CSR matrices and direct solves
//! * [`assembly`]: stiffness, observation mass and control restriction
//! * [`ssn`]: semismooth Newton, continuation and the `beta` path
//! * [`diagnostics`]: Slater check, optimality residuals, sparsity
//! * [`oracle1d`]: exact 1D solutions and the non-attainment sequence
//! * [`cli`]: presets, configuration and file export

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cli;
pub mod diagnostics;
pub mod mesh;
pub mod oracle1d;
pub mod sparse;
pub mod ssn;

pub use assembly::{DiscreteProblem, OperatorSpec, Target};
pub use mesh::{build_rect_mesh, select_nodes, Bounds, Mesh, NodeSet, Region};
pub use sparse::SparseMatrix;
pub use ssn::{
    continuation_path, solve_beta, solve_limit, solve_regularized, ContinuationOptions,
    SolveReport, SolverOptions, SolverState,
};
