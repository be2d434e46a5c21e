//! Laplace-transform reduced-basis (LT-RB) solver for the linear wave equation
//! `∂²u/∂t² − c²Δu = f` on a rectangle with homogeneous Dirichlet data.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the whole numerical
//! pipeline:
//!
//! - [`mesh`]: structured P1 triangulations and mesh-quality constants
//! - [`fem`]: mass, stiffness and H¹₀ Gram matrices, load vectors, L² projection
//! - [`spectral`]: largest generalized eigenvalue and the optimal sampling parameter
//! - [`laplace`]: quadrature nodes on `Re{s} = α`, Laplace-domain solves, snapshots
//! - [`pod`]: weighted POD in the H¹₀ inner product
//! - [`newmark`]: implicit Newmark stepping for full and reduced systems
//! - [`metrics`]: relative space-time errors, singular-value series, timing reports
//!
//! IO, timing, threading and the command line live in the `ltrb` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fem;
pub mod forcing;
pub mod laplace;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod newmark;
pub mod pod;
pub mod spectral;

pub use error::{Error, Result};
pub use fem::{assemble_operators, gaussian_field, l2_project, load_vector, GaussianField, OperatorSet};
pub use forcing::{Forcing, TemporalProfile};
pub use laplace::{compute_snapshots, make_quadrature, solve_laplace, LaplaceSolver, QuadratureRule, SnapshotSet};
pub use mesh::{build_structured_mesh, mesh_quality, Mesh, QualityReport, Rect};
pub use metrics::{relative_error, singular_value_report, timing_report, ErrorNorm, TimingReport};
pub use newmark::{lift, newmark_solve, reduce_system, NewmarkConfig, ReducedSystem, Trajectory};
pub use pod::{build_reduced_basis, cholesky_gram, pod_projection_error, GramFactor, ReducedBasis};
pub use spectral::{max_generalized_eigenvalue, optimal_beta, BetaSelection, PowerIteration};
