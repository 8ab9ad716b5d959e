//! Variational solvers and numerical audits for the semilinear degenerate
//! elliptic Dirichlet problem
//!
//! ```text
//!   -u_xx - |x|^{2k} u_yy = f(x, y, u)   in Ω,
//!                       u = 0            on ∂Ω,
//! ```
//!
//! on bounded planar domains that meet the degeneracy line `x = 0`.
//!
//! The numerics are generic over the scalar type through [`Real`]; the
//! `*64` aliases at the crate root fix the scalar to `f64`, which is what
//! the command-line front end uses.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod discretization;
pub mod domain;
pub mod error;
pub mod functional;
pub mod nonlinearity;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Real;

pub use analysis::{
    critical_exponents, embedding_constant, nonexistence_trend, pohozaev_evaluate, CriticalExponents,
    EmbeddingReport, PohozaevReport, TrendReport, TrendVerdict,
};
pub use discretization::{assemble_grushin, build_grid, Grid, ScalarField, SparseOperator};
pub use domain::{boundary_quadrature, BoundarySample, Domain, DomainKind};
pub use functional::{EnergyState, Functional};
pub use nonlinearity::{HypothesisMeta, Nonlinearity, NonlinearityKind};
pub use solvers::{
    cg_solve, mpa_solve, nehari_minimize, nehari_project, newton_refine, smallest_eigenvalue,
    LinearSolverCfg, MpaCfg, SolveMethod, SolveReport,
};

pub type Domain64 = Domain<f64>;
pub type Grid64 = Grid<f64>;
pub type ScalarField64 = ScalarField<f64>;
pub type SparseOperator64 = SparseOperator<f64>;
pub type Nonlinearity64 = Nonlinearity<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type MpaCfg64 = MpaCfg<f64>;
pub type LinearSolverCfg64 = LinearSolverCfg<f64>;
pub type PohozaevReport64 = PohozaevReport<f64>;
pub type EmbeddingReport64 = EmbeddingReport<f64>;
