//! Linear solvers, the smallest eigenpair, and the three routes to a
//! nontrivial critical point: Nehari-manifold descent, mountain-pass path
//! deformation and Newton refinement.

mod eigen;
pub mod linear;
mod mpa;
mod nehari;
mod newton;

pub use eigen::{smallest_eigenvalue, EigenPair};
pub use linear::{cg_solve, minres, LinearSolverCfg, ShiftedOperator};
pub use mpa::mpa_solve;
pub use nehari::{nehari_minimize, nehari_minimize_from, nehari_project, positive_seed};
pub use newton::{newton_direction, newton_refine, NewtonOutcome};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::critical_exponents;
use crate::discretization::ScalarField;
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Real;

/// Descent and path parameters shared by the Nehari and mountain-pass solvers.
///
/// Deserializes strictly; absent keys take their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct MpaCfg<T> {
    pub path_points: usize,
    /// First trial step; the Nehari descent never starts its backtracking below it.
    pub descent_step0: T,
    pub armijo_c: T,
    /// Stop when the dual gradient norm drops to this.
    pub grad_tol: T,
    pub max_outer: usize,
    /// Hand over to Newton once the gradient norm is below this.
    pub newton_switch: T,
}

impl<T: Real> Default for MpaCfg<T> {
    fn default() -> Self {
        MpaCfg {
            path_points: 41,
            descent_step0: T::one(),
            armijo_c: T::lit(1e-4),
            grad_tol: T::lit(1e-8),
            max_outer: 10_000,
            newton_switch: T::lit(1e-4),
        }
    }
}

impl<T: Real> MpaCfg<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.path_points < 3 {
            return bad(format!("path_points must be >= 3, got {}", self.path_points));
        }
        if !(self.descent_step0 > T::zero()) {
            return bad(format!(
                "descent_step0 must be positive, got {}",
                self.descent_step0
            ));
        }
        if !(self.armijo_c > T::zero() && self.armijo_c < T::one()) {
            return bad(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c));
        }
        if !(self.grad_tol > T::zero()) {
            return bad(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        if self.max_outer == 0 {
            return bad("max_outer must be >= 1".into());
        }
        if !(self.newton_switch >= T::zero()) {
            return bad(format!("newton_switch must be >= 0, got {}", self.newton_switch));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Nehari,
    Mpa,
    NewtonRefined,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Nehari => "nehari",
            SolveMethod::Mpa => "mpa",
            SolveMethod::NewtonRefined => "newton-refined",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub u_star: ScalarField<T>,
    pub level: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub method: SolveMethod,
    /// Filled in by callers that run the Pohozaev audit.
    pub pohozaev_residual: Option<T>,
    /// Wall-clock seconds.
    pub timing: f64,
    /// Growth at or beyond the critical Sobolev exponent.
    pub supercritical: bool,
}

/// `p > p_crit` for power laws; `q₁ ≥ 2_k` for anything else.
pub fn is_supercritical<T: Real>(nl: &Nonlinearity<T>) -> Result<bool> {
    let ce = critical_exponents(nl.k())?;
    Ok(match nl.power() {
        Some(p) => p > ce.p_crit,
        None => nl.meta().q1 >= ce.two_k,
    })
}

/// Counts consecutive outer iterations whose level change is negligible.
pub(crate) struct StagnationWatch<T> {
    last: Option<T>,
    flat: usize,
}

pub(crate) const STAGNATION_WINDOW: usize = 100;

impl<T: Real> StagnationWatch<T> {
    pub fn new() -> Self {
        StagnationWatch { last: None, flat: 0 }
    }

    /// True once the level has been flat for the whole window.
    pub fn update(&mut self, level: T) -> bool {
        if let Some(prev) = self.last {
            if (level - prev).abs() <= T::lit(1e-15) * level.abs().max(T::one()) {
                self.flat += 1;
            } else {
                self.flat = 0;
            }
        }
        self.last = Some(level);
        self.flat >= STAGNATION_WINDOW
    }
}
