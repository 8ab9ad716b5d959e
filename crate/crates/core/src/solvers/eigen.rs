use crate::discretization::{ScalarField, SparseOperator};
use crate::error::{Error, Result};
use crate::scalar::{dot, norm2, Real};
use crate::solvers::linear::{cg_solve_into, LinearSolverCfg};
use crate::Grid;
use std::sync::Arc;

const RAYLEIGH_REL_CHANGE: f64 = 1e-12;
const RESIDUAL_REL: f64 = 1e-8;
const MAX_SWEEPS: usize = 5000;

#[derive(Debug, Clone)]
pub struct EigenPair<T> {
    pub lambda_min: T,
    /// Mass-normalized, sign fixed so that its entries sum to a positive value.
    pub eigvec: ScalarField<T>,
    pub iterations: usize,
    /// `‖A v - λ M v‖ / ‖A v‖`
    pub residual: T,
}

/// Smallest eigenpair of `A v = λ M v` (`M` the lumped mass) by inverse
/// iteration with Rayleigh-quotient stopping.
pub fn smallest_eigenvalue<T: Real>(
    grid: &Arc<Grid<T>>,
    a: &SparseOperator<T>,
    cfg: &LinearSolverCfg<T>,
) -> Result<EigenPair<T>> {
    let n = a.dim();
    if grid.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.len(),
        });
    }
    let mass = a.mass();
    // Tighter inner solves than the default so the residual test can be met.
    let inner = cfg.with_tol(cfg.tol.min(T::lit(1e-12)));
    let mut v = vec![T::one(); n];
    normalize_mass(&mut v, mass);
    let mut lambda = rayleigh(a, &v, mass);
    let mut z = v.clone();
    for it in 1..=MAX_SWEEPS {
        let rhs: Vec<T> = v.iter().zip(mass).map(|(&vi, &m)| vi * m).collect();
        cg_solve_into(a, &rhs, &mut z, &inner)?;
        v.copy_from_slice(&z);
        normalize_mass(&mut v, mass);
        let next = rayleigh(a, &v, mass);
        let change = (next - lambda).abs() / next.abs();
        lambda = next;
        let av = a.apply(&v);
        let res: Vec<T> = av
            .iter()
            .zip(&v)
            .zip(mass)
            .map(|((&x, &vi), &m)| x - lambda * m * vi)
            .collect();
        let residual = norm2(&res) / norm2(&av);
        if change <= T::lit(RAYLEIGH_REL_CHANGE) && residual <= T::lit(RESIDUAL_REL) {
            if v.iter().copied().sum::<T>() < T::zero() {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            return Ok(EigenPair {
                lambda_min: lambda,
                eigvec: ScalarField::new(Arc::clone(grid), v)?,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        method: "inverse iteration",
        iterations: MAX_SWEEPS,
        residual: lambda.as_f64(),
    })
}

fn normalize_mass<T: Real>(v: &mut [T], mass: &[T]) {
    let s: T = v.iter().zip(mass).map(|(&x, &m)| m * x * x).sum::<T>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
}

fn rayleigh<T: Real>(a: &SparseOperator<T>, v: &[T], mass: &[T]) -> T {
    let mv: T = v.iter().zip(mass).map(|(&x, &m)| m * x * x).sum();
    dot(&a.apply(v), v) / mv
}
