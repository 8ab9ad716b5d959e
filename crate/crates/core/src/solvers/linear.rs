//! Krylov solvers: Jacobi-preconditioned CG for the SPD stiffness and
//! MINRES for the symmetric indefinite Newton systems.

use serde::{Deserialize, Serialize};

use crate::discretization::LinearOperator;
use crate::discretization::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm2, Real};

/// Stopping rule for Krylov solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct LinearSolverCfg<T> {
    /// Relative residual `‖b - A x‖ / ‖b‖`.
    pub tol: T,
    /// Iteration cap; `None` means `10 · N`.
    pub max_iter: Option<usize>,
}

impl<T: Real> Default for LinearSolverCfg<T> {
    fn default() -> Self {
        LinearSolverCfg {
            tol: T::lit(1e-10),
            max_iter: None,
        }
    }
}

impl<T: Real> LinearSolverCfg<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero() && self.tol < T::one()) {
            return Err(Error::InvalidInput(format!(
                "linear.tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidInput("linear.max_iter must be >= 1".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n.max(1))
    }

    pub fn with_tol(self, tol: T) -> Self {
        LinearSolverCfg { tol, ..self }
    }
}

/// `A - diag(shift)`: the Newton matrix of the energy functional.
pub struct ShiftedOperator<'a, T> {
    pub base: &'a SparseOperator<T>,
    pub shift: &'a [T],
}

impl<T: Real> LinearOperator<T> for ShiftedOperator<'_, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        self.base.apply_into(x, y);
        for ((yi, &xi), &s) in y.iter_mut().zip(x).zip(self.shift) {
            *yi -= s * xi;
        }
    }
}

/// Solves `A x = b` for SPD `A` by CG, preconditioned with the diagonal.
pub fn cg_solve<T: Real>(a: &SparseOperator<T>, b: &[T], cfg: &LinearSolverCfg<T>) -> Result<Vec<T>> {
    let mut x = vec![T::zero(); a.dim()];
    cg_solve_into(a, b, &mut x, cfg)?;
    Ok(x)
}

/// CG starting from the guess in `x`; returns the iteration count.
pub fn cg_solve_into<T: Real>(
    a: &SparseOperator<T>,
    b: &[T],
    x: &mut [T],
    cfg: &LinearSolverCfg<T>,
) -> Result<usize> {
    let n = a.dim();
    if b.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if b.len() != n { b.len() } else { x.len() },
        });
    }
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(0);
    }
    let inv_diag: Vec<T> = a.diagonal().into_iter().map(|d| d.recip()).collect();
    let mut r = a.apply(x);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let target = cfg.tol * bnorm;
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&ri, &d)| ri * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    let max_iter = cfg.max_iter_for(n);
    let mut rnorm = norm2(&r);
    for it in 0..max_iter {
        if rnorm <= target {
            return Ok(it);
        }
        a.apply_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::NotConverged {
                method: "cg (operator not positive definite)",
                iterations: it,
                residual: (rnorm / bnorm).as_f64(),
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        rnorm = norm2(&r);
        for ((zi, &ri), &d) in z.iter_mut().zip(&r).zip(&inv_diag) {
            *zi = ri * d;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    if rnorm <= target {
        return Ok(max_iter);
    }
    Err(Error::NotConverged {
        method: "cg",
        iterations: max_iter,
        residual: (rnorm / bnorm).as_f64(),
    })
}

/// MINRES for symmetric (possibly indefinite) systems with an SPD diagonal
/// preconditioner. Returns the solution and its true relative residual;
/// a residual above `tol` is reported, not raised, so callers can decide.
pub fn minres<T: Real, Op: LinearOperator<T>>(
    op: &Op,
    precond_diag: &[T],
    b: &[T],
    tol: T,
    max_iter: usize,
) -> (Vec<T>, T) {
    let n = op.dim();
    let mut x = vec![T::zero(); n];
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        return (x, T::zero());
    }
    let minv = |v: &[T]| -> Vec<T> { v.iter().zip(precond_diag).map(|(&a, &d)| a / d).collect() };
    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = minv(&r1);
    let beta1 = dot(&r1, &y).sqrt();
    let mut oldb = T::zero();
    let mut beta = beta1;
    let mut dbar = T::zero();
    let mut epsln = T::zero();
    let mut phibar = beta1;
    let mut cs = -T::one();
    let mut sn = T::zero();
    let mut w = vec![T::zero(); n];
    let mut w2 = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];
    let mut av = vec![T::zero(); n];
    for itn in 1..=max_iter {
        let s = beta.recip();
        for (vi, &yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        op.apply_into(&v, &mut av);
        y.copy_from_slice(&av);
        if itn >= 2 {
            axpy(-(beta / oldb), &r1, &mut y);
        }
        let alfa = dot(&v, &y);
        axpy(-(alfa / beta), &r2, &mut y);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        y = minv(&r2);
        oldb = beta;
        beta = dot(&r2, &y).max(T::zero()).sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(T::epsilon());
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar = sn * phibar;
        let denom = gamma.recip();
        // w_new = (v - oldeps * w_prev_prev - delta * w_prev) / gamma
        for i in 0..n {
            let w1 = w2[i];
            w2[i] = w[i];
            w[i] = (v[i] - oldeps * w1 - delta * w2[i]) * denom;
        }
        axpy(phi, &w, &mut x);
        if phibar <= tol * beta1 || beta == T::zero() {
            break;
        }
    }
    let mut r = vec![T::zero(); n];
    op.apply_into(&x, &mut r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let rel = norm2(&r) / bnorm;
    (x, rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble_grushin, build_grid};
    use crate::domain::Domain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize) -> SparseOperator<f64> {
        let d = Domain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = build_grid(&d, n, n).unwrap();
        assemble_grushin(&g, 1.0).unwrap()
    }

    #[test]
    fn zero_rhs() {
        let a = setup(9);
        let x = cg_solve(&a, &vec![0.0; a.dim()], &LinearSolverCfg::default()).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn recovers_known_solution() {
        let a = setup(33);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = a.apply(&y);
        let x = cg_solve(&a, &b, &LinearSolverCfg::default().with_tol(1e-13)).unwrap();
        let err = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let a = setup(33);
        let b = vec![1.0; a.dim()];
        let cfg = LinearSolverCfg {
            tol: 1e-12,
            max_iter: Some(3),
        };
        match cg_solve(&a, &b, &cfg) {
            Err(Error::NotConverged {
                iterations, residual, ..
            }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 1e-12);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn minres_on_indefinite_shift() {
        let a = setup(17);
        // Shift by a multiple of the mass to make the matrix indefinite.
        let shift: Vec<f64> = a.mass().iter().map(|m| 30.0 * m).collect();
        let op = ShiftedOperator {
            base: &a,
            shift: &shift,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut b = vec![0.0; a.dim()];
        op.apply_into(&y, &mut b);
        let (x, rel) = minres(&op, &a.diagonal(), &b, 1e-12, 5000);
        assert!(rel < 1e-10, "{rel}");
        let err = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }
}
