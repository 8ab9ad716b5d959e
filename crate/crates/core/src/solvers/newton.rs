use crate::discretization::LinearOperator;
use crate::error::Result;
use crate::functional::Functional;
use crate::scalar::Real;
use crate::solvers::linear::{minres, ShiftedOperator};

/// Each accepted full step must cut the gradient norm at least this much.
const STEP_RATIO: f64 = 0.5;
const MAX_HALVINGS: usize = 10;
const INNER_TOL: f64 = 1e-10;
/// Inner solves worse than this count as a singular Jacobian.
const INNER_FAIL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct NewtonOutcome<T> {
    pub u: Vec<T>,
    pub phi: T,
    pub grad_norm: T,
    pub steps: usize,
    /// False when the iteration bailed out; `u` is then the best iterate.
    pub converged: bool,
    /// Gradient norm before the first and after every accepted step.
    pub history: Vec<T>,
}

/// Undamped Newton correction `δ` at `u` and the relative residual of its
/// inner solve.
pub fn newton_direction<T: Real>(func: &Functional<'_, T>, u: &[T]) -> Result<(Vec<T>, T)> {
    let a = func.operator();
    let shift = func.newton_shift(u);
    let jac = ShiftedOperator {
        base: a,
        shift: &shift,
    };
    let rhs: Vec<T> = func.phi_grad(u)?.iter().map(|&g| -g).collect();
    Ok(minres(
        &jac,
        &a.diagonal(),
        &rhs,
        T::lit(INNER_TOL),
        10 * jac.dim(),
    ))
}

/// Damped Newton on `Φ'(u) = 0` with MINRES inner solves of
/// `(A - diag(w ∂f/∂ξ(u))) δ = -Φ'(u)`.
///
/// Never fails on divergence: a rejected step ends the iteration with
/// `converged = false` so a descent method can take over.
pub fn newton_refine<T: Real>(
    func: &Functional<'_, T>,
    u0: &[T],
    tol: T,
    max_steps: usize,
) -> Result<NewtonOutcome<T>> {
    let mut u = u0.to_vec();
    let mut st = func.state(&u)?;
    let mut history = vec![st.grad_norm];
    let a = func.operator();
    let precond = a.diagonal();
    let n = func.dim();
    for step in 0..max_steps {
        if st.grad_norm <= tol {
            return Ok(done(u, st.phi, st.grad_norm, step, true, history));
        }
        let shift = func.newton_shift(&u);
        let jac = ShiftedOperator {
            base: a,
            shift: &shift,
        };
        let rhs: Vec<T> = st.grad_dual.iter().map(|&g| -g).collect();
        let (delta, rel) = minres(&jac, &precond, &rhs, T::lit(INNER_TOL), 10 * jac.dim());
        if !(rel <= T::lit(INNER_FAIL)) {
            log::warn!("newton: inner solve stalled at relative residual {rel:e}");
            return Ok(done(u, st.phi, st.grad_norm, step, false, history));
        }
        let mut s = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<T> = (0..n).map(|i| u[i] + s * delta[i]).collect();
            let ts = func.state(&trial)?;
            let bound = T::one() - (T::one() - T::lit(STEP_RATIO)) * s;
            if ts.grad_norm <= bound * st.grad_norm {
                accepted = Some((trial, ts));
                break;
            }
            s *= T::lit(0.5);
        }
        match accepted {
            Some((trial, ts)) => {
                u = trial;
                st = ts;
                history.push(st.grad_norm);
            }
            None => {
                log::warn!("newton: no acceptable step from gradient norm {:e}", st.grad_norm);
                return Ok(done(u, st.phi, st.grad_norm, step, false, history));
            }
        }
    }
    let converged = st.grad_norm <= tol;
    Ok(done(u, st.phi, st.grad_norm, max_steps, converged, history))
}

fn done<T>(
    u: Vec<T>,
    phi: T,
    grad_norm: T,
    steps: usize,
    converged: bool,
    history: Vec<T>,
) -> NewtonOutcome<T> {
    NewtonOutcome {
        u,
        phi,
        grad_norm,
        steps,
        converged,
        history,
    }
}
