use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    is_supercritical, newton_refine, LinearSolverCfg, MpaCfg, SolveMethod, SolveReport, StagnationWatch,
};
use crate::discretization::{Grid, ScalarField, SparseOperator};
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::nonlinearity::Nonlinearity;
use crate::scalar::{dot, Real};

const MIN_STEP: f64 = 1e-12;
const NEWTON_MAX_STEPS: usize = 20;
/// Cap on the Barzilai-Borwein step relative to `descent_step0`.
const MAX_STEP_RATIO: f64 = 1e4;

fn homogeneity<T: Real>(nl: &Nonlinearity<T>) -> Result<T> {
    match nl.power() {
        Some(p) if p > T::one() => Ok(p),
        _ => Err(Error::InvalidInput(format!(
            "Nehari projection needs a pure power with p > 1, got {}",
            nl.name()
        ))),
    }
}

/// `t* u` with `t* = (a/b)^{1/(p-1)}`, `a = ⟨Au,u⟩`, `b = Σ w|x|^{2k}|u|^{p+1}`.
fn project<T: Real>(func: &Functional<'_, T>, p: T, u: &[T]) -> Result<(T, Vec<T>)> {
    let a = func.quad(u);
    let b = func.source_pairing(u);
    if !(b > T::zero()) || !(a > T::zero()) {
        return Err(Error::ProjectionUndefined { b: b.as_f64() });
    }
    let t = (a / b).powf((p - T::one()).recip());
    Ok((t, u.iter().map(|&v| t * v).collect()))
}

/// Radial projection onto the Nehari manifold of a pure power.
/// Returns the scaling factor and the projected field.
pub fn nehari_project<T: Real>(
    u: &ScalarField<T>,
    a: &SparseOperator<T>,
    nl: &Nonlinearity<T>,
) -> Result<(T, ScalarField<T>)> {
    let p = homogeneity(nl)?;
    let func = Functional::new(u.grid(), a, nl, LinearSolverCfg::default())?;
    let (t, v) = project(&func, p, u.values())?;
    Ok((t, func.field(v)?))
}

/// Smooth positive field from a seed: positive noise pushed through `A⁻¹`.
pub fn positive_seed<T: Real>(
    grid: &Arc<Grid<T>>,
    a: &SparseOperator<T>,
    lin: &LinearSolverCfg<T>,
    seed: u64,
) -> Result<ScalarField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rhs: Vec<T> = grid
        .weights()
        .into_iter()
        .map(|w| w * T::lit(rng.gen_range(0.5..1.5)))
        .collect();
    ScalarField::new(Arc::clone(grid), super::cg_solve(a, &rhs, lin)?)
}

/// Minimizes Φ on the Nehari manifold starting from [`positive_seed`].
pub fn nehari_minimize<T: Real>(
    grid: &Arc<Grid<T>>,
    a: &SparseOperator<T>,
    nl: &Nonlinearity<T>,
    seed: u64,
    cfg: &MpaCfg<T>,
    lin: &LinearSolverCfg<T>,
) -> Result<SolveReport<T>> {
    let u0 = positive_seed(grid, a, lin, seed)?;
    nehari_minimize_from(&u0, a, nl, cfg, lin)
}

/// Projected Riesz-gradient descent with Barzilai-Borwein trial steps and
/// Armijo backtracking, handing over to Newton near the minimizer.
pub fn nehari_minimize_from<T: Real>(
    u0: &ScalarField<T>,
    a: &SparseOperator<T>,
    nl: &Nonlinearity<T>,
    cfg: &MpaCfg<T>,
    lin: &LinearSolverCfg<T>,
) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let p = homogeneity(nl)?;
    let func = Functional::new(u0.grid(), a, nl, *lin)?;
    let supercritical = is_supercritical(nl)?;
    let (_, mut v) = project(&func, p, u0.values())?;
    let mut watch = StagnationWatch::new();
    let mut newton_gate = cfg.newton_switch;
    let mut extra = 0;
    let mut warm = vec![T::zero(); func.dim()];
    let mut prev: Option<(Vec<T>, Vec<T>)> = None;
    for it in 0..cfg.max_outer {
        let st = func.state_warm(&v, &mut warm)?;
        let finish = |u: Vec<T>, level, grad_norm, method, iterations| -> Result<SolveReport<T>> {
            Ok(SolveReport {
                u_star: func.field(u)?,
                level,
                grad_norm,
                iterations,
                method,
                pohozaev_residual: None,
                timing: start.elapsed().as_secs_f64(),
                supercritical,
            })
        };
        if st.grad_norm <= cfg.grad_tol {
            return finish(v, st.phi, st.grad_norm, SolveMethod::Nehari, it + extra);
        }
        if st.grad_norm <= newton_gate {
            let out = newton_refine(&func, &v, cfg.grad_tol, NEWTON_MAX_STEPS)?;
            extra += out.steps;
            if out.converged && out.phi > T::zero() {
                return finish(
                    out.u,
                    out.phi,
                    out.grad_norm,
                    SolveMethod::NewtonRefined,
                    it + extra,
                );
            }
            log::info!("nehari: newton fallback at gradient norm {:e}", st.grad_norm);
            newton_gate = st.grad_norm * T::lit(0.1);
        }
        if watch.update(st.phi) {
            return Err(stagnation(st.phi, st.grad_norm, it));
        }
        let slope = st.grad_norm * st.grad_norm;
        // Barzilai-Borwein trial step in the energy metric
        let mut s = cfg.descent_step0;
        if let Some((v_old, g_old)) = &prev {
            let dv: Vec<T> = v.iter().zip(v_old).map(|(&x, &y)| x - y).collect();
            let dg: Vec<T> = st.grad_dual.iter().zip(g_old).map(|(&x, &y)| x - y).collect();
            let curv = dot(&dv, &dg);
            if curv > T::zero() {
                let bb = func.quad(&dv) / curv;
                s = bb
                    .max(cfg.descent_step0)
                    .min(cfg.descent_step0 * T::lit(MAX_STEP_RATIO));
            } else {
                s = cfg.descent_step0 * T::lit(MAX_STEP_RATIO);
            }
        }
        let v_old = v.clone();
        loop {
            let trial: Vec<T> = v.iter().zip(&st.grad_riesz).map(|(&x, &g)| x - s * g).collect();
            if let Ok((_, proj)) = project(&func, p, &trial) {
                let val = func.phi(&proj)?;
                if val <= st.phi - cfg.armijo_c * s * slope {
                    v = proj;
                    break;
                }
            }
            s *= T::lit(0.5);
            if s < T::lit(MIN_STEP) {
                return Err(stagnation(st.phi, st.grad_norm, it));
            }
        }
        prev = Some((v_old, st.grad_dual));
    }
    let st = func.state(&v)?;
    Err(stagnation(st.phi, st.grad_norm, cfg.max_outer))
}

fn stagnation<T: Real>(level: T, grad_norm: T, iterations: usize) -> Error {
    Error::Stagnation {
        level: level.as_f64(),
        grad_norm: grad_norm.as_f64(),
        iterations,
    }
}
