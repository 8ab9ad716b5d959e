//! Mountain-pass search by path deformation: the highest point of a
//! polygonal path from 0 to a far point `u1` is pushed down along the
//! Riesz gradient and the path is re-spread evenly in the energy norm.

use std::time::Instant;

use super::{
    is_supercritical, newton_refine, LinearSolverCfg, MpaCfg, SolveMethod, SolveReport, StagnationWatch,
};
use crate::discretization::{ScalarField, SparseOperator};
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Real;

const MIN_STEP: f64 = 1e-14;
const GOLDEN_ITERS: usize = 48;
const NEWTON_MAX_STEPS: usize = 20;

pub fn mpa_solve<T: Real>(
    u1: &ScalarField<T>,
    a: &SparseOperator<T>,
    nl: &Nonlinearity<T>,
    cfg: &MpaCfg<T>,
    lin: &LinearSolverCfg<T>,
) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let func = Functional::new(u1.grid(), a, nl, *lin)?;
    if u1.is_zero() {
        return Err(Error::InvalidInput(
            "mountain-pass endpoint is the zero field".into(),
        ));
    }
    let end_value = func.phi(u1.values())?;
    if !(end_value < T::zero()) {
        return Err(Error::InvalidEndpoint {
            phi: end_value.as_f64(),
        });
    }
    let supercritical = is_supercritical(nl)?;
    let m = cfg.path_points;
    let mut path: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(m - 1);
            u1.values().iter().map(|&v| t * v).collect()
        })
        .collect();
    let mut watch = StagnationWatch::new();
    let mut newton_gate = cfg.newton_switch;
    let mut extra = 0;
    for it in 0..cfg.max_outer {
        let values: Vec<T> = path.iter().map(|v| func.phi(v)).collect::<Result<_>>()?;
        let mut imax = 1;
        for i in 2..m - 1 {
            if values[i] > values[imax] {
                imax = i;
            }
        }
        let (z, zval) = path_max_near(&func, &path, imax)?;
        let st = func.state(&z)?;
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
            return finish(z, zval, st.grad_norm, SolveMethod::Mpa, it + extra);
        }
        if st.grad_norm <= newton_gate {
            let out = newton_refine(&func, &z, cfg.grad_tol, NEWTON_MAX_STEPS)?;
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
            log::info!("mpa: newton fallback at gradient norm {:e}", st.grad_norm);
            newton_gate = st.grad_norm * T::lit(0.1);
        }
        if watch.update(zval) {
            return Err(stagnation(zval, st.grad_norm, it));
        }
        let slope = st.grad_norm * st.grad_norm;
        let mut s = cfg.descent_step0;
        let moved = loop {
            let trial: Vec<T> = z.iter().zip(&st.grad_riesz).map(|(&x, &g)| x - s * g).collect();
            if func.phi(&trial)? <= zval - cfg.armijo_c * s * slope {
                break trial;
            }
            s *= T::lit(0.5);
            if s < T::lit(MIN_STEP) {
                return Err(stagnation(zval, st.grad_norm, it));
            }
        };
        path = respread(&func, &path, imax, moved, m);
    }
    Err(Error::NotConverged {
        method: "mountain pass",
        iterations: cfg.max_outer,
        residual: f64::NAN,
    })
}

/// Point of the polygon between nodes `i - 1` and `i + 1` where Φ peaks,
/// by golden-section search on the arc parameter `τ ∈ [-1, 1]`.
fn path_max_near<T: Real>(func: &Functional<'_, T>, path: &[Vec<T>], i: usize) -> Result<(Vec<T>, T)> {
    let at = |tau: T| -> Vec<T> {
        let (other, s) = if tau < T::zero() {
            (&path[i - 1], -tau)
        } else {
            (&path[i + 1], tau)
        };
        path[i]
            .iter()
            .zip(other)
            .map(|(&a, &b)| a + s * (b - a))
            .collect()
    };
    let ratio = T::lit(0.5 * (5f64.sqrt() - 1.0));
    let (mut lo, mut hi) = (-T::one(), T::one());
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = func.phi(&at(c))?;
    let mut fd = func.phi(&at(d))?;
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = func.phi(&at(c))?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = func.phi(&at(d))?;
        }
    }
    let center = path[i].clone();
    let fcenter = func.phi(&center)?;
    let (tau, ftau) = if fc >= fd { (c, fc) } else { (d, fd) };
    if ftau > fcenter {
        Ok((at(tau), ftau))
    } else {
        Ok((center, fcenter))
    }
}

/// Replaces node `i` by `moved` and re-spreads `m` nodes evenly in the
/// energy norm, keeping the endpoints and the moved node.
fn respread<T: Real>(
    func: &Functional<'_, T>,
    path: &[Vec<T>],
    i: usize,
    moved: Vec<T>,
    m: usize,
) -> Vec<Vec<T>> {
    let head: Vec<&[T]> = path[..i]
        .iter()
        .map(|v| v.as_slice())
        .chain(std::iter::once(moved.as_slice()))
        .collect();
    let tail: Vec<&[T]> = std::iter::once(moved.as_slice())
        .chain(path[i + 1..].iter().map(|v| v.as_slice()))
        .collect();
    let l1 = polyline_length(func, &head);
    let l2 = polyline_length(func, &tail);
    let intervals = m - 1;
    let share = (l1 / (l1 + l2)) * T::from_usize_lossy(intervals);
    let n1 = share.round().to_usize().unwrap_or(1).clamp(1, intervals - 1);
    let mut out = resample(func, &head, n1);
    out.pop();
    out.extend(resample(func, &tail, intervals - n1));
    out
}

fn segment_lengths<T: Real>(func: &Functional<'_, T>, pts: &[&[T]]) -> Vec<T> {
    pts.windows(2)
        .map(|w| {
            let d: Vec<T> = w[1].iter().zip(w[0]).map(|(&a, &b)| a - b).collect();
            func.energy_norm(&d)
        })
        .collect()
}

fn polyline_length<T: Real>(func: &Functional<'_, T>, pts: &[&[T]]) -> T {
    segment_lengths(func, pts).into_iter().sum()
}

/// `n + 1` points equally spaced in arclength along the polyline.
fn resample<T: Real>(func: &Functional<'_, T>, pts: &[&[T]], n: usize) -> Vec<Vec<T>> {
    let seg = segment_lengths(func, pts);
    let total: T = seg.iter().copied().sum();
    let mut out = Vec::with_capacity(n + 1);
    out.push(pts[0].to_vec());
    let mut j = 0;
    let mut acc = T::zero();
    for q in 1..n {
        let target = total * T::from_usize_lossy(q) / T::from_usize_lossy(n);
        while j + 1 < seg.len() && acc + seg[j] < target {
            acc += seg[j];
            j += 1;
        }
        let s = if seg[j] > T::zero() {
            ((target - acc) / seg[j]).min(T::one()).max(T::zero())
        } else {
            T::zero()
        };
        out.push(
            pts[j]
                .iter()
                .zip(pts[j + 1])
                .map(|(&a, &b)| a + s * (b - a))
                .collect(),
        );
    }
    out.push(pts[pts.len() - 1].to_vec());
    out
}

fn stagnation<T: Real>(level: T, grad_norm: T, iterations: usize) -> Error {
    Error::Stagnation {
        level: level.as_f64(),
        grad_norm: grad_norm.as_f64(),
        iterations,
    }
}
