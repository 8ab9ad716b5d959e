use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretization::{norm_lpk, Grid, ScalarField, SparseOperator};
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::solvers::linear::{cg_solve_into, LinearSolverCfg};

use super::critical_exponents;

const REL_CHANGE: f64 = 1e-13;
const MIN_DAMPING: f64 = 1e-12;
pub const DEFAULT_EMBEDDING_ITERS: usize = 20_000;

#[derive(Debug, Clone)]
pub struct EmbeddingReport<T> {
    pub q: T,
    pub k: T,
    /// `sup ‖u‖_{L^q_k} / ‖u‖_E` over the grid space.
    pub c_q_estimate: T,
    /// Unit-energy maximizer.
    pub maximizer: ScalarField<T>,
    pub iterations: usize,
}

fn check_q<T: Real>(q: T, k: T, allow_critical: bool) -> Result<()> {
    let two_k = critical_exponents(k)?.two_k;
    let ok = q >= T::one() && (q < two_k || (allow_critical && q == two_k));
    if !ok {
        return Err(Error::InvalidInput(format!(
            "q = {q} outside the admissible range [1, {two_k}{}",
            if allow_critical { "]" } else { ")" }
        )));
    }
    Ok(())
}

/// Largest ratio `‖u‖_{L^q_k} / ‖u‖_E` by ascent on the energy sphere:
/// the full step `u ← A⁻¹ ∇b(u) / ‖·‖_E` with `b(u) = Σ w |x|^{2k} |u|^q`,
/// damped whenever it would lower `b`.
///
/// `init` (resampled onto this grid when needed) seeds the iteration;
/// otherwise a smoothed positive random field drawn from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn embedding_constant<T: Real>(
    grid: &Arc<Grid<T>>,
    a: &SparseOperator<T>,
    k: T,
    q: T,
    seed: u64,
    max_iters: usize,
    init: Option<&ScalarField<T>>,
    lin: &LinearSolverCfg<T>,
) -> Result<EmbeddingReport<T>> {
    check_q(q, k, true)?;
    if a.dim() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: a.dim(),
        });
    }
    let wk: Vec<T> = grid
        .weights()
        .iter()
        .zip(grid.degenerate_weights(k))
        .map(|(&w, d)| w * d)
        .collect();
    let mut u = match init {
        Some(f) if f.grid().same_layout(grid) => f.values().to_vec(),
        Some(f) => f.resample(grid).into_values(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rhs: Vec<T> = wk.iter().map(|&w| w * T::lit(rng.gen_range(0.5..1.5))).collect();
            let mut x = vec![T::zero(); grid.len()];
            cg_solve_into(a, &rhs, &mut x, lin)?;
            x
        }
    };
    let unit = |u: &mut Vec<T>| -> Result<()> {
        let e = a.quad_form(u).max(T::zero()).sqrt();
        if !(e > T::zero()) {
            return Err(Error::InvalidInput("embedding seed has zero energy".into()));
        }
        u.iter_mut().for_each(|v| *v /= e);
        Ok(())
    };
    unit(&mut u)?;
    let b = |u: &[T]| -> T { u.iter().zip(&wk).map(|(&v, &w)| w * v.abs().powf(q)).sum() };
    let mut value = b(&u);
    let mut dir = u.clone();
    for it in 1..=max_iters {
        let grad: Vec<T> = u
            .iter()
            .zip(&wk)
            .map(|(&v, &w)| w * v.abs().powf(q - T::one()) * v.signum())
            .collect();
        cg_solve_into(a, &grad, &mut dir, lin)?;
        let mut next = dir.clone();
        unit(&mut next)?;
        let mut nv = b(&next);
        if nv < value {
            // damped step u + τ d̂ along the unit-energy ascent direction
            let mut tau = T::one();
            let mut d = dir.clone();
            unit(&mut d)?;
            loop {
                tau *= T::lit(0.5);
                if tau < T::lit(MIN_DAMPING) {
                    nv = value;
                    next = u.clone();
                    break;
                }
                let mut trial: Vec<T> = u.iter().zip(&d).map(|(&x, &y)| x + tau * y).collect();
                unit(&mut trial)?;
                let tv = b(&trial);
                if tv >= value {
                    next = trial;
                    nv = tv;
                    break;
                }
            }
        }
        let change = (nv - value).abs() / nv;
        u = next;
        value = nv;
        if change <= T::lit(REL_CHANGE) {
            let maximizer = ScalarField::new(Arc::clone(grid), u)?;
            return Ok(EmbeddingReport {
                q,
                k,
                c_q_estimate: value.powf(q.recip()),
                maximizer,
                iterations: it,
            });
        }
    }
    Err(Error::NotConverged {
        method: "embedding ascent",
        iterations: max_iters,
        residual: value.as_f64(),
    })
}

/// `‖u‖_{L^q_k} / ‖u‖_E` of a single field.
pub fn embedding_ratio<T: Real>(u: &ScalarField<T>, a: &SparseOperator<T>, k: T, q: T) -> Result<T> {
    let e = a.quad_form(u.values()).max(T::zero()).sqrt();
    if !(e > T::zero()) {
        return Err(Error::InvalidInput("ratio of a zero-energy field".into()));
    }
    Ok(norm_lpk(u, q, k)? / e)
}

/// Unit-energy fields `sin(m π s) sin(π t) · bump` in box coordinates `s, t ∈ [0, 1]`.
pub fn oscillating_sequence<T: Real>(
    grid: &Arc<Grid<T>>,
    a: &SparseOperator<T>,
    modes: &[usize],
) -> Result<Vec<ScalarField<T>>> {
    modes
        .iter()
        .map(|&m| {
            let mut f = box_mode(grid, m, 1);
            let e = a.quad_form(f.values()).sqrt();
            if !(e > T::zero()) {
                return Err(Error::InvalidInput(format!("mode {m} vanishes on the grid")));
            }
            f.values_mut().iter_mut().for_each(|v| *v /= e);
            Ok(f)
        })
        .collect()
}

/// Products of the first `modes` sines in each box direction.
pub fn sine_coarse_space<T: Real>(grid: &Arc<Grid<T>>, modes: usize) -> Vec<ScalarField<T>> {
    let mut out = Vec::with_capacity(modes * modes);
    for i in 1..=modes {
        for j in 1..=modes {
            out.push(box_mode(grid, i, j));
        }
    }
    out
}

fn box_mode<T: Real>(grid: &Arc<Grid<T>>, mx: usize, my: usize) -> ScalarField<T> {
    let (x0, x1, y0, y1) = grid.domain().bounding_box();
    let pi = T::PI();
    let (fx, fy) = (T::from_usize_lossy(mx), T::from_usize_lossy(my));
    ScalarField::from_fn(grid, |x, y| {
        let s = (x - x0) / (x1 - x0);
        let t = (y - y0) / (y1 - y0);
        (fx * pi * s).sin() * (fy * pi * t).sin()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport<T> {
    pub q: T,
    pub energy_norms: Vec<T>,
    pub lq_norms: Vec<T>,
    /// `‖u_m - P u_m‖_{L^q_k}` with `P` the energy-orthogonal projection on the coarse space.
    pub projected_lq: Vec<T>,
    /// `‖u_{m+1} - u_m‖_{L^q_k}`
    pub consecutive_lq: Vec<T>,
}

/// Decay profile of a bounded sequence in `L^q_k`, `q < 2_k`, after removing
/// its component in a fixed coarse space.
pub fn compactness_probe<T: Real>(
    sequence: &[ScalarField<T>],
    coarse: &[ScalarField<T>],
    a: &SparseOperator<T>,
    k: T,
    q: T,
) -> Result<CompactnessReport<T>> {
    check_q(q, k, false)?;
    // energy-orthonormal basis of the coarse space (modified Gram-Schmidt)
    let mut basis: Vec<Vec<T>> = Vec::new();
    for c in coarse {
        let mut v = c.values().to_vec();
        for e in &basis {
            let proj = dot(&a.apply(e), &v);
            v.iter_mut().zip(e).for_each(|(x, &b)| *x -= proj * b);
        }
        let n = a.quad_form(&v).max(T::zero()).sqrt();
        if n > T::lit(1e-12) {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    let mut report = CompactnessReport {
        q,
        energy_norms: Vec::new(),
        lq_norms: Vec::new(),
        projected_lq: Vec::new(),
        consecutive_lq: Vec::new(),
    };
    for (m, u) in sequence.iter().enumerate() {
        if u.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: u.len(),
            });
        }
        report
            .energy_norms
            .push(a.quad_form(u.values()).max(T::zero()).sqrt());
        report.lq_norms.push(norm_lpk(u, q, k)?);
        let au = a.apply(u.values());
        let mut r = u.values().to_vec();
        for e in &basis {
            let c = dot(&au, e);
            r.iter_mut().zip(e).for_each(|(x, &b)| *x -= c * b);
        }
        report.projected_lq.push(norm_lpk(&u.with_values(r)?, q, k)?);
        if m > 0 {
            let prev = &sequence[m - 1];
            let d: Vec<T> = u
                .values()
                .iter()
                .zip(prev.values())
                .map(|(&x, &y)| x - y)
                .collect();
            report.consecutive_lq.push(norm_lpk(&u.with_values(d)?, q, k)?);
        }
    }
    Ok(report)
}
