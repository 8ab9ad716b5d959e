use crate::discretization::grid::{Grid, ScalarField};
use crate::discretization::operator::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `∫_Ω |x|^{2k} g(x, y) dx dy` by the grid's nodal rule over the closure.
///
/// On rectangles this is the tensor trapezoid rule; on ellipses the cut-cell
/// nodal rule over the interior nodes.
pub fn weighted_integral<T: Real>(grid: &Grid<T>, k: T, g: impl Fn(T, T) -> T) -> T {
    let mut acc = T::zero();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let w = grid.node_weight(i, j);
            if w > T::zero() {
                let (x, y) = (grid.xs()[i], grid.ys()[j]);
                acc += w * T::degenerate_weight(x, k) * g(x, y);
            }
        }
    }
    acc
}

/// `Σ_u w_u |x_u|^{2k} h(u_u)` over the unknowns of a field.
pub fn weighted_sum<T: Real>(u: &ScalarField<T>, k: T, h: impl Fn(T) -> T) -> T {
    let g = u.grid();
    u.values()
        .iter()
        .enumerate()
        .map(|(i, &v)| g.weight(i) * T::degenerate_weight(g.coord(i).0, k) * h(v))
        .sum()
}

/// Weighted Lebesgue norm `(∫ |x|^{2k} |u|^p)^{1/p}`.
pub fn norm_lpk<T: Real>(u: &ScalarField<T>, p: T, k: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::InvalidInput(format!("L^p_k norm needs p >= 1, got {p}")));
    }
    let s = weighted_sum(u, k, |v| v.abs().powf(p));
    Ok(s.powf(p.recip()))
}

fn check_dim<T: Real>(u: &ScalarField<T>, a: &SparseOperator<T>) -> Result<()> {
    if u.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: u.len(),
        });
    }
    Ok(())
}

/// Energy norm `sqrt(⟨A u, u⟩)`, the discrete `‖∇_G u‖_{L²}`.
pub fn norm_energy<T: Real>(u: &ScalarField<T>, a: &SparseOperator<T>) -> Result<T> {
    check_dim(u, a)?;
    Ok(a.quad_form(u.values()).max(T::zero()).sqrt())
}

/// Full Sobolev norm `(‖u‖²_{L²} + ‖∇_G u‖²_{L²})^{1/2}`.
pub fn norm_s12<T: Real>(u: &ScalarField<T>, a: &SparseOperator<T>) -> Result<T> {
    check_dim(u, a)?;
    let l2: T = u.values().iter().zip(a.mass()).map(|(&v, &m)| m * v * v).sum();
    Ok((l2 + a.quad_form(u.values()).max(T::zero())).sqrt())
}
