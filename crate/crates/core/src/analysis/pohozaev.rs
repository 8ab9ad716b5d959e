use crate::discretization::{norm_lpk, ScalarField};
use crate::domain::{boundary_quadrature, starshape_factor, BoundarySample, DomainKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Both sides of the Pohozaev identity for a discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PohozaevReport<T> {
    /// `((2+3k)/(p+1) - k/2) ∫ |x|^{2k} |u|^{p+1}`
    pub lhs: T,
    /// `½ ∮ (x ν_x + (1+k) y ν_y)(ν_x² + |x|^{2k} ν_y²)(∂u/∂ν)² ds`
    pub rhs: T,
    /// `(2+3k)/(p+1) - k/2`
    pub coeff: T,
    pub rel_residual: T,
    /// Smallest `x ν_x + (1+k) y ν_y` over the samples.
    pub boundary_min_factor: T,
    pub samples: usize,
}

/// `(2+3k)/(p+1) - k/2`; vanishes exactly at `p = p_crit`.
pub fn pohozaev_coefficient<T: Real>(k: T, p: T) -> T {
    (T::lit(2.0) + T::lit(3.0) * k) / (p + T::one()) - k / T::lit(2.0)
}

/// Boundary samples matched to a grid: cell midpoints on rectangle edges,
/// four per boundary-crossing cell row on ellipses.
pub fn pohozaev_samples<T: Real>(u: &ScalarField<T>) -> Result<Vec<BoundarySample<T>>> {
    let g = u.grid();
    let n = match g.domain().kind() {
        DomainKind::Rectangle { .. } => 2 * (g.nx() - 1) + 2 * (g.ny() - 1),
        DomainKind::Ellipse { .. } => 4 * (g.nx() + g.ny()),
    };
    boundary_quadrature(g.domain(), n)
}

pub fn pohozaev_evaluate<T: Real>(
    u: &ScalarField<T>,
    k: T,
    p: T,
    boundary: &[BoundarySample<T>],
) -> Result<PohozaevReport<T>> {
    if !(p >= T::one()) {
        return Err(Error::InvalidInput(format!("p must be >= 1, got {p}")));
    }
    if boundary.is_empty() {
        return Err(Error::InvalidInput("no boundary samples".into()));
    }
    let g = u.grid();
    let mass = norm_lpk(u, p + T::one(), k)?.powf(p + T::one());
    let coeff = pohozaev_coefficient(k, p);
    let lhs = coeff * mass;
    let mut rhs = T::zero();
    let mut boundary_min_factor = T::infinity();
    for (idx, s) in boundary.iter().enumerate() {
        let (x, y) = s.point;
        let (nx, ny) = s.normal;
        let h = g.hx() * nx.abs() + g.hy() * ny.abs();
        let probe = |d: T| {
            let (px, py) = (x - d * nx, y - d * ny);
            u.interpolate(px, py).ok_or(Error::ProbeOutsideGrid {
                sample: idx,
                x: px.as_f64(),
                y: py.as_f64(),
            })
        };
        let u1 = probe(h)?;
        let u2 = probe(h + h)?;
        // one-sided second-order difference with u = 0 on the boundary
        let dudn = -(T::lit(4.0) * u1 - u2) / (h + h);
        let metric = nx * nx + T::degenerate_weight(x, k) * ny * ny;
        let factor = starshape_factor(k, s);
        boundary_min_factor = boundary_min_factor.min(factor);
        rhs += s.weight * factor * metric * dudn * dudn;
    }
    rhs *= T::lit(0.5);
    let denom = lhs.abs().max(rhs.abs()).max(T::lit(1e-300));
    Ok(PohozaevReport {
        lhs,
        rhs,
        coeff,
        rel_residual: (lhs - rhs).abs() / denom,
        boundary_min_factor,
        samples: boundary.len(),
    })
}
