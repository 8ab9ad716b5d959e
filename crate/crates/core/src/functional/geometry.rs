//! Probes of the mountain-pass geometry: a small sphere on which Φ is
//! bounded below by a positive constant, and a far point where Φ < 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Functional;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radii tried by the small-sphere probe: `2^m` for `m` in this range.
const RHO_EXPONENTS: std::ops::RangeInclusive<i32> = -12..=8;
const FAR_SIDE_MAX_DOUBLINGS: usize = 64;
/// Cut-off keeping the far-side direction off the degeneracy line.
const FAR_SIDE_MIN_ABS_X: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SmallSphereProbe<T> {
    pub rho: T,
    /// `min_j Φ(ρ ûⱼ)` at the chosen radius.
    pub alpha: T,
    pub directions: usize,
}

impl<T: Real> SmallSphereProbe<T> {
    pub fn success(&self) -> bool {
        self.alpha > T::zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarSideScan<T> {
    /// Smallest `2^m` with `Φ(R₀ û) < 0`.
    pub r0: T,
    /// `Φ` at `R₀`, `2R₀`, `4R₀`.
    pub values: [T; 3],
    pub monotone: bool,
}

impl<T: Real> FarSideScan<T> {
    pub fn success(&self) -> bool {
        self.values[0] < T::zero() && self.monotone
    }

    /// Far endpoint `2R₀ û` used by the mountain-pass solver.
    pub fn endpoint(&self, u_hat: &[T]) -> Vec<T> {
        let r = self.r0 + self.r0;
        u_hat.iter().map(|&v| r * v).collect()
    }
}

fn normalize_energy<T: Real>(func: &Functional<'_, T>, v: &mut [T]) -> Result<()> {
    let e = func.energy_norm(v);
    if !(e > T::zero()) {
        return Err(Error::InvalidInput("direction has zero energy".into()));
    }
    v.iter_mut().for_each(|x| *x /= e);
    Ok(())
}

/// `count` smooth unit-energy directions: white noise smoothed by one
/// stiffness solve.
pub fn random_unit_directions<T: Real>(
    func: &Functional<'_, T>,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = func.grid().weights();
    (0..count)
        .map(|_| {
            let noise: Vec<T> = w
                .iter()
                .map(|&wi| wi * T::lit(rng.gen_range(-1.0..1.0)))
                .collect();
            let mut v = func.riesz(&noise)?;
            normalize_energy(func, &mut v)?;
            Ok(v)
        })
        .collect()
}

/// Picks `ρ` on a dyadic grid maximizing `α(ρ) = min_j Φ(ρ ûⱼ)`.
pub fn small_sphere_probe<T: Real>(
    func: &Functional<'_, T>,
    directions: &[Vec<T>],
) -> Result<SmallSphereProbe<T>> {
    if directions.is_empty() {
        return Err(Error::InvalidInput("small-sphere probe needs directions".into()));
    }
    let mut best: Option<(T, T)> = None;
    for m in RHO_EXPONENTS {
        let rho = T::lit(2f64.powi(m));
        let mut alpha = T::infinity();
        for d in directions {
            let v: Vec<T> = d.iter().map(|&x| rho * x).collect();
            alpha = alpha.min(func.phi(&v)?);
        }
        if best.is_none_or(|(_, a)| alpha > a) {
            best = Some((rho, alpha));
        }
    }
    let (rho, alpha) = best.expect("non-empty radius range");
    Ok(SmallSphereProbe {
        rho,
        alpha,
        directions: directions.len(),
    })
}

/// Lower bound for Φ on the energy sphere of radius `ρ` for the pure power
/// `p`, given the embedding constant `C = C_{p+1}`:
/// `ρ²/2 - C^{p+1} ρ^{p+1}/(p+1)`. Unlike the sampled probe this bounds
/// every direction.
pub fn certified_sphere_bound<T: Real>(c: T, p: T, rho: T) -> T {
    let q = p + T::one();
    rho * rho / T::lit(2.0) - (c * rho).powf(q) / q
}

/// Largest [`certified_sphere_bound`] over the probe's dyadic radii.
pub fn certified_alpha<T: Real>(c: T, p: T) -> (T, T) {
    RHO_EXPONENTS
        .map(|m| {
            let rho = T::lit(2f64.powi(m));
            (rho, certified_sphere_bound(c, p, rho))
        })
        .fold((T::zero(), T::neg_infinity()), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

/// Positive unit-energy direction built from the distance to the boundary,
/// supported on the wider side of the degeneracy line at `|x| ≥ 0.1`.
///
/// A one-sided bump keeps the initial mountain-pass path out of the
/// subspace of fields even in `x`, which descent would never leave.
pub fn positive_direction<T: Real>(func: &Functional<'_, T>) -> Result<Vec<T>> {
    let grid = func.grid();
    let dom = grid.domain();
    let (x0, x1, _, _) = dom.bounding_box();
    let side = if x1 >= -x0 { T::one() } else { -T::one() };
    let mut v: Vec<T> = (0..grid.len())
        .map(|u| {
            let (x, y) = grid.coord(u);
            if side * x < T::lit(FAR_SIDE_MIN_ABS_X) {
                T::zero()
            } else {
                (-dom.signed_inside(x, y)).max(T::zero())
            }
        })
        .collect();
    normalize_energy(func, &mut v)?;
    Ok(v)
}

/// Doubles `R` from 1 until `Φ(R û) < 0`, then checks `Φ` keeps decreasing
/// at `2R₀` and `4R₀`.
pub fn far_side_scan<T: Real>(func: &Functional<'_, T>, u_hat: &[T]) -> Result<FarSideScan<T>> {
    let at = |r: T| -> Result<T> {
        let v: Vec<T> = u_hat.iter().map(|&x| r * x).collect();
        func.phi(&v)
    };
    let mut r = T::one();
    for _ in 0..FAR_SIDE_MAX_DOUBLINGS {
        let v0 = at(r)?;
        if v0 < T::zero() {
            let two = r + r;
            let values = [v0, at(two)?, at(two + two)?];
            let monotone = values[1] < values[0] && values[2] < values[1];
            return Ok(FarSideScan {
                r0: r,
                values,
                monotone,
            });
        }
        r = r + r;
    }
    Err(Error::NotConverged {
        method: "far-side scan",
        iterations: FAR_SIDE_MAX_DOUBLINGS,
        residual: at(r)?.as_f64(),
    })
}
