use std::sync::Arc;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stencil arms shorter than this fraction of the spacing are clamped to it.
/// Keeps the stiffness diagonal bounded when a node sits almost on a curved
/// boundary; the induced geometric error is below the first-order boundary
/// error of the scheme.
pub const MIN_ARM_FRACTION: f64 = 1e-2;

/// Directions in stencil order: west, east, south, north.
pub(crate) const DIRS: [(f64, f64); 4] = [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0)];

/// Uniform tensor grid over the bounding box of a domain, with the unknowns
/// being the nodes strictly inside the domain.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    domain: Domain<T>,
    nx: usize,
    ny: usize,
    hx: T,
    hy: T,
    xs: Vec<T>,
    ys: Vec<T>,
    /// Unknown index for each node, row-major (`j * nx + i`).
    node_unknown: Vec<Option<usize>>,
    /// Node `(i, j)` of each unknown.
    unknown_node: Vec<(usize, usize)>,
    /// Quadrature weight of each node of the closure (zero outside).
    node_weight: Vec<T>,
    /// Stencil arm lengths per unknown in [`DIRS`] order.
    arms: Vec<[T; 4]>,
    /// Interior neighbor per unknown in [`DIRS`] order.
    neighbors: Vec<[Option<usize>; 4]>,
}

/// Builds the grid with `nx × ny` nodes spanning the domain's bounding box.
pub fn build_grid<T: Real>(domain: &Domain<T>, nx: usize, ny: usize) -> Result<Arc<Grid<T>>> {
    Grid::new(domain, nx, ny).map(Arc::new)
}

fn axis<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let last = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo + (hi - lo) * T::from_usize_lossy(i) / last,
        })
        .collect()
}

impl<T: Real> Grid<T> {
    pub fn new(domain: &Domain<T>, nx: usize, ny: usize) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::DegenerateGrid(format!(
                "{nx}x{ny} nodes requested, at least 8 per axis required"
            )));
        }
        let (xmin, xmax, ymin, ymax) = domain.bounding_box();
        let xs = axis(xmin, xmax, nx);
        let ys = axis(ymin, ymax, ny);
        let hx = (xmax - xmin) / T::from_usize_lossy(nx - 1);
        let hy = (ymax - ymin) / T::from_usize_lossy(ny - 1);

        let mut node_unknown = vec![None; nx * ny];
        let mut unknown_node = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if domain.signed_inside(xs[i], ys[j]) < T::zero() {
                    node_unknown[j * nx + i] = Some(unknown_node.len());
                    unknown_node.push((i, j));
                }
            }
        }
        if unknown_node.len() < 4 {
            return Err(Error::DegenerateGrid(format!(
                "only {} interior nodes, at least 4 required",
                unknown_node.len()
            )));
        }

        let min_frac = T::lit(MIN_ARM_FRACTION);
        let mut arms = Vec::with_capacity(unknown_node.len());
        let mut neighbors = Vec::with_capacity(unknown_node.len());
        for &(i, j) in &unknown_node {
            let mut arm = [hx, hx, hy, hy];
            let mut nb = [None; 4];
            for (d, &(dx, dy)) in DIRS.iter().enumerate() {
                let h = if d < 2 { hx } else { hy };
                let ni = i as isize + dx as isize;
                let nj = j as isize + dy as isize;
                let inside = ni >= 0
                    && nj >= 0
                    && (ni as usize) < nx
                    && (nj as usize) < ny
                    && node_unknown[nj as usize * nx + ni as usize].is_some();
                if inside {
                    nb[d] = node_unknown[nj as usize * nx + ni as usize];
                } else {
                    let dist = domain.axis_distance_to_boundary(xs[i], ys[j], T::lit(dx), T::lit(dy));
                    arm[d] = dist.min(h).max(min_frac * h);
                }
            }
            arms.push(arm);
            neighbors.push(nb);
        }

        let mut node_weight = vec![T::zero(); nx * ny];
        if domain.is_rectangle() {
            // Trapezoid rule on the closed box; interior nodes carry hx*hy.
            let half = T::lit(0.5);
            for j in 0..ny {
                for i in 0..nx {
                    let wx = if i == 0 || i == nx - 1 { half } else { T::one() };
                    let wy = if j == 0 || j == ny - 1 { half } else { T::one() };
                    node_weight[j * nx + i] = wx * wy * hx * hy;
                }
            }
        } else {
            // Cut-cell nodal rule: the cell of a node spans half of each arm.
            let half = T::lit(0.5);
            for (u, &(i, j)) in unknown_node.iter().enumerate() {
                let a = arms[u];
                node_weight[j * nx + i] = half * (a[0] + a[1]) * half * (a[2] + a[3]);
            }
        }

        Ok(Grid {
            domain: *domain,
            nx,
            ny,
            hx,
            hy,
            xs,
            ys,
            node_unknown,
            unknown_node,
            node_weight,
            arms,
            neighbors,
        })
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> T {
        self.hx
    }
    pub fn hy(&self) -> T {
        self.hy
    }
    pub fn xs(&self) -> &[T] {
        &self.xs
    }
    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    /// Number of unknowns (interior nodes).
    pub fn len(&self) -> usize {
        self.unknown_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknown_node.is_empty()
    }

    pub fn unknown_at(&self, i: usize, j: usize) -> Option<usize> {
        self.node_unknown[j * self.nx + i]
    }

    pub fn node_of(&self, u: usize) -> (usize, usize) {
        self.unknown_node[u]
    }

    /// Coordinates of unknown `u`.
    pub fn coord(&self, u: usize) -> (T, T) {
        let (i, j) = self.unknown_node[u];
        (self.xs[i], self.ys[j])
    }

    /// Quadrature weight of unknown `u`.
    pub fn weight(&self, u: usize) -> T {
        let (i, j) = self.unknown_node[u];
        self.node_weight[j * self.nx + i]
    }

    pub fn weights(&self) -> Vec<T> {
        (0..self.len()).map(|u| self.weight(u)).collect()
    }

    pub fn node_weight(&self, i: usize, j: usize) -> T {
        self.node_weight[j * self.nx + i]
    }

    pub fn arms(&self, u: usize) -> [T; 4] {
        self.arms[u]
    }

    pub fn neighbors(&self, u: usize) -> [Option<usize>; 4] {
        self.neighbors[u]
    }

    /// `|x_u|^{2k}` for every unknown.
    pub fn degenerate_weights(&self, k: T) -> Vec<T> {
        (0..self.len())
            .map(|u| T::degenerate_weight(self.coord(u).0, k))
            .collect()
    }

    /// Same node layout (domain, node counts) as `other`.
    pub fn same_layout(&self, other: &Grid<T>) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.domain == other.domain
    }
}

/// Nodal values on the unknowns of a grid; Dirichlet data is implicit.
#[derive(Debug, Clone)]
pub struct ScalarField<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Real> PartialEq for ScalarField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_layout(&other.grid) && self.values == other.values
    }
}

impl<T: Real> ScalarField<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![T::zero(); grid.len()],
        }
    }

    /// Samples `g` at the unknowns.
    pub fn from_fn(grid: &Arc<Grid<T>>, g: impl Fn(T, T) -> T) -> Self {
        let values = (0..grid.len())
            .map(|u| {
                let (x, y) = grid.coord(u);
                g(x, y)
            })
            .collect();
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(Arc::clone(&self.grid), values)
    }

    pub fn scaled(&self, c: T) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn norm_inf(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    /// Value at node `(i, j)`: zero off the unknowns.
    pub fn node_value(&self, i: usize, j: usize) -> T {
        self.grid.unknown_at(i, j).map_or(T::zero(), |u| self.values[u])
    }

    /// Bilinear interpolation of the node values (zero on non-interior
    /// nodes); `None` outside the grid's bounding box.
    pub fn interpolate(&self, x: T, y: T) -> Option<T> {
        let g = &*self.grid;
        let fx = (x - g.xs[0]) / g.hx;
        let fy = (y - g.ys[0]) / g.hy;
        let eps = T::lit(1e-9);
        let maxx = T::from_usize_lossy(g.nx - 1);
        let maxy = T::from_usize_lossy(g.ny - 1);
        if !(fx >= -eps && fy >= -eps && fx <= maxx + eps && fy <= maxy + eps) {
            return None;
        }
        let fx = fx.max(T::zero()).min(maxx);
        let fy = fy.max(T::zero()).min(maxy);
        let i0 = fx.floor().to_usize()?.min(g.nx - 2);
        let j0 = fy.floor().to_usize()?.min(g.ny - 2);
        let tx = fx - T::from_usize_lossy(i0);
        let ty = fy - T::from_usize_lossy(j0);
        let one = T::one();
        Some(
            (one - tx) * (one - ty) * self.node_value(i0, j0)
                + tx * (one - ty) * self.node_value(i0 + 1, j0)
                + (one - tx) * ty * self.node_value(i0, j0 + 1)
                + tx * ty * self.node_value(i0 + 1, j0 + 1),
        )
    }

    /// Resamples onto another grid by bilinear interpolation.
    pub fn resample(&self, target: &Arc<Grid<T>>) -> Self {
        ScalarField::from_fn(target, |x, y| self.interpolate(x, y).unwrap_or(T::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_interior_count() {
        let d = Domain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = build_grid(&d, 17, 17).unwrap();
        assert_eq!(g.len(), 225);
        assert_eq!(g.xs()[16], 1.0);
        assert_eq!(g.xs()[8], 0.0);
        for u in 0..g.len() {
            assert!((g.weight(u) - 0.125f64 * 0.125).abs() < 1e-16);
        }
    }

    #[test]
    fn disk_interior_count_matches_enumeration() {
        let d = Domain::<f64>::unit_disk();
        let g = build_grid(&d, 9, 9).unwrap();
        // Brute-force enumeration of x^2 + y^2 < 1 over the 9x9 lattice.
        let mut count = 0;
        for j in 0..9 {
            for i in 0..9 {
                let x = -1.0 + 0.25 * i as f64;
                let y = -1.0 + 0.25 * j as f64;
                if x * x + y * y < 1.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(g.len(), count);
        for u in 0..g.len() {
            let (x, y) = g.coord(u);
            assert!(d.signed_inside(x, y) < 0.0);
        }
    }

    #[test]
    fn too_coarse_is_degenerate() {
        let d = Domain::<f64>::unit_disk();
        assert!(matches!(build_grid(&d, 3, 9), Err(Error::DegenerateGrid(_))));
    }

    #[test]
    fn cut_arms_are_shortened() {
        let d = Domain::<f64>::unit_disk();
        let g = build_grid(&d, 11, 11).unwrap();
        let mut shortened = 0;
        for u in 0..g.len() {
            let (x, y) = g.coord(u);
            for (dir, &(dx, dy)) in DIRS.iter().enumerate() {
                let a = g.arms(u)[dir];
                if g.neighbors(u)[dir].is_none() {
                    let p = (x + a * dx, y + a * dy);
                    let on = d.signed_inside(p.0, p.1).abs();
                    if a > MIN_ARM_FRACTION * g.hx() {
                        assert!(on < 1e-12, "arm endpoint off boundary: {on}");
                    }
                    if a < g.hx() {
                        shortened += 1;
                    }
                }
            }
            assert!(g.weight(u) <= g.hx() * g.hy() + 1e-15);
        }
        assert!(shortened > 0);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_bilinear() {
        let d = Domain::<f64>::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = build_grid(&d, 17, 17).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| 1.0 + 2.0 * x - 0.5 * y + x * y);
        for u in (0..g.len()).step_by(7) {
            let (x, y) = g.coord(u);
            assert!((f.interpolate(x, y).unwrap() - f.values()[u]).abs() < 1e-14);
        }
        // Inside cells away from the boundary the bilinear function is exact.
        let (x, y) = (0.31, -0.27);
        let exact = 1.0 + 2.0 * x - 0.5 * y + x * y;
        assert!((f.interpolate(x, y).unwrap() - exact).abs() < 1e-13);
        assert!(f.interpolate(1.5, 0.0).is_none());
        assert_eq!(f.interpolate(1.0, 0.2), Some(0.0));
    }
}
