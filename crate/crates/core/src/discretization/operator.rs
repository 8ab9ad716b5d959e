use crate::discretization::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric sparse stiffness matrix in CSR layout together with the lumped
/// (diagonal) quadrature mass of the same grid.
///
/// The stiffness `A` realizes the energy inner product
/// `∫ ∇_G u · ∇_G v`; the pointwise difference operator is `M⁻¹A`, which is
/// similar to the symmetric `M^{-1/2} A M^{-1/2}`.
#[derive(Debug, Clone)]
pub struct SparseOperator<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
    mass: Vec<T>,
}

/// Anything that can apply a square matrix to a vector.
pub trait LinearOperator<T> {
    fn dim(&self) -> usize;
    /// `y = self * x`
    fn apply_into(&self, x: &[T], y: &mut [T]);
}

impl<T: Real> LinearOperator<T> for SparseOperator<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *yi = acc;
        }
    }
}

impl<T: Real> SparseOperator<T> {
    /// Builds from per-row `(column, value)` lists; duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>, mass: Vec<T>) -> Result<Self> {
        let n = rows.len();
        if mass.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mass.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if c >= n {
                    return Err(Error::InvalidInput(format!("column {c} out of range {n}")));
                }
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseOperator {
            n,
            row_ptr,
            cols,
            vals,
            mass,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Lumped quadrature mass (the nodal weights).
    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.row(i).find(|&(c, _)| c == j).map_or(T::zero(), |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.apply_into(x, &mut y);
        y
    }

    /// `⟨A u, u⟩`
    pub fn quad_form(&self, u: &[T]) -> T {
        let mut acc = T::zero();
        for (i, &ui) in u.iter().enumerate().take(self.n) {
            let mut r = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                r += self.vals[p] * u[self.cols[p]];
            }
            acc += r * ui;
        }
        acc
    }

    /// Pointwise difference operator `M⁻¹ A u`.
    pub fn apply_pointwise(&self, u: &[T]) -> Vec<T> {
        let mut y = self.apply(u);
        for (yi, &m) in y.iter_mut().zip(&self.mass) {
            *yi /= m;
        }
        y
    }

    /// Largest relative mismatch `|a_ij - a_ji| / max(|a_ij|, |a_ji|)` over stored pairs.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let w = self.entry(j, i);
                let scale = v.abs().max(w.abs());
                if scale > T::zero() {
                    worst = worst.max((v - w).abs() / scale);
                }
            }
        }
        worst
    }

    /// Dense copy (row-major), for small problems and diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// Assembles the symmetric stiffness of `-∂²/∂x² - |x|^{2k} ∂²/∂y²` with
/// homogeneous Dirichlet data.
///
/// Each grid edge contributes `width · (u_p - u_q)² / length` to the energy,
/// the y-edges additionally carrying `|x|^{2k}` at their (shared) abscissa.
/// Arms cut by a curved boundary end at the boundary where `u = 0`
/// (Shortley–Weller); the transverse width of an edge is the mean of the
/// half-arm widths of its endpoints, so `M⁻¹A` reduces to the unequal-arm
/// second difference at cut nodes and to the 5-point stencil elsewhere.
pub fn assemble_grushin<T: Real>(grid: &Grid<T>, k: T) -> Result<SparseOperator<T>> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::InvalidInput(format!(
            "degeneracy exponent k must be positive, got {k}"
        )));
    }
    let n = grid.len();
    let half = T::lit(0.5);
    // Transverse widths: x-edges use the y-cell width and vice versa.
    let width_x: Vec<T> = (0..n)
        .map(|u| {
            let a = grid.arms(u);
            half * (a[2] + a[3])
        })
        .collect();
    let width_y: Vec<T> = (0..n)
        .map(|u| {
            let a = grid.arms(u);
            half * (a[0] + a[1])
        })
        .collect();

    let mut rows = Vec::with_capacity(n);
    for p in 0..n {
        let arms = grid.arms(p);
        let nbs = grid.neighbors(p);
        let coeff_y = T::degenerate_weight(grid.coord(p).0, k);
        let mut diag = T::zero();
        let mut row = Vec::with_capacity(5);
        for d in 0..4 {
            let (width, scale) = if d < 2 {
                (&width_x, T::one())
            } else {
                (&width_y, coeff_y)
            };
            match nbs[d] {
                Some(q) => {
                    let c = scale * (half * (width[p] + width[q])) / arms[d];
                    diag += c;
                    row.push((q, -c));
                }
                None => diag += scale * width[p] / arms[d],
            }
        }
        row.push((p, diag));
        rows.push(row);
    }
    SparseOperator::from_rows(rows, grid.weights())
}
