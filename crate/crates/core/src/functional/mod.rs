//! The energy functional `Φ(u) = ½⟨Au, u⟩ - Σ wᵢ F(xᵢ, yᵢ, uᵢ)` on a grid,
//! its derivative and its Riesz (energy-metric) gradient.

mod geometry;

pub use geometry::{
    certified_alpha, certified_sphere_bound, far_side_scan, positive_direction, random_unit_directions,
    small_sphere_probe, FarSideScan, SmallSphereProbe,
};

use std::sync::Arc;

use crate::discretization::{Grid, ScalarField, SparseOperator};
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::{dot, Real};
use crate::solvers::linear::{cg_solve_into, LinearSolverCfg};

/// Energy, derivative and Riesz gradient at one point.
#[derive(Debug, Clone)]
pub struct EnergyState<T> {
    pub phi: T,
    /// `Φ'(u) = Au - w f(u)`, a covector.
    pub grad_dual: Vec<T>,
    /// `A⁻¹ Φ'(u)`
    pub grad_riesz: Vec<T>,
    /// `‖Φ'(u)‖_{E*} = sqrt(⟨Φ'(u), A⁻¹Φ'(u)⟩)`
    pub grad_norm: T,
}

/// Φ bound to a grid, its stiffness and a nonlinearity.
pub struct Functional<'a, T> {
    grid: Arc<Grid<T>>,
    a: &'a SparseOperator<T>,
    nl: &'a Nonlinearity<T>,
    lin: LinearSolverCfg<T>,
    xs: Vec<T>,
    ys: Vec<T>,
    w: Vec<T>,
}

impl<'a, T: Real> Functional<'a, T> {
    pub fn new(
        grid: &Arc<Grid<T>>,
        a: &'a SparseOperator<T>,
        nl: &'a Nonlinearity<T>,
        lin: LinearSolverCfg<T>,
    ) -> Result<Self> {
        if a.dim() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: a.dim(),
            });
        }
        lin.validate()?;
        let (xs, ys) = (0..grid.len()).map(|u| grid.coord(u)).unzip();
        Ok(Functional {
            grid: Arc::clone(grid),
            a,
            nl,
            lin,
            xs,
            ys,
            w: grid.weights(),
        })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }
    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }
    pub fn operator(&self) -> &'a SparseOperator<T> {
        self.a
    }
    pub fn nonlinearity(&self) -> &'a Nonlinearity<T> {
        self.nl
    }
    pub fn linear_cfg(&self) -> &LinearSolverCfg<T> {
        &self.lin
    }

    fn check(&self, u: &[T]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        Ok(())
    }

    pub fn field(&self, values: Vec<T>) -> Result<ScalarField<T>> {
        ScalarField::new(Arc::clone(&self.grid), values)
    }

    /// `⟨Au, u⟩`
    pub fn quad(&self, u: &[T]) -> T {
        self.a.quad_form(u)
    }

    pub fn energy_norm(&self, u: &[T]) -> T {
        self.quad(u).max(T::zero()).sqrt()
    }

    /// `Σ wᵢ F(xᵢ, yᵢ, uᵢ)`
    pub fn potential(&self, u: &[T]) -> T {
        (0..u.len())
            .map(|i| self.w[i] * self.nl.F(self.xs[i], self.ys[i], u[i]))
            .sum()
    }

    /// `w f(u)`
    pub fn source(&self, u: &[T]) -> Vec<T> {
        (0..u.len())
            .map(|i| self.w[i] * self.nl.f(self.xs[i], self.ys[i], u[i]))
            .collect()
    }

    /// `⟨w f(u), u⟩`; for a pure power `Σ w |x|^{2k} |u|^{p+1}`.
    pub fn source_pairing(&self, u: &[T]) -> T {
        dot(&self.source(u), u)
    }

    /// `w ∂f/∂ξ(u)`, the diagonal subtracted from `A` in the Newton matrix.
    pub fn newton_shift(&self, u: &[T]) -> Vec<T> {
        (0..u.len())
            .map(|i| self.w[i] * self.nl.df(self.xs[i], self.ys[i], u[i]))
            .collect()
    }

    pub fn phi(&self, u: &[T]) -> Result<T> {
        self.check(u)?;
        Ok(T::lit(0.5) * self.quad(u) - self.potential(u))
    }

    pub fn phi_grad(&self, u: &[T]) -> Result<Vec<T>> {
        self.check(u)?;
        let mut g = self.a.apply(u);
        for (gi, si) in g.iter_mut().zip(self.source(u)) {
            *gi -= si;
        }
        Ok(g)
    }

    /// Solves `A g = dual`, starting from `guess` (overwritten).
    pub fn riesz_into(&self, dual: &[T], guess: &mut [T]) -> Result<()> {
        cg_solve_into(self.a, dual, guess, &self.lin).map(|_| ())
    }

    pub fn riesz(&self, dual: &[T]) -> Result<Vec<T>> {
        let mut g = vec![T::zero(); dual.len()];
        self.riesz_into(dual, &mut g)?;
        Ok(g)
    }

    pub fn state(&self, u: &[T]) -> Result<EnergyState<T>> {
        let mut g = vec![T::zero(); self.dim()];
        self.state_warm(u, &mut g)
    }

    /// Like [`Functional::state`], starting the Riesz solve from `warm`,
    /// which is overwritten with the new gradient.
    pub fn state_warm(&self, u: &[T], warm: &mut Vec<T>) -> Result<EnergyState<T>> {
        let phi = self.phi(u)?;
        let grad_dual = self.phi_grad(u)?;
        if warm.len() != self.dim() {
            *warm = vec![T::zero(); self.dim()];
        }
        self.riesz_into(&grad_dual, warm)?;
        let grad_riesz = warm.clone();
        let grad_norm = dot(&grad_dual, &grad_riesz).max(T::zero()).sqrt();
        Ok(EnergyState {
            phi,
            grad_dual,
            grad_riesz,
            grad_norm,
        })
    }
}

pub fn phi<T: Real>(u: &ScalarField<T>, a: &SparseOperator<T>, nl: &Nonlinearity<T>) -> Result<T> {
    Functional::new(u.grid(), a, nl, LinearSolverCfg::default())?.phi(u.values())
}

pub fn phi_grad<T: Real>(u: &ScalarField<T>, a: &SparseOperator<T>, nl: &Nonlinearity<T>) -> Result<Vec<T>> {
    Functional::new(u.grid(), a, nl, LinearSolverCfg::default())?.phi_grad(u.values())
}

/// Riesz representative of `Φ'(u)` in the energy inner product.
pub fn riesz_gradient<T: Real>(
    u: &ScalarField<T>,
    a: &SparseOperator<T>,
    nl: &Nonlinearity<T>,
    lin: &LinearSolverCfg<T>,
) -> Result<ScalarField<T>> {
    let func = Functional::new(u.grid(), a, nl, *lin)?;
    let g = func.riesz(&func.phi_grad(u.values())?)?;
    func.field(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble_grushin, build_grid};
    use crate::domain::Domain;
    use nalgebra::{DMatrix, DVector};

    fn square(n: usize) -> (Arc<Grid<f64>>, SparseOperator<f64>) {
        let d = Domain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = build_grid(&d, n, n).unwrap();
        let a = assemble_grushin(&g, 1.0).unwrap();
        (g, a)
    }

    fn bump(g: &Arc<Grid<f64>>) -> ScalarField<f64> {
        ScalarField::from_fn(g, |x, y| (1.0 - x * x) * (1.0 - y * y) * (1.0 + 0.3 * x))
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let (g, a) = square(17);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let func = Functional::new(&g, &a, &nl, LinearSolverCfg::default()).unwrap();
        let u = bump(&g).into_values();
        let v: Vec<f64> = (0..u.len()).map(|i| ((i * 7 % 13) as f64 - 6.0) / 6.0).collect();
        let slope = dot(&func.phi_grad(&u).unwrap(), &v);
        for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
            let shift = |s: f64| -> Vec<f64> { u.iter().zip(&v).map(|(a, b)| a + s * b).collect() };
            let fd = (func.phi(&shift(eps)).unwrap() - func.phi(&shift(-eps)).unwrap()) / (2.0 * eps);
            assert!(
                (fd - slope).abs() <= 1e-6 * slope.abs().max(1.0),
                "{eps}: {fd} vs {slope}"
            );
        }
    }

    #[test]
    fn taylor_remainder_is_second_order() {
        let (g, a) = square(17);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let func = Functional::new(&g, &a, &nl, LinearSolverCfg::default()).unwrap();
        let u = bump(&g).into_values();
        let v: Vec<f64> = (0..u.len()).map(|i| ((i * 5 % 11) as f64 - 5.0) / 5.0).collect();
        let p0 = func.phi(&u).unwrap();
        let slope = dot(&func.phi_grad(&u).unwrap(), &v);
        let rem = |eps: f64| {
            let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
            (func.phi(&w).unwrap() - p0 - eps * slope).abs()
        };
        for eps in [1e-3, 1e-4, 1e-5] {
            let order = (rem(eps) / rem(eps / 2.0)).log2();
            assert!((1.9..=2.1).contains(&order), "{eps}: {order}");
        }
    }

    #[test]
    fn phi_matches_dense_evaluation() {
        let (g, a) = square(9);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let u = bump(&g);
        let n = a.dim();
        let dense = DMatrix::from_fn(n, n, |i, j| a.entry(i, j));
        let uv = DVector::from_column_slice(u.values());
        let mut pot = 0.0;
        for i in 0..n {
            let (x, _) = g.coord(i);
            pot += g.weight(i) * x * x * u.values()[i].powi(4) / 4.0;
        }
        let oracle = 0.5 * uv.dot(&(&dense * &uv)) - pot;
        let got = phi(&u, &a, &nl).unwrap();
        assert!(
            (got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
            "{got} vs {oracle}"
        );
    }

    #[test]
    fn scaling_of_pure_power() {
        let (g, a) = square(17);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let func = Functional::new(&g, &a, &nl, LinearSolverCfg::default()).unwrap();
        let u = bump(&g).into_values();
        let qa = func.quad(&u);
        let b = func.source_pairing(&u);
        for t in [0.1, 0.5, 1.0, 2.0, 7.0] {
            let tu: Vec<f64> = u.iter().map(|v| t * v).collect();
            let expect = t * t * qa / 2.0 - t.powi(4) * b / 4.0;
            let got = func.phi(&tu).unwrap();
            assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0), "{t}");
        }
    }

    #[test]
    fn gradient_vanishes_at_zero() {
        let (g, a) = square(9);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let func = Functional::new(&g, &a, &nl, LinearSolverCfg::default()).unwrap();
        let st = func.state(&vec![0.0; func.dim()]).unwrap();
        assert_eq!(st.phi, 0.0);
        assert_eq!(st.grad_norm, 0.0);
    }

    #[test]
    fn riesz_gradient_solves_stiffness_system() {
        let (g, a) = square(17);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let u = bump(&g);
        let gr = riesz_gradient(&u, &a, &nl, &LinearSolverCfg::default()).unwrap();
        let back = a.apply(gr.values());
        let dual = phi_grad(&u, &a, &nl).unwrap();
        let err = back
            .iter()
            .zip(&dual)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        let scale = dual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-8 * scale);
    }

    #[test]
    fn wrong_length_rejected() {
        let (g, a) = square(9);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let func = Functional::new(&g, &a, &nl, LinearSolverCfg::default()).unwrap();
        assert!(matches!(func.phi(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }
}
