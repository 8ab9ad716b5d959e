use std::fmt;

use crate::discretization::{assemble_grushin, build_grid, ScalarField};
use crate::domain::{boundary_quadrature, starshape_check, Domain};
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Real;
use crate::solvers::{nehari_minimize, nehari_minimize_from, LinearSolverCfg, MpaCfg};

use super::critical_exponents;

const STARSHAPE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendVerdict {
    ConsistentWithNonexistence,
    Inconclusive,
}

impl fmt::Display for TrendVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrendVerdict::ConsistentWithNonexistence => "consistent-with-nonexistence",
            TrendVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrendReport<T> {
    pub grids: Vec<usize>,
    pub levels: Vec<T>,
    pub max_norms: Vec<T>,
    pub iterations: Vec<usize>,
    pub supercritical: bool,
    pub verdict: TrendVerdict,
}

/// Strictly falling levels together with strictly growing sup norms over at
/// least three grids.
pub fn trend_verdict<T: Real>(levels: &[T], max_norms: &[T]) -> TrendVerdict {
    let falling = levels.windows(2).all(|w| w[1] < w[0]);
    let growing = max_norms.windows(2).all(|w| w[1] > w[0]);
    if levels.len() >= 3 && levels.len() == max_norms.len() && falling && growing {
        TrendVerdict::ConsistentWithNonexistence
    } else {
        TrendVerdict::Inconclusive
    }
}

/// Computes Nehari ground states of the pure power on square grids of the
/// given sizes (each warm-started from the previous one) and classifies the
/// refinement trend.
///
/// The domain must be starshaped with respect to the Grushin dilations.
/// Subcritical powers are accepted and serve as controls.
pub fn nonexistence_trend<T: Real>(
    domain: &Domain<T>,
    k: T,
    p: T,
    grids: &[usize],
    seed: u64,
    cfg: &MpaCfg<T>,
    lin: &LinearSolverCfg<T>,
) -> Result<TrendReport<T>> {
    let ce = critical_exponents(k)?;
    let samples = boundary_quadrature(domain, STARSHAPE_SAMPLES)?;
    let star = starshape_check(domain, k, &samples);
    if !star.is_starshaped {
        return Err(Error::Precondition(format!(
            "domain is not starshaped (min boundary factor {:e})",
            star.min_value
        )));
    }
    if grids.len() < 3 || grids.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "trend needs at least three strictly increasing grid sizes".into(),
        ));
    }
    let nl = Nonlinearity::pure_power(p, k)?;
    let mut levels = Vec::new();
    let mut max_norms = Vec::new();
    let mut iterations = Vec::new();
    let mut previous: Option<ScalarField<T>> = None;
    for &n in grids {
        let grid = build_grid(domain, n, n)?;
        let a = assemble_grushin(&grid, k)?;
        let report = match &previous {
            None => nehari_minimize(&grid, &a, &nl, seed, cfg, lin)?,
            Some(coarse) => nehari_minimize_from(&coarse.resample(&grid), &a, &nl, cfg, lin)?,
        };
        levels.push(report.level);
        max_norms.push(report.u_star.norm_inf());
        iterations.push(report.iterations);
        previous = Some(report.u_star);
    }
    let verdict = trend_verdict(&levels, &max_norms);
    Ok(TrendReport {
        grids: grids.to_vec(),
        levels,
        max_norms,
        iterations,
        supercritical: p > ce.p_crit,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        let v = trend_verdict(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0]);
        assert_eq!(v, TrendVerdict::ConsistentWithNonexistence);
        assert_eq!(
            trend_verdict(&[3.0, 2.0], &[1.0, 2.0]),
            TrendVerdict::Inconclusive
        );
        assert_eq!(
            trend_verdict(&[3.0, 3.0, 1.0], &[1.0, 2.0, 3.0]),
            TrendVerdict::Inconclusive
        );
        assert_eq!(
            trend_verdict(&[3.0, 2.0, 1.0], &[1.0, 2.0, 2.0]),
            TrendVerdict::Inconclusive
        );
        assert_eq!(trend_verdict::<f64>(&[], &[]), TrendVerdict::Inconclusive);
    }

    #[test]
    fn rejects_off_center_domain() {
        let d = Domain::rectangle(-1.0, 1.0, 0.5, 2.0).unwrap();
        let r = nonexistence_trend(
            &d,
            1.0,
            11.0,
            &[17, 33, 65],
            0,
            &MpaCfg::default(),
            &LinearSolverCfg::default(),
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
