//! Sampled spot-checks of the growth, sign, limit and monotonicity
//! hypotheses. Failures are data: each carries a witness tuple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Nonlinearity, NonlinearityKind};
use crate::analysis::critical_exponents;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_HYPOTHESIS_SAMPLES: usize = 1000;

/// Limits at `ξ → 0` are only probed where `|x|` is at least this.
const LIMIT_MIN_ABS_X: f64 = 0.1;
const SMALL_RATIO: f64 = 0.01;
const REL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness<T> {
    pub x: T,
    pub y: T,
    pub xi: T,
    /// The offending quantity (ratio, excess, ...).
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisOutcome<T> {
    /// `A1` ... `A5`; the two limits of A4 are reported separately.
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<Witness<T>>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport<T> {
    pub seed: u64,
    pub samples: usize,
    pub outcomes: Vec<HypothesisOutcome<T>>,
}

impl<T: Real> HypothesisReport<T> {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, name: &str) -> Option<&HypothesisOutcome<T>> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

fn outcome<T>(
    name: &'static str,
    witness: Option<Witness<T>>,
    note: impl Into<String>,
) -> HypothesisOutcome<T> {
    HypothesisOutcome {
        name,
        passed: witness.is_none(),
        witness,
        note: note.into(),
    }
}

fn sample_point<T: Real>(domain: &Domain<T>, rng: &mut ChaCha8Rng) -> (T, T) {
    let (x0, x1, y0, y1) = domain.bounding_box();
    let (x0, x1, y0, y1) = (x0.as_f64(), x1.as_f64(), y0.as_f64(), y1.as_f64());
    loop {
        let x = T::lit(rng.gen_range(x0..x1));
        let y = T::lit(rng.gen_range(y0..y1));
        if domain.contains(x, y) {
            return (x, y);
        }
    }
}

/// Spot-checks the structural hypotheses at `sample_count` random
/// `(x, y, ξ)`: `ξ` is drawn log-uniformly in magnitude over `[10⁻³, 10³]`
/// with random sign for half of the samples, uniformly in `[-C, C]` for the
/// other half.
pub fn check_hypotheses<T: Real>(
    nl: &Nonlinearity<T>,
    domain: &Domain<T>,
    sample_count: usize,
    seed: u64,
) -> Result<HypothesisReport<T>> {
    if sample_count < MIN_HYPOTHESIS_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "hypothesis checks need at least {MIN_HYPOTHESIS_SAMPLES} samples, got {sample_count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = nl.k();
    let meta = nl.meta();
    let c = meta.c;
    let cf = c.as_f64();

    let samples: Vec<(T, T, T)> = (0..sample_count)
        .map(|i| {
            let (x, y) = sample_point(domain, &mut rng);
            let xi = if i % 2 == 0 {
                let mag = 10f64.powf(rng.gen_range(-3.0..3.0));
                if rng.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            } else if cf > 0.0 {
                rng.gen_range(-cf..=cf)
            } else {
                0.0
            };
            (x, y, T::lit(xi))
        })
        .collect();
    let slack = |bound: T| bound.abs() * T::lit(REL_SLACK) + T::min_positive_value();

    let mut outcomes = Vec::new();

    // A1: growth bound with q1 in (2, 2_k).
    let two_k = critical_exponents(k)?.two_k;
    let q1 = meta.q1;
    let a1 = if !(q1 > T::lit(2.0) && q1 < two_k) {
        Some(Witness {
            x: T::nan(),
            y: T::nan(),
            xi: T::nan(),
            value: q1,
        })
    } else {
        samples.iter().find_map(|&(x, y, xi)| {
            let bound = T::degenerate_weight(x, k) * (xi.abs().powf(q1 - T::one()) + meta.c0);
            let v = nl.f(x, y, xi).abs();
            (v > bound + slack(bound)).then_some(Witness {
                x,
                y,
                xi,
                value: v - bound,
            })
        })
    };
    outcomes.push(outcome(
        "A1",
        a1,
        format!(
            "|f| <= |x|^(2k) (|xi|^(q1-1) + C0), q1 = {q1}, C0 = {}, 2_k = {two_k}",
            meta.c0
        ),
    ));

    // A2: |f| <= |x|^{2k} psi on |xi| <= C.
    let small: Vec<(T, T, T)> = samples
        .iter()
        .copied()
        .filter(|&(_, _, xi)| xi.abs() <= c)
        .chain(samples.iter().flat_map(|&(x, y, _)| [(x, y, c), (x, y, -c)]))
        .collect();
    let psi_const = small
        .iter()
        .filter(|&&(x, _, _)| T::degenerate_weight(x, k) > T::zero())
        .map(|&(x, y, xi)| nl.f(x, y, xi).abs() / T::degenerate_weight(x, k))
        .fold(T::zero(), T::max);
    let psi = |x: T, y: T| meta.psi.as_ref().map_or(psi_const, |p| p(x, y));
    let a2 = samples
        .iter()
        .find_map(|&(x, y, _)| {
            let v = psi(x, y);
            (!(v >= T::zero()) || !v.is_finite()).then_some(Witness {
                x,
                y,
                xi: T::nan(),
                value: v,
            })
        })
        .or_else(|| {
            small.iter().find_map(|&(x, y, xi)| {
                let bound = T::degenerate_weight(x, k) * psi(x, y);
                let v = nl.f(x, y, xi).abs();
                (v > bound + slack(bound)).then_some(Witness {
                    x,
                    y,
                    xi,
                    value: v - bound,
                })
            })
        });
    outcomes.push(outcome(
        "A2",
        a2,
        if meta.psi.is_some() {
            "|f| <= |x|^(2k) psi on |xi| <= C, declared psi".to_string()
        } else {
            format!("|f| <= |x|^(2k) psi on |xi| <= C, sampled constant psi = {psi_const}")
        },
    ));

    // A3: non-positive phi <= f/xi.
    let phi = |x: T, y: T| meta.phi.as_ref().map_or(T::zero(), |p| p(x, y));
    let a3 = samples.iter().find_map(|&(x, y, xi)| {
        let lower = phi(x, y);
        if lower > T::zero() || !lower.is_finite() {
            return Some(Witness {
                x,
                y,
                xi,
                value: lower,
            });
        }
        if xi == T::zero() {
            return None;
        }
        let r = nl.f(x, y, xi) / xi;
        (r < lower - slack(lower)).then_some(Witness {
            x,
            y,
            xi,
            value: r - lower,
        })
    });
    outcomes.push(outcome("A3", a3, "phi <= 0 and phi <= f/xi"));

    // A4: f(x,y,0) = 0 ...
    let a4_zero = samples.iter().find_map(|&(x, y, _)| {
        let v = nl.f(x, y, T::zero());
        (v != T::zero()).then_some(Witness {
            x,
            y,
            xi: T::zero(),
            value: v,
        })
    });
    outcomes.push(outcome("A4-zero", a4_zero, "f(x, y, 0) = 0"));

    // ... f / (|x|^{2k} xi) -> 0 as xi -> 0, probed where |x| >= 0.1 ...
    let probe_pts: Vec<(T, T)> = samples
        .iter()
        .map(|&(x, y, _)| (x, y))
        .filter(|&(x, _)| x.abs() >= T::lit(LIMIT_MIN_ABS_X))
        .take(200)
        .collect();
    let a4_small = probe_pts.iter().find_map(|&(x, y)| {
        [T::one(), -T::one()].into_iter().find_map(|sign| {
            let xi = sign * T::lit(1e-12);
            let r = nl.f(x, y, xi) / (T::degenerate_weight(x, k) * xi);
            (!(r.abs() < T::lit(SMALL_RATIO))).then_some(Witness { x, y, xi, value: r })
        })
    });
    outcomes.push(outcome(
        "A4-small",
        a4_small,
        "f/(|x|^(2k) xi) below 0.01 along xi -> 0 (only |x| >= 0.1 probed)",
    ));

    // ... and f/xi -> +inf as xi -> +inf.
    let a4_large = probe_pts.iter().find_map(|&(x, y)| {
        let ratios: Vec<T> = (0..=12)
            .map(|m| {
                let xi = T::lit(10f64.powf(m as f64 * 0.25));
                nl.f(x, y, xi) / xi
            })
            .collect();
        let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
        let grown = ratios[12] >= T::lit(10.0) * ratios[0] && ratios[0] > T::zero();
        (!(increasing && grown)).then_some(Witness {
            x,
            y,
            xi: T::lit(1e3),
            value: ratios[12],
        })
    });
    outcomes.push(outcome(
        "A4-large",
        a4_large,
        "f/xi increasing and growing tenfold over xi in [1, 1e3] (only |x| >= 0.1 probed)",
    ));

    // A5: f/xi increasing on xi >= C and decreasing on xi <= -C.
    let lo = cf.max(1e-3);
    let grid: Vec<T> = (0..64)
        .map(|m| T::lit(lo * (1e3 / lo).powf(m as f64 / 63.0)))
        .collect();
    let a5 = probe_pts.iter().find_map(|&(x, y)| {
        for w in grid.windows(2) {
            let (s, t) = (w[0], w[1]);
            let up = nl.f(x, y, t) / t - nl.f(x, y, s) / s;
            if !(up > T::zero()) {
                return Some(Witness {
                    x,
                    y,
                    xi: t,
                    value: up,
                });
            }
            let down = nl.f(x, y, -t) / -t - nl.f(x, y, -s) / -s;
            if !(down > T::zero()) {
                return Some(Witness {
                    x,
                    y,
                    xi: -t,
                    value: down,
                });
            }
        }
        None
    });
    outcomes.push(outcome("A5", a5, format!("f/xi monotone beyond C = {c}")));

    if let NonlinearityKind::PurePower { .. } = nl.kind() {
        log::debug!("hypotheses checked for {}", nl.name());
    }
    Ok(HypothesisReport {
        seed,
        samples: sample_count,
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneOutcome<T> {
    pub passed: bool,
    /// Consecutive `(s, t)` where the monotonicity fails.
    pub witness: Option<(T, T)>,
}

/// Checks that `ξ ↦ f ξ - 2F` is nondecreasing on `ξ ≥ C` and nonincreasing
/// on `ξ ≤ -C` along a sorted grid, with `1e-12` relative slack.
pub fn check_lemma45_monotone<T: Real>(
    nl: &Nonlinearity<T>,
    x: T,
    y: T,
    xi_grid: &[T],
) -> Result<MonotoneOutcome<T>> {
    if xi_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidInput("xi grid must be sorted ascending".into()));
    }
    let c = nl.meta().c;
    let g = |s: T| nl.f(x, y, s) * s - T::lit(2.0) * nl.F(x, y, s);
    for w in xi_grid.windows(2) {
        let (s, t) = (w[0], w[1]);
        let (gs, gt) = (g(s), g(t));
        let tol = T::lit(REL_SLACK) * T::one().max(gs.abs()).max(gt.abs());
        let bad = (s >= c && gt < gs - tol) || (t <= -c && gt > gs + tol);
        if bad {
            return Ok(MonotoneOutcome {
                passed: false,
                witness: Some((s, t)),
            });
        }
    }
    Ok(MonotoneOutcome {
        passed: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::HypothesisMeta;
    use std::sync::Arc;

    fn square() -> Domain<f64> {
        Domain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    #[test]
    fn cubic_power_passes_everything() {
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let r = check_hypotheses(&nl, &square(), 2000, 1).unwrap();
        assert!(r.all_passed(), "{:?}", r.outcomes);
        assert_eq!(r.seed, 1);
    }

    #[test]
    fn sublinear_growth_against_declared_q1() {
        let base = Nonlinearity::pure_power(1.5, 1.0).unwrap();
        // Oracle: sampled max of |xi|^1.5 - |xi|^(q1-1) over the probed range.
        let excess = |q1: f64| {
            (0..=20_000)
                .map(|i| {
                    let xi = 10f64.powf(-3.0 + 6.0 * i as f64 / 20_000.0);
                    xi.powf(1.5) - xi.powf(q1 - 1.0)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        // q1 = 2.6 leaves a bounded excess (about 0.024), so C0 = 1 suffices.
        assert!(excess(2.6) < 1.0);
        let meta = HypothesisMeta {
            q1: 2.6,
            c0: 1.0,
            ..base.meta().clone()
        };
        let r = check_hypotheses(&base.clone().with_meta(meta), &square(), 2000, 9).unwrap();
        assert!(r.outcome("A1").unwrap().passed);

        // q1 = 2.1 cannot dominate |xi|^1.5 for large xi whatever C0 is.
        assert!(excess(2.1) > 1.0);
        let meta = HypothesisMeta {
            q1: 2.1,
            c0: 1.0,
            ..base.meta().clone()
        };
        let r = check_hypotheses(&base.with_meta(meta), &square(), 2000, 9).unwrap();
        let a1 = r.outcome("A1").unwrap();
        assert!(!a1.passed);
        let w = a1.witness.unwrap();
        assert!(w.xi.abs() > 1.0 && w.value > 0.0);
    }

    #[test]
    fn declared_q1_out_of_range_fails() {
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let meta = HypothesisMeta {
            q1: 12.0,
            ..nl.meta().clone()
        };
        let r = check_hypotheses(&nl.with_meta(meta), &square(), 1000, 2).unwrap();
        assert!(!r.outcome("A1").unwrap().passed);
    }

    #[test]
    fn linear_fails_small_limit_with_ratio_one() {
        let nl = Nonlinearity::preset("linear", 1.0).unwrap();
        let r = check_hypotheses(&nl, &square(), 1000, 3).unwrap();
        let o = r.outcome("A4-small").unwrap();
        assert!(!o.passed);
        assert!((o.witness.unwrap().value - 1.0).abs() < 1e-12);
        assert!(!r.outcome("A4-large").unwrap().passed);
    }

    #[test]
    fn presets_admissible() {
        for name in ["cubic-quintic", "log-cubic"] {
            let nl = Nonlinearity::preset(name, 1.0).unwrap();
            let r = check_hypotheses(&nl, &Domain::unit_disk(), 1500, 4).unwrap();
            assert!(r.all_passed(), "{name}: {:?}", r.outcomes);
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        assert!(check_hypotheses(&nl, &square(), 999, 0).is_err());
    }

    #[test]
    fn seeded_reports_reproduce() {
        let nl = Nonlinearity::preset("linear", 2.0).unwrap();
        let a = check_hypotheses(&nl, &square(), 1000, 77).unwrap();
        let b = check_hypotheses(&nl, &square(), 1000, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lemma45_examples() {
        let grid: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.05).collect();
        let cubic = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        assert!(check_lemma45_monotone(&cubic, 0.4, 0.1, &grid).unwrap().passed);
        let linear = Nonlinearity::pure_power(1.0, 1.0).unwrap();
        assert!(check_lemma45_monotone(&linear, 0.4, 0.1, &grid).unwrap().passed);

        // Inconsistent pair: F = |x|^{2k} xi^2 is not a primitive of |x|^{2k} xi.
        let k = 1.0;
        let w = move |x: f64| f64::degenerate_weight(x, k);
        let bad = Nonlinearity::custom(
            "bad-primitive",
            k,
            Arc::new(move |x, _, s| w(x) * s),
            Arc::new(move |x, _, s| w(x) * s * s),
            Arc::new(move |x, _, _| w(x)),
            cubic.meta().clone(),
        )
        .unwrap();
        let out = check_lemma45_monotone(&bad, 0.4, 0.1, &grid).unwrap();
        assert!(!out.passed);
        assert!(out.witness.is_some());

        let unsorted = [1.0, 0.5];
        assert!(check_lemma45_monotone(&cubic, 0.4, 0.1, &unsorted).is_err());
    }
}
