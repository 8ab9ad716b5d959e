mod common;

use std::sync::{Arc, OnceLock};

use common::*;
use grushin_core::analysis::{embedding_constant, embedding_ratio};
use grushin_core::functional::*;
use grushin_core::nonlinearity::HypothesisMeta;
use grushin_core::solvers::*;
use grushin_core::*;

struct Bench {
    grid: Arc<Grid<f64>>,
    a: SparseOperator<f64>,
    nl: Nonlinearity<f64>,
    nehari: SolveReport<f64>,
    mpa: SolveReport<f64>,
}

fn bench() -> &'static Bench {
    static CELL: OnceLock<Bench> = OnceLock::new();
    CELL.get_or_init(|| {
        let (grid, a) = setup(&square(), 65, 1.0);
        let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
        let cfg = MpaCfg::default();
        let lin = LinearSolverCfg::default();
        let nehari = nehari_minimize(&grid, &a, &nl, 42, &cfg, &lin).unwrap();
        let func = Functional::new(&grid, &a, &nl, lin).unwrap();
        let u_hat = positive_direction(&func).unwrap();
        let scan = far_side_scan(&func, &u_hat).unwrap();
        let u1 = func.field(scan.endpoint(&u_hat)).unwrap();
        let mpa = mpa_solve(&u1, &a, &nl, &cfg, &lin).unwrap();
        Bench {
            grid,
            a,
            nl,
            nehari,
            mpa,
        }
    })
}

#[test]
fn benchmark_methods_agree() {
    let b = bench();
    for r in [&b.nehari, &b.mpa] {
        assert!(r.grad_norm <= 1e-8 && r.level > 0.0, "{r:?}");
        assert!(r.u_star.norm_inf() > 1e-3);
        assert!(!r.supercritical);
    }
    let dl = (b.nehari.level - b.mpa.level).abs() / b.nehari.level;
    let (ni, mi) = (b.nehari.u_star.norm_inf(), b.mpa.u_star.norm_inf());
    assert!(dl <= 0.01, "levels {} vs {}", b.nehari.level, b.mpa.level);
    assert!((ni - mi).abs() / ni <= 0.02);
}

#[test]
fn mountain_pass_level_bounds() {
    let b = bench();
    let p = 3.0;
    let c = embedding_constant(
        &b.grid,
        &b.a,
        1.0,
        p + 1.0,
        0,
        20_000,
        Some(&b.mpa.u_star),
        &LinearSolverCfg::default(),
    )
    .unwrap()
    .c_q_estimate;
    let (rho, alpha) = certified_alpha(c, p);
    assert!(alpha > 0.0 && rho > 0.0);
    assert!(b.mpa.level >= alpha);
    // the sphere bound is attained by the ground state up to the dyadic radius grid
    let sup = (p - 1.0) / (2.0 * (p + 1.0)) * c.powf(-2.0 * (p + 1.0) / (p - 1.0));
    assert!(
        (b.nehari.level - sup).abs() <= 1e-6 * sup,
        "{} vs {sup}",
        b.nehari.level
    );
}

#[test]
fn solution_is_weak_solution() {
    let b = bench();
    let func = Functional::new(&b.grid, &b.a, &b.nl, LinearSolverCfg::default()).unwrap();
    let g = func.phi_grad(b.mpa.u_star.values()).unwrap();
    let mut r = rng(4);
    for _ in 0..20 {
        let v = random_vec(b.grid.len(), &mut r);
        let pair: f64 = g.iter().zip(&v).map(|(p, q)| p * q).sum();
        assert!(pair.abs() <= 1e-8 * func.energy_norm(&v));
    }
}

#[test]
fn nehari_minimizer_is_nonnegative() {
    let b = bench();
    assert!(b.nehari.u_star.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn scaling_covariance() {
    let b = bench();
    let p = 3.0;
    for c in [0.5f64, 2.0, 10.0] {
        let factor: f64 = c.powf(1.0 - p);
        let base = b.nl.clone();
        let base2 = b.nl.clone();
        let base3 = b.nl.clone();
        let scaled = Nonlinearity::custom(
            "scaled-power",
            1.0,
            Arc::new(move |x, y, s| factor * base.f(x, y, s)),
            Arc::new(move |x, y, s| factor * base2.F(x, y, s)),
            Arc::new(move |x, y, s| factor * base3.df(x, y, s)),
            HypothesisMeta {
                q1: p + 1.0,
                c0: 0.0,
                c: 1.0,
                psi: None,
                phi: None,
            },
        )
        .unwrap();
        let func = Functional::new(&b.grid, &b.a, &scaled, LinearSolverCfg::default()).unwrap();
        let cu: Vec<f64> = b.nehari.u_star.values().iter().map(|v| c * v).collect();
        let st = func.state(&cu).unwrap();
        assert!(st.grad_norm <= c * 1e-8 * (1.0 + 1e-6), "c={c}: {}", st.grad_norm);
    }
}

#[test]
fn newton_fixed_point_and_quadratic_phase() {
    let b = bench();
    let func = Functional::new(&b.grid, &b.a, &b.nl, LinearSolverCfg::default()).unwrap();
    // tighten the converged run to an essentially exact discrete solution
    let exact = newton_refine(&func, b.nehari.u_star.values(), 1e-13, 8).unwrap();
    assert!(exact.grad_norm <= 1e-12, "{:?}", exact.history);
    let u = &exact.u;
    let (delta, _) = newton_direction(&func, u).unwrap();
    assert!(func.energy_norm(&delta) <= 1e-10, "{}", func.energy_norm(&delta));

    // perturb to a gradient norm of about 1e-4 and refine
    let bump = random_unit_directions(&func, 1, 77).unwrap().pop().unwrap();
    let g1 = func
        .state(&u.iter().zip(&bump).map(|(x, y)| x + 1e-4 * y).collect::<Vec<_>>())
        .unwrap()
        .grad_norm;
    let s = 1e-4 * (1e-4 / g1);
    let start: Vec<f64> = u.iter().zip(&bump).map(|(x, y)| x + s * y).collect();
    let g0 = func.state(&start).unwrap().grad_norm;
    assert!((0.5e-4..=2e-4).contains(&g0), "{g0}");
    let out = newton_refine(&func, &start, 1e-12, 8).unwrap();
    assert!(out.converged && out.grad_norm <= 1e-12, "{:?}", out.history);
    for w in out.history.windows(2) {
        assert!(w[1] <= 0.5 * w[0]);
    }
}

#[test]
fn determinism_and_refinement() {
    let (g33, a33) = setup(&square(), 33, 1.0);
    let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
    let cfg = MpaCfg::default();
    let lin = LinearSolverCfg::default();
    let r1 = nehari_minimize(&g33, &a33, &nl, 42, &cfg, &lin).unwrap();
    let r2 = nehari_minimize(&g33, &a33, &nl, 42, &cfg, &lin).unwrap();
    assert_eq!(r1.level.to_bits(), r2.level.to_bits());
    assert_eq!(r1.u_star, r2.u_star);
    assert_eq!((r1.iterations, r1.method), (r2.iterations, r2.method));

    let b = bench();
    let (g129, a129) = setup(&square(), 129, 1.0);
    let r129 = nehari_minimize_from(&b.nehari.u_star.resample(&g129), &a129, &nl, &cfg, &lin).unwrap();
    let (c33, c65, c129) = (r1.level, b.nehari.level, r129.level);
    assert!((c129 - c65).abs() < (c65 - c33).abs(), "{c33} {c65} {c129}");
}

#[test]
fn nehari_projection() {
    let (g, a) = setup(&square(), 17, 1.0);
    let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
    let func = Functional::new(&g, &a, &nl, LinearSolverCfg::default()).unwrap();
    let u = random_unit_directions(&func, 1, 1).unwrap().pop().unwrap();
    let (qa, qb) = (func.quad(&u), func.source_pairing(&u));
    // rescale so that a = b, then so that a/b = 4
    for (target, expect) in [(1.0, 1.0), (4.0, 2.0)] {
        let s = (qa / (target * qb)).sqrt();
        let f = ScalarField::new(g.clone(), u.iter().map(|v| s * v).collect()).unwrap();
        let (t, _) = nehari_project(&f, &a, &nl).unwrap();
        assert!((t - expect).abs() <= 1e-12 * expect, "{t}");
    }
    let mut r = rng(12);
    for _ in 0..20 {
        let f = ScalarField::new(g.clone(), random_vec(g.len(), &mut r)).unwrap();
        let (_, v) = nehari_project(&f, &a, &nl).unwrap();
        let pair: f64 = func
            .phi_grad(v.values())
            .unwrap()
            .iter()
            .zip(v.values())
            .map(|(p, q)| p * q)
            .sum();
        assert!(pair.abs() <= 1e-10 * func.quad(v.values()));
    }
    // supported on the degeneracy line only: b = 0
    let line = ScalarField::from_fn(&g, |x, _| if x == 0.0 { 1.0 } else { 0.0 });
    assert!(matches!(
        nehari_project(&line, &a, &nl),
        Err(Error::ProjectionUndefined { .. })
    ));
    let lin = Nonlinearity::pure_power(1.0, 1.0).unwrap();
    assert!(matches!(
        nehari_project(&line, &a, &lin),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn mountain_pass_rejects_bad_endpoint() {
    let (g, a) = setup(&square(), 17, 1.0);
    let nl = Nonlinearity::pure_power(3.0, 1.0).unwrap();
    let cfg = MpaCfg::default();
    let lin = LinearSolverCfg::default();
    let small = ScalarField::from_fn(&g, |x, y| 0.01 * (1.0 - x * x) * (1.0 - y * y));
    assert!(matches!(
        mpa_solve(&small, &a, &nl, &cfg, &lin),
        Err(Error::InvalidEndpoint { .. })
    ));
    assert!(matches!(
        mpa_solve(&ScalarField::zeros(&g), &a, &nl, &cfg, &lin),
        Err(Error::InvalidInput(_))
    ));
    let bad = MpaCfg {
        path_points: 2,
        ..cfg
    };
    assert!(mpa_solve(&small, &a, &nl, &bad, &lin).is_err());
}

#[test]
fn general_nonlinearity_through_mountain_pass() {
    let (g, a) = setup(&square(), 33, 1.0);
    let nl = Nonlinearity::preset("cubic-quintic", 1.0).unwrap();
    let lin = LinearSolverCfg::default();
    let func = Functional::new(&g, &a, &nl, lin).unwrap();
    let u_hat = positive_direction(&func).unwrap();
    let scan = far_side_scan(&func, &u_hat).unwrap();
    let u1 = func.field(scan.endpoint(&u_hat)).unwrap();
    let r = mpa_solve(&u1, &a, &nl, &MpaCfg::default(), &lin).unwrap();
    assert!(r.grad_norm <= 1e-8 && r.level > 0.0);
    let e = func.energy_norm(r.u_star.values());
    assert!(embedding_ratio(&r.u_star, &a, 1.0, 4.0).unwrap() > 0.0 && e > 0.0);
}

#[test]
fn eigen_and_config_contracts() {
    let (g, a) = setup(&square(), 33, 1.0);
    let pair = smallest_eigenvalue(&g, &a, &LinearSolverCfg::default()).unwrap();
    assert!(pair.lambda_min > 0.0 && pair.residual <= 1e-8);
    let first = pair.eigvec.values()[0].signum();
    assert!(pair.eigvec.values().iter().all(|v| v.signum() == first));
    assert!(LinearSolverCfg {
        tol: 0.0,
        max_iter: None
    }
    .validate()
    .is_err());
    assert!(LinearSolverCfg {
        tol: 1e-8,
        max_iter: Some(0)
    }
    .validate()
    .is_err());
    assert!(MpaCfg {
        grad_tol: -1.0,
        ..MpaCfg::<f64>::default()
    }
    .validate()
    .is_err());
}

#[test]
fn nehari_crosses_flat_valley() {
    // the p = 5 ground state sits at the end of a long, nearly flat valley
    // in which the gradient norm stays ~1e-4 for fixed-length steps
    let (g, a) = setup(&square(), 65, 1.0);
    let nl = Nonlinearity::pure_power(5.0, 1.0).unwrap();
    let r = nehari_minimize(&g, &a, &nl, 42, &MpaCfg::default(), &LinearSolverCfg::default()).unwrap();
    assert!(r.grad_norm <= 1e-8 && r.level > 0.0);
    assert!(r.iterations < 2000, "{}", r.iterations);
}
