//! Subcommand bodies. Each returns the rows it reported; artifacts land in
//! the invocation's output directory.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::sync::Arc;

use grushin_core::analysis::{critical_exponents, pohozaev_samples, DEFAULT_EMBEDDING_ITERS};
use grushin_core::discretization::{read_field, write_field};
use grushin_core::functional::{far_side_scan, positive_direction};
use grushin_core::nonlinearity::check_hypotheses;
use grushin_core::solvers::is_supercritical;
use grushin_core::{
    assemble_grushin, build_grid, embedding_constant, mpa_solve, nehari_minimize, pohozaev_evaluate,
    smallest_eigenvalue, Domain, Functional, Grid, Nonlinearity, ScalarField, SparseOperator,
};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{
    grid_label, sweep_script, write_csv, write_report, EigenRow, EmbedRow, HypothesisRow, SolutionRow,
};
use crate::{CliError, Invocation};

const DEFAULT_HYPOTHESIS_SAMPLES: usize = 10_000;

/// Maps a core error to an exit class, naming the module that raised it.
pub(crate) fn core_err(module: &str, e: grushin_core::Error) -> CliError {
    let msg = format!("{module}: {e}");
    if e.is_numerical() {
        CliError::Numerical(msg)
    } else {
        CliError::Config(msg)
    }
}

fn setup(
    domain: &Domain<f64>,
    k: f64,
    nx: usize,
    ny: usize,
) -> Result<(Arc<Grid<f64>>, SparseOperator<f64>), CliError> {
    let grid = build_grid(domain, nx, ny).map_err(|e| core_err("discretization", e))?;
    let a = assemble_grushin(&grid, k).map_err(|e| core_err("discretization", e))?;
    Ok((grid, a))
}

fn save_field(dir: &Path, name: &str, u: &ScalarField<f64>, k: f64) -> Result<(), CliError> {
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| CliError::Config(format!("output: cannot write {}: {e}", path.display())))?;
    write_field(u, k, BufWriter::new(file)).map_err(|e| core_err("discretization", e))
}

/// `subcritical`, `critical` or `supercritical` relative to the exponent
/// at which the Pohozaev volume coefficient vanishes.
fn exponent_class(nl: &Nonlinearity<f64>, k: f64) -> Result<&'static str, CliError> {
    if let Some(p) = nl.power() {
        let pc = critical_exponents(k).map_err(|e| core_err("analysis", e))?.p_crit;
        if p == pc {
            return Ok("critical");
        }
    }
    let sup = is_supercritical(nl).map_err(|e| core_err("solvers", e))?;
    Ok(if sup { "supercritical" } else { "subcritical" })
}

/// Solution row with the Pohozaev audit filled in for power laws. An audit
/// that cannot be evaluated leaves its columns empty.
fn audit_row(
    u: &ScalarField<f64>,
    a: &SparseOperator<f64>,
    nl: &Nonlinearity<f64>,
    k: f64,
    cfg: &RunConfig,
) -> Result<SolutionRow, CliError> {
    let g = u.grid();
    let func = Functional::new(g, a, nl, cfg.linear).map_err(|e| core_err("functional", e))?;
    let state = func.state(u.values()).map_err(|e| core_err("functional", e))?;
    let mut row = SolutionRow {
        k,
        p: nl.power(),
        grid: grid_label(g.nx(), g.ny()),
        level: Some(state.phi),
        grad_norm: Some(state.grad_norm),
        pohozaev_lhs: None,
        pohozaev_rhs: None,
        rel_residual: None,
        verdict: exponent_class(nl, k)?.to_string(),
    };
    if let Some(p) = nl.power() {
        match pohozaev_samples(u).and_then(|s| pohozaev_evaluate(u, k, p, &s)) {
            Ok(rep) => {
                row.pohozaev_lhs = Some(rep.lhs);
                row.pohozaev_rhs = Some(rep.rhs);
                row.rel_residual = Some(rep.rel_residual);
            }
            Err(e) => warn!("analysis: Pohozaev audit skipped: {e}"),
        }
    }
    Ok(row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Nehari,
    MountainPass,
}

fn solve_point(
    cfg: &RunConfig,
    k: f64,
    p: Option<f64>,
    nx: usize,
    ny: usize,
    route: Route,
) -> Result<(SolutionRow, ScalarField<f64>), CliError> {
    let nl = cfg.nonlinearity_for(k, p)?;
    let (grid, a) = setup(&cfg.domain, k, nx, ny)?;
    let rep = match route {
        Route::Nehari => nehari_minimize(&grid, &a, &nl, cfg.seed, &cfg.solver, &cfg.linear)
            .map_err(|e| core_err("solvers", e))?,
        Route::MountainPass => {
            let func = Functional::new(&grid, &a, &nl, cfg.linear).map_err(|e| core_err("functional", e))?;
            let u_hat = positive_direction(&func).map_err(|e| core_err("functional", e))?;
            let scan = far_side_scan(&func, &u_hat).map_err(|e| core_err("functional", e))?;
            let u1 = func
                .field(scan.endpoint(&u_hat))
                .map_err(|e| core_err("functional", e))?;
            mpa_solve(&u1, &a, &nl, &cfg.solver, &cfg.linear).map_err(|e| core_err("solvers", e))?
        }
    };
    info!(
        "{} k={k} {}x{}: level {:e}, grad {:e}, {} iterations, {:.2}s",
        rep.method, nx, ny, rep.level, rep.grad_norm, rep.iterations, rep.timing
    );
    let row = audit_row(&rep.u_star, &a, &nl, k, cfg)?;
    Ok((row, rep.u_star))
}

fn single_solve(inv: &Invocation, route: Route) -> Result<Vec<SolutionRow>, CliError> {
    let cfg = &inv.config;
    let (row, u) = solve_point(cfg, cfg.k, None, cfg.grid.nx, cfg.grid.ny, route)?;
    save_field(&inv.out_dir, "solution.field", &u, cfg.k)?;
    let rows = vec![row];
    write_report(&inv.out_dir, inv.format, &rows)?;
    Ok(rows)
}

pub fn cmd_solve(inv: &Invocation) -> Result<Vec<SolutionRow>, CliError> {
    single_solve(inv, Route::Nehari)
}

pub fn cmd_mpa(inv: &Invocation) -> Result<Vec<SolutionRow>, CliError> {
    single_solve(inv, Route::MountainPass)
}

pub fn cmd_pohozaev(inv: &Invocation) -> Result<Vec<SolutionRow>, CliError> {
    let cfg = &inv.config;
    let path = cfg
        .field
        .as_ref()
        .ok_or_else(|| CliError::Config("config: `pohozaev` needs a `field` path".into()))?;
    let p = cfg.power().ok_or_else(|| {
        CliError::Config("nonlinearity: the Pohozaev audit needs a power nonlinearity".into())
    })?;
    let file = File::open(path)
        .map_err(|e| CliError::Config(format!("config: cannot open field {}: {e}", path.display())))?;
    let ff = read_field::<f64, _>(BufReader::new(file)).map_err(|e| core_err("discretization", e))?;
    if ff.k != cfg.k {
        return Err(CliError::Config(format!(
            "config: field was computed with k = {}, config has k = {}",
            ff.k, cfg.k
        )));
    }
    let u = ff.field;
    let nl = cfg.nonlinearity_for(cfg.k, None)?;
    let a = assemble_grushin(u.grid(), cfg.k).map_err(|e| core_err("discretization", e))?;
    let samples = pohozaev_samples(&u).map_err(|e| core_err("analysis", e))?;
    let rep = pohozaev_evaluate(&u, cfg.k, p, &samples).map_err(|e| core_err("analysis", e))?;
    let mut row = audit_row(&u, &a, &nl, cfg.k, cfg)?;
    row.pohozaev_lhs = Some(rep.lhs);
    row.pohozaev_rhs = Some(rep.rhs);
    row.rel_residual = Some(rep.rel_residual);
    let rows = vec![row];
    write_report(&inv.out_dir, inv.format, &rows)?;
    Ok(rows)
}

pub fn cmd_eigen(inv: &Invocation) -> Result<Vec<EigenRow>, CliError> {
    let cfg = &inv.config;
    let (grid, a) = setup(&cfg.domain, cfg.k, cfg.grid.nx, cfg.grid.ny)?;
    let pair = smallest_eigenvalue(&grid, &a, &cfg.linear).map_err(|e| core_err("solvers", e))?;
    save_field(&inv.out_dir, "eigenvector.field", &pair.eigvec, cfg.k)?;
    let rows = vec![EigenRow {
        k: cfg.k,
        grid: grid_label(grid.nx(), grid.ny()),
        lambda_min: pair.lambda_min,
        iterations: pair.iterations,
        residual: pair.residual,
    }];
    write_report(&inv.out_dir, inv.format, &rows)?;
    Ok(rows)
}

pub fn cmd_embed(inv: &Invocation) -> Result<Vec<EmbedRow>, CliError> {
    let cfg = &inv.config;
    let q = cfg
        .q
        .ok_or_else(|| CliError::Config("config: `embed` needs `q`".into()))?;
    let (grid, a) = setup(&cfg.domain, cfg.k, cfg.grid.nx, cfg.grid.ny)?;
    let rep = embedding_constant(
        &grid,
        &a,
        cfg.k,
        q,
        cfg.seed,
        DEFAULT_EMBEDDING_ITERS,
        None,
        &cfg.linear,
    )
    .map_err(|e| core_err("analysis", e))?;
    save_field(&inv.out_dir, "maximizer.field", &rep.maximizer, cfg.k)?;
    let rows = vec![EmbedRow {
        k: cfg.k,
        q,
        grid: grid_label(grid.nx(), grid.ny()),
        c_q_estimate: rep.c_q_estimate,
        iterations: rep.iterations,
    }];
    write_report(&inv.out_dir, inv.format, &rows)?;
    Ok(rows)
}

pub fn cmd_check(inv: &Invocation) -> Result<Vec<HypothesisRow>, CliError> {
    let cfg = &inv.config;
    let nl = cfg.nonlinearity_for(cfg.k, None)?;
    let samples = cfg.samples.unwrap_or(DEFAULT_HYPOTHESIS_SAMPLES);
    let rep =
        check_hypotheses(&nl, &cfg.domain, samples, cfg.seed).map_err(|e| core_err("nonlinearity", e))?;
    let rows: Vec<HypothesisRow> = rep
        .outcomes
        .iter()
        .map(|o| HypothesisRow {
            name: o.name.to_string(),
            passed: o.passed,
            witness_x: o.witness.map(|w| w.x),
            witness_y: o.witness.map(|w| w.y),
            witness_xi: o.witness.map(|w| w.xi),
            witness_value: o.witness.map(|w| w.value),
            note: o.note.clone(),
        })
        .collect();
    write_report(&inv.out_dir, inv.format, &rows)?;
    Ok(rows)
}

/// Worker count for sweeps: `GRUSHIN_THREADS` if set, else rayon's default.
fn sweep_threads() -> Result<Option<usize>, CliError> {
    match std::env::var("GRUSHIN_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "config: GRUSHIN_THREADS must be a positive integer, got `{s}`"
            ))),
        },
    }
}

pub fn cmd_sweep(inv: &Invocation) -> Result<Vec<SolutionRow>, CliError> {
    let cfg = &inv.config;
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("config: `sweep` needs a `sweep` block".into()))?;
    let ks = spec.k.clone().unwrap_or_else(|| vec![cfg.k]);
    let ps: Vec<Option<f64>> = match &spec.p {
        Some(ps) => ps.iter().map(|&p| Some(p)).collect(),
        None => vec![cfg.power()],
    };
    let grids: Vec<(usize, usize)> = match &spec.grids {
        Some(ns) => ns.iter().map(|&n| (n, n)).collect(),
        None => vec![(cfg.grid.nx, cfg.grid.ny)],
    };
    if ks.is_empty() || ps.is_empty() || grids.is_empty() {
        return Err(CliError::Config("config: sweep lists must be non-empty".into()));
    }
    let mut points = Vec::new();
    for &k in &ks {
        for &p in &ps {
            for &g in &grids {
                points.push((k, p, g));
            }
        }
    }
    points.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.unwrap_or(0.0).total_cmp(&b.1.unwrap_or(0.0)))
            .then(a.2.cmp(&b.2))
    });
    points.dedup();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("config: cannot start sweep workers: {e}")))?;
    let results: Vec<Result<SolutionRow, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(k, p, (nx, ny))| solve_point(cfg, k, p, nx, ny, Route::Nehari).map(|(row, _)| row))
            .collect()
    });

    let mut failure = None;
    let rows: Vec<SolutionRow> = points
        .iter()
        .zip(results)
        .map(|(&(k, p, (nx, ny)), r)| match r {
            Ok(row) => row,
            Err(e) => {
                warn!("sweep point k={k} p={p:?} {nx}x{ny} failed: {e}");
                let row = SolutionRow {
                    k,
                    p,
                    grid: grid_label(nx, ny),
                    level: None,
                    grad_norm: None,
                    pohozaev_lhs: None,
                    pohozaev_rhs: None,
                    rel_residual: None,
                    verdict: "failed".into(),
                };
                failure.get_or_insert(e);
                row
            }
        })
        .collect();

    write_csv(&inv.out_dir.join("sweep.csv"), &rows)?;
    let script = sweep_script(&rows, spec.p.is_some());
    std::fs::write(inv.out_dir.join("sweep.gp"), script)
        .map_err(|e| CliError::Config(format!("output: cannot write sweep.gp: {e}")))?;
    write_report(&inv.out_dir, inv.format, &rows)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}
