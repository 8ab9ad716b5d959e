#![allow(dead_code)]

use std::sync::Arc;

use grushin_core::{assemble_grushin, build_grid, Domain, Grid, SparseOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn square() -> Domain<f64> {
    Domain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
}

pub fn setup(domain: &Domain<f64>, n: usize, k: f64) -> (Arc<Grid<f64>>, SparseOperator<f64>) {
    let g = build_grid(domain, n, n).unwrap();
    let a = assemble_grushin(&g, k).unwrap();
    (g, a)
}

pub fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
