//! Property suites for the per-module invariants, 100 cases each.

mod alm;
mod bench;
mod gradient_projection;
mod homotopy;
mod model;
mod numerics;
mod pdipa;
mod robust;
mod shrinkage;
mod synth;

use l1min::bench::mix_seed;
use l1min::synth::{add_noise, gen_gaussian_dict, gen_sparse_signal};
use l1min::DenseMatrix;
use proptest::prelude::*;

pub const CASES: u32 = 100;

pub fn config() -> ProptestConfig {
    ProptestConfig::with_cases(CASES)
}

/// Seeded Gaussian instance `(A, b, x₀)` with a `k`-sparse unit signal.
pub fn instance(seed: u64, d: usize, n: usize, k: usize, sigma: f64) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
    let a = gen_gaussian_dict(d, n, mix_seed(seed, &[0])).unwrap();
    let x0 = gen_sparse_signal(n, k, mix_seed(seed, &[1])).unwrap();
    let b = add_noise(&a.matvec(&x0), sigma, mix_seed(seed, &[2])).unwrap();
    (a, b, x0)
}

pub fn vec_in(len: usize, range: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-range..range, len)
}

/// Random `rows × cols` matrix with entries in `(−1, 1)`.
pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    vec_in(rows * cols, 1.0).prop_map(move |v| DenseMatrix::new(rows, cols, v).unwrap())
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
