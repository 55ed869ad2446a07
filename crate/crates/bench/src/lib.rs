//! Shared fixtures for the criterion benchmarks in `benches/`.

use l1min::bench::mix_seed;
use l1min::synth::{add_noise, gen_gaussian_dict, gen_sparse_signal};
use l1min::DenseMatrix;

/// Seeded `d × n` instance with a `k`-sparse signal and noise `sigma`.
pub fn fixture(n: usize, d: usize, k: usize, sigma: f64, seed: u64) -> (DenseMatrix, Vec<f64>) {
    let a = gen_gaussian_dict(d, n, mix_seed(seed, &[0])).expect("valid shape");
    let x0 = gen_sparse_signal(n, k, mix_seed(seed, &[1])).expect("k <= n");
    let b = add_noise(&a.matvec(&x0), sigma, mix_seed(seed, &[2])).expect("sigma >= 0");
    (a, b)
}
