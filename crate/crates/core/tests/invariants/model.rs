use l1min::numerics::soft_threshold;
use l1min::{kkt_residual_of, objective_of, DenseMatrix, Problem};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{config, matrix, vec_in};

/// Orthonormal `n × n` matrix from the QR factors of a random one.
fn orthonormal(g: &DenseMatrix) -> Option<DenseMatrix> {
    let n = g.rows();
    let qr = DMatrix::from_row_slice(n, n, g.as_slice()).qr();
    if qr.r().diagonal().iter().any(|v| v.abs() < 1e-6) {
        return None;
    }
    let q = qr.q();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q[(i, j)]).collect()).collect();
    Some(DenseMatrix::from_rows(&rows).unwrap())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn objective_is_non_negative((a, x, b) in (1usize..10, 1usize..10).prop_flat_map(|(d, n)| (matrix(d, n), vec_in(n, 5.0), vec_in(d, 5.0))), lambda in 0.0f64..3.0) {
        let p = Problem::new(&a, &b).unwrap();
        prop_assert!(objective_of(&p, &x, lambda).unwrap() >= 0.0);
    }

    #[test]
    fn orthonormal_minimizer_is_soft_threshold((g, b) in (1usize..10).prop_flat_map(|n| (matrix(n, n), vec_in(n, 2.0))), lambda in 0.01f64..1.0) {
        let Some(q) = orthonormal(&g) else { return Ok(()) };
        let p = Problem::new(&q, &b).unwrap();
        let x = soft_threshold(&q.matvec_t(&b), lambda).unwrap();
        prop_assert!(kkt_residual_of(&p, &x, lambda).unwrap() <= 1e-10);
    }

    #[test]
    fn zero_kkt_point_beats_perturbations((g, b) in (2usize..7).prop_flat_map(|n| (matrix(n, n), vec_in(n, 2.0))), lambda in 0.05f64..1.0, seed in any::<u64>()) {
        let Some(q) = orthonormal(&g) else { return Ok(()) };
        let p = Problem::new(&q, &b).unwrap();
        let x = soft_threshold(&q.matvec_t(&b), lambda).unwrap();
        let f = objective_of(&p, &x, lambda).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let delta: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = 1e-3 * rng.random::<f64>() / l1min::numerics::norm2(&delta).max(1e-300);
            let y: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi + s * di).collect();
            prop_assert!(objective_of(&p, &y, lambda).unwrap() >= f - 1e-12 * (1.0 + f));
        }
    }
}
