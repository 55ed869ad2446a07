use l1min::homotopy::{homotopy_path, homotopy_solve};
use l1min::numerics::relative_error;
use l1min::{Dictionary, Problem, SolverConfig};
use proptest::prelude::*;

use crate::{config, instance};

fn gram_of_support(a: &l1min::DenseMatrix, support: &[usize]) -> l1min::DenseMatrix {
    let cols: Vec<Vec<f64>> = support.iter().map(|&j| a.column(j)).collect();
    let rows: Vec<Vec<f64>> =
        cols.iter().map(|ci| cols.iter().map(|cj| l1min::numerics::dot(ci, cj)).collect()).collect();
    l1min::DenseMatrix::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn path_states_satisfy_optimality(seed in any::<u64>(), n in 20usize..60, k in 1usize..5, frac in 0.01f64..0.5) {
        let (a, b, _) = instance(seed, n / 2, n, k, 0.01);
        let p = Problem::new(&a, &b).unwrap();
        let config = SolverConfig::default().with_lambda(frac * p.lambda_max());
        let mut lambdas = Vec::new();
        let mut failure = None;
        homotopy_path(&p, &config, |s| {
            lambdas.push(s.lambda);
            let tol = 1e-6 * s.lambda.max(1.0);
            for j in 0..a.ncols() {
                let on = s.support.contains(&j);
                let ok = if on {
                    (s.c[j].abs() - s.lambda).abs() <= tol && (s.x[j] == 0.0 || s.x[j].signum() == s.c[j].signum())
                } else {
                    s.c[j].abs() <= s.lambda + tol
                };
                if !ok && failure.is_none() {
                    failure = Some(format!("column {j} (active {on}): c = {}, x = {}, λ = {}", s.c[j], s.x[j], s.lambda));
                }
            }
            if !s.support.is_empty() {
                let diff = s.chol.reconstruct().max_abs_diff(&gram_of_support(&a, &s.support));
                if diff > 1e-8 && failure.is_none() {
                    failure = Some(format!("factor drift {diff}"));
                }
            }
        }).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
        for w in lambdas.windows(2) {
            prop_assert!(w[1] < w[0], "λ {} then {}", w[0], w[1]);
        }
    }
}

#[test]
fn recovers_sparse_signals_from_enough_measurements() {
    let n = 120;
    let mut hits = 0;
    for trial in 0..100u64 {
        let k = 1 + (trial % 10) as usize;
        let d = ((4.0 * k as f64 * (n as f64).ln()).ceil() as usize).min(n);
        let (a, b, x0) = instance(1000 + trial, d, n, k, 0.0);
        let p = Problem::new(&a, &b).unwrap();
        let r = homotopy_solve(&p, &SolverConfig::default()).unwrap();
        if relative_error(&r.x_star, &x0) <= 1e-6 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "recovered {hits}/100");
}
