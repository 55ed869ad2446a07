use l1min::numerics::{dot, norm2};
use l1min::pdipa::{lp_solve_observed, PdipaState};
use l1min::{DenseMatrix, SolverConfig};
use proptest::prelude::*;

use crate::{config, instance};

/// Standard form of `min ‖x‖₁ s.t. Ax = b`: variables `[u; v] ≥ 0`, `x = u − v`.
fn split(a: &DenseMatrix) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..a.cols())
        .map(|j| a.column(j))
        .chain((0..a.cols()).map(|j| a.column(j).iter().map(|v| -v).collect()))
        .collect();
    DenseMatrix::from_columns(a.rows(), &cols).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn iterates_stay_interior_and_gap_shrinks(seed in any::<u64>(), n in 10usize..30, k in 1usize..4) {
        let d = n / 2;
        let (a, b, _) = instance(seed, d, n, k, 0.0);
        let lp = split(&a);
        let c = vec![1.0; 2 * n];
        let mut states: Vec<PdipaState> = Vec::new();
        let sol = lp_solve_observed(&lp, &b, &c, &SolverConfig::default().with_tol(1e-9), |s| states.push(s.clone())).unwrap();
        for s in &states {
            prop_assert!(s.x.iter().all(|v| *v > 0.0) && s.z.iter().all(|v| *v > 0.0));
        }
        for w in states.windows(2) {
            prop_assert!(w[1].duality_measure() < w[0].duality_measure(), "{} then {}", w[0].duality_measure(), w[1].duality_measure());
        }
        prop_assert!(sol.converged);
        let s = &sol.state;
        let infeas = norm2(&lp.matvec(&s.x).iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>());
        prop_assert!(infeas <= 1e-8 * (1.0 + norm2(&b)), "primal infeasibility {infeas}");
        let primal = dot(&c, &s.x);
        let gap = primal - dot(&b, &s.y);
        prop_assert!(gap.abs() <= 1e-6 * (1.0 + primal.abs()), "gap {gap}");
    }
}
