use l1min::gradient_projection::{gpsr_direction, gpsr_solve, tnipm_solve_observed};
use l1min::{kkt_residual_of, Problem, SolverConfig, StopKind, StoppingRule};
use proptest::prelude::*;

use crate::{config, instance, vec_in};

fn kkt_rule(tol: f64) -> StoppingRule {
    StoppingRule::new(StopKind::KktResidual, tol).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn direction_is_a_descent_direction((z, grad) in (1usize..30).prop_flat_map(|n| (prop::collection::vec(0.0f64..3.0, n), vec_in(n, 3.0)))) {
        let dir = gpsr_direction(&z, &grad).unwrap();
        let g: f64 = dir.iter().zip(&grad).map(|(p, q)| p * q).sum();
        prop_assert!(g >= -1e-12);
    }

    #[test]
    fn gpsr_objective_never_increases(seed in any::<u64>(), n in 20usize..60) {
        let (a, b, _) = instance(seed, n / 2, n, 3, 0.01);
        let p = Problem::new(&a, &b).unwrap();
        let lambda = 0.05 * p.lambda_max();
        let config = SolverConfig::default().with_lambda(lambda).with_tol(1e-8).with_stopping(kkt_rule(1e-8));
        let r = gpsr_solve(&p, &config).unwrap();
        for w in r.trace.windows(2) {
            prop_assert!(w[1].objective <= w[0].objective * (1.0 + 1e-12), "{} -> {}", w[0].objective, w[1].objective);
        }
        if r.converged {
            prop_assert!(kkt_residual_of(&p, &r.x_star, lambda).unwrap() <= 10.0 * 1e-8 * lambda);
        }
    }

    #[test]
    fn tnipm_iterates_stay_strictly_inside_bounds(seed in any::<u64>(), n in 20usize..50) {
        let (a, b, _) = instance(seed, n / 2, n, 3, 0.01);
        let p = Problem::new(&a, &b).unwrap();
        let lambda = 0.05 * p.lambda_max();
        let tol = 1e-6;
        let config = SolverConfig::default().with_lambda(lambda).with_tol(tol);
        let mut inside = true;
        let r = tnipm_solve_observed(&p, &config, |x, u| inside &= x.iter().zip(u).all(|(xi, ui)| xi.abs() < *ui)).unwrap();
        prop_assert!(inside);
        prop_assert!(r.converged);
        let kkt = kkt_residual_of(&p, &r.x_star, lambda).unwrap();
        prop_assert!(kkt <= 10.0 * tol * lambda, "kkt {kkt} vs {}", 10.0 * tol * lambda);
    }
}
