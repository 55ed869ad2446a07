use l1min::alm::{dual_y_solve, gram_factor};
use l1min::numerics::{norm1, norm2};
use l1min::{solve, Algorithm, Problem, SolverConfig};
use proptest::prelude::*;

use crate::{config, instance, rel, vec_in};

proptest! {
    #![proptest_config(config())]

    #[test]
    fn multiplier_solve_satisfies_its_system(seed in any::<u64>(), z in vec_in(40, 1.0), x in vec_in(40, 1.0), beta in 0.1f64..10.0) {
        let (a, b, _) = instance(seed, 20, 40, 3, 0.0);
        let chol = gram_factor(&a).unwrap();
        let y = dual_y_solve(&chol, &a, &z, &x, &b, beta).unwrap();
        // βAAᵀy = βAz − (Ax − b)
        let lhs: Vec<f64> = a.matvec(&a.matvec_t(&y)).iter().map(|v| beta * v).collect();
        let az = a.matvec(&z);
        let ax = a.matvec(&x);
        let rhs: Vec<f64> = (0..b.len()).map(|i| beta * az[i] - (ax[i] - b[i])).collect();
        let res = norm2(&lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect::<Vec<_>>());
        prop_assert!(res <= 1e-10 * (1.0 + norm2(&rhs)), "residual {res}");
    }

    #[test]
    fn primal_and_dual_methods_agree(seed in any::<u64>(), n in 20usize..50, k in 1usize..4) {
        let (a, b, _) = instance(seed, n / 2, n, k, 0.0);
        let p = Problem::new(&a, &b).unwrap();
        let config = SolverConfig::default().with_tol(1e-8).with_max_iter(20_000);
        let palm = solve(Algorithm::Palm, &p, &config).unwrap();
        let dalm = solve(Algorithm::Dalm, &p, &config).unwrap();
        let (fp, fd) = (norm1(&palm.x_star), norm1(&dalm.x_star));
        prop_assert!(rel(fp, fd) <= 1e-4, "‖x‖₁ {fp} vs {fd}");
        for x in [&palm.x_star, &dalm.x_star] {
            let r = norm2(&p.residual(x));
            prop_assert!(r <= 1e-4 * norm2(&b), "residual {r}");
        }
    }
}
