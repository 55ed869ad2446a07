use l1min::numerics::{dot, norm1};
use l1min::shrinkage::{backtrack_l, fista_run, ist_solve, ContinuationSchedule, FistaStep};
use l1min::{kkt_residual_of, objective_of, Problem, SolverConfig, StopKind, StoppingRule};
use proptest::prelude::*;

use crate::{config, instance, vec_in};

fn lambda_for(p: &Problem<'_, l1min::DenseMatrix>, frac: f64) -> f64 {
    frac * p.lambda_max()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn ist_decreases_the_objective_within_a_stage(seed in any::<u64>(), n in 20usize..60, frac in 0.02f64..0.5) {
        let (a, b, _) = instance(seed, n / 2, n, 3, 0.01);
        let p = Problem::new(&a, &b).unwrap();
        let lambda = lambda_for(&p, frac);
        let schedule = ContinuationSchedule::new(lambda, 0.5, lambda).unwrap();
        let r = ist_solve(&p, &schedule, &SolverConfig::default().with_lambda(lambda).with_tol(1e-8)).unwrap();
        prop_assert!(r.trace.len() >= 2);
        for w in r.trace.windows(2) {
            prop_assert!(w[1].objective <= w[0].objective, "{} -> {}", w[0].objective, w[1].objective);
        }
        prop_assert!(r.trace.last().unwrap().objective < r.trace[0].objective);
    }

    #[test]
    fn backtracking_accepts_only_majorized_steps(seed in any::<u64>(), y in vec_in(30, 1.0), l_prev in 0.01f64..2.0, frac in 0.01f64..0.5) {
        let (a, b, _) = instance(seed, 15, 30, 3, 0.0);
        let p = Problem::new(&a, &b).unwrap();
        let lambda = lambda_for(&p, frac);
        let step = backtrack_l(&p, &y, l_prev, 1.5, lambda).unwrap();
        prop_assert!(step.lipschitz >= l_prev);
        // recompute the majorization from scratch
        let f = |x: &[f64]| objective_of(&p, x, 0.0).unwrap();
        let ry: Vec<f64> = a.matvec(&y).iter().zip(&b).map(|(u, v)| u - v).collect();
        let grad = a.matvec_t(&ry);
        let diff: Vec<f64> = step.x_next.iter().zip(&y).map(|(u, v)| u - v).collect();
        let q = f(&y) + dot(&diff, &grad) + 0.5 * step.lipschitz * dot(&diff, &diff);
        prop_assert!(f(&step.x_next) <= q + 1e-10 * q.abs().max(1.0));
        prop_assert!(norm1(&step.x_next).is_finite());
    }

    #[test]
    fn fista_sequences_are_monotone_and_converge(seed in any::<u64>(), n in 20usize..60, frac in 0.02f64..0.5) {
        let (a, b, _) = instance(seed, n / 2, n, 3, 0.01);
        let p = Problem::new(&a, &b).unwrap();
        let lambda = lambda_for(&p, frac);
        let mut config = SolverConfig::default()
            .with_lambda(lambda)
            .with_tol(1e-9)
            .with_max_iter(50_000)
            .with_stopping(StoppingRule::new(StopKind::KktResidual, 1e-9).unwrap());
        config.fista.continuation = false;
        let mut steps: Vec<FistaStep> = Vec::new();
        let r = fista_run(&p, &config, None, |s| steps.push(*s)).unwrap();
        for w in steps.windows(2) {
            prop_assert!(w[1].lipschitz >= w[0].lipschitz);
            prop_assert!(w[1].t * w[1].t - w[1].t <= w[0].t * w[0].t * (1.0 + 1e-12));
        }
        prop_assert!(r.converged);
        let kkt = kkt_residual_of(&p, &r.x_star, lambda).unwrap();
        prop_assert!(kkt <= 1e-8 * lambda, "kkt {kkt}");
    }

    #[test]
    fn smooth_gradient_matches_finite_differences(seed in any::<u64>(), x in vec_in(20, 1.0), j in 0usize..20) {
        let (a, b, _) = instance(seed, 10, 20, 2, 0.0);
        let p = Problem::new(&a, &b).unwrap();
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
        let grad = a.matvec_t(&r);
        let h = 1e-6;
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let fd = (objective_of(&p, &xp, 0.0).unwrap() - objective_of(&p, &xm, 0.0).unwrap()) / (2.0 * h);
        prop_assert!((fd - grad[j]).abs() <= 1e-6 * (1.0 + grad[j].abs()));
    }
}
