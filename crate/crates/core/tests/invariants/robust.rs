use l1min::bench::mix_seed;
use l1min::numerics::{dot, norm1};
use l1min::robust::{align_solve, cab_solve};
use l1min::synth::{corrupt_entries, gen_gaussian_dict, gen_sparse_signal};
use l1min::{Algorithm, AlignMethod, AlignmentProblem, Dictionary, ExtendedDictionary, SolverConfig};
use proptest::prelude::*;

use crate::{config, instance, vec_in};

fn alignment(seed: u64, d: usize, m: usize, fraction: f64) -> AlignmentProblem {
    let basis = gen_gaussian_dict(d, m, mix_seed(seed, &[0])).unwrap();
    let w0 = gen_sparse_signal(m, m, mix_seed(seed, &[1])).unwrap();
    let clean = basis.matvec(&w0);
    let (b, _) = corrupt_entries(&clean, fraction, -1.0, 1.0, mix_seed(seed, &[2])).unwrap();
    AlignmentProblem::new(basis, b).unwrap()
}

const METHODS: [AlignMethod; 3] = [AlignMethod::Gp, AlignMethod::Homotopy, AlignMethod::Ist];

fn max_gap(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn extended_adjoint_is_consistent(seed in any::<u64>(), x in vec_in(45, 2.0), y in vec_in(15, 2.0), scale in 0.1f64..10.0) {
        let (a, _, _) = instance(seed, 15, 30, 1, 0.0);
        let ext = ExtendedDictionary::with_scale(&a, scale).unwrap();
        let lhs = dot(&ext.apply(&x), &y);
        let rhs = dot(&x, &ext.adjoint(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn alignment_solvers_are_optimal_and_agree(seed in any::<u64>(), m in 2usize..6, fraction in 0.05f64..0.3) {
        let prob = alignment(seed, 40, m, fraction);
        let tol = 1e-8;
        let config = SolverConfig::default().with_tol(tol).with_max_iter(50_000);
        let sols: Vec<_> = METHODS.iter().map(|&meth| align_solve(&prob, meth, &config).unwrap()).collect();
        for (meth, s) in METHODS.iter().zip(&sols) {
            let (bt, ekkt) = prob.kkt_residual(&s.w, &s.e, s.lambda);
            prop_assert!(bt <= 10.0 * tol * s.lambda.max(1.0), "{}: ‖Bᵀr‖∞ = {bt}", meth.name());
            prop_assert!(ekkt <= 10.0 * tol * s.lambda.max(1.0), "{}: e-KKT = {ekkt}", meth.name());
        }
        for (meth, s) in METHODS.iter().zip(&sols).skip(1) {
            let gap = max_gap(&s.w, &sols[0].w);
            prop_assert!(gap <= 1e-4, "{} differs from gp by {gap}", meth.name());
        }
    }

    #[test]
    fn equality_form_matches_the_vanishing_penalty_path(seed in any::<u64>(), m in 2usize..6, fraction in 0.05f64..0.3) {
        let prob = alignment(seed, 40, m, fraction);
        let config = SolverConfig::default().with_tol(1e-8).with_max_iter(50_000);
        let palm = align_solve(&prob, AlignMethod::Palm, &config).unwrap();
        let path = align_solve(&prob, AlignMethod::Homotopy, &config.clone().with_lambda(1e-12)).unwrap();
        let gap = max_gap(&palm.w, &path.w);
        prop_assert!(gap <= 1e-4, "palm differs from the path end by {gap}");
    }

    #[test]
    fn clean_observations_need_no_error_term(seed in any::<u64>(), k in 1usize..4) {
        let (a, b, _) = instance(seed, 40, 60, k, 0.0);
        let sol = cab_solve(&a, &b, Algorithm::Homotopy, &SolverConfig::default(), 1.0).unwrap();
        prop_assert!(norm1(&sol.e) <= 1e-6 * norm1(&b), "‖e‖₁ = {}", norm1(&sol.e));
    }
}
