use l1min::bench::{format_g17, run_noise_sweep, run_phase_grid, GridSpec, SweepMode};
use l1min::{Algorithm, SolverConfig};
use proptest::prelude::*;

use crate::config;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn g17_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn phase_grid_ignores_job_count(seed in any::<u64>()) {
        let grid = GridSpec::uniform(2, 2).unwrap();
        let config = SolverConfig::default();
        let one = run_phase_grid(Algorithm::Homotopy, 12, &grid, 2, 1e-3, seed, &config, 1).unwrap();
        let three = run_phase_grid(Algorithm::Homotopy, 12, &grid, 2, 1e-3, seed, &config, 3).unwrap();
        prop_assert_eq!(one.successes, three.successes);
    }

    #[test]
    fn sweep_rows_do_not_depend_on_other_solvers(seed in any::<u64>()) {
        let mode = SweepMode::VaryD { n: 20, k: 2, d_values: vec![10, 14] };
        let config = SolverConfig::default();
        let alone = run_noise_sweep(&[Algorithm::Homotopy], &mode, 0.01, 2, seed, &config, 1).unwrap();
        let paired = run_noise_sweep(&[Algorithm::Ist, Algorithm::Homotopy], &mode, 0.01, 2, seed, &config, 2).unwrap();
        let a = alone.rows_for(Algorithm::Homotopy);
        let b = paired.rows_for(Algorithm::Homotopy);
        prop_assert_eq!(a.len(), b.len());
        for (r, s) in a.iter().zip(&b) {
            prop_assert_eq!(r.mean_rel_error.to_bits(), s.mean_rel_error.to_bits());
            prop_assert_eq!(r.mean_iterations.to_bits(), s.mean_iterations.to_bits());
        }
    }
}
