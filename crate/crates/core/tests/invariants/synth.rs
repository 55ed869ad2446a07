use l1min::numerics::{norm2, support_size};
use l1min::synth::{generate, GenSpec};
use proptest::prelude::*;

use crate::config;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generation_is_deterministic_and_normalized(seed in any::<u64>(), n in 1usize..60, d in 1usize..40, kf in 0.0f64..1.0, sigma in 0.0f64..0.1) {
        let k = ((kf * n as f64) as usize).max(1).min(n);
        let spec = GenSpec { n, d, k, seed, noise_sigma: sigma, corruption_fraction: 0.0 };
        let g1 = generate(&spec).unwrap();
        let g2 = generate(&spec).unwrap();
        prop_assert_eq!(&g1.instance.a, &g2.instance.a);
        prop_assert_eq!(&g1.instance.b, &g2.instance.b);
        let a = &g1.instance.a;
        for j in 0..n {
            prop_assert!((norm2(&a.column(j)) - 1.0).abs() <= 1e-12);
        }
        let x0 = g1.instance.ground_truth.as_ref().unwrap();
        prop_assert_eq!(support_size(x0), k);
        prop_assert!((norm2(x0) - 1.0).abs() <= 1e-12);
    }
}
