use l1min::numerics::{
    chol_rank1, dot, norm2, norm_inf, pcg_solve, project_box_linf, soft_threshold, CholFactor, RankOneSign,
};
use l1min::{DenseMatrix, Dictionary, ExtendedDictionary};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use crate::{config, matrix, vec_in};

fn spd(g: &DenseMatrix, shift: f64) -> DenseMatrix {
    let mut m = g.transpose().matmul(g).unwrap();
    for i in 0..m.rows() {
        m.set(i, i, m.get(i, i) + shift);
    }
    m
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn soft_threshold_is_nonexpansive((u, v) in (1usize..20).prop_flat_map(|n| (vec_in(n, 5.0), vec_in(n, 5.0))), a in 0.0f64..3.0) {
        let su = soft_threshold(&u, a).unwrap();
        let sv = soft_threshold(&v, a).unwrap();
        let lhs = norm2(&su.iter().zip(&sv).map(|(p, q)| p - q).collect::<Vec<_>>());
        let rhs = norm2(&u.iter().zip(&v).map(|(p, q)| p - q).collect::<Vec<_>>());
        prop_assert!(lhs <= rhs * (1.0 + 1e-15) + 1e-300);
    }

    #[test]
    fn soft_threshold_keeps_sign(u in vec_in(30, 5.0), a in 0.0f64..3.0) {
        let s = soft_threshold(&u, a).unwrap();
        prop_assert!(u.iter().zip(&s).all(|(p, q)| p * q >= 0.0));
    }

    #[test]
    fn rank_one_update_then_downdate_round_trips(
        (g, v) in (1usize..10).prop_flat_map(|n| (matrix(n, n), vec_in(n, 1.0))),
    ) {
        let m = spd(&g, 1.0);
        let f = CholFactor::factor(&m).unwrap();
        let up = chol_rank1(&f, &v, RankOneSign::Update).unwrap();
        let back = chol_rank1(&up, &v, RankOneSign::Downdate).unwrap();
        prop_assert!(back.upper().max_abs_diff(&f.upper()) <= 1e-9);
    }

    #[test]
    fn pcg_matches_dense_solve((g, rhs) in (1usize..16).prop_flat_map(|n| (matrix(n, n), vec_in(n, 1.0)))) {
        let n = rhs.len();
        prop_assume!(norm2(&rhs) > 1e-3);
        let m = spd(&g, n as f64);
        let sol = pcg_solve(|v| m.matvec(v), &rhs, None, 1e-12, n).unwrap();
        // independent oracle
        let dense = DMatrix::from_row_slice(n, n, m.as_slice()).cholesky().unwrap().solve(&DVector::from_column_slice(&rhs));
        let err: f64 = sol.x.iter().zip(dense.iter()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-8 * dense.norm(), "relative error {}", err / dense.norm());
    }

    #[test]
    fn box_projection_is_idempotent_and_inside(z in vec_in(25, 4.0)) {
        let p = project_box_linf(&z);
        prop_assert!(norm_inf(&p) <= 1.0);
        prop_assert_eq!(project_box_linf(&p), p);
    }

    #[test]
    fn adjoints_are_consistent(
        (a, x, y) in (1usize..12, 1usize..12).prop_flat_map(|(d, n)| (matrix(d, n), vec_in(n + d, 2.0), vec_in(d, 2.0))),
        scale in 0.1f64..10.0,
    ) {
        let n = a.cols();
        let lhs = dot(&a.apply(&x[..n]), &y);
        let rhs = dot(&x[..n], &a.adjoint(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        let ext = ExtendedDictionary::with_scale(&a, scale).unwrap();
        let lhs = dot(&ext.apply(&x), &y);
        let rhs = dot(&x, &ext.adjoint(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }
}
