//! Dense kernels shared by every solver: shrinkage, box projection,
//! Cholesky with rank-1 modifications, preconditioned CG and a power-iteration
//! estimate of `‖A‖²`.

mod cholesky;
mod matrix;
mod pcg;

pub use cholesky::{chol_rank1, CholFactor, RankOneSign};
pub use matrix::{
    axpy, dist2, dot, norm1, norm2, norm_inf, relative_error, sub, support_size, DenseMatrix, Dictionary,
};
pub use pcg::{pcg_solve, PcgSolution};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{L1Error, Result};

/// Seed of the power-iteration start vector.
const POWER_ITERATION_SEED: u64 = 0x0005_eed0_fa11;
const POWER_ITERATION_MAX_ITER: usize = 1000;

/// Multiplier applied to the power-iteration estimate before it is used as a
/// step-size bound; the estimate approaches `‖A‖²` from below.
pub const LIPSCHITZ_SAFETY: f64 = 1.01;

/// Scalar shrinkage `sgn(u)·max(|u| − a, 0)`.
#[inline]
pub fn shrink(u: f64, a: f64) -> f64 {
    if u > a {
        u - a
    } else if u < -a {
        u + a
    } else {
        0.0
    }
}

/// Componentwise soft thresholding.
pub fn soft_threshold(u: &[f64], a: f64) -> Result<Vec<f64>> {
    if !(a >= 0.0) {
        return Err(L1Error::InvalidArgument(format!("threshold must be non-negative, got {a}")));
    }
    Ok(u.iter().map(|&v| shrink(v, a)).collect())
}

/// Projection onto the unit ℓ∞ ball: clamps every entry to `[−1, 1]`.
pub fn project_box_linf(z: &[f64]) -> Vec<f64> {
    z.iter().map(|v| v.clamp(-1.0, 1.0)).collect()
}

/// Power-iteration estimate of the largest eigenvalue of `AᵀA`.
pub fn spectral_norm_sq<D: Dictionary + ?Sized>(a: &D, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(L1Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return Err(L1Error::InvalidArgument("empty matrix".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let vn = norm2(&v);
    v.iter_mut().for_each(|x| *x /= vn);

    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX_ITER {
        let w = a.adjoint(&a.apply(&v));
        let rayleigh = dot(&v, &w);
        let wn = norm2(&w);
        if !wn.is_finite() {
            return Err(L1Error::NumericalBreakdown("non-finite power iterate".into()));
        }
        if wn == 0.0 {
            return Err(L1Error::InvalidArgument("zero matrix has no positive spectral norm".into()));
        }
        v = w.into_iter().map(|x| x / wn).collect();
        // The Rayleigh quotient converges much faster than the change per
        // step suggests when the spectral gap is small, hence the 1e-2 margin.
        let done = (rayleigh - estimate).abs() <= 1e-2 * tol * rayleigh;
        estimate = rayleigh;
        if done {
            break;
        }
    }
    Ok(estimate)
}

/// `‖A‖²` estimate inflated by [`LIPSCHITZ_SAFETY`], used as the gradient
/// Lipschitz constant of `½‖Ax − b‖²`.
pub fn lipschitz_constant<D: Dictionary + ?Sized>(a: &D) -> Result<f64> {
    Ok(LIPSCHITZ_SAFETY * spectral_norm_sq(a, 1e-6)?)
}
