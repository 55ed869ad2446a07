use super::matrix::{axpy, dot, norm2};
use crate::error::{check_len, L1Error, Result};

/// Outcome of a (preconditioned) conjugate gradient solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PcgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖op(x) − rhs‖₂ / ‖rhs‖₂` at the returned iterate.
    pub relative_residual: f64,
}

/// Solves `op(x) = rhs` for a symmetric positive definite operator.
///
/// `precond` is an optional diagonal preconditioner `M ≈ op` given by its
/// (strictly positive) diagonal. Stops when `‖r‖ ≤ tol·‖rhs‖`. If the
/// iteration cap is hit or a direction of non-positive curvature shows up,
/// the iterate with the smallest residual is returned with
/// `converged = false`.
pub fn pcg_solve<F>(op: F, rhs: &[f64], precond: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<PcgSolution>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = rhs.len();
    if let Some(m) = precond {
        check_len("preconditioner", n, m.len())?;
        if m.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(L1Error::InvalidArgument("diagonal preconditioner must be positive".into()));
        }
    }
    if !(tol > 0.0) {
        return Err(L1Error::InvalidArgument(format!("pcg tolerance must be positive, got {tol}")));
    }
    let apply_precond = |r: &[f64]| -> Vec<f64> {
        match precond {
            Some(m) => r.iter().zip(m).map(|(ri, mi)| ri / mi).collect(),
            None => r.to_vec(),
        }
    };

    let bnorm = norm2(rhs);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(PcgSolution { x, iterations: 0, converged: true, relative_residual: 0.0 });
    }
    if !bnorm.is_finite() {
        return Err(L1Error::NumericalBreakdown("non-finite right-hand side".into()));
    }

    let mut r = rhs.to_vec();
    let mut z = apply_precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut best_x = x.clone();
    let mut best_res = 1.0;

    for it in 1..=max_iter {
        let q = op(&p);
        check_len("operator output", n, q.len())?;
        let curvature = dot(&p, &q);
        if !curvature.is_finite() {
            return Err(L1Error::NumericalBreakdown(format!("non-finite curvature at pcg iteration {it}")));
        }
        if curvature <= 0.0 {
            return Ok(PcgSolution { x: best_x, iterations: it - 1, converged: false, relative_residual: best_res });
        }
        let alpha = rz / curvature;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        let rel = norm2(&r) / bnorm;
        if !rel.is_finite() {
            return Err(L1Error::NumericalBreakdown(format!("non-finite residual at pcg iteration {it}")));
        }
        if rel < best_res {
            best_res = rel;
            best_x.copy_from_slice(&x);
        }
        if rel <= tol {
            return Ok(PcgSolution { x, iterations: it, converged: true, relative_residual: rel });
        }
        z = apply_precond(&r);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Ok(PcgSolution { x: best_x, iterations: max_iter, converged: false, relative_residual: best_res })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_takes_one_iteration() {
        let b = [1.0, -2.0, 3.0];
        let sol = pcg_solve(|v| v.to_vec(), &b, None, 1e-10, 10).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations, 1);
        for (a, e) in sol.x.iter().zip(&b) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_solve() {
        let op = |v: &[f64]| vec![v[0], 2.0 * v[1]];
        let sol = pcg_solve(op, &[1.0, 2.0], None, 1e-10, 10).unwrap();
        assert!(sol.converged);
        assert!((sol.x[0] - 1.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
        // exact diagonal preconditioner converges in one step
        let sol = pcg_solve(op, &[1.0, 2.0], Some(&[1.0, 2.0]), 1e-10, 10).unwrap();
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn zero_curvature_returns_flag() {
        let op = |v: &[f64]| vec![v[0], 0.0];
        let sol = pcg_solve(op, &[0.0, 1.0], None, 1e-10, 10).unwrap();
        assert!(!sol.converged);
    }

    #[test]
    fn non_finite_is_breakdown() {
        let op = |v: &[f64]| vec![v[0] * f64::INFINITY];
        assert!(matches!(pcg_solve(op, &[1.0], None, 1e-10, 5), Err(L1Error::NumericalBreakdown(_))));
    }

    #[test]
    fn rejects_non_positive_preconditioner() {
        assert!(pcg_solve(|v| v.to_vec(), &[1.0], Some(&[0.0]), 1e-10, 5).is_err());
    }
}
