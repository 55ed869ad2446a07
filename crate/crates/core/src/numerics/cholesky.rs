use serde::{Deserialize, Serialize};

use super::matrix::{dot, DenseMatrix};
use crate::error::{check_len, L1Error, Result};

/// Upper-triangular Cholesky factor `R` with `RᵀR = M`.
///
/// Stored densely (row-major, `dim × dim`); entries below the diagonal are
/// zero. Supports rank-1 updates/downdates and the column append/delete
/// operations needed to track a Gram matrix `A_IᵀA_I` as the active set
/// changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CholFactor {
    dim: usize,
    r: Vec<f64>,
}

/// Sign of a rank-1 modification: `RᵀR + vvᵀ` or `RᵀR − vvᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOneSign {
    Update,
    Downdate,
}

impl RankOneSign {
    fn factor(self) -> f64 {
        match self {
            RankOneSign::Update => 1.0,
            RankOneSign::Downdate => -1.0,
        }
    }
}

impl CholFactor {
    pub fn empty() -> Self {
        Self { dim: 0, r: Vec::new() }
    }

    /// Factors a symmetric positive definite matrix (only the upper triangle is read).
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        let n = m.rows();
        check_len("square matrix columns", n, m.cols())?;
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = m.get(i, j);
                for k in 0..i {
                    s -= r[k * n + i] * r[k * n + j];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(L1Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    r[i * n + i] = s.sqrt();
                } else {
                    r[i * n + j] = s / r[i * n + i];
                }
            }
        }
        Ok(Self { dim: n, r })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entry(i, i)).collect()
    }

    /// The factor `R` as a dense matrix.
    pub fn upper(&self) -> DenseMatrix {
        DenseMatrix::new(self.dim, self.dim, self.r.clone()).expect("factor entries are finite")
    }

    /// `RᵀR`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..=i {
                    s += self.r[k * n + i] * self.r[k * n + j];
                }
                m.set(i, j, s);
                m.set(j, i, s);
            }
        }
        m
    }

    /// Solves `Rᵀ y = rhs`.
    pub fn solve_lower(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.r[k * n + i] * y[k];
            }
            y[i] = s / self.r[i * n + i];
        }
        y
    }

    /// Solves `R x = rhs`.
    pub fn solve_upper(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x = rhs.to_vec();
        for i in (0..n).rev() {
            let row = &self.r[i * n..(i + 1) * n];
            let s = x[i] - dot(&row[i + 1..], &x[i + 1..]);
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `RᵀR x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len("right-hand side", self.dim, rhs.len())?;
        Ok(self.solve_upper(&self.solve_lower(rhs)))
    }

    /// Returns the factor of `RᵀR ± vvᵀ`.
    pub fn rank1(&self, v: &[f64], sign: RankOneSign) -> Result<Self> {
        let mut out = self.clone();
        out.rank1_in_place(v, sign)?;
        Ok(out)
    }

    /// In-place rank-1 update or downdate. On error the factor is left unchanged.
    pub fn rank1_in_place(&mut self, v: &[f64], sign: RankOneSign) -> Result<()> {
        check_len("rank-1 vector", self.dim, v.len())?;
        let n = self.dim;
        let s = sign.factor();
        let mut r = self.r.clone();
        let mut w = v.to_vec();
        for k in 0..n {
            let rkk = r[k * n + k];
            let wk = w[k];
            let r2 = rkk * rkk + s * wk * wk;
            if !(r2 > 0.0) || !r2.is_finite() {
                return Err(L1Error::NotPositiveDefinite { pivot: k, value: r2 });
            }
            let rnew = r2.sqrt();
            let c = rnew / rkk;
            let sn = wk / rkk;
            r[k * n + k] = rnew;
            for j in k + 1..n {
                let updated = (r[k * n + j] + s * sn * w[j]) / c;
                r[k * n + j] = updated;
                w[j] = c * w[j] - sn * updated;
            }
        }
        self.r = r;
        Ok(())
    }

    /// Appends a row/column to the factored matrix.
    ///
    /// `cross` holds the new off-diagonal column (`A_Iᵀ a`) and `diag` the new
    /// diagonal entry (`aᵀa`). Fails when the new pivot is not safely positive
    /// relative to `diag`.
    pub fn append(&mut self, cross: &[f64], diag: f64) -> Result<()> {
        check_len("appended column", self.dim, cross.len())?;
        let n = self.dim;
        let col = self.solve_lower(cross);
        let pivot2 = diag - dot(&col, &col);
        if !(pivot2 > 1e-12 * diag.abs().max(f64::MIN_POSITIVE)) || !pivot2.is_finite() {
            return Err(L1Error::NotPositiveDefinite { pivot: n, value: pivot2 });
        }
        let m = n + 1;
        let mut r = vec![0.0; m * m];
        for i in 0..n {
            r[i * m..i * m + n].copy_from_slice(&self.r[i * n..(i + 1) * n]);
            r[i * m + n] = col[i];
        }
        r[n * m + n] = pivot2.sqrt();
        self.dim = m;
        self.r = r;
        Ok(())
    }

    /// Deletes row/column `k` of the factored matrix.
    ///
    /// The trailing block is re-triangularized with a rank-1 update by the
    /// removed row of `R`.
    pub fn remove(&mut self, k: usize) -> Result<()> {
        let n = self.dim;
        if k >= n {
            return Err(L1Error::InvalidArgument(format!("remove index {k} out of range {n}")));
        }
        let m = n - 1;
        let t = n - k - 1;
        // trailing block R22 and the removed row's trailing part
        let mut trailing = CholFactor { dim: t, r: vec![0.0; t * t] };
        let mut v = vec![0.0; t];
        for a in 0..t {
            v[a] = self.r[k * n + k + 1 + a];
            for b in a..t {
                trailing.r[a * t + b] = self.r[(k + 1 + a) * n + k + 1 + b];
            }
        }
        trailing.rank1_in_place(&v, RankOneSign::Update)?;

        let mut r = vec![0.0; m * m];
        for i in 0..k {
            for j in i..n {
                if j == k {
                    continue;
                }
                let jj = if j > k { j - 1 } else { j };
                r[i * m + jj] = self.r[i * n + j];
            }
        }
        for a in 0..t {
            for b in a..t {
                r[(k + a) * m + k + b] = trailing.r[a * t + b];
            }
        }
        self.dim = m;
        self.r = r;
        Ok(())
    }
}

/// Functional form of [`CholFactor::rank1`]: the factor of `RᵀR + sign·vvᵀ`.
pub fn chol_rank1(factor: &CholFactor, v: &[f64], sign: RankOneSign) -> Result<CholFactor> {
    factor.rank1(v, sign)
}
