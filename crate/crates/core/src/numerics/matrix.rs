use serde::{Deserialize, Serialize};

use crate::error::{L1Error, Result};

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries. Every entry must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(L1Error::DimensionMismatch {
                what: "matrix entry count",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(L1Error::InvalidArgument(format!(
                "non-finite matrix entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    /// Builds a matrix from a slice of equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(L1Error::DimensionMismatch { what: "row length", expected: cols, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(L1Error::DimensionMismatch { what: "column length", expected: rows, got: col.len() });
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * cols + j] = *v;
            }
        }
        Self::new(rows, cols, m.data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        self.data.chunks_exact(self.cols.max(1)).take(self.rows).map(|row| dot(row, x)).collect()
    }

    /// `Aᵀ y`.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi != 0.0 {
                axpy(*yi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(L1Error::DimensionMismatch {
                what: "inner dimension of product",
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0.0 {
                    axpy(a, other.row(k), orow);
                }
            }
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// A linear operator with column access: the dictionary `A` of `b = A x`.
///
/// Solvers are written against this trait so that structured dictionaries
/// such as `[A, I]` can be used without materializing them.
pub trait Dictionary {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `A x`
    fn apply(&self, x: &[f64]) -> Vec<f64>;

    /// `Aᵀ r`
    fn adjoint(&self, r: &[f64]) -> Vec<f64>;

    /// Column `j` as a dense vector of length `nrows`.
    fn column(&self, j: usize) -> Vec<f64>;

    fn column_norm_sq(&self, j: usize) -> f64 {
        let c = self.column(j);
        dot(&c, &c)
    }

    /// `A_I x_I` for a coefficient vector supported on `support`.
    fn apply_support(&self, support: &[usize], values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows()];
        for (&j, &v) in support.iter().zip(values) {
            if v != 0.0 {
                axpy(v, &self.column(j), &mut out);
            }
        }
        out
    }

    /// `A diag(w) Aᵀ`, an `nrows × nrows` symmetric matrix.
    fn weighted_gram(&self, w: &[f64]) -> DenseMatrix {
        let d = self.nrows();
        let mut g = DenseMatrix::zeros(d, d);
        for (j, &wj) in w.iter().enumerate() {
            if wj == 0.0 {
                continue;
            }
            let c = self.column(j);
            for i in 0..d {
                let s = wj * c[i];
                if s != 0.0 {
                    for k in i..d {
                        g.data[i * d + k] += s * c[k];
                    }
                }
            }
        }
        symmetrize_upper(&mut g);
        g
    }
}

pub(crate) fn symmetrize_upper(g: &mut DenseMatrix) {
    let d = g.rows;
    for i in 0..d {
        for k in 0..i {
            g.data[i * d + k] = g.data[k * d + i];
        }
    }
}

impl Dictionary for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }

    fn adjoint(&self, r: &[f64]) -> Vec<f64> {
        self.matvec_t(r)
    }

    fn column(&self, j: usize) -> Vec<f64> {
        DenseMatrix::column(self, j)
    }

    fn apply_support(&self, support: &[usize], values: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                support.iter().zip(values).map(|(&j, &v)| row[j] * v).sum()
            })
            .collect()
    }

    fn weighted_gram(&self, w: &[f64]) -> DenseMatrix {
        // Row-oriented: G[i][k] = sum_j A[i][j] w[j] A[k][j].
        let d = self.rows;
        let mut g = DenseMatrix::zeros(d, d);
        let mut scaled = vec![0.0; self.cols];
        for i in 0..d {
            for (s, (a, wj)) in scaled.iter_mut().zip(self.row(i).iter().zip(w)) {
                *s = a * wj;
            }
            for k in i..d {
                g.data[i * d + k] = dot(&scaled, self.row(k));
            }
        }
        symmetrize_upper(&mut g);
        g
    }
}

impl<D: Dictionary + ?Sized> Dictionary for &D {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (**self).apply(x)
    }
    fn adjoint(&self, r: &[f64]) -> Vec<f64> {
        (**self).adjoint(r)
    }
    fn column(&self, j: usize) -> Vec<f64> {
        (**self).column(j)
    }
    fn column_norm_sq(&self, j: usize) -> f64 {
        (**self).column_norm_sq(j)
    }
    fn apply_support(&self, support: &[usize], values: &[f64]) -> Vec<f64> {
        (**self).apply_support(support, values)
    }
    fn weighted_gram(&self, w: &[f64]) -> DenseMatrix {
        (**self).weighted_gram(w)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorize without reassociation flags.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `‖a − b‖₂`
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `‖x − x₀‖₂ / ‖x₀‖₂`, or the absolute distance when `x₀ = 0`.
pub fn relative_error(x: &[f64], truth: &[f64]) -> f64 {
    let denom = norm2(truth);
    let dist = dist2(x, truth);
    if denom > 0.0 {
        dist / denom
    } else {
        dist
    }
}

pub fn support_size(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap()
    }

    #[test]
    fn rejects_bad_shapes_and_non_finite_entries() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn products_match_hand_values() {
        let a = sample();
        assert_eq!(a.matvec(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        assert_eq!(a.matvec_t(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
        let ata = a.transpose().matmul(&a).unwrap();
        assert_eq!(ata.get(0, 0), 17.0);
        assert_eq!(ata.get(1, 2), 36.0);
    }

    #[test]
    fn weighted_gram_default_and_dense_agree() {
        struct Cols(DenseMatrix);
        impl Dictionary for Cols {
            fn nrows(&self) -> usize {
                self.0.rows()
            }
            fn ncols(&self) -> usize {
                self.0.cols()
            }
            fn apply(&self, x: &[f64]) -> Vec<f64> {
                self.0.matvec(x)
            }
            fn adjoint(&self, r: &[f64]) -> Vec<f64> {
                self.0.matvec_t(r)
            }
            fn column(&self, j: usize) -> Vec<f64> {
                self.0.column(j)
            }
        }
        let a = sample();
        let w = [0.5, 2.0, 1.5];
        let g1 = a.weighted_gram(&w);
        let g2 = Cols(a.clone()).weighted_gram(&w);
        assert!(g1.max_abs_diff(&g2) < 1e-12);
        assert!((g1.get(0, 1) - (0.5 * 4.0 + 2.0 * 10.0 + 1.5 * 18.0)).abs() < 1e-12);
        assert_eq!(a.apply_support(&[2], &[2.0]), vec![6.0, 12.0]);
    }

    #[test]
    fn from_columns_is_transpose_of_from_rows() {
        let a = DenseMatrix::from_columns(2, &[vec![1.0, 4.0], vec![2.0, 5.0], vec![3.0, 6.0]]).unwrap();
        assert_eq!(a, sample());
    }
}
