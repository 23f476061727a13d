use rayon::prelude::*;

use super::{inner, ComplexVector, C64};
use crate::error::{FockError, Result};

/// Largest tensor-product dimension `kron` will assemble.
pub const DEFAULT_BASIS_CAP: usize = 1 << 22;

const PARALLEL_ROWS: usize = 2048;

/// Compressed-sparse-row complex matrix.
///
/// Entries are summed on construction and exact zeros are dropped. The
/// `hermitian` flag is a hint set by constructors that produce Hermitian
/// operators; solvers re-check the actual defect.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(FockError::InvalidArgument(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(FockError::InvalidArgument(format!(
                    "non-finite entry at ({r}, {c})"
                )));
            }
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
            hermitian: false,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            hermitian: rows == cols,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let op = Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &d)| (i, i, C64::new(d, 0.0))))
            .expect("diagonal entries are in range");
        op.with_hermitian(true)
    }

    /// Row-major dense input.
    pub fn from_dense(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(FockError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
                context: "dense matrix data",
            });
        }
        Self::from_triplets(
            rows,
            cols,
            data.iter()
                .enumerate()
                .map(|(k, &v)| (k / cols, k % cols, v)),
        )
    }

    pub fn with_hermitian(mut self, flag: bool) -> Self {
        self.hermitian = flag;
        self
    }

    pub fn hermitian_flag(&self) -> bool {
        self.hermitian
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.col_idx[a..b].binary_search(&c) {
            Ok(k) => self.values[a + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.rows * self.cols];
        for (r, c, v) in self.triplets() {
            out[r * self.cols + c] = v;
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// `y = M x`
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols, "matvec input length");
        assert_eq!(y.len(), self.rows, "matvec output length");
        let row_dot = |r: usize| -> C64 {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = C64::new(0.0, 0.0);
            for k in a..b {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            acc
        };
        if self.rows >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, out)| *out = row_dot(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, out)| *out = row_dot(r));
        }
    }

    pub fn apply(&self, x: &[C64]) -> ComplexVector {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.apply_into(x, &mut y);
        y.into()
    }

    /// `(x, M y)`
    pub fn form(&self, x: &[C64], y: &[C64]) -> C64 {
        inner(x, &self.apply(y))
    }

    pub fn adjoint(&self) -> Self {
        let op = Self::from_triplets(
            self.cols,
            self.rows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())),
        )
        .expect("adjoint indices are in range");
        op.with_hermitian(self.hermitian)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        if factor.im != 0.0 {
            out.hermitian = false;
        }
        out.drop_zeros()
    }

    fn drop_zeros(self) -> Self {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return self;
        }
        let flag = self.hermitian;
        Self::from_triplets(self.rows, self.cols, self.triplets().collect::<Vec<_>>())
            .expect("same shape")
            .with_hermitian(flag)
    }

    fn check_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows {
            return Err(FockError::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
                context,
            });
        }
        if self.cols != other.cols {
            return Err(FockError::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
                context,
            });
        }
        Ok(())
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, other: &Self, factor: C64) -> Result<Self> {
        self.check_same_shape(other, "operator sum")?;
        let op = Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets()
                .chain(other.triplets().map(|(r, c, v)| (r, c, v * factor))),
        )?;
        Ok(op.with_hermitian(self.hermitian && other.hermitian && factor.im == 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(FockError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
                context: "matrix product",
            });
        }
        let rows: Vec<Vec<(usize, C64)>> = (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for (k, a) in self.row(r) {
                    for (c, b) in other.row(k) {
                        acc.push((c, a * b));
                    }
                }
                acc
            })
            .collect();
        Self::from_triplets(
            self.rows,
            other.cols,
            rows.into_iter()
                .enumerate()
                .flat_map(|(r, row)| row.into_iter().map(move |(c, v)| (r, c, v))),
        )
    }

    /// `XY - YX`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.square_pair(other)?;
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `XY + YX`
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.square_pair(other)?;
        self.matmul(other)?.add(&other.matmul(self)?)
    }

    fn square_pair(&self, other: &Self) -> Result<()> {
        if !self.is_square() {
            return Err(FockError::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
                context: "commutator requires square operators",
            });
        }
        self.check_same_shape(other, "commutator")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `max |self - other|` over the listed columns only.
    pub fn max_abs_diff_on_columns(&self, other: &Self, columns: &[usize]) -> Result<f64> {
        let diff = self.sub(other)?;
        let mut keep = vec![false; self.cols];
        for &c in columns {
            keep[c] = true;
        }
        Ok(diff
            .triplets()
            .filter(|&(_, c, _)| keep[c])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max))
    }

    /// `max |M - M^dagger|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Replaces `M` by `(M + M^dagger)/2` and sets the Hermitian flag.
    pub fn symmetrized(&self) -> Result<Self> {
        let herm = self
            .add(&self.adjoint())?
            .scale(C64::new(0.5, 0.0));
        Ok(herm.with_hermitian(true))
    }

    /// Checks the Hermiticity defect against `tol`, then symmetrizes.
    pub fn assert_hermitian(&self, tol: f64) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(FockError::NotHermitian { defect, tol });
        }
        self.symmetrized()
    }

    /// `sqrt(||M||_1 ||M||_inf)`, an upper bound on the spectral norm.
    pub fn norm_upper_bound(&self) -> f64 {
        let mut col_sums = vec![0.0; self.cols];
        let mut max_row: f64 = 0.0;
        for r in 0..self.rows {
            let mut s = 0.0;
            for (c, v) in self.row(r) {
                s += v.norm();
                col_sums[c] += v.norm();
            }
            max_row = max_row.max(s);
        }
        let max_col = col_sums.into_iter().fold(0.0, f64::max);
        (max_row * max_col).sqrt()
    }
}

/// Kronecker product on the global tensor index convention, `i*dim(right) + k`.
pub fn kron(left: &SparseOperator, right: &SparseOperator) -> Result<SparseOperator> {
    kron_with_cap(left, right, DEFAULT_BASIS_CAP)
}

pub fn kron_with_cap(
    left: &SparseOperator,
    right: &SparseOperator,
    cap: usize,
) -> Result<SparseOperator> {
    let rows = left.rows.checked_mul(right.rows).unwrap_or(usize::MAX);
    let cols = left.cols.checked_mul(right.cols).unwrap_or(usize::MAX);
    let requested = rows.max(cols);
    if requested > cap {
        return Err(FockError::Capacity {
            what: "tensor-product dimension",
            requested,
            cap,
        });
    }
    let op = SparseOperator::from_triplets(
        rows,
        cols,
        left.triplets().flat_map(|(i, j, a)| {
            right
                .triplets()
                .map(move |(k, l, b)| (i * right.rows + k, j * right.cols + l, a * b))
        }),
    )?;
    Ok(op.with_hermitian(left.hermitian && right.hermitian))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_op(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> SparseOperator {
        let data = random_vector(rng, rows * cols);
        SparseOperator::from_dense(rows, cols, &data).unwrap()
    }

    #[test]
    fn identity_kron_identity_is_identity() {
        let k = kron(&SparseOperator::identity(2), &SparseOperator::identity(3)).unwrap();
        assert_eq!(k, SparseOperator::identity(6).with_hermitian(true));
    }

    #[test]
    fn diagonal_kron_identity() {
        let k = kron(
            &SparseOperator::from_real_diagonal(&[1.0, 2.0]),
            &SparseOperator::identity(2),
        )
        .unwrap();
        let expected = [1.0, 1.0, 2.0, 2.0];
        assert!(k.is_diagonal());
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(k.get(i, i), c(e, 0.0));
        }
    }

    #[test]
    fn kron_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_op(&mut rng, 3, 3);
        let y = random_op(&mut rng, 2, 2);
        let k = kron(&x, &y).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        let lhs = k.get(i * 2 + a, j * 2 + b);
                        let rhs = x.get(i, j) * y.get(a, b);
                        assert!((lhs - rhs).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_capacity_error() {
        let big = SparseOperator::identity(1 << 12);
        let err = kron_with_cap(&big, &big, 1 << 20).unwrap_err();
        assert!(matches!(err, FockError::Capacity { .. }));
    }

    #[test]
    fn commutator_with_identity_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_op(&mut rng, 4, 4);
        let z = SparseOperator::identity(4).commutator(&x).unwrap();
        assert!(z.max_abs() < 1e-15);
    }

    #[test]
    fn commutator_scales_by_eigenvalue_gap() {
        // [diag(1,2), E_12] = (1 - 2) E_12
        let d = SparseOperator::from_real_diagonal(&[1.0, 2.0]);
        let off = SparseOperator::from_triplets(2, 2, [(0, 1, c(1.0, 0.0))]).unwrap();
        let z = d.commutator(&off).unwrap();
        assert_eq!(z.get(0, 1), c(-1.0, 0.0));
        assert_eq!(z.nnz(), 1);
        let off21 = off.adjoint();
        assert_eq!(d.commutator(&off21).unwrap().get(1, 0), c(1.0, 0.0));
    }

    #[test]
    fn pauli_anticommutator() {
        let sx = SparseOperator::from_dense(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let sy = SparseOperator::from_dense(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        assert!(sx.anticommutator(&sy).unwrap().max_abs() < 1e-15);
        let sxx = sx.anticommutator(&sx).unwrap();
        assert_eq!(sxx.get(0, 0), c(2.0, 0.0));
        assert_eq!(sxx.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let a = SparseOperator::identity(2);
        let b = SparseOperator::identity(3);
        assert!(matches!(
            a.commutator(&b),
            Err(FockError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triplets_out_of_range_rejected() {
        assert!(SparseOperator::from_triplets(2, 2, [(2, 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = SparseOperator::from_triplets(
            2,
            2,
            [(0, 0, c(1.0, 0.0)), (0, 0, c(-1.0, 0.0)), (1, 1, c(2.0, 0.0)), (1, 1, c(1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), c(3.0, 0.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_op(&mut rng, 3, 4);
        let b = random_op(&mut rng, 4, 2);
        let p = a.matmul(&b).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let expected: C64 = (0..4).map(|k| a.get(i, k) * b.get(k, j)).sum();
                assert!((p.get(i, j) - expected).norm() < 1e-13);
            }
        }
    }
}
