//! Dense nonnegative matrices.

use std::fmt;

use crate::error::{Error, Result};
use crate::Scalar;

/// Dense row-major matrix whose entries are finite and nonnegative.
///
/// Every constructor validates the entries, so downstream code never has to
/// re-check signs or finiteness.
#[derive(Clone, PartialEq)]
pub struct NonnegMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> NonnegMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some((idx, x)) = data
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x >= T::zero()))
        {
            return Err(Error::InvalidEntry(format!(
                "entry ({}, {}) = {x} is not a finite nonnegative number",
                idx / cols,
                idx % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn constant(rows: usize, cols: usize, value: T) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    /// The all-ones matrix `U_n`.
    pub fn ones(n: usize) -> Self {
        Self::constant(n, n, T::one()).expect("ones matrix is valid")
    }

    /// `J_n`: every entry equal to `1/n`.
    pub fn uniform_doubly_stochastic(n: usize) -> Self {
        Self::constant(n, n, T::one() / T::of_usize(n)).expect("J_n is valid")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
            .expect("identity is valid")
    }

    /// Square matrix with `diag` on the main diagonal.
    pub fn diagonal(diag: &[T]) -> Result<Self> {
        Self::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                diag[i]
            } else {
                T::zero()
            }
        })
    }

    /// Permutation matrix with ones at `(i, perm[i])`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Index(format!("{perm:?} is not a permutation")));
            }
        }
        Self::from_fn(n, n, |i, j| if perm[i] == j { T::one() } else { T::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Order of a square matrix, or a `Dimension` error.
    pub fn order(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols).map(<[T]>::to_vec).collect()
    }

    pub fn max_entry(&self) -> T {
        self.data.iter().copied().fold(T::zero(), T::max)
    }

    /// Smallest entry (zero if any entry is zero).
    pub fn min_entry(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x > T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == T::zero())
    }

    /// Sum of all entries.
    pub fn total(&self) -> T {
        crate::numeric::compensated_sum(self.data.iter().copied())
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| crate::numeric::compensated_sum(self.row(i).iter().copied()))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| crate::numeric::compensated_sum((0..self.rows).map(|i| self.get(i, j))))
            .collect()
    }

    /// Entrywise map; the closure must keep entries finite and nonnegative.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            self.data.iter().map(|&x| f(x)).collect(),
        )
    }

    pub fn scale(&self, c: T) -> Result<Self> {
        self.map(|x| x * c)
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            data: (0..self.cols)
                .flat_map(|j| (0..self.rows).map(move |i| self.get(i, j)))
                .collect(),
        }
    }

    /// `diag(row) · A · diag(col)`.
    pub fn scale_rows_cols(&self, row: &[T], col: &[T]) -> Result<Self> {
        if row.len() != self.rows || col.len() != self.cols {
            return Err(Error::Dimension("scaling vector length mismatch".into()));
        }
        Self::from_fn(self.rows, self.cols, |i, j| {
            row[i] * self.get(i, j) * col[j]
        })
    }

    /// Matrix whose `(i, j)` entry is `A[row_perm[i], col_perm[j]]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        self.submatrix(row_perm, col_perm)
    }

    /// Submatrix on the listed rows and columns, in the listed order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&i| i >= self.rows) || cols.iter().any(|&j| j >= self.cols) {
            return Err(Error::Index("submatrix index out of range".into()));
        }
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// `A(i|j)`: the matrix with row `i` and column `j` deleted.
    pub fn minor(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::Index(format!(
                "({i}, {j}) outside a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::Dimension(
                "minor of a matrix with a single row or column".into(),
            ));
        }
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.submatrix(&rows, &cols)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Self::from_fn(self.rows, other.cols, |i, j| {
            crate::numeric::compensated_sum(
                (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)),
            )
        })
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                crate::numeric::compensated_sum(self.row(i).iter().zip(x).map(|(&a, &b)| a * b))
            })
            .collect()
    }

    /// Boolean support pattern, row-major.
    pub fn support(&self) -> Vec<bool> {
        self.data.iter().map(|&x| x != T::zero()).collect()
    }

    /// Convex combination `t A + (1 - t) B`.
    pub fn lerp(&self, other: &Self, t: T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Self::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| t * a + (T::one() - t) * b)
                .collect(),
        )
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> NonnegMatrix<U> {
        NonnegMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| U::of(x.as_f64())).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for NonnegMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "NonnegMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}
