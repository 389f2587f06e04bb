//! Alternating row/column normalization shared by the matrix and the
//! grid-function Sinkhorn solvers.
//!
//! Finds positive `row`, `col` with `g_ij = f_ij / (row_i col_j)` satisfying
//! `Σ_j w_col[j] g_ij = 1` and `Σ_i w_row[i] g_ij = 1`. One cycle is
//! `col_j ← Σ_i w_row[i] f_ij / row_i` followed by
//! `row_i ← Σ_j w_col[j] f_ij / col_j`; afterwards the row condition holds
//! exactly and the residual is the worst column deviation.

use crate::error::{Error, Result, Unconverged};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::{NonnegMatrix, Scalar};

pub(crate) struct Scaled<T> {
    pub row: Vec<T>,
    pub col: Vec<T>,
    pub iterations: usize,
    pub residual: T,
}

pub(crate) struct Problem<'a, T> {
    pub f: &'a NonnegMatrix<T>,
    pub w_row: &'a [T],
    pub w_col: &'a [T],
}

impl<T: Scalar> Problem<'_, T> {
    fn update_col(&self, row: &[T], col: &mut [T]) {
        let (m, n) = (self.f.rows(), self.f.cols());
        let mut acc = vec![CompensatedSum::new(); n];
        for i in 0..m {
            let s = self.w_row[i] / row[i];
            for (j, a) in acc.iter_mut().enumerate() {
                a.add(s * self.f.get(i, j));
            }
        }
        for (c, a) in col.iter_mut().zip(&acc) {
            *c = a.value();
        }
    }

    fn update_row(&self, col: &[T], row: &mut [T]) {
        for (i, r) in row.iter_mut().enumerate() {
            *r = compensated_sum(
                self.f
                    .row(i)
                    .iter()
                    .zip(col)
                    .zip(self.w_col)
                    .map(|((&x, &c), &w)| w * x / c),
            );
        }
    }

    /// Max deviation from 1 of both conditional sums of the current core.
    pub fn residual(&self, row: &[T], col: &[T]) -> T {
        let (m, n) = (self.f.rows(), self.f.cols());
        let mut worst = T::zero();
        let mut col_acc = vec![CompensatedSum::new(); n];
        for i in 0..m {
            let mut r = CompensatedSum::new();
            for j in 0..n {
                let g = self.f.get(i, j) / (row[i] * col[j]);
                r.add(self.w_col[j] * g);
                col_acc[j].add(self.w_row[i] * g);
            }
            worst = worst.max((r.value() - T::one()).abs());
        }
        for a in &col_acc {
            worst = worst.max((a.value() - T::one()).abs());
        }
        worst
    }

    /// One full cycle starting from `row`; returns the new `(row, col)`.
    pub fn cycle(&self, row: &[T]) -> (Vec<T>, Vec<T>) {
        let mut col = vec![T::zero(); self.f.cols()];
        self.update_col(row, &mut col);
        let mut next = vec![T::zero(); self.f.rows()];
        self.update_row(&col, &mut next);
        (next, col)
    }

    pub fn solve(&self, row0: Vec<T>, tol: T, max_iter: usize) -> Result<Scaled<T>> {
        let mut row = row0;
        let mut col = vec![T::zero(); self.f.cols()];
        // The starting ray may already be a fixed point once the column step is taken.
        self.update_col(&row, &mut col);
        let mut residual = self.residual(&row, &col);
        let mut iterations = 0;
        while !(residual < tol) {
            if iterations >= max_iter {
                return Err(Error::MaxIterExceeded(Box::new(Unconverged {
                    iterations,
                    residual: residual.as_f64(),
                    row_scaling: row.iter().map(|x| x.as_f64()).collect(),
                    col_scaling: col.iter().map(|x| x.as_f64()).collect(),
                })));
            }
            self.update_row(&col, &mut row);
            self.update_col(&row, &mut col);
            iterations += 1;
            residual = self.residual(&row, &col);
        }
        Ok(Scaled {
            row,
            col,
            iterations,
            residual,
        })
    }
}

/// Birkhoff contraction factor `tanh²(δ/4)` per cycle with `δ = 2 log(max/min)`.
pub fn contraction_factor<T: Scalar>(max_entry: T, min_entry: T) -> T {
    let delta = T::of(2.0) * (max_entry / min_entry).ln();
    let t = (delta / T::of(4.0)).tanh();
    t * t
}

/// Number of cycles after which the contraction bound forces the residual below `tol`.
///
/// Successive iterates after the first cycle lie in the image of a positive
/// kernel, whose Hilbert diameter is at most `δ`; their distance then shrinks
/// by `κ` per cycle, and the residual is bounded by `exp(d) - 1`.
pub fn certified_iteration_budget(kappa: f64, delta: f64, tol: f64) -> usize {
    if delta <= 0.0 || kappa <= 0.0 {
        return 1;
    }
    let target = tol.ln_1p();
    if delta <= target {
        return 1;
    }
    if kappa >= 1.0 {
        return usize::MAX;
    }
    1 + ((target / delta).ln() / kappa.ln()).ceil() as usize
}
