//! Permanents and permanental means.
//!
//! `permanent` reduces the matrix to the fully indecomposable blocks of its
//! positive-diagonal projection, pre-scales each block by its largest entry
//! and evaluates it with Ryser's inclusion–exclusion formula in Gray-code
//! order. Row sums are carried as compensated pairs and the signed subset
//! terms are accumulated with Neumaier summation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, ln_factorial, two_sum, CompensatedSum};
use crate::pattern::PatternReport;
use crate::{NonnegMatrix, Scalar};

pub const DEFAULT_CAP: usize = 26;
pub const NAIVE_CAP: usize = 10;
pub const LAPLACE_CAP: usize = 12;

/// Subsets per parallel work unit are `2^CHUNK_BITS`; the chunk layout
/// depends only on `n`, never on the thread count.
const CHUNK_BITS: u32 = 12;

/// Permanent kept in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogPermanent<T> {
    pub is_zero: bool,
    /// Natural log of the permanent; meaningless when `is_zero`.
    pub log_value: T,
}

impl<T: Scalar> LogPermanent<T> {
    pub fn zero() -> Self {
        Self {
            is_zero: true,
            log_value: T::neg_infinity(),
        }
    }

    pub fn from_ln(log_value: T) -> Self {
        Self {
            is_zero: false,
            log_value,
        }
    }

    /// The permanent itself (may overflow to infinity for large matrices).
    pub fn value(&self) -> T {
        if self.is_zero {
            T::zero()
        } else {
            self.log_value.exp()
        }
    }

    /// `(per / n!)^{1/n}`.
    pub fn mean(&self, n: usize) -> T {
        if self.is_zero {
            return T::zero();
        }
        let lf = T::of(ln_factorial(n));
        ((self.log_value - lf) / T::of_usize(n)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, Copy)]
pub struct PermanentOptions {
    pub cap: usize,
    pub parallelism: Parallelism,
}

impl Default for PermanentOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            parallelism: Parallelism::Parallel,
        }
    }
}

/// Permanent of a square nonnegative matrix of order at most `cap`.
pub fn permanent<T: Scalar>(a: &NonnegMatrix<T>, cap: usize) -> Result<LogPermanent<T>> {
    permanent_with(
        a,
        &PermanentOptions {
            cap,
            ..Default::default()
        },
    )
}

pub fn permanent_with<T: Scalar>(
    a: &NonnegMatrix<T>,
    opts: &PermanentOptions,
) -> Result<LogPermanent<T>> {
    let n = a.order()?;
    if n > opts.cap {
        return Err(Error::CapExceeded { n, cap: opts.cap });
    }
    let report = PatternReport::analyze(a)?;
    if !report.has_positive_diagonal {
        return Ok(LogPermanent::zero());
    }
    // per A = per Π(A) = product of the block permanents.
    let mut log_total = T::zero();
    for block in &report.blocks {
        let sub = a.submatrix(&block.rows, &block.cols)?;
        log_total += log_ryser_scaled(&sub, opts.parallelism)?;
    }
    Ok(LogPermanent::from_ln(log_total))
}

/// Alternating row/column normalization sweeps applied before Ryser.
const BALANCE_SWEEPS: usize = 8;

/// `log per A` for a fully indecomposable block (or any matrix with a positive diagonal).
fn log_ryser_scaled<T: Scalar>(a: &NonnegMatrix<T>, par: Parallelism) -> Result<T> {
    let n = a.rows();
    if n == 1 {
        return Ok(a.get(0, 0).ln());
    }
    let (balanced, log_factor) = balance(a)?;
    let raw = ryser(&balanced, par);
    if !(raw.as_f64() >= 1e-300) || !raw.is_finite() {
        return Err(Error::Internal(format!(
            "Ryser sum {raw} for a {n}x{n} matrix with a positive diagonal"
        )));
    }
    Ok(log_factor + raw.ln())
}

/// Divides rows and columns by positive factors that bring `a` close to
/// doubly stochastic, returning the result and the log of the removed factor.
///
/// Ryser's alternating sum cancels far less on balanced matrices; a rank-one
/// input, for instance, becomes the constant matrix.
fn balance<T: Scalar>(a: &NonnegMatrix<T>) -> Result<(NonnegMatrix<T>, T)> {
    let n = a.rows();
    let mut r = vec![T::one(); n];
    let mut c = vec![T::one(); n];
    for _ in 0..BALANCE_SWEEPS {
        for (i, ri) in r.iter_mut().enumerate() {
            *ri = compensated_sum(a.row(i).iter().zip(&c).map(|(&x, &cj)| x / cj));
        }
        for (j, cj) in c.iter_mut().enumerate() {
            *cj = compensated_sum((0..n).map(|i| a.get(i, j) / r[i]));
        }
    }
    let log_factor = compensated_sum(r.iter().chain(&c).map(|x| x.ln()));
    let balanced = NonnegMatrix::from_fn(n, n, |i, j| a.get(i, j) / r[i] / c[j])?;
    Ok((balanced, log_factor))
}

/// Signed Ryser sum `(-1)^n Σ_S (-1)^{|S|} Π_i Σ_{j∈S} a_ij` over non-empty column subsets.
fn ryser<T: Scalar>(a: &NonnegMatrix<T>, par: Parallelism) -> T {
    let n = a.rows();
    let total: u64 = 1u64 << n;
    let chunk: u64 = 1u64 << CHUNK_BITS.min(n as u32);
    let n_chunks = total.div_ceil(chunk);
    let run = |k: u64| {
        let lo = (k * chunk).max(1);
        let hi = ((k + 1) * chunk).min(total);
        ryser_range(a, lo, hi)
    };
    let partials: Vec<CompensatedSum<T>> = match par {
        Parallelism::Serial => (0..n_chunks).map(run).collect(),
        Parallelism::Parallel => (0..n_chunks).into_par_iter().map(run).collect(),
    };
    let mut acc = CompensatedSum::new();
    for p in &partials {
        acc.merge(p);
    }
    let s = acc.value();
    if n % 2 == 1 {
        -s
    } else {
        s
    }
}

/// Accumulates `(-1)^{|S|} Π_i r_i(S)` for Gray codes `g(k)`, `k ∈ [lo, hi)`.
fn ryser_range<T: Scalar>(a: &NonnegMatrix<T>, lo: u64, hi: u64) -> CompensatedSum<T> {
    let n = a.rows();
    let gray = |k: u64| k ^ (k >> 1);
    let mut acc = CompensatedSum::new();
    if lo >= hi {
        return acc;
    }
    // Row sums of the starting subset, recomputed from scratch.
    let start = gray(lo);
    let mut hi_sum = vec![T::zero(); n];
    let mut lo_sum = vec![T::zero(); n];
    for (i, (h, l)) in hi_sum.iter_mut().zip(lo_sum.iter_mut()).enumerate() {
        let row = a.row(i);
        for (j, &x) in row.iter().enumerate() {
            if start >> j & 1 == 1 {
                let (s, e) = two_sum(*h, x);
                *h = s;
                *l += e;
            }
        }
    }
    // Product of the row sums carried as an unevaluated pair `ph + pl`.
    let term = |hs: &[T], ls: &[T]| {
        let (mut ph, mut pl) = (T::one(), T::zero());
        for (&h, &l) in hs.iter().zip(ls) {
            let x = ph * h;
            let err = ph.mul_add(h, -x);
            pl = err + ph.mul_add(l, pl * h);
            ph = x + pl;
            pl -= ph - x;
        }
        (ph, pl)
    };
    let add_signed = |acc: &mut CompensatedSum<T>, subset: u64, (ph, pl): (T, T)| {
        if subset.count_ones() % 2 == 1 {
            acc.add(-ph);
            acc.add(-pl);
        } else {
            acc.add(ph);
            acc.add(pl);
        }
    };
    add_signed(&mut acc, start, term(&hi_sum, &lo_sum));

    let mut subset = start;
    for k in lo + 1..hi {
        let j = k.trailing_zeros() as usize;
        let adding = subset >> j & 1 == 0;
        subset ^= 1 << j;
        for i in 0..n {
            let x = a.get(i, j);
            let x = if adding { x } else { -x };
            let (s, e) = two_sum(hi_sum[i], x);
            hi_sum[i] = s;
            lo_sum[i] += e;
        }
        add_signed(&mut acc, subset, term(&hi_sum, &lo_sum));
    }
    acc
}

/// Permanent by enumerating all `n!` permutations; the reference oracle.
pub fn permanent_naive<T: Scalar>(a: &NonnegMatrix<T>) -> Result<LogPermanent<T>> {
    let n = a.order()?;
    if n > NAIVE_CAP {
        return Err(Error::CapExceeded { n, cap: NAIVE_CAP });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = CompensatedSum::new();
    loop {
        acc.add(
            perm.iter()
                .enumerate()
                .fold(T::one(), |p, (i, &j)| p * a.get(i, j)),
        );
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let v = acc.value();
    Ok(if v > T::zero() {
        LogPermanent::from_ln(v.ln())
    } else {
        LogPermanent::zero()
    })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `(per A / n!)^{1/n}`, zero when the permanent vanishes.
pub fn permanental_mean<T: Scalar>(a: &NonnegMatrix<T>, cap: usize) -> Result<T> {
    let n = a.order()?;
    Ok(permanent(a, cap)?.mean(n))
}

/// `per A(i|j)`, the partial derivative of the permanent in `a_ij`.
pub fn laplace_expansion_check<T: Scalar>(a: &NonnegMatrix<T>, i: usize, j: usize) -> Result<T> {
    let n = a.order()?;
    if n < 2 {
        return Err(Error::Dimension("minor of a 1x1 matrix".into()));
    }
    if n > LAPLACE_CAP {
        return Err(Error::CapExceeded {
            n,
            cap: LAPLACE_CAP,
        });
    }
    if i >= n || j >= n {
        return Err(Error::Index(format!("({i}, {j}) outside a {n}x{n} matrix")));
    }
    Ok(permanent(&a.minor(i, j)?, LAPLACE_CAP)?.value())
}
