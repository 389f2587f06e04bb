//! Error-free transformations and compensated accumulation.

use crate::Scalar;

/// `a + b = s + err` exactly (Knuth).
#[inline]
pub(crate) fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}

/// `ln(n!)` by direct summation, exact enough for every order this crate handles.
pub fn ln_factorial(n: usize) -> f64 {
    compensated_sum((2..=n).map(|k| (k as f64).ln()))
}

/// `n (n!)^{-1/n}`, the upper van der Waerden constant.
pub fn vdw_upper_constant(n: usize) -> f64 {
    (n as f64) * (-ln_factorial(n) / n as f64).exp()
}

/// Geometric mean of positive entries with uniform weights; `None` if any entry is not positive.
pub(crate) fn uniform_log_mean<T: Scalar>(v: &[T]) -> Option<T> {
    if v.iter().any(|&x| !(x > T::zero())) {
        return None;
    }
    let n = T::of_usize(v.len());
    Some(compensated_sum(v.iter().map(|x| x.ln())) / n)
}
