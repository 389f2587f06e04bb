//! Sinkhorn decompositions `A = D S E` and the scaling mean.

use serde::Serialize;

use crate::alternating::{contraction_factor, Problem};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, uniform_log_mean};
use crate::pattern::PatternReport;
use crate::{NonnegMatrix, Scalar};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy)]
pub struct SinkhornOptions<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for SinkhornOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::of(DEFAULT_TOL),
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl<T: Scalar> SinkhornOptions<T> {
    pub fn new(tol: T, max_iter: usize) -> Self {
        Self { tol, max_iter }
    }
}

/// `A = diag(d) · s · diag(e)` with `s` doubly stochastic, gauge `gmean(e) = 1`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Scalar + Serialize")]
pub struct SinkhornFactorization<T> {
    pub d: Vec<T>,
    pub e: Vec<T>,
    #[serde(serialize_with = "serialize_rows")]
    pub s: NonnegMatrix<T>,
    pub iterations: usize,
    /// Max deviation of the row and column sums of `s` from 1.
    pub residual: T,
    /// A-priori per-cycle Hilbert contraction factor; positive inputs only.
    pub certificate: Option<T>,
}

fn serialize_rows<T: Scalar + Serialize, S: serde::Serializer>(
    m: &NonnegMatrix<T>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&m.to_rows(), ser)
}

impl<T: Scalar> SinkhornFactorization<T> {
    /// `gmean(d) · gmean(e)`.
    pub fn gmean_product(&self) -> T {
        let ld = uniform_log_mean(&self.d).unwrap_or(T::neg_infinity());
        let le = uniform_log_mean(&self.e).unwrap_or(T::neg_infinity());
        (ld + le).exp()
    }

    /// `D S E`, for reconstruction checks.
    pub fn reconstruct(&self) -> Result<NonnegMatrix<T>> {
        self.s.scale_rows_cols(&self.d, &self.e)
    }
}

/// Sinkhorn decomposition of a matrix in `P_n`.
pub fn sinkhorn<T: Scalar>(
    a: &NonnegMatrix<T>,
    tol: T,
    max_iter: usize,
) -> Result<SinkhornFactorization<T>> {
    let n = a.order()?;
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let report = PatternReport::analyze(a)?;
    if !report.in_pn {
        return Err(Error::NotInPn);
    }
    let ones = vec![T::one(); n];
    let problem = Problem {
        f: a,
        w_row: &ones,
        w_col: &ones,
    };
    let scaled = problem.solve(ones.clone(), tol, max_iter)?;
    let (mut d, mut e) = (scaled.row, scaled.col);
    let gauge = uniform_log_mean(&e)
        .ok_or_else(|| Error::Internal("non-positive column scaling".into()))?
        .exp();
    for x in &mut e {
        *x /= gauge;
    }
    for x in &mut d {
        *x *= gauge;
    }
    let inv_d: Vec<T> = d.iter().map(|&x| T::one() / x).collect();
    let inv_e: Vec<T> = e.iter().map(|&x| T::one() / x).collect();
    let s = a.scale_rows_cols(&inv_d, &inv_e)?;
    let residual = problem.residual(&d, &e);
    let certificate = a
        .is_positive()
        .then(|| contraction_factor(a.max_entry(), a.min_entry()));
    Ok(SinkhornFactorization {
        d,
        e,
        s,
        iterations: scaled.iterations,
        residual,
        certificate,
    })
}

/// Hilbert distances `d(e_{k+1}, e_k)` between successive column scalings
/// over `cycles` Sinkhorn cycles started from the all-ones row scaling.
pub fn sinkhorn_hilbert_steps<T: Scalar>(a: &NonnegMatrix<T>, cycles: usize) -> Result<Vec<T>> {
    let n = a.order()?;
    let ones = vec![T::one(); n];
    let problem = Problem {
        f: a,
        w_row: &ones,
        w_col: &ones,
    };
    let mut row = ones.clone();
    let mut prev: Option<Vec<T>> = None;
    let mut out = Vec::with_capacity(cycles);
    for _ in 0..=cycles {
        let (next, col) = problem.cycle(&row);
        if let Some(p) = &prev {
            out.push(hilbert_distance(p, &col)?);
        }
        prev = Some(col);
        row = next;
    }
    Ok(out)
}

/// Scaling mean of a square nonnegative matrix.
///
/// Zero when the permanent vanishes; otherwise assembled from Sinkhorn
/// decompositions of the fully indecomposable blocks of `Π(A)`.
pub fn scaling_mean<T: Scalar>(a: &NonnegMatrix<T>, tol: T) -> Result<T> {
    scaling_mean_with(a, &SinkhornOptions::new(tol, DEFAULT_MAX_ITER))
}

pub fn scaling_mean_with<T: Scalar>(a: &NonnegMatrix<T>, opts: &SinkhornOptions<T>) -> Result<T> {
    let n = a.order()?;
    let report = PatternReport::analyze(a)?;
    if !report.has_positive_diagonal {
        return Ok(T::zero());
    }
    // log(gmean(D) gmean(E)) over all n indices, block by block.
    let mut log_sum = T::zero();
    for block in &report.blocks {
        let sub = a.submatrix(&block.rows, &block.cols)?;
        let k = T::of_usize(block.len());
        let f = sinkhorn(&sub, opts.tol, opts.max_iter)?;
        log_sum += k * f.gmean_product().ln();
    }
    let nn = T::of_usize(n);
    Ok((log_sum / nn).exp() / nn)
}

/// `(√(ad) + √(bc)) / 2`, the scaling mean of `[[a, b], [c, d]]`.
pub fn scaling_mean_2x2<T: Scalar>(a: T, b: T, c: T, d: T) -> T {
    ((a * d).sqrt() + (b * c).sqrt()) / T::of(2.0)
}

/// Hilbert projective distance `log(max(v/u) / min(v/u))`.
pub fn hilbert_distance<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::Dimension(format!(
            "vectors of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.iter()
        .chain(v)
        .any(|&x| !(x > T::zero() && x.is_finite()))
    {
        return Err(Error::NonPositiveEntry);
    }
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for (&a, &b) in u.iter().zip(v) {
        let r = b.ln() - a.ln();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(hi - lo)
}

/// Kronecker product `A ⊗ B` (block matrix `(a_ij B)`).
pub fn kron<T: Scalar>(a: &NonnegMatrix<T>, b: &NonnegMatrix<T>) -> NonnegMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    NonnegMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
    .expect("product of nonnegative entries is nonnegative")
}

/// Perron root of a nonnegative matrix by normalized power iteration.
///
/// Iterates on `A + I` (same Perron vector, root shifted by one) so that
/// periodic irreducible matrices still converge. Stops when the
/// Collatz–Wielandt bounds `min (Ax)_i/x_i ≤ ρ ≤ max (Ax)_i/x_i` agree to `tol`
/// relative; if the budget runs out the midpoint of the bounds is returned.
pub fn spectral_radius<T: Scalar>(a: &NonnegMatrix<T>, tol: T, max_iter: usize) -> Result<T> {
    let n = a.order()?;
    let mut x = vec![T::one(); n];
    let mut bounds = (T::zero(), T::infinity());
    for _ in 0..max_iter.max(1) {
        let ax = a.matvec(&x);
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        let mut all_positive = true;
        for (&y, &xi) in ax.iter().zip(&x) {
            if xi > T::zero() {
                let r = y / xi;
                lo = lo.min(r);
                hi = hi.max(r);
            } else {
                all_positive = false;
            }
        }
        if all_positive {
            bounds = (bounds.0.max(lo), bounds.1.min(hi));
            if bounds.1 - bounds.0 <= tol * bounds.1 {
                break;
            }
        }
        let next: Vec<T> = ax.iter().zip(&x).map(|(&y, &xi)| y + xi).collect();
        let norm = next.iter().copied().fold(T::zero(), T::max);
        if !(norm > T::zero()) {
            return Ok(T::zero());
        }
        x = next.into_iter().map(|v| v / norm).collect();
    }
    if bounds.1.is_finite() {
        Ok((bounds.0 + bounds.1) / T::of(2.0))
    } else {
        Err(Error::Internal(
            "power iteration found no positive Perron vector".into(),
        ))
    }
}

/// `(scaling_mean(A), ρ(ΔA) / (n gmean(Δ)))` at the optimal `Δ = E⁻¹D⁻¹`.
pub fn spectral_radius_cross_check<T: Scalar>(a: &NonnegMatrix<T>, tol: T) -> Result<(T, T)> {
    let n = a.order()?;
    if !a.is_positive() {
        return Err(Error::NonPositiveEntry);
    }
    let f = sinkhorn(a, tol, DEFAULT_MAX_ITER)?;
    let lhs = f.gmean_product() / T::of_usize(n);
    let delta: Vec<T> =
        f.d.iter()
            .zip(&f.e)
            .map(|(&d, &e)| T::one() / (d * e))
            .collect();
    let scaled = a.scale_rows_cols(&delta, &vec![T::one(); n])?;
    let rho = spectral_radius(&scaled, tol, DEFAULT_MAX_ITER)?;
    let log_gm = compensated_sum(delta.iter().map(|x| x.ln())) / T::of_usize(n);
    let rhs = rho / (T::of_usize(n) * log_gm.exp());
    Ok((lhs, rhs))
}
