//! Positive functions on a weighted product grid `X × Y`.
//!
//! A [`GridFunction`] stores `f(x_i, y_j)` together with probability weights
//! `mu` on the rows and `nu` on the columns. Functions of the row index alone
//! play the role of `X`-measurable scalings, functions of the column index
//! alone the role of `Y`-measurable ones.

use serde::{Deserialize, Serialize};

use crate::alternating::{contraction_factor, Problem};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::{NonnegMatrix, Scalar};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_QUADRATURE: usize = 8;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    values: NonnegMatrix<T>,
    mu: Vec<T>,
    nu: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// `E(f | rows)`: integrate out the column variable.
    Rows,
    /// `E(f | cols)`: integrate out the row variable.
    Cols,
}

fn check_probability<T: Scalar>(w: &[T], name: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidWeights(format!("{name} is empty")));
    }
    if w.iter().any(|&x| !(x > T::zero() && x.is_finite())) {
        return Err(Error::InvalidWeights(format!(
            "{name} has a non-positive weight"
        )));
    }
    let total = compensated_sum(w.iter().copied());
    if (total.as_f64() - 1.0).abs() > WEIGHT_TOL.max(T::epsilon().as_f64() * 4.0 * w.len() as f64) {
        return Err(Error::InvalidWeights(format!(
            "{name} sums to {total}, not 1"
        )));
    }
    Ok(())
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(values: NonnegMatrix<T>, mu: Vec<T>, nu: Vec<T>) -> Result<Self> {
        if mu.len() != values.rows() || nu.len() != values.cols() {
            return Err(Error::Dimension(format!(
                "weights of lengths {}, {} for a {}x{} grid",
                mu.len(),
                nu.len(),
                values.rows(),
                values.cols()
            )));
        }
        check_probability(&mu, "mu")?;
        check_probability(&nu, "nu")?;
        if !values.is_positive() {
            return Err(Error::NonPositiveEntry);
        }
        Ok(Self { values, mu, nu })
    }

    /// Uniform weights on both axes.
    pub fn uniform(values: NonnegMatrix<T>) -> Result<Self> {
        let mu = vec![T::one() / T::of_usize(values.rows()); values.rows()];
        let nu = vec![T::one() / T::of_usize(values.cols()); values.cols()];
        Self::new(values, mu, nu)
    }

    pub fn values(&self) -> &NonnegMatrix<T> {
        &self.values
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    /// `φ(x) f(x, y) ψ(y)`.
    pub fn scaled(&self, phi: &[T], psi: &[T]) -> Result<Self> {
        Self::new(
            self.values.scale_rows_cols(phi, psi)?,
            self.mu.clone(),
            self.nu.clone(),
        )
    }

    /// Smallest `λ ≥ 1` with every value in `[1/λ, λ]`.
    pub fn log_bound(&self) -> T {
        let hi = self.values.max_entry();
        let lo = self.values.min_entry();
        hi.max(T::one() / lo).max(T::one())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridJson {
    mu: Vec<f64>,
    nu: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl GridFunction<f64> {
    /// Parses `{"mu": [...], "nu": [...], "values": [[...], ...]}`; weights are re-validated.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GridJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let values = NonnegMatrix::from_rows(raw.values)?;
        Self::new(values, raw.mu, raw.nu)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GridJson {
            mu: self.mu.clone(),
            nu: self.nu.clone(),
            values: self.values.to_rows(),
        })
        .expect("grid function serializes")
    }
}

/// `exp(Σ w_i log v_i)`.
pub fn geometric_mean<T: Scalar>(v: &[T], w: &[T]) -> Result<T> {
    if v.len() != w.len() {
        return Err(Error::Dimension("value and weight lengths differ".into()));
    }
    check_probability(w, "weights")?;
    if v.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::NonPositiveEntry);
    }
    Ok(compensated_sum(v.iter().zip(w).map(|(&x, &wi)| wi * x.ln())).exp())
}

/// Conditional expectation onto the row or the column variable.
pub fn conditional_expectation<T: Scalar>(f: &GridFunction<T>, axis: Axis) -> Vec<T> {
    let v = &f.values;
    match axis {
        Axis::Rows => (0..v.rows())
            .map(|i| compensated_sum(v.row(i).iter().zip(&f.nu).map(|(&x, &w)| w * x)))
            .collect(),
        Axis::Cols => (0..v.cols())
            .map(|j| compensated_sum((0..v.rows()).map(|i| f.mu[i] * v.get(i, j))))
            .collect(),
    }
}

/// `f = φ g ψ` with `g` doubly stochastic; gauge `gmean(ψ, ν) = 1`.
#[derive(Debug, Clone)]
pub struct FunctionalSinkhorn<T> {
    pub phi: Vec<T>,
    pub psi: Vec<T>,
    pub g: GridFunction<T>,
    pub iterations: usize,
    pub residual: T,
    /// Per-cycle Hilbert contraction factor `tanh²(δ/4)`.
    pub kappa: T,
}

impl<T: Scalar> FunctionalSinkhorn<T> {
    /// `gmean(φ, μ) · gmean(ψ, ν)`.
    pub fn scaling_mean(&self) -> T {
        let lp = compensated_sum(self.phi.iter().zip(&self.g.mu).map(|(&x, &w)| w * x.ln()));
        let lq = compensated_sum(self.psi.iter().zip(&self.g.nu).map(|(&x, &w)| w * x.ln()));
        (lp + lq).exp()
    }
}

pub fn functional_sinkhorn<T: Scalar>(
    f: &GridFunction<T>,
    tol: T,
    max_iter: usize,
) -> Result<FunctionalSinkhorn<T>> {
    functional_sinkhorn_from(f, &vec![T::one(); f.values.rows()], tol, max_iter)
}

/// Functional Sinkhorn started from an arbitrary positive initial ray `phi0`.
pub fn functional_sinkhorn_from<T: Scalar>(
    f: &GridFunction<T>,
    phi0: &[T],
    tol: T,
    max_iter: usize,
) -> Result<FunctionalSinkhorn<T>> {
    if phi0.len() != f.values.rows() {
        return Err(Error::Dimension("initial ray length".into()));
    }
    if phi0.iter().any(|&x| !(x > T::zero() && x.is_finite())) {
        return Err(Error::NonPositiveEntry);
    }
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let problem = Problem {
        f: &f.values,
        w_row: &f.mu,
        w_col: &f.nu,
    };
    let scaled = problem.solve(phi0.to_vec(), tol, max_iter)?;
    let residual = scaled.residual;
    let (mut phi, mut psi) = (scaled.row, scaled.col);
    let gauge = compensated_sum(psi.iter().zip(&f.nu).map(|(&x, &w)| w * x.ln())).exp();
    for x in &mut psi {
        *x /= gauge;
    }
    for x in &mut phi {
        *x *= gauge;
    }
    let inv_phi: Vec<T> = phi.iter().map(|&x| T::one() / x).collect();
    let inv_psi: Vec<T> = psi.iter().map(|&x| T::one() / x).collect();
    let g = GridFunction {
        values: f.values.scale_rows_cols(&inv_phi, &inv_psi)?,
        mu: f.mu.clone(),
        nu: f.nu.clone(),
    };
    Ok(FunctionalSinkhorn {
        phi,
        psi,
        g,
        iterations: scaled.iterations,
        residual,
        kappa: contraction_factor(f.values.max_entry(), f.values.min_entry()),
    })
}

/// Hilbert distances between successive `ψ` iterates over `cycles` cycles from `phi0`.
pub fn functional_hilbert_steps<T: Scalar>(
    f: &GridFunction<T>,
    phi0: &[T],
    cycles: usize,
) -> Result<Vec<T>> {
    let problem = Problem {
        f: &f.values,
        w_row: &f.mu,
        w_col: &f.nu,
    };
    let mut row = phi0.to_vec();
    let mut prev: Option<Vec<T>> = None;
    let mut out = Vec::with_capacity(cycles);
    for _ in 0..=cycles {
        let (next, col) = problem.cycle(&row);
        if let Some(p) = &prev {
            out.push(crate::scaling::hilbert_distance(p, &col)?);
        }
        prev = Some(col);
        row = next;
    }
    Ok(out)
}

/// `gmean(φ, μ) · gmean(ψ, ν)` from the functional Sinkhorn decomposition.
pub fn functional_scaling_mean<T: Scalar>(f: &GridFunction<T>, tol: T) -> Result<T> {
    Ok(functional_sinkhorn(f, tol, DEFAULT_MAX_ITER)?.scaling_mean())
}

/// Root `r > 0` of `Σ_i w_i a_i / (a_i + r b_i) = c`.
///
/// The left side decreases strictly from `1` at `r = 0` to `0` at infinity,
/// so the root is bracketed by geometric growth and then bisected down to
/// adjacent floating-point values (or `rel_tol`, whichever comes first).
pub(crate) fn ratio_root<T: Scalar>(w: &[T], a: &[T], b: &[T], c: T, rel_tol: T) -> Result<T> {
    let h = |r: T| {
        compensated_sum(
            w.iter()
                .zip(a)
                .zip(b)
                .map(|((&wi, &ai), &bi)| wi * ai / (ai + r * bi)),
        ) - c
    };
    let (mut lo, mut hi) = (T::one(), T::one());
    let mut guard = 0;
    while !(h(hi) < T::zero()) {
        hi = hi * T::of(2.0);
        guard += 1;
        if guard > 4000 || !hi.is_finite() {
            return Err(Error::BracketFailure);
        }
    }
    while !(h(lo) > T::zero()) {
        lo = lo / T::of(2.0);
        guard += 1;
        if guard > 4000 || !(lo > T::zero()) {
            return Err(Error::BracketFailure);
        }
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::of(2.0);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * lo {
            break;
        }
        if h(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::of(2.0))
}

/// Closed-form scaling mean of `f(x, y) = f0(x)` on a column block of mass `c`
/// and `f1(x)` on its complement. Returns `(scaling mean, r)`.
pub fn two_block_scaling_mean<T: Scalar>(
    f0: &[T],
    f1: &[T],
    mu: &[T],
    c: T,
    tol: T,
) -> Result<(T, T)> {
    if f0.len() != f1.len() || f0.len() != mu.len() {
        return Err(Error::Dimension(
            "f0, f1 and mu must have equal lengths".into(),
        ));
    }
    if !(c > T::zero() && c < T::one()) {
        return Err(Error::Domain(format!(
            "block mass c = {c} must lie in (0, 1)"
        )));
    }
    check_probability(mu, "mu")?;
    if f0.iter().chain(f1).any(|&x| !(x > T::zero())) {
        return Err(Error::NonPositiveEntry);
    }
    let r = ratio_root(mu, f0, f1, c, tol)?;
    let log_phi = compensated_sum(
        mu.iter()
            .zip(f0)
            .zip(f1)
            .map(|((&w, &a), &b)| w * (a + r * b).ln()),
    );
    let one = T::one();
    let log_sm = c * c.ln() + (one - c) * ((one - c) / r).ln() + log_phi;
    Ok((log_sm.exp(), r))
}

/// Grid function with uniform weights `1/k` whose values are cell averages
/// of `f` over `[0,1]²`, by `q × q` midpoint quadrature per cell.
///
/// Rows index `x`, columns index `y`.
pub fn discretize(
    f: impl Fn(f64, f64) -> f64,
    lambda: f64,
    k: usize,
    q: usize,
) -> Result<GridFunction<f64>> {
    if k == 0 || q == 0 {
        return Err(Error::Domain(
            "grid and quadrature sizes must be positive".into(),
        ));
    }
    let (lo, hi) = (1.0 / lambda, lambda);
    let h = 1.0 / (k * q) as f64;
    let mut samples = vec![0.0; q * q];
    let mut data = Vec::with_capacity(k * k);
    for p in 0..k {
        for s in 0..k {
            for a in 0..q {
                let x = ((p * q + a) as f64 + 0.5) * h;
                for b in 0..q {
                    let y = ((s * q + b) as f64 + 0.5) * h;
                    let v = f(x, y);
                    if !(v >= lo && v <= hi) {
                        return Err(Error::BoundsViolated { value: v, lambda });
                    }
                    samples[a * q + b] = v;
                }
            }
            data.push(compensated_sum(samples.iter().copied()) / (q * q) as f64);
        }
    }
    GridFunction::uniform(NonnegMatrix::new(k, k, data)?)
}
