//! Symmetric and Muirhead means, their permanental matrices, and the
//! Halász–Székely and functional Muirhead limits.

use crate::error::{Error, Result};
use crate::funcspace::{functional_sinkhorn, ratio_root, GridFunction};
use crate::numeric::{compensated_sum, ln_factorial};
use crate::permanent::permanental_mean;
use crate::{NonnegMatrix, Scalar};

const RENORMALIZE_ABOVE: f64 = 1e150;

/// Elementary symmetric values `E_k = mantissas[k] · exp(exponent_log)`,
/// stored with one common scale so every mantissa lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCoefficients<T> {
    pub mantissas: Vec<T>,
    pub exponent_log: T,
    pub degree: usize,
}

impl<T: Scalar> ScaledCoefficients<T> {
    /// `E_k`, possibly overflowing to infinity.
    pub fn value(&self, k: usize) -> T {
        self.mantissas[k] * self.exponent_log.exp()
    }

    /// `log E_k`, `-∞` for a vanishing coefficient.
    pub fn ln_value(&self, k: usize) -> T {
        self.mantissas[k].ln() + self.exponent_log
    }
}

fn check_nonnegative<T: Scalar>(z: &[T]) -> Result<()> {
    if z.iter().any(|&x| !(x >= T::zero() && x.is_finite())) {
        return Err(Error::NegativeEntry);
    }
    Ok(())
}

fn threshold<T: Scalar>() -> T {
    T::of(RENORMALIZE_ABOVE).min(T::max_value().sqrt())
}

/// Runs `e_k ← e_k + z_i e_{k-1}` up to degree `top`, rescaling by the
/// running maximum whenever it exceeds the threshold. Returns the
/// coefficients and the accumulated log scale.
fn recurrence<T: Scalar>(z: &[T], top: usize) -> (Vec<T>, T) {
    let mut e = vec![T::zero(); top + 1];
    e[0] = T::one();
    let mut log_scale = T::zero();
    let limit = threshold::<T>();
    for (i, &zi) in z.iter().enumerate() {
        let hi = (i + 1).min(top);
        for k in (1..=hi).rev() {
            let prev = e[k - 1];
            e[k] += zi * prev;
        }
        let m = e[..=hi].iter().fold(T::zero(), |a, &b| a.max(b));
        if m > limit {
            for x in &mut e[..=hi] {
                *x /= m;
            }
            log_scale += m.ln();
        }
    }
    (e, log_scale)
}

/// All of `E_0, ..., E_n` of a nonnegative vector.
pub fn elementary_symmetric<T: Scalar>(z: &[T]) -> Result<ScaledCoefficients<T>> {
    check_nonnegative(z)?;
    let (mut e, mut log_scale) = recurrence(z, z.len());
    let m = e.iter().fold(T::zero(), |a, &b| a.max(b));
    for x in &mut e {
        *x /= m;
    }
    log_scale += m.ln();
    Ok(ScaledCoefficients {
        mantissas: e,
        exponent_log: log_scale,
        degree: z.len(),
    })
}

/// `log E_k(z)`, `-∞` when it vanishes.
///
/// The vector is first multiplied by the `t > 0` with `Σ t z_i / (1 + t z_i) = k`,
/// which makes `E_k(tz)` the dominant coefficient of `Π(1 + t z_i)`; the
/// recurrence then never loses it to underflow, even when the extreme
/// coefficients differ from it by thousands of orders of magnitude.
pub fn log_elementary_symmetric<T: Scalar>(z: &[T], k: usize) -> Result<T> {
    check_nonnegative(z)?;
    if k > z.len() {
        return Err(Error::Index(format!(
            "degree {k} exceeds length {}",
            z.len()
        )));
    }
    if k == 0 {
        return Ok(T::zero());
    }
    let pos: Vec<T> = z.iter().copied().filter(|&x| x > T::zero()).collect();
    if k > pos.len() {
        return Ok(T::neg_infinity());
    }
    if k == pos.len() {
        return Ok(compensated_sum(pos.iter().map(|x| x.ln())));
    }
    let ones = vec![T::one(); pos.len()];
    let r = ratio_root(&ones, &pos, &ones, T::of_usize(k), T::of(1e-6))?;
    let t = T::one() / r;
    let tilted: Vec<T> = pos.iter().map(|&x| x * t).collect();
    let (e, log_scale) = recurrence(&tilted, k);
    Ok(e[k].ln() + log_scale - T::of_usize(k) * t.ln())
}

fn ln_binomial<T: Scalar>(n: usize, k: usize) -> T {
    T::of(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}

/// `(E_k(z) / C(n, k))^{1/k}`.
pub fn symmetric_mean<T: Scalar>(z: &[T], k: usize) -> Result<T> {
    check_nonnegative(z)?;
    if k == 0 || k > z.len() {
        return Err(Error::Index(format!("k = {k} outside 1..={}", z.len())));
    }
    let le = log_elementary_symmetric(z, k)?;
    Ok(((le - ln_binomial::<T>(z.len(), k)) / T::of_usize(k)).exp())
}

/// `k` rows equal to `z` above `n - k` rows of ones.
pub fn rep_matrix<T: Scalar>(z: &[T], k: usize) -> Result<NonnegMatrix<T>> {
    let n = z.len();
    if k == 0 || k > n {
        return Err(Error::Index(format!("k = {k} outside 1..={n}")));
    }
    check_nonnegative(z)?;
    NonnegMatrix::from_fn(n, n, |i, j| if i < k { z[j] } else { T::one() })
}

/// The matrix with rows `z_j^{α_i}` (`0^0 = 1`).
pub fn muirhead_matrix<T: Scalar>(z: &[T], alpha: &[T]) -> Result<NonnegMatrix<T>> {
    if z.len() != alpha.len() {
        return Err(Error::Dimension(format!(
            "z has length {}, alpha has length {}",
            z.len(),
            alpha.len()
        )));
    }
    check_nonnegative(z)?;
    check_nonnegative(alpha)?;
    let n = z.len();
    NonnegMatrix::from_fn(n, n, |i, j| {
        if alpha[i] == T::zero() {
            T::one()
        } else {
            z[j].powf(alpha[i])
        }
    })
}

/// `pmean(M_α(z))^{n / Σα}`.
pub fn muirhead_mean<T: Scalar>(z: &[T], alpha: &[T], cap: usize) -> Result<T> {
    let m = muirhead_matrix(z, alpha)?;
    let total = compensated_sum(alpha.iter().copied());
    if total == T::zero() {
        return Err(Error::AllZeroAlpha);
    }
    let pm = permanental_mean(&m, cap)?;
    Ok(pm.powf(T::of_usize(z.len()) / total))
}

/// The Halász–Székely limit of `sym_k` as `k/n → c` for a process with
/// value distribution `(g, w)`. Returns `(limit, r)` where `r` solves
/// `Σ w_i g_i / (g_i + r) = c`.
pub fn hs_limit<T: Scalar>(g: &[T], w: &[T], c: T) -> Result<(T, T)> {
    if g.len() != w.len() {
        return Err(Error::Dimension("g and w must have equal lengths".into()));
    }
    if !(c > T::zero() && c < T::one()) {
        return Err(Error::Domain(format!("c = {c} must lie in (0, 1)")));
    }
    GridFunction::new(
        NonnegMatrix::new(g.len(), 1, g.to_vec())?,
        w.to_vec(),
        vec![T::one()],
    )?;
    let ones = vec![T::one(); g.len()];
    let r = ratio_root(w, g, &ones, c, T::epsilon())?;
    let one = T::one();
    let log_sum = compensated_sum(g.iter().zip(w).map(|(&gi, &wi)| wi * (gi + r).ln()));
    let log_limit = c.ln() + (one - c) / c * ((one - c) / r).ln() + log_sum / c;
    Ok((log_limit.exp(), r))
}

/// `smean(g_i^{h_j})^{1 / Σ ν_j h_j}` for the grid function `f_ij = g_i^{h_j}`.
pub fn muirhead_limit<T: Scalar>(g: &[T], mu: &[T], h: &[T], nu: &[T], tol: T) -> Result<T> {
    check_nonnegative(h)?;
    if h.len() != nu.len() {
        return Err(Error::Dimension("h and nu must have equal lengths".into()));
    }
    let mean_h = compensated_sum(h.iter().zip(nu).map(|(&a, &b)| a * b));
    if !(mean_h > T::zero()) {
        return Err(Error::ZeroMeanExponent);
    }
    if g.iter().any(|&x| !(x > T::zero() && x.is_finite())) {
        return Err(Error::NonPositiveEntry);
    }
    let values = NonnegMatrix::from_fn(g.len(), h.len(), |i, j| g[i].powf(h[j]))?;
    let f = GridFunction::new(values, mu.to_vec(), nu.to_vec())?;
    let sm = functional_sinkhorn(&f, tol, crate::funcspace::DEFAULT_MAX_ITER)?.scaling_mean();
    Ok(sm.powf(T::one() / mean_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::two_block_scaling_mean;

    #[test]
    fn elementary_symmetric_examples() {
        let e = elementary_symmetric(&[1.0f64, 2.0, 3.0]).unwrap();
        let vals: Vec<f64> = (0..=3).map(|k| e.value(k)).collect();
        for (v, x) in vals.iter().zip([1.0, 6.0, 11.0, 6.0]) {
            assert!((v - x).abs() < 1e-12 * x);
        }
        assert!(e.mantissas.iter().all(|&m| (0.0..=1.0).contains(&m)));
        let e = elementary_symmetric(&[5.0f64]).unwrap();
        assert!((e.value(0) - 1.0).abs() < 1e-15 && (e.value(1) - 5.0).abs() < 1e-14);
        let e = elementary_symmetric(&[1.0f64; 10]).unwrap();
        let mut binom = 1.0;
        for k in 0..=10 {
            assert!((e.value(k) - binom).abs() < 1e-11 * binom);
            binom = binom * (10 - k) as f64 / (k + 1) as f64;
        }
        assert!(matches!(
            elementary_symmetric(&[1.0f64, -1.0]),
            Err(Error::NegativeEntry)
        ));
    }

    #[test]
    fn elementary_symmetric_survives_huge_values() {
        let z = vec![1e200; 50];
        let e = elementary_symmetric(&z).unwrap();
        let expect = 50.0 * 200.0 * 10f64.ln();
        assert!((e.ln_value(50) - expect).abs() < 1e-9 * expect);
        // Low degrees sit far below the common scale; the tilted route recovers them.
        assert_eq!(e.mantissas[1], 0.0);
        let l1 = log_elementary_symmetric(&z, 1).unwrap();
        assert!((l1 - (50f64.ln() + 200.0 * 10f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn tilted_log_matches_full_recurrence() {
        let z: Vec<f64> = (1..=30)
            .map(|i| (i as f64 * 0.37).sin().abs() + 0.1)
            .collect();
        let e = elementary_symmetric(&z).unwrap();
        for k in 1..=30 {
            let a = log_elementary_symmetric(&z, k).unwrap();
            assert!(
                (a - e.ln_value(k)).abs() < 1e-12 * a.abs().max(1.0),
                "k={k}"
            );
        }
        assert_eq!(
            log_elementary_symmetric(&[0.0f64, 1.0], 2).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(
            log_elementary_symmetric(&[0.0f64, 2.0], 1).unwrap(),
            2f64.ln()
        );
    }

    #[test]
    fn symmetric_mean_examples() {
        let z = [1.0f64, 2.0, 3.0];
        assert!((symmetric_mean(&z, 1).unwrap() - 2.0).abs() < 1e-14);
        assert!((symmetric_mean(&z, 3).unwrap() - 6f64.cbrt()).abs() < 1e-14);
        assert!((symmetric_mean(&z, 2).unwrap() - (11.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!(matches!(symmetric_mean(&z, 0), Err(Error::Index(_))));
        assert!(matches!(symmetric_mean(&z, 4), Err(Error::Index(_))));
    }

    #[test]
    fn symmetric_mean_of_a_long_constant_vector() {
        let z = vec![2.5f64; 10_000];
        for k in [1, 3000, 5000, 9999, 10_000] {
            assert!((symmetric_mean(&z, k).unwrap() - 2.5).abs() < 1e-10);
        }
    }

    #[test]
    fn rep_matrix_examples() {
        assert_eq!(
            rep_matrix(&[1.0f64, 2.0], 1).unwrap().to_rows(),
            vec![vec![1.0, 2.0], vec![1.0, 1.0]]
        );
        assert_eq!(
            rep_matrix(&[1.0f64, 2.0], 2).unwrap().to_rows(),
            vec![vec![1.0, 2.0]; 2]
        );
        let pm = permanental_mean(&rep_matrix(&[1.0f64, 2.0, 3.0], 2).unwrap(), 26).unwrap();
        assert!((pm.powf(1.5) - (11.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(matches!(rep_matrix(&[1.0f64], 2), Err(Error::Index(_))));
    }

    #[test]
    fn muirhead_examples() {
        let z = [1.5, 2.0, 4.0, 0.5];
        let am = z.iter().sum::<f64>() / 4.0;
        let gm = z.iter().product::<f64>().powf(0.25);
        assert!((muirhead_mean(&z, &[1.0, 0.0, 0.0, 0.0], 26).unwrap() - am).abs() < 1e-13);
        assert!((muirhead_mean(&z, &[1.0; 4], 26).unwrap() - gm).abs() < 1e-13);
        let m = muirhead_mean(&[1.0f64, 2.0], &[2.0, 1.0], 26).unwrap();
        assert!((m - 3f64.cbrt()).abs() < 1e-14);
        assert!(matches!(
            muirhead_mean(&z, &[0.0; 4], 26),
            Err(Error::AllZeroAlpha)
        ));
        assert!(matches!(
            muirhead_mean(&[1.0f64; 5], &[1.0; 5], 4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn hs_limit_examples() {
        let (l, r) = hs_limit(&[3.0f64; 4], &[0.25; 4], 0.3).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
        assert!((r - 3.0 * 0.7 / 0.3).abs() < 1e-12);
        let (l, r) = hs_limit(&[1.0f64, 2.0], &[0.5, 0.5], 0.5).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let closed = (4.0 + 3.0 * 2f64.sqrt()) / (4.0 * 2f64.sqrt());
        assert!((l - closed).abs() < 1e-13);
        let (sm, _) =
            two_block_scaling_mean(&[1.0f64, 2.0], &[1.0, 1.0], &[0.5, 0.5], 0.5, 1e-15).unwrap();
        assert!((l - sm.powf(2.0)).abs() < 1e-12);
    }

    #[test]
    fn muirhead_limit_examples() {
        let g = [1.0, 2.0, 5.0];
        let mu = [0.2, 0.5, 0.3];
        let gm: f64 = g
            .iter()
            .zip(&mu)
            .map(|(x, w)| w * f64::ln(*x))
            .sum::<f64>()
            .exp();
        let l = muirhead_limit(&g, &mu, &[1.0, 1.0], &[0.4, 0.6], 1e-13).unwrap();
        assert!((l - gm).abs() < 1e-12);
        let l = muirhead_limit(&[2.5f64; 3], &mu, &[0.5, 3.0], &[0.4, 0.6], 1e-13).unwrap();
        assert!((l - 2.5).abs() < 1e-12);
        let (hs, _) = hs_limit(&g, &mu, 0.3).unwrap();
        let l = muirhead_limit(&g, &mu, &[1.0, 0.0], &[0.3, 0.7], 1e-14).unwrap();
        assert!((l - hs).abs() < 1e-10);
        assert!(matches!(
            muirhead_limit(&g, &mu, &[0.0, 0.0], &[0.5, 0.5], 1e-12),
            Err(Error::ZeroMeanExponent)
        ));
    }
}
