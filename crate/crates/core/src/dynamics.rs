//! Measure-preserving maps of `[0, 1)`, orbits, and dynamically defined matrices.
//!
//! Everything here works in `f64`; orbit points are inputs to sampled
//! functions rather than quantities that are averaged in the generic scalar.
//!
//! The doubling map is chaotic in floating point: after about 50 steps the
//! orbit has lost every bit of the starting point (and eventually collapses
//! to 0). Use it only for short orbits; long experiments should use rotations.

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::NonnegMatrix;

/// Default rotation number for the column map `T`.
pub const DEFAULT_ALPHA_T: f64 = std::f64::consts::SQRT_2 - 1.0;
/// Default rotation number for the row map `S`.
pub const DEFAULT_ALPHA_S: f64 = 0.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalMap {
    /// `x ↦ frac(x + alpha)`.
    Rotation { alpha: f64 },
    /// `x ↦ frac(2x)`.
    Doubling,
    /// `x ↦ frac(x + 1/k)` on the grid `{0, 1/k, ..., (k-1)/k}`.
    Cyclic { k: usize },
}

impl IntervalMap {
    pub fn rotation(alpha: f64) -> Result<Self> {
        let map = IntervalMap::Rotation { alpha };
        map.validate()?;
        Ok(map)
    }

    pub fn cyclic(k: usize) -> Result<Self> {
        let map = IntervalMap::Cyclic { k };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            IntervalMap::Rotation { alpha } if !(alpha > 0.0 && alpha < 1.0) => Err(Error::Domain(
                format!("rotation number {alpha} is not in (0, 1)"),
            )),
            IntervalMap::Cyclic { k: 0 } => Err(Error::Domain("cyclic map needs k >= 1".into())),
            _ => Ok(()),
        }
    }

    fn check_start(&self, x0: f64) -> Result<()> {
        self.validate()?;
        if !(0.0..1.0).contains(&x0) {
            return Err(Error::Domain(format!(
                "starting point {x0} is not in [0, 1)"
            )));
        }
        if let IntervalMap::Cyclic { k } = *self {
            grid_index(x0, k)?;
        }
        Ok(())
    }

    /// One application of the map.
    pub fn apply(&self, x: f64) -> Result<f64> {
        Ok(orbit(*self, x, 2)?[1])
    }
}

fn grid_index(x: f64, k: usize) -> Result<usize> {
    let scaled = x * k as f64;
    let idx = scaled.round();
    if (scaled - idx).abs() > 1e-9 * k as f64 || idx >= k as f64 {
        return Err(Error::Domain(format!(
            "{x} is not on the grid with {k} points"
        )));
    }
    Ok(idx as usize)
}

/// `(x0, T x0, ..., T^{n-1} x0)`.
///
/// Rotations carry the position as an unevaluated sum `hi + lo`, so rounding
/// errors do not accumulate along the orbit.
pub fn orbit(map: IntervalMap, x0: f64, n: usize) -> Result<Vec<f64>> {
    map.check_start(x0)?;
    let mut out = Vec::with_capacity(n);
    match map {
        IntervalMap::Rotation { alpha } => {
            let (mut hi, mut lo) = (x0, 0.0);
            for _ in 0..n {
                out.push(frac(hi + lo));
                let (s, e) = two_sum(hi, alpha);
                let (s, e2) = two_sum(s, e + lo);
                hi = s;
                lo = e2;
                if hi >= 1.0 {
                    // Subtracting 1 from a value in [1, 2) is exact.
                    hi -= 1.0;
                    let (s, e) = two_sum(hi, lo);
                    hi = s;
                    lo = e;
                }
            }
        }
        IntervalMap::Doubling => {
            let mut x = x0;
            for _ in 0..n {
                out.push(x);
                x = frac(2.0 * x);
            }
        }
        IntervalMap::Cyclic { k } => {
            let start = grid_index(x0, k)?;
            out.extend((0..n).map(|t| ((start + t) % k) as f64 / k as f64));
        }
    }
    Ok(out)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    // Tiny negative inputs round up to exactly 1.0.
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// The `n × n` matrix with entry `(i, j) = f(T^j x, S^i y)`.
pub fn dynamical_matrix(
    f: impl Fn(f64, f64) -> f64,
    t: IntervalMap,
    s: IntervalMap,
    x: f64,
    y: f64,
    n: usize,
) -> Result<NonnegMatrix<f64>> {
    if n == 0 {
        return Err(Error::Domain("matrix order must be at least 1".into()));
    }
    let xs = orbit(t, x, n)?;
    let ys = orbit(s, y, n)?;
    NonnegMatrix::from_fn(n, n, |i, j| f(xs[j], ys[i]))
}

/// `(1/n) Σ_{i<n} φ(T^i x)`.
pub fn birkhoff_average(
    map: IntervalMap,
    phi: impl Fn(f64) -> f64,
    x: f64,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("average over an empty orbit".into()));
    }
    let xs = orbit(map, x, n)?;
    Ok(compensated_sum(xs.into_iter().map(phi)) / n as f64)
}

/// `(1/n²) Σ_{i,j<n} h(T^i x, S^j y)`.
pub fn ergodic_average_2d(
    h: impl Fn(f64, f64) -> f64,
    t: IntervalMap,
    s: IntervalMap,
    x: f64,
    y: f64,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("average over an empty orbit".into()));
    }
    let xs = orbit(t, x, n)?;
    let ys = orbit(s, y, n)?;
    let mut acc = CompensatedSum::new();
    for &a in &xs {
        for &b in &ys {
            acc.add(h(a, b));
        }
    }
    Ok(acc.value() / (n * n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_examples() {
        assert_eq!(
            orbit(IntervalMap::Cyclic { k: 2 }, 0.0, 4).unwrap(),
            vec![0.0, 0.5, 0.0, 0.5]
        );
        assert_eq!(
            orbit(
                IntervalMap::Rotation {
                    alpha: DEFAULT_ALPHA_T
                },
                0.3,
                1
            )
            .unwrap(),
            vec![0.3]
        );
        let d = orbit(IntervalMap::Doubling, 1.0 / 3.0, 3).unwrap();
        assert!((d[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((d[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((d[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn default_alpha_s_is_sqrt3_minus_one() {
        assert!((DEFAULT_ALPHA_S - (3f64.sqrt() - 1.0)).abs() < 1e-16);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(IntervalMap::rotation(1.5), Err(Error::Domain(_))));
        assert!(matches!(IntervalMap::cyclic(0), Err(Error::Domain(_))));
        assert!(matches!(
            orbit(IntervalMap::Doubling, 1.0, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            orbit(IntervalMap::Cyclic { k: 4 }, 0.3, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            dynamical_matrix(
                |_, _| 1.0,
                IntervalMap::Doubling,
                IntervalMap::Doubling,
                0.1,
                0.1,
                0
            ),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rotation_orbit_has_no_drift() {
        // Compare against an exact integer count of whole turns: frac(x0 + kα)
        // computed directly in double-double from k·α.
        let alpha = DEFAULT_ALPHA_T;
        let n = 1_000_000;
        let xs = orbit(IntervalMap::Rotation { alpha }, 0.25, n).unwrap();
        for &k in &[1usize, 1000, 123_457, n - 1] {
            let p = k as f64 * alpha;
            let e = (k as f64).mul_add(alpha, -p);
            let direct = frac(frac(p) + e + 0.25);
            assert!(
                (xs[k] - direct).abs() < 1e-12,
                "k={k}: {} vs {}",
                xs[k],
                direct
            );
        }
    }

    #[test]
    fn dynamical_matrix_layout() {
        let t = IntervalMap::Rotation {
            alpha: DEFAULT_ALPHA_T,
        };
        let s = IntervalMap::Rotation {
            alpha: DEFAULT_ALPHA_S,
        };
        let f = |x: f64, y: f64| 1.0 + x + 2.0 * y;
        let m = dynamical_matrix(f, t, s, 0.1, 0.2, 1).unwrap();
        assert_eq!(m.to_rows(), vec![vec![f(0.1, 0.2)]]);
        let g = |x: f64, _y: f64| 2.0 + x;
        let m = dynamical_matrix(g, t, s, 0.1, 0.2, 5).unwrap();
        let xs = orbit(t, 0.1, 5).unwrap();
        for i in 0..5 {
            for (j, &x) in xs.iter().enumerate() {
                assert_eq!(m.get(i, j), g(x, 0.0));
            }
        }
    }

    #[test]
    fn birkhoff_examples() {
        let r = IntervalMap::Rotation {
            alpha: DEFAULT_ALPHA_T,
        };
        assert_eq!(birkhoff_average(r, |_| 3.5, 0.1, 100).unwrap(), 3.5);
        let half =
            birkhoff_average(r, |x| if x < 0.5 { 1.0 } else { 0.0 }, 0.0, 1_000_000).unwrap();
        assert!((half - 0.5).abs() < 2e-3);
        let phi = |x: f64| x * x;
        let avg = birkhoff_average(IntervalMap::Cyclic { k: 8 }, phi, 0.0, 8).unwrap();
        let grid: f64 = (0..8).map(|i| phi(i as f64 / 8.0)).sum::<f64>() / 8.0;
        assert!((avg - grid).abs() < 1e-15);
    }
}
