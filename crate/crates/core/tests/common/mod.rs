#![allow(dead_code)]

use permascale::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[0, 1)`, each zeroed with probability `zero_prob`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, zero_prob: f64) -> Matrix {
    Matrix::from_fn(n, n, |_, _| {
        if rng.gen::<f64>() < zero_prob {
            0.0
        } else {
            rng.gen::<f64>()
        }
    })
    .unwrap()
}

/// Entries in `[1/lambda, lambda]`, log-uniform.
pub fn random_bounded(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lambda: f64) -> Matrix {
    let l = lambda.ln();
    Matrix::from_fn(rows, cols, |_, _| (rng.gen_range(-l..=l)).exp()).unwrap()
}

pub fn random_positive_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

pub fn random_probability(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut w: Vec<f64> = w.iter().map(|x| x / s).collect();
    // Push the rounding residue into the largest weight.
    let r = 1.0 - w.iter().sum::<f64>();
    let k = (0..n).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap();
    w[k] += r;
    w
}

/// Permanent by dynamic programming over column subsets: row `popcount(S)`
/// is matched into the columns of `S`.
pub fn permanent_oracle(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut dp = vec![0.0f64; 1 << n];
    dp[0] = 1.0;
    for mask in 1usize..(1 << n) {
        let i = mask.count_ones() as usize - 1;
        let mut s = 0.0;
        let mut m = mask;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            s += a.get(i, j) * dp[mask & !(1 << j)];
            m &= m - 1;
        }
        dp[mask] = s;
    }
    dp[(1 << n) - 1]
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn gmean(v: &[f64]) -> f64 {
    (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp()
}
