mod common;

use common::*;
use permascale::numeric::vdw_upper_constant;
use permascale::permanent::DEFAULT_CAP;
use permascale::scaling::{sinkhorn_hilbert_steps, spectral_radius_cross_check};
use permascale::{
    contraction_factor, kron, permanental_mean, scaling_mean, sinkhorn, spectral_radius, Matrix,
};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn smean(a: &Matrix) -> f64 {
    scaling_mean(a, TOL).unwrap()
}

#[test]
fn generalized_van_der_waerden_bounds() {
    let mut r = rng(31);
    for n in 2..=8 {
        let upper = vdw_upper_constant(n);
        assert!((upper - n as f64 * factorial(n).powf(-1.0 / n as f64)).abs() < 1e-12);
        for t in 0..1000 {
            let a = random_matrix(&mut r, n, if t % 3 == 0 { 0.4 } else { 0.0 });
            let sm = smean(&a);
            let pm = permanental_mean(&a, DEFAULT_CAP).unwrap();
            assert!(pm - sm >= -1e-10, "n={n} t={t}: pmean {pm} < smean {sm}");
            assert!(upper * sm - pm >= -1e-10, "n={n} t={t}");
        }
    }
}

#[test]
fn lower_bound_is_attained_on_rank_one_and_singular() {
    let mut r = rng(32);
    for n in 2..=8 {
        let u = random_positive_vec(&mut r, n, 0.1, 5.0);
        let v = random_positive_vec(&mut r, n, 0.1, 5.0);
        let a = Matrix::from_fn(n, n, |i, j| u[i] * v[j]).unwrap();
        let (sm, pm) = (smean(&a), permanental_mean(&a, DEFAULT_CAP).unwrap());
        assert!((pm - sm).abs() <= 1e-8 * pm);
        // A zero column makes both means vanish.
        let z = Matrix::from_fn(n, n, |i, j| if j == 0 { 0.0 } else { u[i] * v[j] }).unwrap();
        assert_eq!(smean(&z), 0.0);
        assert_eq!(permanental_mean(&z, DEFAULT_CAP).unwrap(), 0.0);
    }
}

#[test]
fn upper_bound_is_attained_on_scaled_permutations() {
    let mut r = rng(33);
    for n in 2..=8 {
        let p = random_permutation(&mut r, n);
        let d = random_positive_vec(&mut r, n, 0.1, 5.0);
        let a = Matrix::from_fn(n, n, |i, j| if p[i] == j { d[i] } else { 0.0 }).unwrap();
        let (sm, pm) = (smean(&a), permanental_mean(&a, DEFAULT_CAP).unwrap());
        assert!((pm - vdw_upper_constant(n) * sm).abs() <= 1e-8 * pm);
        assert!((sm - gmean(&d) / n as f64).abs() <= 1e-12 * sm);
    }
}

#[test]
fn two_by_two_closed_form() {
    let mut r = rng(34);
    for _ in 0..1000 {
        let v = random_positive_vec(&mut r, 4, 0.01, 10.0);
        let a = Matrix::new(2, 2, v.clone()).unwrap();
        let expect = ((v[0] * v[3]).sqrt() + (v[1] * v[2]).sqrt()) / 2.0;
        assert!((smean(&a) - expect).abs() <= 1e-10);
    }
}

#[test]
fn kronecker_multiplicativity() {
    let mut r = rng(35);
    for _ in 0..100 {
        let a = random_bounded(&mut r, 3, 3, 5.0);
        let b = random_bounded(&mut r, 3, 3, 5.0);
        assert!((smean(&kron(&a, &b)) - smean(&a) * smean(&b)).abs() <= 1e-8);
    }
}

#[test]
fn product_and_spectral_bounds() {
    let mut r = rng(36);
    for n in 2..=6 {
        for _ in 0..50 {
            let a = random_bounded(&mut r, n, n, 4.0);
            let b = random_bounded(&mut r, n, n, 4.0);
            let ab = a.matmul(&b).unwrap();
            assert!(smean(&ab) >= n as f64 * smean(&a) * smean(&b) - 1e-10);
            let rho = spectral_radius(&a, 1e-13, 100_000).unwrap();
            assert!(smean(&a) <= rho / n as f64 + 1e-10);
            let (lhs, rhs) = spectral_radius_cross_check(&a, 1e-13).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * lhs);
        }
    }
}

/// `(1/n) gmean(Ay)/gmean(y) ≥ smean(A)` for every positive `y`.
#[test]
fn infimum_formulation_is_a_lower_envelope() {
    let mut r = rng(37);
    for n in 2..=6 {
        let a = random_bounded(&mut r, n, n, 4.0);
        let sm = smean(&a);
        let best = (0..200)
            .map(|_| {
                let y = random_positive_vec(&mut r, n, 0.01, 10.0);
                gmean(&a.matvec(&y)) / gmean(&y) / n as f64
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best >= sm - 1e-10);
        // The column scaling of the Sinkhorn decomposition attains it.
        let f = sinkhorn(&a, TOL, 100_000).unwrap();
        let y: Vec<f64> = f.e.iter().map(|x| 1.0 / x).collect();
        let at = gmean(&a.matvec(&y)) / gmean(&y) / n as f64;
        assert!((at - sm).abs() <= 1e-10);
    }
}

#[test]
fn measured_contraction_respects_certificate() {
    let mut r = rng(38);
    for n in 2..=10 {
        let a = random_bounded(&mut r, n, n, 10.0);
        let kappa = contraction_factor(a.max_entry(), a.min_entry());
        let steps = sinkhorn_hilbert_steps(&a, 30).unwrap();
        for w in steps.windows(2) {
            if w[0] < 1e-11 {
                break;
            }
            assert!(
                w[1] <= kappa * w[0] * (1.0 + 1e-9) + 1e-14,
                "{} > {kappa} * {}",
                w[1],
                w[0]
            );
        }
    }
}

#[test]
fn factorization_reconstructs_input() {
    let mut r = rng(39);
    for n in 1..=8 {
        let a = random_matrix(&mut r, n, 0.0);
        let f = sinkhorn(&a, TOL, 100_000).unwrap();
        assert!(f.residual < TOL);
        let b = f.reconstruct().unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).abs() <= 1e-14 * x.max(1.0));
        }
        for s in f.s.row_sums().iter().chain(&f.s.col_sums()) {
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }
}

fn positive_strategy(max_n: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0.05f64..20.0, n * n)
            .prop_map(move |d| Matrix::new(n, n, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn concavity(pair in (2usize..=6).prop_flat_map(|n| (
        proptest::collection::vec(0.05f64..20.0, n * n),
        proptest::collection::vec(0.05f64..20.0, n * n),
        Just(n),
    )), t in 0.0f64..=1.0) {
        let (a, b, n) = pair;
        let a = Matrix::new(n, n, a).unwrap();
        let b = Matrix::new(n, n, b).unwrap();
        let mix = a.lerp(&b, t).unwrap();
        prop_assert!(smean(&mix) >= t * smean(&a) + (1.0 - t) * smean(&b) - 1e-8);
    }

    #[test]
    fn homogeneity_and_permutation_symmetry(a in positive_strategy(7), seed in any::<u64>()) {
        let n = a.rows();
        let mut r = rng(seed);
        let d = random_positive_vec(&mut r, n, 0.1, 10.0);
        let p = random_permutation(&mut r, n);
        let id: Vec<usize> = (0..n).collect();
        let dap = a.scale_rows_cols(&d, &vec![1.0; n]).unwrap().permuted(&id, &p).unwrap();
        prop_assert!(rel_err(smean(&dap), gmean(&d) * smean(&a)) <= 1e-10);
        prop_assert!(rel_err(smean(&a.transpose()), smean(&a)) <= 1e-10);
    }

    #[test]
    fn scaling_mean_is_internal(a in positive_strategy(7)) {
        let sm = smean(&a);
        prop_assert!(sm >= a.min_entry() * (1.0 - 1e-12) && sm <= a.max_entry() * (1.0 + 1e-12));
    }

    #[test]
    fn single_precision_tracks_double(a in positive_strategy(5)) {
        let sm32 = scaling_mean(&a.cast::<f32>(), 1e-5).unwrap();
        prop_assert!(rel_err(sm32 as f64, smean(&a)) <= 1e-4);
    }
}
