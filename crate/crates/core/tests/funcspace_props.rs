mod common;

use common::*;
use permascale::funcspace::functional_hilbert_steps;
use permascale::{
    certified_iteration_budget, conditional_expectation, contraction_factor,
    functional_scaling_mean, functional_sinkhorn, functional_sinkhorn_from, geometric_mean,
    two_block_scaling_mean, Axis, Grid, Matrix,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn random_grid(r: &mut ChaCha8Rng, rows: usize, cols: usize, lambda: f64) -> Grid {
    let values = random_bounded(r, rows, cols, lambda);
    let mu = random_probability(r, rows);
    let nu = random_probability(r, cols);
    Grid::new(values, mu, nu).unwrap()
}

#[test]
fn sinkhorn_converges_within_certified_budget() {
    let mut r = rng(41);
    for _ in 0..100 {
        let lambda = r.gen_range(1.5..10.0);
        let f = random_grid(&mut r, 20, 20, lambda);
        let v = f.values();
        let fs = functional_sinkhorn(&f, TOL, 100_000).unwrap();
        let delta = 2.0 * (v.max_entry() / v.min_entry()).ln();
        let budget = certified_iteration_budget(fs.kappa, delta, TOL);
        assert!(fs.residual <= TOL);
        assert!(fs.iterations <= budget, "{} > {budget}", fs.iterations);

        for e in conditional_expectation(&fs.g, Axis::Rows)
            .iter()
            .chain(&conditional_expectation(&fs.g, Axis::Cols))
        {
            assert!((e - 1.0).abs() <= TOL);
        }
        let back = fs.g.scaled(&fs.phi, &fs.psi).unwrap();
        for (x, y) in v.data().iter().zip(back.values().data()) {
            assert!((x - y).abs() <= 4.0 * f64::EPSILON * x);
        }
        let gauge = geometric_mean(&fs.psi, f.nu()).unwrap();
        assert!((gauge - 1.0).abs() <= 1e-13);

        for _ in 0..3 {
            let phi0 = random_positive_vec(&mut r, 20, 1e-3, 1e3);
            let other = functional_sinkhorn_from(&f, &phi0, TOL, 100_000).unwrap();
            for (x, y) in fs.g.values().data().iter().zip(other.g.values().data()) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn measured_contraction_respects_kappa() {
    let mut r = rng(42);
    for _ in 0..30 {
        let f = random_grid(&mut r, 12, 9, 10.0);
        let kappa = contraction_factor(f.values().max_entry(), f.values().min_entry());
        let phi0 = random_positive_vec(&mut r, 12, 0.1, 10.0);
        let steps = functional_hilbert_steps(&f, &phi0, 25).unwrap();
        for w in steps.windows(2) {
            if w[0] < 1e-11 {
                break;
            }
            assert!(w[1] <= kappa * w[0] * (1.0 + 1e-9) + 1e-14);
        }
    }
}

#[test]
fn homogeneity_monotonicity_and_am_gm() {
    let mut r = rng(43);
    for _ in 0..100 {
        let (m, n) = (r.gen_range(1..8), r.gen_range(1..8));
        let f = random_grid(&mut r, m, n, 5.0);
        let sm = functional_scaling_mean(&f, TOL).unwrap();
        let phi = random_positive_vec(&mut r, m, 0.1, 10.0);
        let psi = random_positive_vec(&mut r, n, 0.1, 10.0);
        let scaled = functional_scaling_mean(&f.scaled(&phi, &psi).unwrap(), TOL).unwrap();
        let expect =
            geometric_mean(&phi, f.mu()).unwrap() * sm * geometric_mean(&psi, f.nu()).unwrap();
        assert!((scaled - expect).abs() <= 1e-10 * expect);

        let bump: Vec<f64> = f
            .values()
            .data()
            .iter()
            .map(|x| x * r.gen_range(1.0..2.0))
            .collect();
        let g = Grid::new(
            Matrix::new(m, n, bump).unwrap(),
            f.mu().to_vec(),
            f.nu().to_vec(),
        )
        .unwrap();
        assert!(sm <= functional_scaling_mean(&g, TOL).unwrap() + 1e-10);

        let am: f64 = phi.iter().zip(f.mu()).map(|(x, w)| x * w).sum();
        assert!(geometric_mean(&phi, f.mu()).unwrap() <= am * (1.0 + 1e-15));
    }
}

/// Columns split into a block of ν-mass `c` carrying `f0` and its complement carrying `f1`.
fn two_block_grid(f0: &[f64], f1: &[f64], mu: &[f64], nu: &[f64], split: usize) -> Grid {
    let values = Matrix::from_fn(
        f0.len(),
        nu.len(),
        |i, j| if j < split { f0[i] } else { f1[i] },
    )
    .unwrap();
    Grid::new(values, mu.to_vec(), nu.to_vec()).unwrap()
}

#[test]
fn two_block_closed_form_matches_iteration() {
    let mut r = rng(44);
    for _ in 0..100 {
        let m = r.gen_range(1..10);
        let cols = r.gen_range(2..10);
        let split = r.gen_range(1..cols);
        let f0 = random_positive_vec(&mut r, m, 0.1, 10.0);
        let f1 = random_positive_vec(&mut r, m, 0.1, 10.0);
        let mu = random_probability(&mut r, m);
        let nu = random_probability(&mut r, cols);
        let c: f64 = nu[..split].iter().sum();
        let (closed, _) = two_block_scaling_mean(&f0, &f1, &mu, c, 1e-15).unwrap();
        let iterated =
            functional_scaling_mean(&two_block_grid(&f0, &f1, &mu, &nu, split), TOL).unwrap();
        assert!((closed - iterated).abs() <= 1e-10, "{closed} vs {iterated}");
    }
}

#[test]
fn two_block_worked_instance() {
    // Independent bisection of (1/2)(1/(1+r) + 2/(2+r)) = 1/2.
    let h = |r: f64| 0.5 * (1.0 / (1.0 + r) + 2.0 / (2.0 + r)) - 0.5;
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_ref = 0.5 * (lo + hi);
    assert!((r_ref - 2f64.sqrt()).abs() < 1e-14);
    // smean = c^c ((1-c)/r)^{1-c} exp(Σ μ log(f0 + r f1)).
    let sm_ref = 0.5f64.sqrt() * (0.5 / r_ref).sqrt() * ((1.0 + r_ref) * (2.0 + r_ref)).sqrt();
    assert!((sm_ref - 1.207_106_8).abs() < 1e-7);

    let (sm, r) =
        two_block_scaling_mean(&[1.0, 2.0], &[1.0, 1.0], &[0.5, 0.5], 0.5, 1e-15).unwrap();
    assert!((r - r_ref).abs() < 1e-12);
    assert!((sm - sm_ref).abs() < 1e-9);
    let grid = two_block_grid(&[1.0, 2.0], &[1.0, 1.0], &[0.5, 0.5], &[0.5, 0.5], 1);
    assert!((functional_scaling_mean(&grid, TOL).unwrap() - sm_ref).abs() < 1e-10);

    // φ ∝ f0 + r f1 and ψ ∝ (c, (1 - c)/r), with reciprocal gauge constants.
    let fs = functional_sinkhorn(&grid, TOL, 1000).unwrap();
    let lam = fs.phi[0] / (1.0 + r_ref);
    assert!((fs.phi[1] / (2.0 + r_ref) - lam).abs() < 1e-12);
    assert!((fs.psi[0] * lam - 0.5).abs() < 1e-12);
    assert!((fs.psi[1] * lam - 0.5 / r_ref).abs() < 1e-12);
}

#[test]
fn uniform_grid_agrees_with_matrix_scaling_mean() {
    let mut r = rng(45);
    for n in 1..=8 {
        let a = random_bounded(&mut r, n, n, 6.0);
        let g = Grid::uniform(a.clone()).unwrap();
        let lhs = functional_scaling_mean(&g, TOL).unwrap();
        let rhs = permascale::scaling_mean(&a, TOL).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }
}
