//! Experiment harnesses: Friedland limit, Law of Large Permanents,
//! Halász–Székely symmetric means, and bound fuzzing.

use std::time::Instant;

use permascale::dynamics::{DEFAULT_ALPHA_S, DEFAULT_ALPHA_T};
use permascale::funcspace::DEFAULT_QUADRATURE;
use permascale::numeric::vdw_upper_constant;
use permascale::{
    discretize, dynamical_matrix, functional_scaling_mean, hs_limit, kron, orbit, permanental_mean,
    scaling_mean, sinkhorn, symmetric_mean, two_block_scaling_mean, IntervalMap, Matrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::catalog::{Function1, Function2};
use crate::error::CliError;
use crate::records::ExperimentRecord;

/// Flags shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub max_iter: usize,
    pub cap: usize,
    pub seed: u64,
    pub timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100_000,
            cap: permascale::permanent::DEFAULT_CAP,
            seed: 0,
            timing: false,
        }
    }
}

/// Independent stream for one trial: same seed, stream number = trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn timed<R>(on: bool, f: impl FnOnce() -> R) -> (R, Option<f64>) {
    let start = Instant::now();
    let out = f();
    (out, on.then(|| start.elapsed().as_secs_f64() * 1e3))
}

fn check_cap(n: usize, cap: usize) -> Result<(), CliError> {
    if n > cap {
        Err(CliError::Cap { n, cap })
    } else {
        Ok(())
    }
}

/// `pmean(A ⊗ J_m)` against `smean(A)` for `m = 1..=m_max`, `J_m` the all-ones matrix.
pub fn friedland(
    a: &Matrix,
    m_max: usize,
    s: &Settings,
) -> Result<Vec<ExperimentRecord>, CliError> {
    let n = a.order()?;
    if m_max == 0 {
        return Err(CliError::input("m_max must be at least 1"));
    }
    check_cap(n * m_max, s.cap)?;
    let sm = scaling_mean(a, s.tol)?;
    (1..=m_max)
        .map(|m| {
            let (pm, ms) = timed(s.timing, || {
                permanental_mean(&kron(a, &Matrix::ones(m)), s.cap)
            });
            let mut rec = ExperimentRecord::new(m, pm?, sm);
            rec.wall_ms = ms;
            Ok(rec)
        })
        .collect()
}

/// A starting point given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Fixed(f64),
    Random,
}

impl Start {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "random" {
            return Ok(Start::Random);
        }
        s.parse::<f64>().map(Start::Fixed).map_err(|_| {
            CliError::input(format!(
                "starting point '{s}' is neither a number nor 'random'"
            ))
        })
    }

    fn resolve(self, map: IntervalMap, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Start::Fixed(x) => x,
            Start::Random => {
                let u: f64 = rng.gen();
                match map {
                    IntervalMap::Cyclic { k } => (u * k as f64).floor() / k as f64,
                    _ => u,
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LlpConfig {
    pub f: Function2,
    pub t: IntervalMap,
    pub s: IntervalMap,
    pub x0: Start,
    pub y0: Start,
    pub n_list: Vec<usize>,
    pub k_grid: usize,
    pub trials: usize,
}

impl LlpConfig {
    pub fn new(f: Function2) -> Self {
        Self {
            f,
            t: IntervalMap::Rotation {
                alpha: DEFAULT_ALPHA_T,
            },
            s: IntervalMap::Rotation {
                alpha: DEFAULT_ALPHA_S,
            },
            x0: Start::Random,
            y0: Start::Random,
            n_list: vec![2, 6, 10, 14, 18, 22],
            k_grid: 64,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LlpOutput {
    /// Trial-major: all of `n_list` for trial 0, then trial 1, ...
    pub records: Vec<ExperimentRecord>,
    pub smean_f: f64,
    pub smean_refined: f64,
    /// Continuum closed form, for the two-block function only.
    pub closed_form: Option<f64>,
}

impl LlpOutput {
    pub fn notes(&self, k: usize) -> Vec<String> {
        let mut notes = vec![format!(
            "smean_f refinement: k={k} -> {}, k={} -> {}, |diff| = {:e}",
            self.smean_f,
            2 * k,
            self.smean_refined,
            (self.smean_f - self.smean_refined).abs()
        )];
        if let Some(cf) = self.closed_form {
            notes.push(format!(
                "two-block closed form: {cf}, |grid - closed form| = {:e}",
                (self.smean_f - cf).abs()
            ));
        }
        notes
    }
}

/// Scaling mean of a catalog function on a `k × k` grid.
pub fn catalog_scaling_mean(f: Function2, k: usize, tol: f64) -> Result<f64, CliError> {
    let grid = discretize(|x, y| f.eval(x, y), f.lambda(), k, DEFAULT_QUADRATURE)?;
    Ok(functional_scaling_mean(&grid, tol)?)
}

/// Continuum scaling mean of the two-block function (x integrated on fine midpoints).
pub fn two_block_closed_form(c: f64) -> Result<f64, CliError> {
    const M: usize = 4096;
    let f0: Vec<f64> = (0..M).map(|i| 1.0 + (i as f64 + 0.5) / M as f64).collect();
    let f1 = vec![1.0; M];
    let mu = vec![1.0 / M as f64; M];
    Ok(two_block_scaling_mean(&f0, &f1, &mu, c, 1e-15)?.0)
}

pub fn llp(cfg: &LlpConfig, s: &Settings) -> Result<LlpOutput, CliError> {
    if cfg.n_list.is_empty() || cfg.n_list.contains(&0) {
        return Err(CliError::input(
            "n_list must be a nonempty list of positive sizes",
        ));
    }
    if cfg.trials == 0 || cfg.k_grid == 0 {
        return Err(CliError::input("trials and k_grid must be positive"));
    }
    check_cap(*cfg.n_list.iter().max().unwrap(), s.cap)?;
    let smean_f = catalog_scaling_mean(cfg.f, cfg.k_grid, s.tol)?;
    let smean_refined = catalog_scaling_mean(cfg.f, 2 * cfg.k_grid, s.tol)?;
    let closed_form = match cfg.f {
        Function2::TwoBlock { c } => Some(two_block_closed_form(c)?),
        _ => None,
    };
    let f = cfg.f;
    let per_trial: Vec<Vec<ExperimentRecord>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(s.seed, trial);
            let x = cfg.x0.resolve(cfg.t, &mut rng);
            let y = cfg.y0.resolve(cfg.s, &mut rng);
            cfg.n_list
                .iter()
                .map(|&n| {
                    let (pm, ms) = timed(s.timing, || -> Result<f64, CliError> {
                        let d = dynamical_matrix(|a, b| f.eval(a, b), cfg.t, cfg.s, x, y, n)?;
                        Ok(permanental_mean(&d, s.cap)?)
                    });
                    let mut rec = ExperimentRecord::new(n, pm?, smean_f);
                    rec.wall_ms = ms;
                    Ok(rec)
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(LlpOutput {
        records: per_trial.into_iter().flatten().collect(),
        smean_f,
        smean_refined,
        closed_form,
    })
}

#[derive(Debug, Clone)]
pub struct HsConfig {
    pub g: Function1,
    pub c: f64,
    pub n: usize,
    pub x0: Start,
    pub alpha: f64,
}

/// Points used to represent the law of `g` under Lebesgue measure.
pub const HS_LAW_POINTS: usize = 8192;

/// Empirical `sym_{round(cn)}` along a rotation orbit against the limit formula.
pub fn hs(cfg: &HsConfig, s: &Settings) -> Result<ExperimentRecord, CliError> {
    if cfg.n == 0 || cfg.n > 1_000_000 {
        return Err(CliError::input("n must lie in 1..=1000000"));
    }
    if !(cfg.c > 0.0 && cfg.c < 1.0) {
        return Err(CliError::input("c must lie in (0, 1)"));
    }
    let map = IntervalMap::rotation(cfg.alpha)?;
    let mut rng = trial_rng(s.seed, 0);
    let x = cfg.x0.resolve(map, &mut rng);
    let k = ((cfg.c * cfg.n as f64).round() as usize).clamp(1, cfg.n);
    let (empirical, ms) = timed(s.timing, || -> Result<f64, CliError> {
        let z: Vec<f64> = orbit(map, x, cfg.n)?
            .into_iter()
            .map(|t| cfg.g.eval(t))
            .collect();
        Ok(symmetric_mean(&z, k)?)
    });
    let law: Vec<f64> = (0..HS_LAW_POINTS)
        .map(|i| cfg.g.eval((i as f64 + 0.5) / HS_LAW_POINTS as f64))
        .collect();
    let w = vec![1.0 / HS_LAW_POINTS as f64; HS_LAW_POINTS];
    let (formula, _) = hs_limit(&law, &w, cfg.c)?;
    let mut rec = ExperimentRecord::new(cfg.n, empirical?, formula);
    rec.wall_ms = ms;
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzTarget {
    Vdw,
    Brualdi,
    Conj2,
}

impl FuzzTarget {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "vdw" => Ok(FuzzTarget::Vdw),
            "brualdi" => Ok(FuzzTarget::Brualdi),
            "conj2" => Ok(FuzzTarget::Conj2),
            _ => Err(CliError::input(format!("unknown fuzz target '{s}'"))),
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            FuzzTarget::Vdw => 6,
            FuzzTarget::Brualdi => 3,
            FuzzTarget::Conj2 => 12,
        }
    }
}

/// Bound violations smaller than this (relative to the scaling mean) count as rounding.
pub const VDW_SLACK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
struct Extremes {
    min: f64,
    max: f64,
}

impl Extremes {
    fn of(v: impl Iterator<Item = f64>) -> Option<Self> {
        v.fold(None, |acc, x| match acc {
            None => Some(Extremes { min: x, max: x }),
            Some(e) => Some(Extremes {
                min: e.min.min(x),
                max: e.max.max(x),
            }),
        })
    }
}

/// Runs a fuzz campaign and returns its JSON report. A violated
/// van der Waerden bound is an error carrying the report.
pub fn fuzz(
    target: FuzzTarget,
    trials: usize,
    n: usize,
    s: &Settings,
) -> Result<serde_json::Value, CliError> {
    if trials == 0 || n == 0 {
        return Err(CliError::input("trials and n must be positive"));
    }
    match target {
        FuzzTarget::Vdw => fuzz_vdw(trials, n, s),
        FuzzTarget::Brualdi => fuzz_brualdi(trials, n, s),
        FuzzTarget::Conj2 => fuzz_conj2(trials, n, s),
    }
}

/// Random nonnegative matrix: entries uniform in `(0, 1)`, each zeroed with probability 0.2.
fn random_nonneg(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    Matrix::from_fn(n, n, |_, _| {
        if rng.gen::<f64>() < 0.2 {
            0.0
        } else {
            rng.gen_range(f64::MIN_POSITIVE..1.0)
        }
    })
    .expect("entries are nonnegative")
}

/// Entries log-uniform in `[1/lambda, lambda]`.
fn random_bounded(rng: &mut ChaCha8Rng, n: usize, lambda: f64) -> Matrix {
    let l = lambda.ln();
    Matrix::from_fn(n, n, |_, _| rng.gen_range(-l..=l).exp()).expect("entries are positive")
}

fn fuzz_vdw(trials: usize, n: usize, s: &Settings) -> Result<serde_json::Value, CliError> {
    check_cap(n, s.cap)?;
    let upper = vdw_upper_constant(n);
    // (lower slack, upper slack), both relative to smean; None when per A = 0.
    let slacks: Vec<Option<(f64, f64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let a = random_nonneg(&mut trial_rng(s.seed, trial), n);
            let pm = permanental_mean(&a, s.cap)?;
            let sm = scaling_mean(&a, s.tol)?;
            Ok((sm > 0.0).then(|| ((pm - sm) / sm, (upper * sm - pm) / sm)))
        })
        .collect::<Result<_, CliError>>()?;
    let violations: Vec<usize> = slacks
        .iter()
        .enumerate()
        .filter(
            |(_, sl)| matches!(sl, Some((lo, hi)) if *lo < -VDW_SLACK_TOL || *hi < -VDW_SLACK_TOL),
        )
        .map(|(i, _)| i)
        .collect();
    let report = json!({
        "target": "vdw",
        "trials": trials,
        "n": n,
        "seed": s.seed,
        "upper_constant": upper,
        "zero_permanent_trials": slacks.iter().filter(|x| x.is_none()).count(),
        "lower_slack": Extremes::of(slacks.iter().flatten().map(|x| x.0)),
        "upper_slack": Extremes::of(slacks.iter().flatten().map(|x| x.1)),
        "violations": violations.len(),
        "violating_trials": violations,
    });
    if violations.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Numerical {
            message: format!(
                "van der Waerden bound violated in {} trials",
                violations.len()
            ),
            partial: Some(report),
        })
    }
}

fn fuzz_brualdi(trials: usize, n: usize, s: &Settings) -> Result<serde_json::Value, CliError> {
    check_cap(n * n, s.cap)?;
    // slack = pmean(A) pmean(B) - pmean(A ⊗ B), relative to the right side.
    let slacks: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(s.seed, trial);
            let a = random_bounded(&mut rng, n, 10.0);
            let b = random_bounded(&mut rng, n, 10.0);
            let prod = permanental_mean(&a, s.cap)? * permanental_mean(&b, s.cap)?;
            let k = permanental_mean(&kron(&a, &b), s.cap)?;
            Ok((prod - k) / prod)
        })
        .collect::<Result<_, CliError>>()?;
    let negative: Vec<usize> = (0..trials).filter(|&i| slacks[i] < 0.0).collect();
    Ok(json!({
        "target": "brualdi",
        "trials": trials,
        "n": n,
        "seed": s.seed,
        "relative_slack": Extremes::of(slacks.iter().copied()),
        "negative_slack_trials": negative,
    }))
}

/// Attempts per matrix before giving up on rejection sampling.
const CONJ2_ATTEMPTS: usize = 1000;

fn fuzz_conj2(trials: usize, n_max: usize, s: &Settings) -> Result<serde_json::Value, CliError> {
    const LAMBDA: f64 = 2.0;
    if n_max < 4 {
        return Err(CliError::input("conj2 needs n >= 4"));
    }
    check_cap(n_max, s.cap)?;
    let mut rows = Vec::new();
    for n in 4..=n_max {
        let pmeans: Vec<f64> = (0..trials as u64)
            .into_par_iter()
            .map(|trial| {
                // Stream numbers are disjoint across sizes.
                let mut rng = trial_rng(s.seed, ((n as u64) << 32) | trial);
                for _ in 0..CONJ2_ATTEMPTS {
                    let b = random_bounded(&mut rng, n, LAMBDA);
                    let a = sinkhorn(&b, s.tol, s.max_iter)?.s.scale(n as f64)?;
                    if a.data()
                        .iter()
                        .all(|&x| (1.0 / LAMBDA..=LAMBDA).contains(&x))
                    {
                        return Ok(permanental_mean(&a, s.cap)?);
                    }
                }
                Err(CliError::Numerical {
                    message: format!(
                        "no {LAMBDA}-bounded sample of order {n} in {CONJ2_ATTEMPTS} attempts"
                    ),
                    partial: None,
                })
            })
            .collect::<Result<_, CliError>>()?;
        let dev: Vec<f64> = pmeans.iter().map(|p| (p - 1.0).abs()).collect();
        rows.push(json!({
            "n": n,
            "mean_pmean": pmeans.iter().sum::<f64>() / trials as f64,
            "mean_abs_dev": dev.iter().sum::<f64>() / trials as f64,
            "max_abs_dev": dev.iter().copied().fold(0.0, f64::max),
        }));
    }
    Ok(json!({
        "target": "conj2",
        "trials": trials,
        "lambda": LAMBDA,
        "seed": s.seed,
        "by_n": rows,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_streams_differ_and_repeat() {
        let a: u64 = trial_rng(7, 0).gen();
        let b: u64 = trial_rng(7, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(7, 0).gen::<u64>());
    }

    #[test]
    fn friedland_identity_values() {
        let rec = friedland(&Matrix::identity(2), 4, &Settings::default()).unwrap();
        let expect = [0.707_106_8, 0.638_943_1, 0.606_962_2, 0.587_980_3];
        for (r, e) in rec.iter().zip(expect) {
            assert!((r.value_a - e).abs() < 1e-7, "{} vs {e}", r.value_a);
            assert!((r.value_b - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn friedland_respects_cap() {
        let s = Settings {
            cap: 6,
            ..Default::default()
        };
        assert!(matches!(
            friedland(&Matrix::identity(2), 4, &s),
            Err(CliError::Cap { n: 8, cap: 6 })
        ));
    }

    #[test]
    fn constant_function_is_exact() {
        let mut cfg = LlpConfig::new(Function2::Const(3.0));
        cfg.n_list = vec![1, 5];
        let out = llp(&cfg, &Settings::default()).unwrap();
        for r in &out.records {
            assert!(r.abs_err < 1e-12);
        }
    }

    #[test]
    fn random_start_snaps_to_cyclic_grid() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..20 {
            let x = Start::Random.resolve(IntervalMap::Cyclic { k: 5 }, &mut rng);
            assert_eq!((x * 5.0).fract(), 0.0);
        }
    }

    #[test]
    fn constant_hs_is_exact() {
        let cfg = HsConfig {
            g: Function1::Const(1.7),
            c: 0.4,
            n: 500,
            x0: Start::Fixed(0.1),
            alpha: DEFAULT_ALPHA_T,
        };
        let r = hs(&cfg, &Settings::default()).unwrap();
        assert!(r.rel_err < 1e-12);
    }
}
