//! Named sampled functions and interval-map specs accepted on the command line.
//!
//! Two-variable functions (for `llp`):
//!
//! | spec               | f(x, y)                              | λ               |
//! |--------------------|--------------------------------------|-----------------|
//! | `const:c`          | `c`                                  | `max(c, 1/c)`   |
//! | `sep-exp[:a,b]`    | `exp(a sin 2πx) · exp(b cos 2πy)`    | `exp(|a|+|b|)`  |
//! | `two-block[:c]`    | `1 + x` if `y < c`, else `1`         | `2`             |
//! | `smooth[:a]`       | `exp(a sin 2π(x + y))`               | `exp(|a|)`      |
//!
//! One-variable functions (for `hs`): `const:c`, `exp-sin[:a]` = `exp(a sin 2πx)`,
//! `step[:v]` = `v` on `[0, 1/2)` and `1` elsewhere, `linear` = `1 + x`.
//!
//! Maps: `rot[:alpha]`, `doubling`, `cyc:k`.

use std::f64::consts::PI;

use permascale::IntervalMap;

use crate::error::CliError;

const TAU: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Function2 {
    Const(f64),
    SepExp { a: f64, b: f64 },
    TwoBlock { c: f64 },
    Smooth { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Function1 {
    Const(f64),
    ExpSin { a: f64 },
    Step { v: f64 },
    Linear,
}

fn split_spec(spec: &str) -> (&str, Vec<&str>) {
    match spec.split_once(':') {
        Some((name, args)) => (name, args.split(',').map(str::trim).collect()),
        None => (spec, Vec::new()),
    }
}

fn parse_params(spec: &str, args: &[&str], defaults: &[f64]) -> Result<Vec<f64>, CliError> {
    if args.len() > defaults.len() {
        return Err(CliError::input(format!("too many parameters in '{spec}'")));
    }
    let mut out = defaults.to_vec();
    for (slot, a) in out.iter_mut().zip(args) {
        *slot = a
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::input(format!("bad number '{a}' in '{spec}'")))?;
    }
    Ok(out)
}

fn positive(spec: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::input(format!(
            "'{spec}' needs a positive parameter"
        )))
    }
}

fn proportion(spec: &str, c: f64) -> Result<f64, CliError> {
    if c > 0.0 && c < 1.0 {
        Ok(c)
    } else {
        Err(CliError::input(format!(
            "'{spec}' needs a proportion in (0, 1)"
        )))
    }
}

impl Function2 {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (name, args) = split_spec(spec);
        match name {
            "const" => {
                let p = parse_params(spec, &args, &[f64::NAN])?;
                Ok(Function2::Const(positive(spec, p[0])?))
            }
            "sep-exp" => {
                let p = parse_params(spec, &args, &[0.5, 0.5])?;
                Ok(Function2::SepExp { a: p[0], b: p[1] })
            }
            "two-block" => {
                let p = parse_params(spec, &args, &[0.5])?;
                Ok(Function2::TwoBlock {
                    c: proportion(spec, p[0])?,
                })
            }
            "smooth" => {
                let p = parse_params(spec, &args, &[0.5])?;
                Ok(Function2::Smooth { a: p[0] })
            }
            _ => Err(CliError::input(format!("unknown function '{spec}'"))),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Function2::Const(c) => c,
            Function2::SepExp { a, b } => (a * (TAU * x).sin()).exp() * (b * (TAU * y).cos()).exp(),
            Function2::TwoBlock { c } => {
                if y < c {
                    1.0 + x
                } else {
                    1.0
                }
            }
            Function2::Smooth { a } => (a * (TAU * (x + y)).sin()).exp(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            Function2::Const(c) => c.max(1.0 / c),
            Function2::SepExp { a, b } => (a.abs() + b.abs()).exp(),
            Function2::TwoBlock { .. } => 2.0,
            Function2::Smooth { a } => a.abs().exp(),
        }
    }
}

impl Function1 {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (name, args) = split_spec(spec);
        match name {
            "const" => {
                let p = parse_params(spec, &args, &[f64::NAN])?;
                Ok(Function1::Const(positive(spec, p[0])?))
            }
            "exp-sin" => {
                let p = parse_params(spec, &args, &[1.0])?;
                Ok(Function1::ExpSin { a: p[0] })
            }
            "step" => {
                let p = parse_params(spec, &args, &[2.0])?;
                Ok(Function1::Step {
                    v: positive(spec, p[0])?,
                })
            }
            "linear" if args.is_empty() => Ok(Function1::Linear),
            _ => Err(CliError::input(format!("unknown function '{spec}'"))),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Function1::Const(c) => c,
            Function1::ExpSin { a } => (a * (TAU * x).sin()).exp(),
            Function1::Step { v } => {
                if x < 0.5 {
                    v
                } else {
                    1.0
                }
            }
            Function1::Linear => 1.0 + x,
        }
    }
}

/// Parses `rot[:alpha]`, `doubling` or `cyc:k`; `default_alpha` fills a bare `rot`.
pub fn parse_map(spec: &str, default_alpha: f64) -> Result<IntervalMap, CliError> {
    let (name, args) = split_spec(spec);
    let map = match (name, args.as_slice()) {
        ("rot", []) => IntervalMap::rotation(default_alpha),
        ("rot", [a]) => {
            let alpha = a
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("bad rotation number in '{spec}'")))?;
            IntervalMap::rotation(alpha)
        }
        ("doubling", []) => Ok(IntervalMap::Doubling),
        ("cyc", [k]) => {
            let k = k
                .parse::<usize>()
                .map_err(|_| CliError::input(format!("bad cycle length in '{spec}'")))?;
            IntervalMap::cyclic(k)
        }
        _ => return Err(CliError::input(format!("unknown map '{spec}'"))),
    };
    map.map_err(CliError::from)
}
