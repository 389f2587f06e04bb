//! Command-line surface and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permascale::dynamics::{DEFAULT_ALPHA_S, DEFAULT_ALPHA_T};
use permascale::{parse_matrix, Grid, Matrix};

use crate::catalog::{parse_map, Function1, Function2};
use crate::error::CliError;
use crate::experiments::{self, FuzzTarget, HsConfig, LlpConfig, Settings, Start};
use crate::oneshot::{self, OneShot};
use crate::records::{self, ExperimentRecord, Table};

#[derive(Debug, Parser)]
#[command(
    name = "permascale",
    version,
    about = "Permanental and scaling means of nonnegative matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Sinkhorn stopping tolerance on row/column sums.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Largest matrix order handed to the permanent.
    #[arg(long = "cap-n", global = true, default_value_t = permascale::permanent::DEFAULT_CAP)]
    pub cap_n: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; experiments default to csv, everything else is json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Add wall-clock milliseconds to experiment rows (output is then not reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Permanent of a matrix file.
    Per { file: PathBuf },
    /// Permanental mean of a matrix file.
    Pmean { file: PathBuf },
    /// Scaling mean of a matrix file.
    Smean { file: PathBuf },
    /// Sinkhorn decomposition A = D S E of a matrix file.
    Sinkhorn { file: PathBuf },
    /// Projection onto the positive diagonals, with the pattern analysis.
    Pi { file: PathBuf },
    /// Functional Sinkhorn and scaling mean of a grid-function JSON file.
    GridSmean { file: PathBuf },
    /// pmean(A ⊗ J_m) against smean(A) for m = 1..m_max, J_m all ones.
    Friedland {
        #[arg(long)]
        a: PathBuf,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
    },
    /// Permanental means of dynamical matrices against the grid scaling mean.
    Llp {
        /// Catalog function: const:c, sep-exp[:a,b], two-block[:c], smooth[:a].
        #[arg(long)]
        f: String,
        /// Map acting on x: rot[:alpha], doubling, cyc:k.
        #[arg(long, default_value = "rot")]
        t: String,
        /// Map acting on y.
        #[arg(long, default_value = "rot")]
        s: String,
        /// Starting x in [0, 1), or "random".
        #[arg(long, default_value = "random")]
        x0: String,
        #[arg(long, default_value = "random")]
        y0: String,
        #[arg(long, value_delimiter = ',', default_value = "2,6,10,14,18,22")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        k_grid: usize,
        /// Independent random starts; rows are grouped by trial.
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Symmetric mean along a rotation orbit against the Halász–Székely limit.
    Hs {
        /// Catalog function: const:c, exp-sin[:a], step[:v], linear.
        #[arg(long)]
        g: String,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value = "random")]
        x0: String,
        #[arg(long, default_value_t = DEFAULT_ALPHA_T)]
        alpha: f64,
    },
    /// Random search against the vdW bounds, Brualdi's inequality, or pmean of normalized bounded matrices.
    Fuzz {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Matrix order (vdw), factor order (brualdi) or largest order (conj2).
        #[arg(long)]
        n: Option<usize>,
    },
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    /// Diagnostics for stderr.
    pub notes: Vec<String>,
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &PathBuf) -> Result<Matrix, CliError> {
    Ok(parse_matrix(&read_file(path)?)?)
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn table_text(
    table: &Table,
    rows: &[ExperimentRecord],
    format: Option<Format>,
) -> Result<String, CliError> {
    match format.unwrap_or(Format::Csv) {
        Format::Csv => records::to_csv(table, rows),
        Format::Json => Ok(json_text(&records::to_json(table, rows))),
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    let settings = Settings {
        tol: g.tol,
        max_iter: g.max_iter,
        cap: g.cap_n,
        seed: g.seed,
        timing: g.timing,
    };
    if !(g.tol > 0.0) {
        return Err(CliError::input("--tol must be positive"));
    }
    let json_only = |v: serde_json::Value| -> Result<Output, CliError> {
        if g.format == Some(Format::Csv) {
            return Err(CliError::input("this command only produces JSON"));
        }
        Ok(Output {
            text: json_text(&v),
            notes: Vec::new(),
        })
    };
    let matrix_cmd = |cmd: OneShot, file: &PathBuf| {
        json_only(oneshot::run_matrix(cmd, &read_matrix(file)?, &settings)?)
    };
    match &cli.command {
        Command::Per { file } => matrix_cmd(OneShot::Per, file),
        Command::Pmean { file } => matrix_cmd(OneShot::Pmean, file),
        Command::Smean { file } => matrix_cmd(OneShot::Smean, file),
        Command::Sinkhorn { file } => matrix_cmd(OneShot::Sinkhorn, file),
        Command::Pi { file } => matrix_cmd(OneShot::Pi, file),
        Command::GridSmean { file } => {
            let grid = Grid::from_json(&read_file(file)?)?;
            json_only(oneshot::run_grid(&grid, &settings)?)
        }
        Command::Friedland { a, m_max } => {
            let rows = experiments::friedland(&read_matrix(a)?, *m_max, &settings)?;
            Ok(Output {
                text: table_text(&records::FRIEDLAND, &rows, g.format)?,
                notes: Vec::new(),
            })
        }
        Command::Llp {
            f,
            t,
            s,
            x0,
            y0,
            n_list,
            k_grid,
            trials,
        } => {
            let cfg = LlpConfig {
                f: Function2::parse(f)?,
                t: parse_map(t, DEFAULT_ALPHA_T)?,
                s: parse_map(s, DEFAULT_ALPHA_S)?,
                x0: Start::parse(x0)?,
                y0: Start::parse(y0)?,
                n_list: n_list.clone(),
                k_grid: *k_grid,
                trials: *trials,
            };
            let out = experiments::llp(&cfg, &settings)?;
            Ok(Output {
                text: table_text(&records::LLP, &out.records, g.format)?,
                notes: out.notes(cfg.k_grid),
            })
        }
        Command::Hs {
            g: gspec,
            c,
            n,
            x0,
            alpha,
        } => {
            let cfg = HsConfig {
                g: Function1::parse(gspec)?,
                c: *c,
                n: *n,
                x0: Start::parse(x0)?,
                alpha: *alpha,
            };
            let row = experiments::hs(&cfg, &settings)?;
            Ok(Output {
                text: table_text(&records::HS, &[row], g.format)?,
                notes: Vec::new(),
            })
        }
        Command::Fuzz { target, trials, n } => {
            let target = FuzzTarget::parse(target)?;
            let n = n.unwrap_or(target.default_n());
            json_only(experiments::fuzz(target, *trials, n, &settings)?)
        }
    }
}

/// Runs a command line and returns `(exit code, stdout text, stderr notes)`,
/// writing to `--out` when given.
pub fn execute(cli: &Cli) -> (i32, String, Vec<String>) {
    match run(cli) {
        Ok(out) => match &cli.global.out {
            Some(path) => match std::fs::write(path, &out.text) {
                Ok(()) => (0, String::new(), out.notes),
                Err(e) => {
                    let err = CliError::input(format!("{}: {e}", path.display()));
                    (err.exit_code(), json_text(&err.to_json()), out.notes)
                }
            },
            None => (0, out.text, out.notes),
        },
        Err(e) => (e.exit_code(), json_text(&e.to_json()), Vec::new()),
    }
}
