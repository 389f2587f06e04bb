//! Single computations on a matrix or grid-function file, answered in JSON.

use permascale::{
    permanent, permanental_mean, pi_projection, scaling_mean, scaling_mean_2x2, sinkhorn,
    FunctionalSinkhorn, Grid, Matrix,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::experiments::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneShot {
    Per,
    Pmean,
    Smean,
    Sinkhorn,
    Pi,
}

pub fn run_matrix(cmd: OneShot, a: &Matrix, s: &Settings) -> Result<Value, CliError> {
    let n = a.order()?;
    match cmd {
        OneShot::Per => {
            let p = permanent(a, s.cap)?;
            Ok(json!({
                "per": p.value(),
                "log_per": (!p.is_zero).then_some(p.log_value),
                "n": n,
            }))
        }
        OneShot::Pmean => Ok(json!({ "pmean": permanental_mean(a, s.cap)? })),
        OneShot::Smean => {
            // The 2×2 closed form is exact where the iteration leaves an ulp or two.
            let sm = if n == 2 {
                scaling_mean_2x2(a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1))
            } else {
                scaling_mean(a, s.tol)?
            };
            Ok(json!({ "smean": sm }))
        }
        OneShot::Sinkhorn => {
            let f = sinkhorn(a, s.tol, s.max_iter)?;
            let mut out = serde_json::to_value(&f).expect("factorization serializes");
            out["smean"] = json!(f.gmean_product() / n as f64);
            Ok(out)
        }
        OneShot::Pi => {
            let (projected, report) = pi_projection(a)?;
            Ok(json!({
                "projected": projected.to_rows(),
                "in_Pn": report.in_pn,
                "has_positive_diagonal": report.has_positive_diagonal,
                "blocks": report.blocks,
                "fk_witness": report.fk_witness,
            }))
        }
    }
}

/// Functional Sinkhorn decomposition and scaling mean of a grid function.
pub fn run_grid(f: &Grid, s: &Settings) -> Result<Value, CliError> {
    let fs: FunctionalSinkhorn<f64> = permascale::functional_sinkhorn(f, s.tol, s.max_iter)?;
    Ok(json!({
        "smean": fs.scaling_mean(),
        "phi": fs.phi,
        "psi": fs.psi,
        "g": fs.g.values().to_rows(),
        "iterations": fs.iterations,
        "residual": fs.residual,
        "kappa": fs.kappa,
    }))
}
