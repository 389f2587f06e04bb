//! Experiment rows and their CSV form.

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub value_a: f64,
    pub value_b: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Only measured when timing is requested, so default output stays reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl ExperimentRecord {
    pub fn new(n: usize, value_a: f64, value_b: f64) -> Self {
        let abs_err = (value_a - value_b).abs();
        Self {
            n,
            value_a,
            value_b,
            abs_err,
            rel_err: abs_err / value_b.abs().max(1e-300),
            wall_ms: None,
        }
    }
}

/// Which error column a table reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrColumn {
    Abs,
    Rel,
}

/// Column names of one experiment's table: `[n, value_a, value_b, err]`.
#[derive(Debug, Clone, Copy)]
pub struct Table {
    pub headers: [&'static str; 4],
    pub err: ErrColumn,
}

pub const FRIEDLAND: Table = Table {
    headers: ["m", "pmean_kron", "smean_A", "abs_err"],
    err: ErrColumn::Abs,
};
pub const LLP: Table = Table {
    headers: ["n", "pmean_Dn", "smean_f", "abs_err"],
    err: ErrColumn::Abs,
};
pub const HS: Table = Table {
    headers: ["n", "sym_k_empirical", "hs_formula", "rel_err"],
    err: ErrColumn::Rel,
};

pub fn to_csv(table: &Table, records: &[ExperimentRecord]) -> Result<String, CliError> {
    let timed = records.iter().any(|r| r.wall_ms.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = table.headers.to_vec();
    if timed {
        header.push("wall_ms");
    }
    w.write_record(&header)?;
    for r in records {
        let err = match table.err {
            ErrColumn::Abs => r.abs_err,
            ErrColumn::Rel => r.rel_err,
        };
        let mut row = vec![
            r.n.to_string(),
            r.value_a.to_string(),
            r.value_b.to_string(),
            err.to_string(),
        ];
        if timed {
            row.push(r.wall_ms.unwrap_or(f64::NAN).to_string());
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// JSON array of objects keyed by the table's column names.
pub fn to_json(table: &Table, records: &[ExperimentRecord]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            let err = match table.err {
                ErrColumn::Abs => r.abs_err,
                ErrColumn::Rel => r.rel_err,
            };
            let mut obj = serde_json::json!({
                table.headers[0]: r.n,
                table.headers[1]: r.value_a,
                table.headers[2]: r.value_b,
                table.headers[3]: err,
            });
            if let Some(ms) = r.wall_ms {
                obj["wall_ms"] = ms.into();
            }
            obj
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// Reads a numeric CSV table with a header row.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.iter().map(str::to_owned).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| CliError::input(format!("bad number '{s}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != headers.len() {
            return Err(CliError::input("ragged CSV row"));
        }
        rows.push(row);
    }
    Ok((headers, rows))
}
