//! Plain-text matrix files: one row per line, entries separated by commas
//! and/or whitespace, `#` starts a comment line.

use crate::error::{Error, Result};
use crate::NonnegMatrix;

pub fn parse_matrix(text: &str) -> Result<NonnegMatrix<f64>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no matrix rows found".into()));
    }
    let width = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Parse(format!(
            "row {} has {} entries, expected {width}",
            bad + 1,
            rows[bad].len()
        )));
    }
    NonnegMatrix::from_rows(rows)
}

pub fn format_matrix(a: &NonnegMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_separators_and_comments() {
        let a = parse_matrix("# header\n1, 2\n\n3 4.5\n").unwrap();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.data(), &[1.0, 2.0, 3.0, 4.5]);
        let again = parse_matrix(&format_matrix(&a)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn rejects_ragged_and_garbage() {
        assert!(matches!(parse_matrix("1 2\n3\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 x\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("# only\n"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix("1 -2\n"),
            Err(Error::InvalidEntry(_))
        ));
    }
}
