//! Parsing of p-value and weight files.

use std::path::Path;

/// Reads one number per line. A non-numeric first line is taken as a header;
/// blank lines are ignored. Errors carry the 1-based line number.
pub fn read_column(path: &Path) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    parse_column(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_column(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(format!("line {}: cannot parse {field:?} as a number", i + 1)),
        }
    }
    Ok(values)
}

/// Reads p-values and checks that each lies in [0, 1].
pub fn read_pvalues(path: &Path) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    parse_pvalues(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_pvalues(text: &str) -> Result<Vec<f64>, String> {
    let values = parse_column(text)?;
    // recover line numbers for range diagnostics
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| l.trim().parse::<f64>().is_ok());
    for &v in &values {
        let (i, _) = lines.next().expect("one line per parsed value");
        if !(0.0..=1.0).contains(&v) {
            return Err(format!("line {}: p-value {v} outside [0, 1]", i + 1));
        }
    }
    if values.len() < 2 {
        return Err(format!("need at least 2 p-values, found {}", values.len()));
    }
    Ok(values)
}
