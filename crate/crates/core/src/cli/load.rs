use std::path::Path;

use super::CliError;
use crate::data::{Column, DataError, Dataset, Roles};

/// Reads the columns bound by `roles` from a CSV file with a header row.
///
/// Empty fields are missing values. Rows missing any bound field are
/// dropped and counted in [`Dataset::dropped`]. A column becomes numeric
/// when every remaining cell parses as a finite number; otherwise it keeps
/// its text labels, which is allowed for the exposure and the mediators
/// only.
pub fn load_dataset(path: &Path, roles: &Roles) -> Result<Dataset, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let bound = roles.bound_columns();
    let mut index = Vec::with_capacity(bound.len());
    for name in &bound {
        let i = header
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))?;
        index.push(i);
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); bound.len()];
    let mut lines: Vec<u64> = Vec::new();
    let mut dropped = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let fields: Vec<&str> = index.iter().map(|&i| record.get(i).unwrap_or("")).collect();
        if fields.iter().any(|f| f.is_empty()) {
            dropped += 1;
            continue;
        }
        for (col, f) in cells.iter_mut().zip(fields) {
            col.push(f.to_string());
        }
        lines.push(record.position().map_or(0, |p| p.line()));
    }

    let must_be_numeric = |name: &str| name == roles.outcome || roles.covariates.iter().any(|c| c == name);
    let mut columns = Vec::with_capacity(bound.len());
    for (name, values) in bound.iter().zip(cells) {
        let parsed: Result<Vec<f64>, usize> = values
            .iter()
            .enumerate()
            .map(|(row, v)| v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or(row))
            .collect();
        let column = match parsed {
            Ok(v) => Column::Numeric(v),
            Err(row) if must_be_numeric(name) => {
                return Err(CliError::Csv {
                    path: path.display().to_string(),
                    line: Some(lines[row]),
                    message: format!("column `{name}`: `{}` is not a number", values[row]),
                })
            }
            Err(_) => Column::Labels(values),
        };
        columns.push((name.to_string(), column));
    }
    Ok(Dataset::new(roles.clone(), columns)?.with_dropped(dropped))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line());
    CliError::Csv {
        path: path.display().to_string(),
        line,
        message: e.to_string(),
    }
}
