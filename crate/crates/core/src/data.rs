//! Rectangular datasets with named columns and analysis roles.

use std::collections::HashSet;
use std::io;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("column `{0}` not found")]
    UnknownColumn(String),
    #[error("column `{column}` has {found} rows, expected {expected}")]
    RaggedColumn {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column `{0}` is declared twice")]
    DuplicateColumn(String),
    #[error("column `{0}` must be numeric")]
    NotNumeric(String),
    #[error("column `{column}` is not categorical: row {row} holds {value}")]
    NonCategorical {
        column: String,
        row: usize,
        value: f64,
    },
    #[error("dataset has no rows")]
    Empty,
    #[error("role binding needs 1 or 2 mediators, got {0}")]
    MediatorCount(usize),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which column plays which part in the analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub exposure: String,
    pub mediators: Vec<String>,
    pub outcome: String,
    #[serde(default)]
    pub covariates: Vec<String>,
}

impl Roles {
    pub fn new(exposure: &str, mediators: &[&str], outcome: &str) -> Self {
        Roles {
            exposure: exposure.to_string(),
            mediators: mediators.iter().map(|m| m.to_string()).collect(),
            outcome: outcome.to_string(),
            covariates: Vec::new(),
        }
    }

    pub fn with_covariates(mut self, covariates: &[&str]) -> Self {
        self.covariates = covariates.iter().map(|c| c.to_string()).collect();
        self
    }

    /// Every bound column, in exposure, mediators, outcome, covariates order.
    pub fn bound_columns(&self) -> Vec<&str> {
        let mut out = vec![self.exposure.as_str()];
        out.extend(self.mediators.iter().map(String::as_str));
        out.push(self.outcome.as_str());
        out.extend(self.covariates.iter().map(String::as_str));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Labels(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Labels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Labels(v) => Column::Labels(rows.iter().map(|&r| v[r].clone()).collect()),
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Column::Numeric(v) => v[row].to_string(),
            Column::Labels(v) => v[row].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    roles: Roles,
    names: Vec<String>,
    columns: Vec<Column>,
    dropped: usize,
}

impl Dataset {
    pub fn new(roles: Roles, columns: Vec<(String, Column)>) -> Result<Self, DataError> {
        if roles.mediators.is_empty() || roles.mediators.len() > 2 {
            return Err(DataError::MediatorCount(roles.mediators.len()));
        }
        let mut seen = HashSet::new();
        for (name, _) in &columns {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
        }
        for bound in roles.bound_columns() {
            if !seen.contains(bound) {
                return Err(DataError::UnknownColumn(bound.to_string()));
            }
        }
        let n = columns.first().map(|(_, c)| c.len()).unwrap_or(0);
        for (name, col) in &columns {
            if col.len() != n {
                return Err(DataError::RaggedColumn {
                    column: name.clone(),
                    expected: n,
                    found: col.len(),
                });
            }
        }
        if n == 0 {
            return Err(DataError::Empty);
        }
        let (names, columns) = columns.into_iter().unzip();
        let data = Dataset {
            roles,
            names,
            columns,
            dropped: 0,
        };
        data.numeric(&data.roles.outcome)?;
        Ok(data)
    }

    /// Records how many rows were removed before construction.
    pub fn with_dropped(mut self, dropped: usize) -> Self {
        self.dropped = dropped;
        self
    }

    pub fn roles(&self) -> &Roles {
        &self.roles
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&Column, DataError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64], DataError> {
        match self.column(name)? {
            Column::Numeric(v) => Ok(v),
            Column::Labels(_) => Err(DataError::NotNumeric(name.to_string())),
        }
    }

    /// Category labels for `name`. Numeric columns qualify only when every
    /// value is a whole number.
    pub fn labels(&self, name: &str) -> Result<Vec<String>, DataError> {
        match self.column(name)? {
            Column::Labels(v) => Ok(v.clone()),
            Column::Numeric(v) => v
                .iter()
                .enumerate()
                .map(|(row, &x)| {
                    if x.is_finite() && x.fract() == 0.0 {
                        Ok(format!("{}", x as i64))
                    } else {
                        Err(DataError::NonCategorical {
                            column: name.to_string(),
                            row,
                            value: x,
                        })
                    }
                })
                .collect(),
        }
    }

    /// Category codes for `name`: the distinct labels in order of first
    /// appearance and, per row, the index of its label. Accepts the same
    /// columns as [`Dataset::labels`] without building a string per row.
    pub fn codes(&self, name: &str) -> Result<(Vec<String>, Vec<u32>), DataError> {
        fn code_of<T: PartialEq + Copy>(seen: &mut Vec<T>, last: &mut usize, v: T) -> u32 {
            if seen.get(*last) != Some(&v) {
                *last = match seen.iter().position(|s| *s == v) {
                    Some(i) => i,
                    None => {
                        seen.push(v);
                        seen.len() - 1
                    }
                };
            }
            *last as u32
        }
        let mut last = 0usize;
        match self.column(name)? {
            Column::Labels(v) => {
                let mut seen: Vec<&str> = Vec::new();
                let codes = v.iter().map(|l| code_of(&mut seen, &mut last, l.as_str())).collect();
                Ok((seen.into_iter().map(str::to_string).collect(), codes))
            }
            Column::Numeric(v) => {
                let mut seen: Vec<i64> = Vec::new();
                let mut codes = Vec::with_capacity(v.len());
                for (row, &x) in v.iter().enumerate() {
                    if !(x.is_finite() && x.fract() == 0.0) {
                        return Err(DataError::NonCategorical {
                            column: name.to_string(),
                            row,
                            value: x,
                        });
                    }
                    codes.push(code_of(&mut seen, &mut last, x as i64));
                }
                Ok((seen.into_iter().map(|x| x.to_string()).collect(), codes))
            }
        }
    }

    /// New dataset made of the given rows, repeats allowed.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            roles: self.roles.clone(),
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            dropped: 0,
        }
    }

    /// Replaces a numeric column in place.
    pub fn set_numeric(&mut self, name: &str, values: Vec<f64>) -> Result<(), DataError> {
        let i = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))?;
        if values.len() != self.n_rows() {
            return Err(DataError::RaggedColumn {
                column: name.to_string(),
                expected: self.n_rows(),
                found: values.len(),
            });
        }
        self.columns[i] = Column::Numeric(values);
        Ok(())
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.names)?;
        for row in 0..self.n_rows() {
            w.write_record(self.columns.iter().map(|c| c.cell(row)))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        Dataset::new(
            Roles::new("a", &["m"], "y"),
            vec![
                ("a".into(), Column::Numeric(vec![0.0, 1.0, 1.0])),
                ("m".into(), Column::Labels(vec!["lo".into(), "hi".into(), "hi".into()])),
                ("y".into(), Column::Numeric(vec![1.5, 2.0, 3.0])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn whole_numbers_become_labels() {
        assert_eq!(tiny().labels("a").unwrap(), vec!["0", "1", "1"]);
    }

    #[test]
    fn fractional_values_are_not_categorical() {
        let err = tiny().labels("y").unwrap_err();
        assert!(matches!(err, DataError::NonCategorical { row: 0, .. }));
    }

    #[test]
    fn missing_role_column_is_named() {
        let err = Dataset::new(
            Roles::new("a", &["bmi"], "y"),
            vec![
                ("a".into(), Column::Numeric(vec![0.0])),
                ("y".into(), Column::Numeric(vec![1.0])),
            ],
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "column `bmi` not found");
    }

    #[test]
    fn selecting_rows_repeats() {
        let d = tiny().select_rows(&[2, 2, 0]);
        assert_eq!(d.numeric("y").unwrap(), &[3.0, 3.0, 1.5]);
    }

    #[test]
    fn csv_round_trip_text() {
        let mut buf = Vec::new();
        tiny().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,m,y\n0,lo,1.5\n1,hi,2\n1,hi,3\n");
    }
}
