use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::EstimateError;

/// Relative size of a pivot below which a column counts as dependent.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// A named design matrix, one column per regressor.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    matrix: DMatrix<f64>,
}

impl Design {
    /// Builds a design from named columns of equal length.
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Result<Self, EstimateError> {
        let rows = columns.first().map_or(0, |c| c.1.len());
        if let Some((name, col)) = columns.iter().find(|c| c.1.len() != rows) {
            return Err(EstimateError::DimensionMismatch(format!(
                "column `{name}` has {} rows, expected {rows}",
                col.len()
            )));
        }
        let names = columns.iter().map(|c| c.0.clone()).collect();
        let matrix = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j].1[i]);
        Ok(Design { names, matrix })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }
}

/// One row of a coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
}

/// Least-squares fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<Coefficient>,
    /// `RSS / (n − p)`; zero when `n = p`.
    pub sigma2: f64,
    pub rss: f64,
    pub n: usize,
}

impl OlsFit {
    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Ordinary least squares through a column-pivoted QR factorization.
///
/// A column whose pivot falls below [`PIVOT_TOLERANCE`] times the first
/// pivot is reported as [`EstimateError::RankDeficient`]. Standard errors
/// are `sqrt(σ² diag((X'X)⁻¹))`.
pub fn fit_ols(design: &Design, response: &[f64]) -> Result<OlsFit, EstimateError> {
    let (n, p) = design.matrix.shape();
    if response.len() != n {
        return Err(EstimateError::DimensionMismatch(format!(
            "design has {n} rows but the response has {}",
            response.len()
        )));
    }
    if p == 0 || n < p {
        return Err(EstimateError::DimensionMismatch(format!(
            "{n} rows cannot identify {p} coefficients"
        )));
    }
    if let Some(bad) = response.iter().chain(design.matrix.iter()).find(|v| !v.is_finite()) {
        return Err(EstimateError::NonFinite(format!("{bad} in the regression data")));
    }

    let qr = design.matrix.clone().col_piv_qr();
    let mut order = DMatrix::from_fn(1, p, |_, j| j);
    qr.p().permute_columns(&mut order);
    let r = qr.r();
    let lead = r[(0, 0)].abs();
    for k in 0..p {
        if !(r[(k, k)].abs() > PIVOT_TOLERANCE * lead) {
            return Err(EstimateError::RankDeficient { column: design.names[order[(0, k)]].clone() });
        }
    }

    let mut qty = DVector::from_column_slice(response);
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, p).into_owned();
    let z = r
        .solve_upper_triangular(&head)
        .ok_or_else(|| EstimateError::RankDeficient { column: design.names[order[(0, p - 1)]].clone() })?;
    let rss: f64 = qty.rows(p, n - p).iter().map(|v| v * v).sum();
    let sigma2 = if n > p { rss / (n - p) as f64 } else { 0.0 };

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| EstimateError::RankDeficient { column: design.names[order[(0, p - 1)]].clone() })?;
    let mut beta = vec![0.0; p];
    let mut se = vec![0.0; p];
    for k in 0..p {
        let j = order[(0, k)];
        beta[j] = z[k];
        se[j] = (sigma2 * r_inv.row(k).norm_squared()).sqrt();
    }
    Ok(OlsFit {
        coefficients: design
            .names
            .iter()
            .zip(beta.into_iter().zip(se))
            .map(|(name, (estimate, std_error))| Coefficient { name: name.clone(), estimate, std_error })
            .collect(),
        sigma2,
        rss,
        n,
    })
}
