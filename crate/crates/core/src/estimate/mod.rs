//! Estimators for decomposition components.
//!
//! * [`plugin_seq2`]: empirical formulas for categorical mediators.
//! * [`fit_linear_system`] and [`linear_components`]: least-squares fits of
//!   the Gaussian-linear sequential model and the closed-form components
//!   that follow from it.

mod assumptions;
mod linear;
mod ols;
mod plugin;

pub use assumptions::{Assumption, AssumptionLedger};
pub use linear::{
    apply_transforms, expectation_at, expectation_w, fit_linear_system, linear_components, simulate_linear,
    CovariateProfile, FitDiagnostics, LinearParams, LinearQuery, LinearSimulation, Transform, TransformKind, W,
};
pub use ols::{fit_ols, Coefficient, Design, OlsFit, PIVOT_TOLERANCE};
pub use plugin::{plugin, plugin_seq2};

use crate::data::DataError;
use crate::decomp::DecompError;
use crate::scm::ScmError;

#[derive(Debug, thiserror::Error)]
pub enum EstimateError {
    #[error("design matrix is rank deficient: column `{column}` depends on the others")]
    RankDeficient { column: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("log transform of `{column}` needs positive values; rows {} are not", list_rows(.rows))]
    NonPositiveLog { column: String, rows: Vec<usize> },
    #[error("invalid linear parameters: {0}")]
    InvalidParams(String),
    #[error("covariate profile: {0}")]
    Covariates(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Scm(#[from] ScmError),
    #[error(transparent)]
    Data(#[from] DataError),
}

fn list_rows(rows: &[usize]) -> String {
    const SHOWN: usize = 20;
    let mut out = rows.iter().take(SHOWN).map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
    if rows.len() > SHOWN {
        out.push_str(&format!(" and {} more", rows.len() - SHOWN));
    }
    out
}
