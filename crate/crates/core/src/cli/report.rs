use std::fmt::Write as _;

use serde::Serialize;

use super::RunConfig;
use crate::cfexpr::Scenario;
use crate::decomp::{names, DecompositionResult, Role};
use crate::estimate::{AssumptionLedger, OlsFit};

/// Digits kept in machine-readable output.
pub const JSON_DIGITS: usize = 12;
/// Digits shown in text tables.
pub const TABLE_DIGITS: usize = 4;

/// `v` rounded to `digits` significant digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits - 1, v).parse().unwrap_or(v)
}

/// `v` printed with `digits` significant digits, in scientific notation
/// when very large or very small.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&exp) {
        return format!("{:.*e}", digits - 1, v);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub role: Role,
    pub estimate: f64,
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub model: String,
    pub response: String,
    pub sigma2: f64,
    pub rows: Vec<(String, f64, f64)>,
}

impl CoefficientTable {
    pub fn new(model: &str, response: &str, fit: &OlsFit) -> Self {
        CoefficientTable {
            model: model.to_string(),
            response: response.to_string(),
            sigma2: round_sig(fit.sigma2, JSON_DIGITS),
            rows: fit
                .coefficients
                .iter()
                .map(|c| (c.name.clone(), round_sig(c.estimate, JSON_DIGITS), round_sig(c.std_error, JSON_DIGITS)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub n_used: Option<usize>,
    pub n_dropped: Option<usize>,
    pub sigma2_m1: Option<f64>,
    pub coefficient_tables: Vec<CoefficientTable>,
    pub failed_replicates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub config: RunConfig,
}

/// Everything a decomposition run prints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub estimator: String,
    pub scenario: Scenario,
    /// Components in report order followed by TE.
    pub components: Vec<ReportRow>,
    pub sum_gap: f64,
    pub level: Option<f64>,
    pub assumptions: AssumptionLedger,
    pub diagnostics: Diagnostics,
    pub provenance: Provenance,
}

impl Report {
    /// Copies `result` into rows rounded to [`JSON_DIGITS`], TE last.
    pub fn rows(result: &DecompositionResult) -> Vec<ReportRow> {
        let ci = |c: Option<(f64, f64)>| c.map(|(l, u)| (round_sig(l, JSON_DIGITS), round_sig(u, JSON_DIGITS)));
        result
            .components
            .iter()
            .map(|c| ReportRow {
                name: c.name.clone(),
                role: c.role,
                estimate: round_sig(c.value, JSON_DIGITS),
                ci: ci(c.ci),
            })
            .chain(std::iter::once(ReportRow {
                name: names::TE.to_string(),
                role: Role::Total,
                estimate: round_sig(result.te, JSON_DIGITS),
                ci: ci(result.te_ci),
            }))
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&ReportRow> {
        self.components.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} decomposition, scenario {}", self.estimator, self.scenario);
        let ci_head = match self.level {
            Some(l) => format!("{}% C.I.", round_sig(l * 100.0, 6)),
            None => String::new(),
        };
        let width = self.components.iter().map(|r| r.name.len()).max().unwrap_or(9).max(9);
        let _ = writeln!(out, "{:<width$}  {:>10}  {}", "Component", "Estimate", ci_head);
        for r in &self.components {
            let ci = r
                .ci
                .map(|(l, u)| format!("({}, {})", format_sig(l, TABLE_DIGITS), format_sig(u, TABLE_DIGITS)))
                .unwrap_or_default();
            let mark = if r.role == Role::Auxiliary { " *" } else { "" };
            let _ = writeln!(
                out,
                "{:<width$}  {:>10}  {}",
                format!("{}{}", r.name, mark),
                format_sig(r.estimate, TABLE_DIGITS),
                ci
            );
        }
        if self.components.iter().any(|r| r.role == Role::Auxiliary) {
            let _ = writeln!(out, "* not a summand of TE");
        }
        let _ = writeln!(out, "|sum of summands - TE| = {:.3e}", self.sum_gap);

        let ack = if self.assumptions.all_acknowledged() { "acknowledged" } else { "not acknowledged" };
        let _ = writeln!(out, "\nIdentification assumptions ({ack}):");
        for a in &self.assumptions.assumptions {
            let _ = writeln!(out, "  {:<4} {:<38} {}", a.id, a.statement, a.description);
        }

        let d = &self.diagnostics;
        if d.n_used.is_some() || d.sigma2_m1.is_some() || d.failed_replicates.is_some() {
            let _ = writeln!(out, "\nDiagnostics:");
            if let Some(n) = d.n_used {
                let _ = writeln!(out, "  rows used {n}, dropped {}", d.n_dropped.unwrap_or(0));
            }
            if let Some(s) = d.sigma2_m1 {
                let _ = writeln!(out, "  sigma2_M1 = {}", format_sig(s, TABLE_DIGITS));
            }
            if let Some(f) = d.failed_replicates {
                let _ = writeln!(out, "  failed bootstrap replicates {f}");
            }
        }
        for t in &d.coefficient_tables {
            let _ = writeln!(
                out,
                "\n{} model for {} (sigma2 = {})",
                t.model,
                t.response,
                format_sig(t.sigma2, TABLE_DIGITS)
            );
            let w = t.rows.iter().map(|r| r.0.len()).max().unwrap_or(4).max(4);
            let _ = writeln!(out, "  {:<w$}  {:>10}  {:>10}", "Term", "Estimate", "Std. Err.");
            for (name, est, se) in &t.rows {
                let _ = writeln!(
                    out,
                    "  {:<w$}  {:>10}  {:>10}",
                    name,
                    format_sig(*est, TABLE_DIGITS),
                    format_sig(*se, TABLE_DIGITS)
                );
            }
        }

        let p = &self.provenance;
        let _ = writeln!(out, "\nnatfx {}", p.version);
        if let Some(seed) = p.seed {
            let _ = writeln!(out, "seed {seed}, replicates {}", p.replicates.unwrap_or(0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(3.12, 4), "3.120");
        assert_eq!(format_sig(0.143_21, 3), "0.143");
        assert_eq!(format_sig(-0.0004567, 2), "-0.00046");
        assert_eq!(format_sig(12345.6, 4), "12346");
        assert_eq!(format_sig(1.5e-9, 3), "1.50e-9");
        assert_eq!(format_sig(0.0, 4), "0");
        assert_eq!(round_sig(1.0 / 3.0, 12), 0.333333333333);
        assert_eq!(round_sig(2.8, 12), 2.8);
    }

    #[test]
    fn table_agrees_with_rounded_values() {
        for v in [0.23849999, 1.0 / 7.0, -3.1249999, 987.65] {
            let r = round_sig(v, JSON_DIGITS);
            assert_eq!(format_sig(r, TABLE_DIGITS), format_sig(round_sig(r, TABLE_DIGITS), TABLE_DIGITS));
        }
    }
}
