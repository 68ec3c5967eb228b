//! Report rows and their CSV/JSON serialization.
//!
//! CSV is the canonical format: UTF-8, LF line endings, `.` decimal
//! separator, reals printed with 17 significant digits so a report row
//! round-trips bit-exactly. JSON mirrors the same rows as an array of
//! objects. Network widths are joined with `-` (`1-10-10-1`) to keep the
//! CSV quoting-free.

use serde::Serialize;

use quadnn::problems::RunReport;

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub suite_id: String,
    pub n_train: usize,
    pub widths: String,
    pub adam_epochs: usize,
    pub lbfgs_epochs: usize,
    pub lr: f64,
    pub seed: u64,
    pub final_loss: f64,
    pub mae: Option<f64>,
    pub j_value: Option<f64>,
    pub best: bool,
    pub wall_time_ms: u128,
}

impl ReportRow {
    pub fn from_report(r: &RunReport, best: bool) -> Self {
        ReportRow {
            suite_id: r.id.clone(),
            n_train: r.n_train,
            widths: r
                .widths
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join("-"),
            adam_epochs: r.schedule.adam_epochs,
            lbfgs_epochs: r.schedule.lbfgs_epochs,
            lr: r.schedule.lbfgs_lr,
            seed: r.seed,
            final_loss: r.final_loss,
            mae: r.mae,
            j_value: r.j_value,
            best,
            wall_time_ms: r.wall_time_ms,
        }
    }
}

pub const CSV_HEADER: &str =
    "suite_id,n_train,widths,adam_epochs,lbfgs_epochs,lr,seed,final_loss,mae,j_value,best,wall_time_ms";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.suite_id,
            r.n_train,
            r.widths,
            r.adam_epochs,
            r.lbfgs_epochs,
            real(r.lr),
            r.seed,
            real(r.final_loss),
            opt_real(r.mae),
            opt_real(r.j_value),
            r.best,
            r.wall_time_ms,
        ));
    }
    out
}

pub fn to_json(rows: &[ReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("report serialization")
}

/// Rows of the quadrature-comparison report.
#[derive(Debug, Clone, Serialize)]
pub struct QuadCompareRow {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub gauss_error: f64,
    pub trapezoid_error: f64,
    pub monte_carlo_error: f64,
}

pub const QUAD_CSV_HEADER: &str = "function,a,b,n,gauss_error,trapezoid_error,monte_carlo_error";

pub fn quad_to_csv(rows: &[QuadCompareRow]) -> String {
    let mut out = String::from(QUAD_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.function,
            real(r.a),
            real(r.b),
            r.n,
            real(r.gauss_error),
            real(r.trapezoid_error),
            real(r.monte_carlo_error),
        ));
    }
    out
}

pub fn quad_to_json(rows: &[QuadCompareRow]) -> String {
    serde_json::to_string_pretty(rows).expect("report serialization")
}
