//! Per-iteration run traces and their JSON/CSV serialization.
//!
//! One JSON object per run: config echo, per-iteration records as columnar
//! arrays, final status, and totals. The CSV form has one row per iteration
//! with a versioned schema comment line on top.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Result;
use crate::solver::SolverStatus;

/// How an iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Stationarity gate failed; no step was computed.
    GateFailUnsuccessful,
    /// Step computed but the acceptance ratio test failed.
    RatioFailUnsuccessful,
    /// Accepted and `-Pred ≥ ε̄`.
    Reliable,
    /// Accepted with `-Pred < ε̄`.
    Unreliable,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::GateFailUnsuccessful => "gate-fail-unsuccessful",
            Classification::RatioFailUnsuccessful => "ratio-fail-unsuccessful",
            Classification::Reliable => "reliable",
            Classification::Unreliable => "unreliable",
        }
    }
}

/// One iteration of a solver run. Step-dependent fields are `None` on
/// gate-fail iterations where no step exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: u64,
    pub theta: f64,
    pub delta: f64,
    pub eps_bar: f64,
    pub mu_bar: f64,
    pub batch_g: u64,
    pub batch_f: u64,
    pub batch_h: u64,
    pub norm_q_bar: f64,
    /// `‖Q‖` with the exact gradient; filled when noise is zero (where it
    /// equals `‖Q̄‖`) or when diagnostics are requested.
    pub norm_q_true: Option<f64>,
    pub rel_kkt: f64,
    pub classification: Classification,
    pub hessian_norm: f64,
    pub wbar_norm: f64,
    pub vartheta_norm: f64,
    pub step_norm: Option<f64>,
    pub gamma_bar: Option<f64>,
    /// `‖ϑ + A d̃‖` after the step.
    pub lin_residual: Option<f64>,
    pub pred: Option<f64>,
    pub ared: Option<f64>,
    /// Right-hand side of the merit decrease threshold.
    pub pred_threshold: Option<f64>,
    pub tangential_decrease: Option<f64>,
    pub cauchy_decrease: Option<f64>,
    /// `min_i (s⁽ⁱ⁾ + Δs⁽ⁱ⁾)/s⁽ⁱ⁾` of the accepted step.
    pub slack_ratio_min: Option<f64>,
    /// Flops charged to this iteration under the counting rule.
    pub flops: u64,
}

/// Cumulative per-run counters.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Totals {
    pub iterations: u64,
    pub grad_samples: u64,
    pub value_samples: u64,
    pub hessian_samples: u64,
    pub flops: u64,
    pub final_rel_kkt: f64,
    /// Budget consumed, in the units of the configured budget kind.
    pub budget_used: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTrace {
    pub config_echo: serde_json::Value,
    pub records: Vec<IterationRecord>,
    pub status: SolverStatus,
    pub totals: Totals,
}

/// Columns of the CSV trace, in order.
const CSV_COLUMNS: &[&str] = &[
    "k",
    "theta",
    "delta",
    "eps_bar",
    "mu_bar",
    "batch_g",
    "batch_f",
    "batch_h",
    "norm_q_bar",
    "norm_q_true",
    "rel_kkt",
    "classification",
    "hessian_norm",
    "wbar_norm",
    "vartheta_norm",
    "step_norm",
    "gamma_bar",
    "lin_residual",
    "pred",
    "ared",
    "pred_threshold",
    "tangential_decrease",
    "cauchy_decrease",
    "slack_ratio_min",
    "flops",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

impl RunTrace {
    /// Columnar JSON object: `{config, iterations: {col: [...]}, status, totals}`.
    pub fn to_json(&self) -> serde_json::Value {
        macro_rules! column {
            ($field:ident) => {
                self.records.iter().map(|r| json!(r.$field)).collect::<Vec<_>>()
            };
        }
        let iterations = json!({
            "k": column!(k),
            "theta": column!(theta),
            "delta": column!(delta),
            "eps_bar": column!(eps_bar),
            "mu_bar": column!(mu_bar),
            "batch_g": column!(batch_g),
            "batch_f": column!(batch_f),
            "batch_h": column!(batch_h),
            "norm_q_bar": column!(norm_q_bar),
            "norm_q_true": column!(norm_q_true),
            "rel_kkt": column!(rel_kkt),
            "classification": self.records.iter().map(|r| json!(r.classification.label())).collect::<Vec<_>>(),
            "hessian_norm": column!(hessian_norm),
            "wbar_norm": column!(wbar_norm),
            "vartheta_norm": column!(vartheta_norm),
            "step_norm": column!(step_norm),
            "gamma_bar": column!(gamma_bar),
            "lin_residual": column!(lin_residual),
            "pred": column!(pred),
            "ared": column!(ared),
            "pred_threshold": column!(pred_threshold),
            "tangential_decrease": column!(tangential_decrease),
            "cauchy_decrease": column!(cauchy_decrease),
            "slack_ratio_min": column!(slack_ratio_min),
            "flops": column!(flops),
        });
        json!({
            "schema": "tripssqp-trace-v1",
            "config": self.config_echo,
            "iterations": iterations,
            "status": self.status,
            "totals": self.totals,
        })
    }

    /// CSV with one row per iteration; first line is a schema comment.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# tripssqp-trace-v1")?;
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{},{:.17e},{},{:.17e},{},{:.17e},{:.17e},{:.17e},{},{},{},{},{},{},{},{},{},{}",
                r.k,
                r.theta,
                r.delta,
                r.eps_bar,
                r.mu_bar,
                r.batch_g,
                r.batch_f,
                r.batch_h,
                r.norm_q_bar,
                opt(r.norm_q_true),
                r.rel_kkt,
                r.classification.label(),
                r.hessian_norm,
                r.wbar_norm,
                r.vartheta_norm,
                opt(r.step_norm),
                opt(r.gamma_bar),
                opt(r.lin_residual),
                opt(r.pred),
                opt(r.ared),
                opt(r.pred_threshold),
                opt(r.tangential_decrease),
                opt(r.cauchy_decrease),
                opt(r.slack_ratio_min),
                r.flops,
            )?;
        }
        Ok(())
    }
}
