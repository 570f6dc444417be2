//! Fuzz reports: per-trial verdicts, totals and the discrepancy table.
//!
//! Rendering is a pure function of the report contents. Wall-clock time is
//! carried alongside but never rendered, so equal runs print equal bytes.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::{DimRanges, Dims};
use super::evaluate::Evaluation;
use super::scenario::{parse_error, Scenario, TheoremKind};
use crate::constructions::{lower_ok, upper_ok, ENVELOPE_TOL};
use crate::error::Result;
use crate::frame::FrameBounds;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialVerdict {
    pub index: usize,
    pub status: TrialStatus,
    pub dims: Option<Dims>,
    pub attempts: usize,
    pub evaluation: Option<Evaluation>,
    /// Failed checks, evaluation errors or the skip reason.
    pub reasons: Vec<String>,
    /// The instance, kept for failing trials only.
    #[serde(skip)]
    pub scenario: Option<Scenario>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    /// `claimed` or `corrected`.
    pub constant: String,
    /// `lower` or `upper`.
    pub side: String,
    /// Trials with hypotheses holding and a comparable pair of values.
    pub evaluated: usize,
    pub violations: usize,
    /// Largest of `constant / certified` (lower) or `certified / constant`
    /// (upper); above 1 means the constant fails.
    pub worst_ratio: Option<f64>,
    pub worst_trial: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub theorem: TheoremKind,
    pub master_seed: u64,
    pub trials: usize,
    pub dims: DimRanges,
    pub tol: f64,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub discrepancies: Vec<DiscrepancyRow>,
    pub verdicts: Vec<TrialVerdict>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl Report {
    pub(crate) fn assemble(
        theorem: TheoremKind,
        master_seed: u64,
        dims: DimRanges,
        tol: f64,
        verdicts: Vec<TrialVerdict>,
        wall_clock: Duration,
    ) -> Self {
        let count = |s| verdicts.iter().filter(|v| v.status == s).count();
        Self {
            format_version: REPORT_FORMAT_VERSION,
            theorem,
            master_seed,
            trials: verdicts.len(),
            dims,
            tol,
            passed: count(TrialStatus::Pass),
            failed: count(TrialStatus::Fail),
            skipped: count(TrialStatus::Skipped),
            discrepancies: discrepancy_table(&verdicts),
            verdicts,
            wall_clock,
        }
    }

    pub fn has_hard_failures(&self) -> bool {
        self.failed > 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let r = |[lo, hi]: [usize; 2]| {
            if lo == hi {
                lo.to_string()
            } else {
                format!("{lo}..{hi}")
            }
        };
        let _ = writeln!(out, "theorem      {}", self.theorem);
        let _ = writeln!(out, "master seed  {}", self.master_seed);
        let _ = writeln!(
            out,
            "dims         d={} n={} N={} m={}",
            r(self.dims.alg_dim),
            r(self.dims.source_len),
            r(self.dims.atoms),
            r(self.dims.dst_len)
        );
        let _ = writeln!(out, "tolerance    {:e}", self.tol);
        let _ = writeln!(
            out,
            "trials       {}  passed {}  failed {}  skipped {}",
            self.trials, self.passed, self.failed, self.skipped
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "discrepancies (certified vs stated constants)");
        let _ = writeln!(
            out,
            "{:<10} {:<6} {:>9} {:>10} {:>14} {:>7}",
            "constant", "side", "evaluated", "violations", "worst ratio", "trial"
        );
        if self.discrepancies.is_empty() {
            let _ = writeln!(out, "(no stated constants for this kind)");
        }
        for row in &self.discrepancies {
            let _ = writeln!(
                out,
                "{:<10} {:<6} {:>9} {:>10} {:>14} {:>7}",
                row.constant,
                row.side,
                row.evaluated,
                row.violations,
                row.worst_ratio.map_or("-".into(), |x| format!("{x:.6e}")),
                row.worst_trial.map_or("-".into(), |t| t.to_string()),
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>6}  {:<7} {:<24} {:>8}  detail",
            "trial", "status", "dims", "attempts"
        );
        for v in &self.verdicts {
            let dims = v.dims.as_ref().map_or("-".to_string(), |d| {
                format!("d={} n={} m={:?}", d.alg_dim, d.source_len, d.dst_lens)
            });
            let status = match v.status {
                TrialStatus::Pass => "pass",
                TrialStatus::Fail => "FAIL",
                TrialStatus::Skipped => "skipped",
            };
            let detail = match (&v.evaluation, v.status) {
                (_, TrialStatus::Fail | TrialStatus::Skipped) => v.reasons.join("; "),
                (Some(e), _) => bounds_summary(e),
                (None, _) => String::new(),
            };
            let _ = writeln!(
                out,
                "{:>6}  {:<7} {:<24} {:>8}  {}",
                v.index, status, dims, v.attempts, detail
            );
        }
        out
    }
}

fn bounds_summary(e: &Evaluation) -> String {
    let fmt = |b: &Option<FrameBounds>| {
        b.map_or("-".to_string(), |b| {
            format!("[{:.4e}, {:.4e}]", b.lower, b.upper)
        })
    };
    let mut s = format!("certified {}", fmt(&e.certified));
    if e.corrected.is_some() {
        let _ = write!(
            s,
            " corrected {} claimed {}",
            fmt(&e.corrected),
            fmt(&e.claimed)
        );
    }
    if !e.hypotheses_hold() {
        s.push_str(" (hypotheses fail)");
    }
    s
}

/// `x / y` for comparable finite values; `None` when either side is
/// infinite or the ratio is undefined.
fn ratio(x: f64, y: f64) -> Option<f64> {
    if !(x.is_finite() && y.is_finite()) {
        return None;
    }
    if y > 0.0 {
        Some(x / y)
    } else if x <= 0.0 {
        Some(1.0)
    } else {
        Some(f64::INFINITY)
    }
}

fn discrepancy_table(verdicts: &[TrialVerdict]) -> Vec<DiscrepancyRow> {
    let evaluated: Vec<(usize, &Evaluation)> = verdicts
        .iter()
        .filter_map(|v| v.evaluation.as_ref().map(|e| (v.index, e)))
        .filter(|(_, e)| e.corrected.is_some() && e.hypotheses_hold())
        .collect();
    if verdicts
        .iter()
        .filter_map(|v| v.evaluation.as_ref())
        .all(|e| e.corrected.is_none())
    {
        return Vec::new();
    }
    let mut rows = Vec::new();
    for (constant, pick) in [
        (
            "claimed",
            (|e: &Evaluation| e.claimed) as fn(&Evaluation) -> Option<FrameBounds>,
        ),
        ("corrected", |e: &Evaluation| e.corrected),
    ] {
        for side in ["lower", "upper"] {
            let mut row = DiscrepancyRow {
                constant: constant.into(),
                side: side.into(),
                evaluated: 0,
                violations: 0,
                worst_ratio: None,
                worst_trial: None,
            };
            for (idx, e) in &evaluated {
                let (Some(c), Some(cert)) = (pick(e), e.certified) else {
                    continue;
                };
                let (ok, q) = if side == "lower" {
                    (
                        lower_ok(cert.lower, c.lower, ENVELOPE_TOL),
                        ratio(c.lower, cert.lower),
                    )
                } else {
                    (
                        upper_ok(cert.upper, c.upper, ENVELOPE_TOL),
                        ratio(cert.upper, c.upper),
                    )
                };
                row.evaluated += 1;
                if !ok {
                    row.violations += 1;
                }
                if let Some(q) = q {
                    if row.worst_ratio.map_or(true, |w| q > w) {
                        row.worst_ratio = Some(q);
                        row.worst_trial = Some(*idx);
                    }
                }
            }
            rows.push(row);
        }
    }
    rows
}
