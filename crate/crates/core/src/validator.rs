//! Design-time template validation.
//!
//! Static checks catch out-of-order fixed start times. Dynamic checks
//! re-run the generator with every delta pinned to -v, 0, and +v; a
//! failure at any extreme is reported with its kind. Mixed-sign extremes
//! are not enumerated (exponential); a pairwise overlap heuristic reports
//! the residual risk as a warning instead.

use serde::Serialize;

use crate::generator::{generate_schedule, DeltaSampler, ErrorKind};
use crate::schedule::ScheduleTemplate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FindingKind {
    Chronological,
    Underconstrained,
    Overconstrained,
    Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub kind: FindingKind,
    pub entry_index: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn has_error(&self, kind: FindingKind) -> bool {
        self.findings
            .iter()
            .any(|f| f.severity == Severity::Error && f.kind == kind)
    }
}

/// Sampler that pins every draw to one extreme of its variance range.
struct Extreme(i64);

impl DeltaSampler for Extreme {
    fn delta(&mut self, variance: i64) -> i64 {
        self.0.signum() * variance
    }
}

pub fn validate_template(template: &ScheduleTemplate) -> ValidationReport {
    let mut findings = Vec::new();

    // Static check: nominal fixed starts must be non-decreasing.
    let mut prev: Option<(usize, i64)> = None;
    for (i, e) in template.entries.iter().enumerate() {
        if let Some(start) = e.start {
            if let Some((pi, ps)) = prev {
                if start.minutes() < ps {
                    findings.push(Finding {
                        severity: Severity::Error,
                        kind: FindingKind::Chronological,
                        entry_index: Some(i),
                        message: format!(
                            "{} (entry {i}) starts at {start} before entry {pi}'s start",
                            e.activity
                        ),
                    });
                }
            }
            prev = Some((i, start.minutes()));
        }
    }

    // Dynamic check: generate at each variance extreme.
    if !findings.iter().any(|f| f.severity == Severity::Error) {
        for (sign, label) in [(-1i64, "-v"), (0, "0"), (1, "+v")] {
            if let Err(err) = generate_schedule(template, &mut Extreme(sign)) {
                let kind = match err.kind {
                    ErrorKind::Underconstrained => FindingKind::Underconstrained,
                    ErrorKind::Overconstrained => FindingKind::Overconstrained,
                };
                findings.push(Finding {
                    severity: Severity::Error,
                    kind,
                    entry_index: Some(err.entry_index),
                    message: format!("at extreme {label}: {}", err.detail),
                });
            }
        }
    }

    // Mixed-extreme overlap risk: a later start's minimum can precede an
    // earlier start's maximum even when all same-sign extremes pass.
    let mut prev: Option<(usize, i64, i64)> = None;
    for (i, e) in template.entries.iter().enumerate() {
        if let Some(start) = e.start {
            let v = e.start_variance.map_or(0, |v| v.minutes());
            if let Some((pi, ps, pv)) = prev {
                let already_error = start.minutes() < ps;
                if !already_error && start.minutes() - v < ps + pv {
                    findings.push(Finding {
                        severity: Severity::Warning,
                        kind: FindingKind::Chronological,
                        entry_index: Some(i),
                        message: format!(
                            "{} (entry {i}) may start before entry {pi} under mixed variance extremes",
                            e.activity
                        ),
                    });
                }
            }
            prev = Some((i, start.minutes(), v));
        }
    }

    let valid = !findings.iter().any(|f| f.severity == Severity::Error);
    ValidationReport { valid, findings }
}
