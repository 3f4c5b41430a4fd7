//! Corpus-level pass rates over run outcomes.
//!
//! Rates are computed from integer tallies and converted to any scalar that
//! can represent a ratio of counts, so the same code yields exact rationals
//! for comparison and floats for reporting.

use std::collections::BTreeMap;
use std::fmt::{self, Debug, Write as _};

use num_traits::{FromPrimitive, Num, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{ErrorCode, TravelPlan};
use crate::verify::ConstraintReport;

/// Numeric type a rate can be expressed in.
pub trait Scalar: Num + FromPrimitive + ToPrimitive + Copy + PartialOrd + Debug {}

impl<T> Scalar for T where T: Num + FromPrimitive + ToPrimitive + Copy + PartialOrd + Debug {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no outcomes to aggregate")]
    EmptyCorpus,
    #[error("count {0} is not representable in the scalar type")]
    Unrepresentable(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Commonsense,
    Hard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub query_id: String,
    pub delivered: bool,
    pub delivery_failure: Option<ErrorCode>,
    pub plan: Option<TravelPlan>,
    pub report: Option<ConstraintReport>,
    pub steps_used: u32,
    /// Hard constraints the query states, budget included.
    pub applicable_hard: u32,
}

impl RunOutcome {
    pub fn delivered(plan: TravelPlan, report: ConstraintReport, steps_used: u32) -> Self {
        RunOutcome {
            query_id: plan.query_id.clone(),
            delivered: true,
            delivery_failure: None,
            applicable_hard: report.passed_hard.len() as u32,
            plan: Some(plan),
            report: Some(report),
            steps_used,
        }
    }

    pub fn undelivered(query_id: impl Into<String>, failure: ErrorCode, applicable_hard: u32, steps_used: u32) -> Self {
        RunOutcome {
            query_id: query_id.into(),
            delivered: false,
            delivery_failure: Some(failure),
            plan: None,
            report: None,
            steps_used,
            applicable_hard,
        }
    }

    /// (passed, total) constraints of a family. Undelivered plans fail all of theirs.
    pub fn tally(&self, family: Family) -> Tally {
        match (&self.report, family) {
            (Some(r), Family::Commonsense) => Tally::of(r.passed_commonsense.values()),
            (Some(r), Family::Hard) => Tally::of(r.passed_hard.values()),
            (None, Family::Commonsense) => Tally { passed: 0, total: ErrorCode::COMMONSENSE.len() as u64 },
            (None, Family::Hard) => Tally { passed: 0, total: u64::from(self.applicable_hard) },
        }
    }

    pub fn passes_all(&self, family: Family) -> bool {
        self.delivered && self.tally(family).is_clean()
    }

    pub fn passes_final(&self) -> bool {
        self.passes_all(Family::Commonsense) && self.passes_all(Family::Hard)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: u64,
    pub total: u64,
}

impl Tally {
    fn of<'a>(flags: impl Iterator<Item = &'a bool>) -> Tally {
        flags.fold(Tally::default(), |t, p| Tally { passed: t.passed + u64::from(*p), total: t.total + 1 })
    }

    fn is_clean(&self) -> bool {
        self.passed == self.total
    }

    fn add(self, other: Tally) -> Tally {
        Tally { passed: self.passed + other.passed, total: self.total + other.total }
    }

    /// passed / total; an empty tally counts as fully passed.
    pub fn rate<T: Scalar>(&self) -> Result<T, MetricsError> {
        if self.total == 0 {
            return Ok(T::one());
        }
        let scalar = |n: u64| T::from_u64(n).ok_or(MetricsError::Unrepresentable(n));
        Ok(scalar(self.passed)? / scalar(self.total)?)
    }
}

fn nonempty(outcomes: &[RunOutcome]) -> Result<(), MetricsError> {
    if outcomes.is_empty() {
        Err(MetricsError::EmptyCorpus)
    } else {
        Ok(())
    }
}

fn count_rate<T: Scalar>(outcomes: &[RunOutcome], pred: impl Fn(&RunOutcome) -> bool) -> Result<T, MetricsError> {
    nonempty(outcomes)?;
    let passed = outcomes.iter().filter(|o| pred(o)).count() as u64;
    Tally { passed, total: outcomes.len() as u64 }.rate()
}

pub fn micro_pass_rate<T: Scalar>(outcomes: &[RunOutcome], family: Family) -> Result<T, MetricsError> {
    nonempty(outcomes)?;
    outcomes.iter().map(|o| o.tally(family)).fold(Tally::default(), Tally::add).rate()
}

pub fn macro_pass_rate<T: Scalar>(outcomes: &[RunOutcome], family: Family) -> Result<T, MetricsError> {
    count_rate(outcomes, |o| o.passes_all(family))
}

pub fn delivery_rate<T: Scalar>(outcomes: &[RunOutcome]) -> Result<T, MetricsError> {
    count_rate(outcomes, |o| o.delivered)
}

pub fn final_pass_rate<T: Scalar>(outcomes: &[RunOutcome]) -> Result<T, MetricsError> {
    count_rate(outcomes, RunOutcome::passes_final)
}

/// Findings and delivery failures by code.
pub fn error_histogram(outcomes: &[RunOutcome]) -> BTreeMap<ErrorCode, u64> {
    let mut hist = BTreeMap::new();
    for o in outcomes {
        if let Some(code) = o.delivery_failure {
            *hist.entry(code).or_default() += 1;
        }
        for f in o.report.iter().flat_map(|r| &r.findings) {
            *hist.entry(f.code).or_default() += 1;
        }
    }
    hist
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport<T> {
    pub label: String,
    pub outcomes: usize,
    pub delivery_rate: T,
    pub micro_commonsense: T,
    pub macro_commonsense: T,
    pub micro_hard: T,
    pub macro_hard: T,
    pub final_pass_rate: T,
    pub error_histogram: BTreeMap<ErrorCode, u64>,
}

impl<T: Scalar> CorpusReport<T> {
    pub fn compute(label: impl Into<String>, outcomes: &[RunOutcome]) -> Result<Self, MetricsError> {
        Ok(CorpusReport {
            label: label.into(),
            outcomes: outcomes.len(),
            delivery_rate: delivery_rate(outcomes)?,
            micro_commonsense: micro_pass_rate(outcomes, Family::Commonsense)?,
            macro_commonsense: macro_pass_rate(outcomes, Family::Commonsense)?,
            micro_hard: micro_pass_rate(outcomes, Family::Hard)?,
            macro_hard: macro_pass_rate(outcomes, Family::Hard)?,
            final_pass_rate: final_pass_rate(outcomes)?,
            error_histogram: error_histogram(outcomes),
        })
    }

    pub fn rates(&self) -> [T; 6] {
        [
            self.delivery_rate,
            self.micro_commonsense,
            self.macro_commonsense,
            self.micro_hard,
            self.macro_hard,
            self.final_pass_rate,
        ]
    }

    pub fn to_f64(&self) -> CorpusReport<f64> {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        CorpusReport {
            label: self.label.clone(),
            outcomes: self.outcomes,
            delivery_rate: f(self.delivery_rate),
            micro_commonsense: f(self.micro_commonsense),
            macro_commonsense: f(self.macro_commonsense),
            micro_hard: f(self.micro_hard),
            macro_hard: f(self.macro_hard),
            final_pass_rate: f(self.final_pass_rate),
            error_histogram: self.error_histogram.clone(),
        }
    }
}

/// Percentage with one decimal, e.g. 0.875 -> "87.5".
pub fn percent(rate: f64) -> String {
    format!("{:.1}", rate * 100.0)
}

const COLUMNS: [&str; 6] = [
    "Delivery Rate",
    "Commonsense Micro",
    "Commonsense Macro",
    "Hard Micro",
    "Hard Macro",
    "Final Pass Rate",
];

/// Plain-text table, one row per labelled report.
pub fn render_table<T: Scalar>(reports: &[CorpusReport<T>]) -> String {
    let label_width = reports.iter().map(|r| r.label.len()).chain([5]).max().unwrap_or(5);
    let mut out = String::new();
    let _ = write!(out, "{:<label_width$}", "Label");
    for c in COLUMNS {
        let _ = write!(out, " | {c}");
    }
    out.push('\n');
    let _ = write!(out, "{}", "-".repeat(label_width));
    for c in COLUMNS {
        let _ = write!(out, "-|-{}", "-".repeat(c.len()));
    }
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{:<label_width$}", r.label);
        for (c, v) in COLUMNS.iter().zip(r.to_f64().rates()) {
            let _ = write!(out, " | {:>w$}", percent(v), w = c.len());
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for CorpusReport<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_table(std::slice::from_ref(self)))
    }
}

/// JSON form with rates as one-decimal percentages.
pub fn report_json<T: Scalar>(report: &CorpusReport<T>) -> serde_json::Value {
    let r = report.to_f64();
    let pct = |x: f64| serde_json::Value::String(percent(x));
    serde_json::json!({
        "label": r.label,
        "outcomes": r.outcomes,
        "delivery_rate": pct(r.delivery_rate),
        "commonsense_micro": pct(r.micro_commonsense),
        "commonsense_macro": pct(r.macro_commonsense),
        "hard_micro": pct(r.micro_hard),
        "hard_macro": pct(r.macro_hard),
        "final_pass_rate": pct(r.final_pass_rate),
        "error_histogram": r.error_histogram,
    })
}
