//! Pre-estimation checks that report problems instead of failing.

use serde::{Deserialize, Serialize};
use vecmkit_core::series::Dataset;

/// Below this many observations no test in the pipeline is attempted.
pub const MIN_OBSERVATIONS: usize = 12;
/// Below this many observations asymptotic critical values are unreliable.
pub const SMALL_SAMPLE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    TooShortForInference { len: usize, minimum: usize },
    SmallSample { len: usize, recommended: usize },
    NonPositive { variable: String, year: i32, value: f64 },
    NonFinite { variable: String, year: i32 },
    NonContiguous { variable: String, start: i32, end: i32, len: usize },
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: IssueKind,
    pub message: String,
}

impl Issue {
    fn new(severity: Severity, kind: IssueKind) -> Self {
        let message = match &kind {
            IssueKind::TooShortForInference { len, minimum } => {
                format!("{len} observations; at least {minimum} are needed for inference")
            }
            IssueKind::SmallSample { len, recommended } => format!(
                "{len} observations; below {recommended} asymptotic critical values are unreliable"
            ),
            IssueKind::NonPositive { variable, year, value } => {
                format!("{variable} is {value} in {year}; logarithm undefined")
            }
            IssueKind::NonFinite { variable, year } => format!("{variable} is not finite in {year}"),
            IssueKind::NonContiguous {
                variable,
                start,
                end,
                len,
            } => format!("{variable} spans {start}-{end} but has {len} values"),
            IssueKind::Empty => "dataset has no observations".to_string(),
        };
        Issue { severity, kind, message }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub observations: usize,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }
}

pub fn validate_dataset(d: &Dataset, for_logs: bool) -> ValidationReport {
    let len = d.len();
    let mut issues = Vec::new();
    if len == 0 {
        issues.push(Issue::new(Severity::Error, IssueKind::Empty));
    } else if len < MIN_OBSERVATIONS {
        issues.push(Issue::new(
            Severity::Error,
            IssueKind::TooShortForInference {
                len,
                minimum: MIN_OBSERVATIONS,
            },
        ));
    } else if len < SMALL_SAMPLE {
        issues.push(Issue::new(
            Severity::Warning,
            IssueKind::SmallSample {
                len,
                recommended: SMALL_SAMPLE,
            },
        ));
    }
    for s in d.series() {
        let span = (s.end_year() - s.start_year() + 1) as usize;
        if s.start_year() != d.start_year() || span != s.len() {
            issues.push(Issue::new(
                Severity::Error,
                IssueKind::NonContiguous {
                    variable: s.name().to_string(),
                    start: s.start_year(),
                    end: s.end_year(),
                    len: s.len(),
                },
            ));
        }
        for (year, &value) in s.years().zip(s.values()) {
            if !value.is_finite() {
                issues.push(Issue::new(
                    Severity::Error,
                    IssueKind::NonFinite {
                        variable: s.name().to_string(),
                        year,
                    },
                ));
            } else if for_logs && value <= 0.0 {
                issues.push(Issue::new(
                    Severity::Error,
                    IssueKind::NonPositive {
                        variable: s.name().to_string(),
                        year,
                        value,
                    },
                ));
            }
        }
    }
    ValidationReport {
        observations: len,
        issues,
    }
}
