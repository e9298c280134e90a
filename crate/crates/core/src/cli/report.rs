//! Machine-readable verification reports.

use serde::Serialize;

use crate::ring::RingSpec;
use crate::verdict::{Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub verified_order: Option<u32>,
    pub comparisons: usize,
    pub witness: Option<Witness>,
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CheckRecord {
    pub fn from_verdict(v: Verdict) -> Self {
        CheckRecord {
            name: v.name,
            status: if v.passed { Status::Pass } else { Status::Fail },
            verified_order: v.verified_order,
            comparisons: v.comparisons,
            witness: v.witness,
            detail: v.detail,
            elapsed_ms: None,
        }
    }

    pub fn error(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Error,
            verified_order: None,
            comparisons: 0,
            witness: None,
            detail: Some(detail.into()),
            elapsed_ms: None,
        }
    }

    /// A check that was not run because a prerequisite failed.
    pub fn blocked(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckRecord {
            status: Status::Fail,
            ..CheckRecord::error(name, detail)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RingRecord {
    pub num_vars: usize,
    pub truncation: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub ring: RingRecord,
    pub rank: usize,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    /// Sorts the records by name; the aggregate status is the worst one.
    pub fn new(
        scenario: impl Into<String>,
        ring: RingSpec,
        rank: usize,
        mut checks: Vec<CheckRecord>,
    ) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let status = checks
            .iter()
            .map(|c| c.status)
            .max()
            .unwrap_or(Status::Pass);
        Report {
            scenario: scenario.into(),
            ring: RingRecord {
                num_vars: ring.num_vars(),
                truncation: ring.truncation(),
            },
            rank,
            status,
            checks,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status != Status::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("{tag} {}", c.name));
            if let Some(o) = c.verified_order {
                out.push_str(&format!(" (order {o}, {} comparisons)", c.comparisons));
            }
            if let Some(ms) = c.elapsed_ms {
                out.push_str(&format!(" {ms} ms"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!("\n    witness: {w}"));
            }
            if c.status != Status::Pass {
                if let Some(d) = &c.detail {
                    out.push_str(&format!("\n    {d}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_worst_and_checks_sorted() {
        let ring = RingSpec::new(1, 2).unwrap();
        let pass = Verdict {
            name: "b".into(),
            passed: true,
            verified_order: Some(2),
            comparisons: 1,
            witness: None,
            detail: None,
        };
        let r = Report::new(
            "x",
            ring,
            1,
            vec![
                CheckRecord::from_verdict(pass.clone()),
                CheckRecord::blocked("a", "no"),
            ],
        );
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.checks[0].name, "a");
        assert_eq!(r.exit_code(), 1);
        let r = Report::new(
            "x",
            ring,
            1,
            vec![
                CheckRecord::from_verdict(pass),
                CheckRecord::error("c", "boom"),
            ],
        );
        assert_eq!(r.exit_code(), 2);
        assert!(!r.to_json().contains("elapsed_ms"));
    }
}
