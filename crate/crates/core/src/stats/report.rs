use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::TestResult;

/// An identity left out of a run, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub identity_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_seed: u64,
    /// Left empty unless the caller stamps it, so equal runs serialize equally.
    pub timestamp: Option<String>,
    pub config: Value,
    pub results: Vec<TestResult>,
    pub skipped: Vec<Skipped>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// Plain-text table, one row per result and per skipped entry.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<20} {:>14} {:>14} {:>9} {:>20}  result",
            "identity", "statistic", "critical", "n", "seed"
        );
        for r in &self.results {
            let _ = writeln!(
                s,
                "{:<20} {:>14.6} {:>14.6} {:>9} {:>20}  {}",
                r.identity_id,
                r.statistic,
                r.critical_value,
                r.n,
                r.seed,
                if r.passed { "pass" } else { "FAIL" }
            );
        }
        for k in &self.skipped {
            let _ = writeln!(s, "{:<20} skipped: {}", k.identity_id, k.reason);
        }
        s
    }
}
