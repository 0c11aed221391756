//! The three hypothesis tests behind every identity check, and the report types.

mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub use report::{Skipped, VerificationReport};

/// Outcome of one statistical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub identity_id: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub n: u64,
    pub seed: u64,
    pub passed: bool,
    pub details: BTreeMap<String, Value>,
}

impl TestResult {
    pub fn new(kind: &str, statistic: f64, critical_value: f64, n: u64, passed: bool) -> Self {
        Self {
            identity_id: kind.to_string(),
            statistic,
            critical_value,
            n,
            seed: 0,
            passed,
            details: BTreeMap::new(),
        }
    }

    /// Renames the result and records the seed that produced its samples.
    pub fn labeled(mut self, id: &str, seed: u64) -> Self {
        self.identity_id = id.to_string();
        self.seed = seed;
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

/// Asymptotic Kolmogorov constant `c(alpha) = sqrt(-ln(alpha / 2) / 2)`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Largest gap between the two empirical CDFs.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (m, n) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / m - j as f64 / n).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic critical value
/// `c(alpha) sqrt((m + n) / (m n))`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TestInput("KS needs two nonempty samples".into()));
    }
    check_alpha(alpha)?;
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::TestInput("NaN in KS sample".into()));
    }
    let d = ks_distance(a, b);
    let (m, n) = (a.len() as f64, b.len() as f64);
    let crit = ks_coefficient(alpha) * ((m + n) / (m * n)).sqrt();
    Ok(TestResult::new("ks_two_sample", d, crit, (a.len() + b.len()) as u64, d < crit)
        .with_detail("m", a.len())
        .with_detail("n", b.len())
        .with_detail("alpha", alpha))
}

/// One-sample Kolmogorov–Smirnov test against an explicit CDF, critical
/// value `c(alpha) / sqrt(n)`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, alpha: f64) -> Result<TestResult> {
    if samples.is_empty() {
        return Err(Error::TestInput("KS needs a nonempty sample".into()));
    }
    check_alpha(alpha)?;
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::TestInput("NaN in KS sample".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let d = s.iter().enumerate().fold(0.0f64, |d, (i, x)| {
        let f = cdf(*x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    });
    let crit = ks_coefficient(alpha) / n.sqrt();
    Ok(TestResult::new("ks_one_sample", d, crit, s.len() as u64, d < crit).with_detail("alpha", alpha))
}

/// Joins several checks into one result that passes iff all parts pass. The
/// statistic is the largest `statistic / critical_value` ratio, against 1.
pub fn combine(parts: Vec<(&str, TestResult)>) -> TestResult {
    let ratio = parts
        .iter()
        .map(|(_, r)| r.statistic / r.critical_value)
        .fold(0.0, f64::max);
    let passed = parts.iter().all(|(_, r)| r.passed);
    let n = parts.iter().map(|(_, r)| r.n).max().unwrap_or(0);
    let mut out = TestResult::new("combined", ratio, 1.0, n, passed);
    for (name, r) in parts {
        let v = serde_json::json!({
            "test": r.identity_id,
            "statistic": r.statistic,
            "critical_value": r.critical_value,
            "n": r.n,
            "passed": r.passed,
            "details": r.details,
        });
        out = out.with_detail(name, v);
    }
    out
}

/// Chi-square test of independence on a `bins x bins` table of marginal
/// quantile bins, `(bins - 1)^2` degrees of freedom.
pub fn chi_square_independence(x: &[f64], y: &[f64], bins: usize, alpha: f64) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::TestInput(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    if bins < 2 {
        return Err(Error::TestInput("need at least two bins".into()));
    }
    check_alpha(alpha)?;
    let n = x.len();
    if n < bins * bins {
        return Err(Error::TestInput(format!("{n} points cannot fill {bins}x{bins} cells")));
    }
    let bx = quantile_bins(x, bins)?;
    let by = quantile_bins(y, bins)?;
    let mut table = vec![vec![0u64; bins]; bins];
    for (i, j) in bx.iter().zip(&by) {
        table[*i][*j] += 1;
    }
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..bins)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let total = n as f64;
    let mut stat = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let e = rows[i] * cols[j] / total;
            let o = table[i][j] as f64;
            stat += (o - e) * (o - e) / e;
        }
    }
    let df = ((bins - 1) * (bins - 1)) as f64;
    let crit = ChiSquared::new(df)
        .map_err(|e| Error::TestInput(e.to_string()))?
        .inverse_cdf(1.0 - alpha);
    Ok(TestResult::new("chi_square_independence", stat, crit, n as u64, stat < crit)
        .with_detail("bins", bins)
        .with_detail("df", df)
        .with_detail("alpha", alpha))
}

/// Bin index by rank. Ties straddling a quantile cut would make the bins
/// depend on sort order, so they are rejected.
fn quantile_bins(v: &[f64], bins: usize) -> Result<Vec<usize>> {
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::TestInput("NaN in chi-square sample".into()));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = v.len();
    let cuts: Vec<f64> = (1..bins).map(|k| sorted[k * n / bins]).collect();
    for (k, c) in cuts.iter().enumerate() {
        let at = (k + 1) * n / bins;
        if sorted[at - 1] == *c {
            return Err(Error::TestInput(format!(
                "tied values at quantile cut {} ({c}); bins are degenerate",
                k + 1
            )));
        }
    }
    Ok(v.iter().map(|x| cuts.partition_point(|c| c <= x)).collect())
}

/// Mean test: passes iff `|mean - target| < k * sd / sqrt(n)`.
/// The statistic is the standardized distance `|mean - target| / se`.
pub fn mean_within_se(samples: &[f64], target: f64, k: f64) -> Result<TestResult> {
    if samples.len() < 2 {
        return Err(Error::TestInput("mean test needs at least two samples".into()));
    }
    let (mean, se) = mean_and_se(samples);
    let z = standardized(mean - target, se);
    Ok(TestResult::new("mean_within_se", z, k, samples.len() as u64, z < k)
        .with_detail("mean", mean)
        .with_detail("target", target)
        .with_detail("se", se))
}

/// Two independent estimates agree within `k` pooled standard errors.
pub fn estimates_agree(a: f64, se_a: f64, b: f64, se_b: f64, n: u64, k: f64) -> TestResult {
    let se = (se_a * se_a + se_b * se_b).sqrt();
    let z = standardized(a - b, se);
    TestResult::new("estimates_agree", z, k, n, z < k)
        .with_detail("lhs", a)
        .with_detail("rhs", b)
        .with_detail("se", se)
}

/// Sample mean and its standard error (unbiased variance).
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn standardized(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff.abs() / se
    } else {
        f64::INFINITY
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::TestInput(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}
