// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::stats::{EstimateWithError, TestResult};

/// A hypothesis test with the convention it was judged by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRow {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub criterion: String,
    pub passed: bool,
}

/// An estimate, optionally paired with a prediction and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = T>, T: ToString>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }
}

/// Result of one experiment. Tables and raw samples are written next to the
/// JSON report rather than inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
    pub versions: BTreeMap<String, String>,
    #[serde(default)]
    pub conventions: Vec<String>,
    pub tests: Vec<TestRow>,
    pub estimates: Vec<EstimateRow>,
    #[serde(default)]
    pub flags: Vec<String>,
    pub passed: bool,
    #[serde(skip)]
    pub tables: Vec<Table>,
    /// Named streams of JSON lines.
    #[serde(skip)]
    pub raw: Vec<(String, Vec<String>)>,
}

impl ComparisonReport {
    pub fn new(experiment: &str, seed: u64) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert(env!("CARGO_PKG_NAME").to_string(), env!("CARGO_PKG_VERSION").to_string());
        Self {
            experiment: experiment.into(),
            seed,
            config_hash: String::new(),
            versions,
            conventions: Vec::new(),
            tests: Vec::new(),
            estimates: Vec::new(),
            flags: Vec::new(),
            passed: true,
            tables: Vec::new(),
            raw: Vec::new(),
        }
    }

    pub fn convention(&mut self, text: &str) {
        self.conventions.push(text.into());
    }

    /// Records a test that passes when `p > threshold` (agreement) or,
    /// with `agree = false`, when `p < threshold` (discrimination).
    pub fn test(&mut self, name: &str, r: &TestResult, threshold: f64, agree: bool) -> bool {
        let passed = if agree { r.p_value > threshold } else { r.p_value < threshold };
        let criterion = if agree { format!("p > {threshold}") } else { format!("p < {threshold}") };
        self.tests.push(TestRow { name: name.into(), statistic: r.statistic, p_value: r.p_value, criterion, passed });
        self.passed &= passed;
        passed
    }

    /// A test reported for information only; it never fails the report.
    pub fn inform(&mut self, name: &str, r: &TestResult) {
        self.tests.push(TestRow {
            name: name.into(),
            statistic: r.statistic,
            p_value: r.p_value,
            criterion: "reported".into(),
            passed: true,
        });
    }

    /// Estimate checked as `|value - prediction| <= k SE + slack`.
    pub fn compare(&mut self, name: &str, e: &EstimateWithError, prediction: f64, k: f64, slack: f64) -> bool {
        let passed = e.agrees_with(prediction, k, slack);
        self.estimates.push(EstimateRow {
            name: name.into(),
            value: e.value,
            std_error: e.std_error,
            prediction: Some(prediction),
            tolerance: Some(format!("{k} SE + {slack}")),
            passed: Some(passed),
        });
        self.flags.extend(e.flags.iter().map(|f| format!("{name}: {f}")));
        self.passed &= passed;
        passed
    }

    /// Estimate checked against an interval.
    pub fn within(&mut self, name: &str, e: &EstimateWithError, lo: f64, hi: f64) -> bool {
        let passed = e.value >= lo && e.value <= hi;
        self.estimates.push(EstimateRow {
            name: name.into(),
            value: e.value,
            std_error: e.std_error,
            prediction: None,
            tolerance: Some(format!("[{lo}, {hi}]")),
            passed: Some(passed),
        });
        self.flags.extend(e.flags.iter().map(|f| format!("{name}: {f}")));
        self.passed &= passed;
        passed
    }

    /// Unjudged estimate.
    pub fn record(&mut self, name: &str, e: &EstimateWithError) {
        self.estimates.push(EstimateRow {
            name: name.into(),
            value: e.value,
            std_error: e.std_error,
            prediction: None,
            tolerance: None,
            passed: None,
        });
        self.flags.extend(e.flags.iter().map(|f| format!("{name}: {f}")));
    }

    /// A pass/fail check with no statistic, e.g. an exact identity.
    pub fn check(&mut self, name: &str, passed: bool) -> bool {
        self.tests.push(TestRow { name: name.into(), statistic: 0.0, p_value: 1.0, criterion: "exact".into(), passed });
        self.passed &= passed;
        passed
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn raw<T: Serialize>(&mut self, name: &str, items: impl IntoIterator<Item = T>) {
        let lines = items.into_iter().map(|i| serde_json::to_string(&i).expect("serializable")).collect();
        self.raw.push((name.into(), lines));
    }
}
