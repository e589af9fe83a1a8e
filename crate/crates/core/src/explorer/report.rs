//! Scan reports: what was checked, what failed, and the tallies gathered.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::SearchError;

/// Version tag carried by every JSON document the crate emits.
pub const SCHEMA: &str = "tourninv/1";

/// Parameters that fully determine a scan; rerunning with them reproduces
/// the report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanScope {
    pub scan: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

/// A failed check, with the graphs involved and a command that recomputes
/// the disputed value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub statement: String,
    pub instance: Vec<String>,
    pub expected: String,
    pub observed: String,
    pub replay: String,
}

/// An instance the budget could not decide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inconclusive {
    pub instance: String,
    pub quantity: String,
    pub lower: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<usize>,
    pub nodes: u64,
}

impl Inconclusive {
    pub(crate) fn from_error(instance: String, quantity: &str, e: &SearchError) -> Self {
        match e {
            SearchError::Inconclusive { lower, upper, nodes } => Self {
                instance,
                quantity: quantity.to_string(),
                lower: *lower,
                upper: *upper,
                nodes: *nodes,
            },
            SearchError::Invalid(err) => Self {
                instance,
                quantity: format!("{quantity} ({err})"),
                lower: 0,
                upper: None,
                nodes: 0,
            },
        }
    }
}

/// Outcome of a scan.
///
/// `violations` collects failures of theorem-backed statements;
/// `counterexamples` collects failures of conjectured ones, which are
/// findings rather than errors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema: String,
    pub scope: ScanScope,
    pub instances_checked: u64,
    pub asserted_checked: u64,
    pub violations: Vec<Violation>,
    pub counterexamples: Vec<Violation>,
    pub evidence: BTreeMap<String, u64>,
    pub inconclusive: Vec<Inconclusive>,
    /// Wall time in milliseconds; left out unless requested so that
    /// identical runs serialize identically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl ScanReport {
    pub fn new(scope: ScanScope) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            scope,
            instances_checked: 0,
            asserted_checked: 0,
            violations: Vec::new(),
            counterexamples: Vec::new(),
            evidence: BTreeMap::new(),
            inconclusive: Vec::new(),
            elapsed_ms: None,
        }
    }

    /// No theorem-backed check failed.
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_conclusive(&self) -> bool {
        self.inconclusive.is_empty()
    }

    pub(crate) fn tally(&mut self, key: impl Into<String>) {
        *self.evidence.entry(key.into()).or_insert(0) += 1;
    }

    /// Records an asserted check; a failure becomes a violation.
    pub(crate) fn assert_check(&mut self, ok: bool, make: impl FnOnce() -> Violation) {
        self.asserted_checked += 1;
        if !ok {
            self.violations.push(make());
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            token: "report".into(),
            reason: e.to_string(),
        })
    }

    /// Plain-text summary table.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let sc = &self.scope;
        let mut scope = vec![format!("scan={}", sc.scan)];
        let fields = [
            ("max_n", sc.max_n.map(|v| v as u64)),
            ("n1", sc.n1.map(|v| v as u64)),
            ("n2", sc.n2.map(|v| v as u64)),
            ("node_limit", sc.node_limit),
            ("seed", sc.seed),
            ("samples", sc.samples),
        ];
        scope.extend(fields.iter().filter_map(|(k, v)| v.map(|v| format!("{k}={v}"))));
        let _ = writeln!(s, "scope             {}", scope.join(" "));
        let _ = writeln!(s, "instances checked {}", self.instances_checked);
        let _ = writeln!(s, "asserted checks   {}", self.asserted_checked);
        let _ = writeln!(s, "violations        {}", self.violations.len());
        let _ = writeln!(s, "counterexamples   {}", self.counterexamples.len());
        let _ = writeln!(s, "inconclusive      {}", self.inconclusive.len());
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(s, "elapsed           {ms} ms");
        }
        if !self.evidence.is_empty() {
            let width = self.evidence.keys().map(|k| k.len()).max().unwrap_or(0);
            let _ = writeln!(s, "\nevidence");
            for (k, v) in &self.evidence {
                let _ = writeln!(s, "  {k:<width$}  {v}");
            }
        }
        for (title, list) in [("violations", &self.violations), ("counterexamples", &self.counterexamples)] {
            if list.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\n{title}");
            for v in list {
                let _ = writeln!(s, "  {}", v.statement);
                let _ = writeln!(s, "    instance  {}", v.instance.join(" "));
                let _ = writeln!(s, "    expected  {}", v.expected);
                let _ = writeln!(s, "    observed  {}", v.observed);
                let _ = writeln!(s, "    replay    {}", v.replay);
            }
        }
        if !self.inconclusive.is_empty() {
            let _ = writeln!(s, "\ninconclusive");
            for i in &self.inconclusive {
                let upper = i.upper.map_or("?".to_string(), |u| u.to_string());
                let _ = writeln!(
                    s,
                    "  {} {} in [{}, {}] after {} nodes",
                    i.instance, i.quantity, i.lower, upper, i.nodes
                );
            }
        }
        s
    }
}
