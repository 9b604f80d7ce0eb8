//! Suite results shared by every verification routine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Counterexamples retained per suite; `failed` still counts all of them.
pub const MAX_COUNTEREXAMPLES: usize = 25;

/// A failed check, with enough serialized data to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Name of the checker that can replay `data`.
    pub check: String,
    /// Which leg of the equivalence (or which axiom) disagreed.
    pub leg: String,
    pub detail: String,
    pub data: serde_json::Value,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    /// Modulus `n` the suite ran over, when it ran over a single ring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    pub checked: u64,
    pub failed: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Instance counts per sub-check.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, u64>,
}

impl SuiteResult {
    pub fn new(name: impl Into<String>) -> Self {
        SuiteResult {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Records one checked instance under `key`; on failure the
    /// counterexample is built lazily.
    pub fn record(&mut self, key: &str, ok: bool, counterexample: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        *self.counts.entry(key.to_string()).or_default() += 1;
        if !ok {
            self.fail(counterexample());
        }
    }

    pub fn fail(&mut self, c: Counterexample) {
        self.failed += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// Concatenates `other` into `self`. Counts add; counterexamples keep
    /// `self`'s first.
    pub fn merge(&mut self, other: SuiteResult) {
        self.checked += other.checked;
        self.failed += other.failed;
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for c in other.counterexamples {
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(c);
            }
        }
    }
}
