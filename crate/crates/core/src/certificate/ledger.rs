use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::{KamError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub value: f64,
    /// Labels this row reads, in argument order. Empty for inputs.
    pub deps: Vec<String>,
    /// `"input"`, `"table1"` .. `"table4"`.
    pub table: String,
}

/// Named constants in evaluation order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstantLedger {
    entries: IndexMap<String, LedgerEntry>,
}

impl ConstantLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, label: &str, value: f64) -> Result<f64> {
        self.insert(label, value, Vec::new(), "input")
    }

    /// Evaluates `f` on the values of `deps` (which must already be present) and stores the row.
    pub fn def(&mut self, table: &str, label: &str, deps: &[&str], f: impl FnOnce(&[f64]) -> f64) -> Result<f64> {
        let args = deps.iter().map(|d| self.get(d)).collect::<Result<Vec<_>>>()?;
        let value = f(&args);
        self.insert(label, value, deps.iter().map(|d| d.to_string()).collect(), table)
    }

    fn insert(&mut self, label: &str, value: f64, deps: Vec<String>, table: &str) -> Result<f64> {
        if self.entries.contains_key(label) {
            return Err(KamError::Invalid(format!("ledger label {label} defined twice")));
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(KamError::Hypothesis { name: label.into(), detail: format!("constant evaluates to {value}") });
        }
        self.entries.insert(label.into(), LedgerEntry { value, deps, table: table.into() });
        Ok(value)
    }

    pub fn get(&self, label: &str) -> Result<f64> {
        self.entries.get(label).map(|e| e.value).ok_or_else(|| KamError::Invalid(format!("ledger has no constant {label}")))
    }

    pub fn entry(&self, label: &str) -> Option<&LedgerEntry> {
        self.entries.get(label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.entries.contains_key(label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LedgerEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Labels of one table, in evaluation order.
    pub fn labels_in(&self, table: &str) -> Vec<&str> {
        self.iter().filter(|(_, e)| e.table == table).map(|(k, _)| k).collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
