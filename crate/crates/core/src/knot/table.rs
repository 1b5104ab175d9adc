//! A small table of knots by Alexander polynomial and determinant.

use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;

const TABLE_JSON: &str = include_str!("../../data/knot_table.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub name: String,
    pub alexander: LaurentPoly,
    pub determinant: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone)]
pub struct KnotTable {
    entries: Vec<TableEntry>,
}

impl KnotTable {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(TABLE_JSON).expect("shipped knot table is valid")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        let mut entries: Vec<TableEntry> = serde_json::from_str(s)?;
        for e in &mut entries {
            e.alexander = e.alexander.normalized();
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&TableEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Every entry whose Alexander polynomial agrees up to units.
    pub fn matches(&self, poly: &LaurentPoly) -> Vec<&TableEntry> {
        let n = poly.normalized();
        self.entries.iter().filter(|e| e.alexander == n).collect()
    }
}
