//! JSON documents for measures and rule inputs.
//!
//! Measure document:
//!
//! ```json
//! {"tree_hash": "<hex sha256 of the canonical tree>", "masses": [{"id": "0", "mass": 1.0}, ...]}
//! ```
//!
//! Masses are listed in (level, id) order. The hash is recomputed from the
//! tree on load, so a measure cannot be paired with a different tree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{MeasureError, TreeMeasure};
use crate::tree::FiltrationTree;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("measure belongs to tree {found}, expected {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("measure names unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell `{0}` listed twice")]
    Duplicate(String),
    #[error("cell `{0}` has no mass")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRecord {
    pub id: String,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub tree_hash: String,
    pub masses: Vec<MassRecord>,
}

impl MeasureDocument {
    pub fn from_measure(tree: &FiltrationTree, measure: &TreeMeasure) -> Self {
        MeasureDocument {
            tree_hash: measure.tree_hash().to_string(),
            masses: tree
                .cells_in_order()
                .map(|id| MassRecord {
                    id: tree.cell(id).id().to_string(),
                    mass: measure.mass(id),
                })
                .collect(),
        }
    }

    pub fn to_measure(&self, tree: &FiltrationTree) -> Result<TreeMeasure, DocumentError> {
        let expected = tree.content_hash();
        if self.tree_hash != expected {
            return Err(DocumentError::HashMismatch {
                expected,
                found: self.tree_hash.clone(),
            });
        }
        let mut masses: Vec<Option<f64>> = vec![None; tree.len()];
        for rec in &self.masses {
            let nid = tree
                .lookup(&rec.id)
                .ok_or_else(|| DocumentError::UnknownCell(rec.id.clone()))?;
            if masses[nid.index()].replace(rec.mass).is_some() {
                return Err(DocumentError::Duplicate(rec.id.clone()));
            }
        }
        if let Some(missing) = tree
            .cells_in_order()
            .find(|id| masses[id.index()].is_none())
        {
            return Err(DocumentError::Missing(tree.cell(missing).id().to_string()));
        }
        let masses = masses.into_iter().map(|m| m.unwrap_or(0.0)).collect();
        Ok(TreeMeasure::from_masses(tree, masses)?)
    }
}

pub fn measure_to_json(tree: &FiltrationTree, measure: &TreeMeasure) -> String {
    serde_json::to_string_pretty(&MeasureDocument::from_measure(tree, measure))
        .expect("measure document serializes")
}

pub fn measure_from_json(tree: &FiltrationTree, text: &str) -> Result<TreeMeasure, DocumentError> {
    let doc: MeasureDocument = serde_json::from_str(text)?;
    doc.to_measure(tree)
}

/// Explicit rule file: `{"conditionals": {"<cell>": {"<child>": p, ...}, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitRuleDocument {
    pub conditionals: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Two-point rule file: `{"pairs": {"<cell>": [i, j], ...}}`, indices into
/// the cell's children in ascending value order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointDocument {
    pub pairs: BTreeMap<String, (usize, usize)>,
}

/// Sample of a compact set: a JSON array of numbers, or numbers separated by
/// whitespace or commas. Returned sorted.
pub fn parse_sample(text: &str) -> Result<Vec<f64>, DocumentError> {
    let trimmed = text.trim_start();
    let mut values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed)?
    } else {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| DocumentError::Invalid(format!("not a number: `{s}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if values.iter().any(|x| !x.is_finite()) {
        return Err(DocumentError::Invalid(
            "sample contains non-finite values".into(),
        ));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::measures::{build_measure, Boltzmann};

    #[test]
    fn measure_round_trip_and_hash_check() {
        let t = LatticeSpec::binomial(2, 1.0, 2.0, 0.5).generate().unwrap();
        let m = build_measure(&t, &Boltzmann::default(), None).unwrap();
        let text = measure_to_json(&t, &m);
        let back = measure_from_json(&t, &text).unwrap();
        assert_eq!(back.masses(), m.masses());

        let other = LatticeSpec::binomial(2, 1.0, 3.0, 0.5).generate().unwrap();
        assert!(matches!(
            measure_from_json(&other, &text),
            Err(DocumentError::HashMismatch { .. })
        ));
    }

    #[test]
    fn incomplete_measure_rejected() {
        let t = LatticeSpec::binomial(1, 1.0, 2.0, 0.5).generate().unwrap();
        let doc = MeasureDocument {
            tree_hash: t.content_hash(),
            masses: vec![MassRecord {
                id: "0".into(),
                mass: 1.0,
            }],
        };
        assert!(matches!(doc.to_measure(&t), Err(DocumentError::Missing(_))));
    }

    #[test]
    fn samples() {
        assert_eq!(parse_sample("[1, 0, 0.5]").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_sample("0\n0.5, 1\n").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_sample("0 x").is_err());
    }
}
