//! Finite filtration trees and the measure-free martingale condition.
//!
//! A [`FiltrationTree`] stores the cells of the partitions `Q_1, ..., Q_N`
//! generated by a finite sequence of functions. Level-1 cells are the roots;
//! every level-`n` cell is refined by its children at level `n + 1`, and each
//! cell carries the constant value its level's function takes on it. Leaves
//! (level `N`) are the atoms of the sample space.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Index of a cell inside one [`FiltrationTree`].
///
/// Only meaningful for the tree that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("malformed tree document: {0}")]
    Parse(String),
    #[error("depth must be at least 1, got {0}")]
    BadDepth(i64),
    #[error("cell with empty id")]
    EmptyId,
    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),
    #[error("cell `{id}` has level {level}, outside 1..={depth}")]
    LevelOutOfRange {
        id: String,
        level: i64,
        depth: usize,
    },
    #[error("cell `{0}` at level 1 must have a null parent")]
    RootWithParent(String),
    #[error("cell `{0}` above level 1 has no parent")]
    MissingParent(String),
    #[error("cell `{id}` names unknown parent `{parent}`")]
    Orphan { id: String, parent: String },
    #[error("cell `{id}` at level {level} has parent `{parent}` at level {parent_level}")]
    LevelGap {
        id: String,
        level: usize,
        parent: String,
        parent_level: usize,
    },
    #[error("cell `{0}` carries a non-finite value")]
    NonFinite(String),
    #[error("sibling cells `{first}` and `{second}` share the value {value}")]
    SiblingCollision {
        first: String,
        second: String,
        value: f64,
    },
    #[error("level {0} has no cells")]
    EmptyLevel(usize),
    #[error("cell `{0}` is above the last level but has no children")]
    PrematureLeaf(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell `{0}` is a leaf")]
    LeafCell(String),
}

/// One cell record of the JSON tree document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub id: String,
    pub level: i64,
    pub parent: Option<String>,
    pub value: f64,
}

/// The JSON tree document: `{"depth": N, "cells": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub depth: i64,
    pub cells: Vec<CellRecord>,
}

#[derive(Debug, Clone)]
pub struct Cell {
    id: String,
    level: usize,
    parent: Option<NodeId>,
    value: f64,
    /// Sorted by ascending value.
    children: Vec<NodeId>,
}

impl Cell {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A validated finite filtration tree. Immutable once built.
#[derive(Debug, Clone)]
pub struct FiltrationTree {
    depth: usize,
    cells: Vec<Cell>,
    index: HashMap<String, NodeId>,
    /// `levels[n - 1]` lists the level-`n` cells sorted by id.
    levels: Vec<Vec<NodeId>>,
}

impl FiltrationTree {
    /// Parses and validates a JSON tree document.
    pub fn from_json(text: &str) -> Result<Self, TreeError> {
        let doc: TreeDocument =
            serde_json::from_str(text).map_err(|e| TreeError::Parse(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: TreeDocument) -> Result<Self, TreeError> {
        if doc.depth < 1 {
            return Err(TreeError::BadDepth(doc.depth));
        }
        let depth = doc.depth as usize;

        let mut index = HashMap::with_capacity(doc.cells.len());
        for (i, rec) in doc.cells.iter().enumerate() {
            if rec.id.is_empty() {
                return Err(TreeError::EmptyId);
            }
            if index.insert(rec.id.clone(), NodeId(i)).is_some() {
                return Err(TreeError::DuplicateId(rec.id.clone()));
            }
        }

        let mut cells = Vec::with_capacity(doc.cells.len());
        for rec in &doc.cells {
            if rec.level < 1 || rec.level as u64 > depth as u64 {
                return Err(TreeError::LevelOutOfRange {
                    id: rec.id.clone(),
                    level: rec.level,
                    depth,
                });
            }
            if !rec.value.is_finite() {
                return Err(TreeError::NonFinite(rec.id.clone()));
            }
            let level = rec.level as usize;
            let parent = match (&rec.parent, level) {
                (None, 1) => None,
                (Some(_), 1) => return Err(TreeError::RootWithParent(rec.id.clone())),
                (None, _) => return Err(TreeError::MissingParent(rec.id.clone())),
                (Some(p), _) => match index.get(p) {
                    Some(&pid) => Some(pid),
                    None => {
                        return Err(TreeError::Orphan {
                            id: rec.id.clone(),
                            parent: p.clone(),
                        })
                    }
                },
            };
            cells.push(Cell {
                id: rec.id.clone(),
                level,
                parent,
                value: rec.value,
                children: Vec::new(),
            });
        }

        for i in 0..cells.len() {
            if let Some(p) = cells[i].parent {
                let parent_level = doc.cells[p.0].level as usize;
                if parent_level + 1 != cells[i].level {
                    return Err(TreeError::LevelGap {
                        id: cells[i].id.clone(),
                        level: cells[i].level,
                        parent: cells[p.0].id.clone(),
                        parent_level,
                    });
                }
                cells[p.0].children.push(NodeId(i));
            }
        }

        for i in 0..cells.len() {
            let mut kids = std::mem::take(&mut cells[i].children);
            kids.sort_by(|a, b| {
                cells[a.0]
                    .value
                    .total_cmp(&cells[b.0].value)
                    .then_with(|| cells[a.0].id.cmp(&cells[b.0].id))
            });
            for w in kids.windows(2) {
                if cells[w[0].0].value == cells[w[1].0].value {
                    let (first, second) = {
                        let (a, b) = (&cells[w[0].0].id, &cells[w[1].0].id);
                        if a <= b {
                            (a.clone(), b.clone())
                        } else {
                            (b.clone(), a.clone())
                        }
                    };
                    return Err(TreeError::SiblingCollision {
                        first,
                        second,
                        value: cells[w[0].0].value,
                    });
                }
            }
            cells[i].children = kids;
        }

        let mut levels = vec![Vec::new(); depth];
        for (i, c) in cells.iter().enumerate() {
            levels[c.level - 1].push(NodeId(i));
        }
        for (n, lvl) in levels.iter_mut().enumerate() {
            if lvl.is_empty() {
                return Err(TreeError::EmptyLevel(n + 1));
            }
            lvl.sort_by(|a, b| cells[a.0].id.cmp(&cells[b.0].id));
        }
        // Partitions refine but never stop early.
        for lvl in &levels[..depth - 1] {
            if let Some(leaf) = lvl.iter().find(|id| cells[id.0].children.is_empty()) {
                return Err(TreeError::PrematureLeaf(cells[leaf.0].id.clone()));
            }
        }

        Ok(FiltrationTree {
            depth,
            cells,
            index,
            levels,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, id: NodeId) -> &Cell {
        &self.cells[id.0]
    }

    pub fn value(&self, id: NodeId) -> f64 {
        self.cells[id.0].value
    }

    pub fn lookup(&self, id: &str) -> Option<NodeId> {
        self.index.get(id).copied()
    }

    /// Level-`n` cells (1-based), sorted by id.
    pub fn level(&self, n: usize) -> &[NodeId] {
        &self.levels[n - 1]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.levels[0]
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.levels[self.depth - 1]
    }

    /// All cells in (level, id) order.
    pub fn cells_in_order(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.levels.iter().flatten().copied()
    }

    /// Non-leaf cells in (level, id) order.
    pub fn interior_cells(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.levels[..self.depth - 1].iter().flatten().copied()
    }

    /// Children of `cell` with their values, in ascending value order.
    pub fn children_values(&self, cell: &str) -> Result<Vec<(&str, f64)>, TreeError> {
        let nid = self
            .lookup(cell)
            .ok_or_else(|| TreeError::UnknownCell(cell.to_string()))?;
        let c = self.cell(nid);
        if c.is_leaf() {
            return Err(TreeError::LeafCell(cell.to_string()));
        }
        Ok(c.children
            .iter()
            .map(|&k| (self.cells[k.0].id.as_str(), self.cells[k.0].value))
            .collect())
    }

    /// Values of the children of `cell`, ascending.
    pub fn child_values_of(&self, cell: NodeId) -> Vec<f64> {
        self.cells[cell.0]
            .children
            .iter()
            .map(|&k| self.cells[k.0].value)
            .collect()
    }

    /// Ancestor chain from the level-1 cell down to `cell` inclusive.
    pub fn path_to(&self, cell: NodeId) -> Vec<NodeId> {
        let mut path = vec![cell];
        let mut cur = cell;
        while let Some(p) = self.cells[cur.0].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Canonical document: cells sorted by (level, id).
    pub fn to_document(&self) -> TreeDocument {
        TreeDocument {
            depth: self.depth as i64,
            cells: self
                .cells_in_order()
                .map(|id| {
                    let c = self.cell(id);
                    CellRecord {
                        id: c.id.clone(),
                        level: c.level as i64,
                        parent: c.parent.map(|p| self.cells[p.0].id.clone()),
                        value: c.value,
                    }
                })
                .collect(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("tree document serializes")
    }

    /// Hex SHA-256 of the compact canonical document.
    pub fn content_hash(&self) -> String {
        let canonical =
            serde_json::to_string(&self.to_document()).expect("tree document serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Envelope check of one non-leaf cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRecord {
    pub id: String,
    pub min: f64,
    pub max: f64,
    pub value: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub ok: bool,
    pub records: Vec<EnvelopeRecord>,
    pub violations: Vec<String>,
}

impl EnvelopeReport {
    pub(crate) fn from_records(records: Vec<EnvelopeRecord>) -> Self {
        let violations: Vec<String> = records
            .iter()
            .filter(|r| !r.ok)
            .map(|r| r.id.clone())
            .collect();
        EnvelopeReport {
            ok: violations.is_empty(),
            records,
            violations,
        }
    }

    pub fn first_violation(&self) -> Option<&str> {
        self.violations.first().map(String::as_str)
    }
}

/// Checks `min child value <= value <= max child value` at every non-leaf
/// cell. The tree is a measure-free martingale iff the report is ok.
pub fn envelope(tree: &FiltrationTree) -> EnvelopeReport {
    let records = tree
        .interior_cells()
        .map(|id| {
            let cell = tree.cell(id);
            let kids = cell.children();
            // Children are sorted ascending.
            let min = tree.value(kids[0]);
            let max = tree.value(kids[kids.len() - 1]);
            EnvelopeRecord {
                id: cell.id().to_string(),
                min,
                max,
                value: cell.value(),
                ok: min <= cell.value() && cell.value() <= max,
            }
        })
        .collect();
    EnvelopeReport::from_records(records)
}

/// Small helper for building trees in code: records are accumulated and then
/// validated all at once.
#[derive(Debug, Default, Clone)]
pub struct TreeBuilder {
    depth: usize,
    cells: Vec<CellRecord>,
}

impl TreeBuilder {
    pub fn new(depth: usize) -> Self {
        TreeBuilder {
            depth,
            cells: Vec::new(),
        }
    }

    pub fn cell(
        &mut self,
        id: impl Into<String>,
        level: usize,
        parent: Option<&str>,
        value: f64,
    ) -> &mut Self {
        self.cells.push(CellRecord {
            id: id.into(),
            level: level as i64,
            parent: parent.map(str::to_string),
            value,
        });
        self
    }

    pub fn document(&self) -> TreeDocument {
        TreeDocument {
            depth: self.depth as i64,
            cells: self.cells.clone(),
        }
    }

    pub fn build(&self) -> Result<FiltrationTree, TreeError> {
        FiltrationTree::from_document(self.document())
    }
}
