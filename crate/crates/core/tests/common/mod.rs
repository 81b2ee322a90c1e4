#![allow(dead_code)]

use std::collections::BTreeMap;

use mfmart::tree::{CellRecord, TreeDocument};
use mfmart::FiltrationTree;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape knobs for random trees.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_depth: usize,
    pub max_branching: usize,
    /// Probability that a cell copies its value onto one child.
    pub tie: f64,
    /// Probability that a cell sits on the edge of its children's range.
    pub edge: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_depth: 6,
            max_branching: 5,
            tie: 0.1,
            edge: 0.05,
        }
    }
}

fn distinct_push(vals: &mut Vec<f64>, x: f64) -> bool {
    if vals.contains(&x) {
        return false;
    }
    vals.push(x);
    true
}

/// Children values for a cell of value `v` that bracket it.
fn bracketing_children(rng: &mut ChaCha8Rng, v: f64, b: usize, shape: &Shape) -> Vec<f64> {
    if b == 1 {
        return vec![v];
    }
    let spread = rng.random_range(0.05..1.5);
    let mut vals = Vec::with_capacity(b);
    let edge = rng.random_bool(shape.edge);
    if edge {
        // v is the lowest (or highest) child value
        vals.push(v);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        while vals.len() < b {
            let x = v + sign * spread * rng.random_range(0.01..1.0);
            distinct_push(&mut vals, x);
        }
        return vals;
    }
    let below = v - spread * rng.random_range(0.01..1.0);
    let above = v + spread * rng.random_range(0.01..1.0);
    vals.push(below);
    vals.push(above);
    if b > 2 && rng.random_bool(shape.tie) {
        vals.push(v);
    }
    while vals.len() < b {
        let x = v + spread * rng.random_range(-1.0..1.0);
        distinct_push(&mut vals, x);
    }
    vals
}

fn distinct_values(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(n);
    while vals.len() < n {
        let x = rng.random_range(lo..hi);
        distinct_push(&mut vals, x);
    }
    vals
}

/// A random tree whose values form a measure-free martingale. Records are
/// shuffled so the loader cannot rely on input order.
pub fn martingale_document(seed: u64, shape: Shape) -> TreeDocument {
    let mut rng = rng(seed);
    let depth = rng.random_range(1..=shape.max_depth);
    let roots = rng.random_range(1..=3);
    let mut cells = Vec::new();
    let mut frontier: Vec<(String, f64)> = Vec::new();
    for (k, v) in distinct_values(&mut rng, roots, -3.0, 3.0)
        .into_iter()
        .enumerate()
    {
        let id = format!("r{k}");
        cells.push(CellRecord {
            id: id.clone(),
            level: 1,
            parent: None,
            value: v,
        });
        frontier.push((id, v));
    }
    for level in 2..=depth {
        let mut next = Vec::new();
        for (pid, v) in &frontier {
            let b = rng.random_range(1..=shape.max_branching);
            let vals = bracketing_children(&mut rng, *v, b, &shape);
            for (k, x) in vals.into_iter().enumerate() {
                let id = format!("{pid}.{k}");
                cells.push(CellRecord {
                    id: id.clone(),
                    level: level as i64,
                    parent: Some(pid.clone()),
                    value: x,
                });
                next.push((id, x));
            }
        }
        frontier = next;
    }
    cells.shuffle(&mut rng);
    TreeDocument {
        depth: depth as i64,
        cells,
    }
}

pub fn martingale_tree(seed: u64, shape: Shape) -> FiltrationTree {
    FiltrationTree::from_document(martingale_document(seed, shape)).expect("generated tree loads")
}

/// A random tree with arbitrary values: some cells bracket, most don't.
pub fn arbitrary_document(seed: u64, max_depth: usize, max_branching: usize) -> TreeDocument {
    let mut rng = rng(seed);
    let depth = rng.random_range(1..=max_depth);
    let mut cells = Vec::new();
    let mut frontier = Vec::new();
    let roots = rng_count(&mut rng, 3);
    for (k, v) in distinct_values(&mut rng, roots, -1.0, 1.0)
        .into_iter()
        .enumerate()
    {
        let id = format!("r{k}");
        cells.push(CellRecord {
            id: id.clone(),
            level: 1,
            parent: None,
            value: v,
        });
        frontier.push(id);
    }
    for level in 2..=depth {
        let mut next = Vec::new();
        for pid in &frontier {
            let b = rng_count(&mut rng, max_branching);
            for (k, x) in distinct_values(&mut rng, b, -1.0, 1.0)
                .into_iter()
                .enumerate()
            {
                let id = format!("{pid}.{k}");
                cells.push(CellRecord {
                    id: id.clone(),
                    level: level as i64,
                    parent: Some(pid.clone()),
                    value: x,
                });
                next.push(id);
            }
        }
        frontier = next;
    }
    TreeDocument {
        depth: depth as i64,
        cells,
    }
}

fn rng_count(rng: &mut ChaCha8Rng, max: usize) -> usize {
    rng.random_range(1..=max)
}

/// Brute-force envelope straight from the document: the set of interior
/// cells whose value escapes its children's range.
pub fn envelope_oracle(doc: &TreeDocument) -> (bool, Vec<String>) {
    let mut kids: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for c in &doc.cells {
        if let Some(p) = &c.parent {
            kids.entry(p.as_str()).or_default().push(c.value);
        }
    }
    let mut bad = Vec::new();
    for c in &doc.cells {
        if let Some(vals) = kids.get(c.id.as_str()) {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &v in vals {
                if v < lo {
                    lo = v;
                }
                if v > hi {
                    hi = v;
                }
            }
            if !(lo <= c.value && c.value <= hi) {
                bad.push(c.id.clone());
            }
        }
    }
    bad.sort();
    (bad.is_empty(), bad)
}

/// Naive Σ p·x with a fresh loop.
pub fn dot(p: &[f64], x: &[f64]) -> f64 {
    p.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Random probability vector with mean `target` on `values`, drawn as a
/// mixture of a below-target and an above-target random vector.
pub fn random_feasible(rng: &mut ChaCha8Rng, values: &[f64], target: f64) -> Option<Vec<f64>> {
    let k = values.len();
    for _ in 0..200 {
        let a = random_simplex(rng, k);
        let b = random_simplex(rng, k);
        let (ma, mb) = (dot(&a, values), dot(&b, values));
        if (ma - target) * (mb - target) > 0.0 || ma == mb {
            continue;
        }
        let t = (target - mb) / (ma - mb);
        let p: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| t * x + (1.0 - t) * y)
            .collect();
        return Some(p);
    }
    None
}

pub fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| -rng.random_range(1e-12..1.0f64).ln())
        .collect();
    // sparse corners now and then
    if k > 1 && rng.random_bool(0.2) {
        let z = rng.random_range(0..k);
        w[z] = 0.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Nonnegative weights `w` with `E·w = p`, searched over every subset of the
/// columns of `E`, by least squares.
pub fn convex_weights(columns: &[Vec<f64>], p: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = p.len();
    let n = columns.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let a = DMatrix::from_fn(k + 1, idx.len(), |r, c| {
            if r < k {
                columns[idx[c]][r]
            } else {
                1.0
            }
        });
        let b = DVector::from_fn(k + 1, |r, _| if r < k { p[r] } else { 1.0 });
        let Ok(w) = a.clone().svd(true, true).solve(&b, 1e-14) else {
            continue;
        };
        if w.iter().any(|&x| x < -1e-12) {
            continue;
        }
        let resid = (&a * &w - &b).amax();
        if best.as_ref().is_none_or(|(_, r)| resid < *r) {
            let mut full = vec![0.0; n];
            for (j, &i) in idx.iter().enumerate() {
                full[i] = w[j];
            }
            best = Some((full, resid));
        }
    }
    best
}
