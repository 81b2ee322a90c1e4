//! Martingale measures on filtration trees.
//!
//! A measure is built top-down: level-1 cells get a root distribution, and
//! each child `Q_i` of a cell `Q` gets `p_i · mass(Q)` where `(p_i)` is a
//! feasible conditional vector (nonnegative, summing to one, with mean equal
//! to the parent's value). The [`ConditionalRule`] decides which feasible
//! vector is used; [`Boltzmann`] picks the maximum-entropy one.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::boltzmann::{self, solve_boltzmann, BoltzmannError, ProbabilityVector};
use crate::tree::{envelope, FiltrationTree, NodeId};

/// Mean tolerance of a feasible conditional, relative to the child value range.
pub const FEASIBILITY_TOL: f64 = 1e-10;
/// Tolerance of the measure invariants (root total, parent/child consistency).
pub const CONSISTENCY_TOL: f64 = 1e-12;
/// Conditional vectors closer than this are the same extreme point.
pub const EXTREME_DEDUP_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("tree is not a measure-free martingale: violation at cell `{0}`")]
    EnvelopeViolation(String),
    #[error("conditional rule infeasible at cell `{cell}`: {reason}")]
    RuleInfeasible { cell: String, reason: String },
    #[error("root distribution has {got} entries, tree has {expected} level-1 cells")]
    RootMismatch { expected: usize, got: usize },
    #[error("invalid measure: {0}")]
    Invalid(String),
    #[error("cap must be positive")]
    ZeroCap,
    #[error(transparent)]
    Boltzmann(#[from] BoltzmannError),
}

/// What a rule sees when choosing a conditional vector for one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellContext<'a> {
    pub tree: &'a FiltrationTree,
    pub cell: NodeId,
    /// Child values, ascending; aligned with `tree.cell(cell).children()`.
    pub child_values: &'a [f64],
    pub parent_value: f64,
}

impl CellContext<'_> {
    pub fn id(&self) -> &str {
        self.tree.cell(self.cell).id()
    }

    fn infeasible(&self, reason: impl Into<String>) -> MeasureError {
        MeasureError::RuleInfeasible {
            cell: self.id().to_string(),
            reason: reason.into(),
        }
    }
}

/// Strategy choosing the conditional distribution over a cell's children.
pub trait ConditionalRule: Send + Sync {
    fn name(&self) -> &str;

    /// Returns probabilities aligned with `ctx.child_values`.
    fn conditional(&self, ctx: &CellContext<'_>) -> Result<Vec<f64>, MeasureError>;
}

/// Checks that `probs` is a feasible conditional for `ctx`.
pub fn check_feasible(ctx: &CellContext<'_>, probs: &[f64]) -> Result<(), MeasureError> {
    let a = ctx.child_values;
    if probs.len() != a.len() {
        return Err(ctx.infeasible(format!(
            "{} probabilities for {} children",
            probs.len(),
            a.len()
        )));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(ctx.infeasible("negative or non-finite probability"));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > FEASIBILITY_TOL {
        return Err(ctx.infeasible(format!("probabilities sum to {sum}")));
    }
    let mean: f64 = probs.iter().zip(a).map(|(p, x)| p * x).sum();
    let range = a[a.len() - 1] - a[0];
    let scale = if range > 0.0 {
        range
    } else {
        ctx.parent_value.abs().max(1.0)
    };
    if (mean - ctx.parent_value).abs() > FEASIBILITY_TOL * scale {
        return Err(ctx.infeasible(format!(
            "conditional mean {mean} differs from cell value {}",
            ctx.parent_value
        )));
    }
    Ok(())
}

/// Maximum-entropy conditionals.
#[derive(Debug, Clone, Copy)]
pub struct Boltzmann {
    pub tol: f64,
}

impl Default for Boltzmann {
    fn default() -> Self {
        Boltzmann {
            tol: boltzmann::DEFAULT_TOL,
        }
    }
}

impl ConditionalRule for Boltzmann {
    fn name(&self) -> &str {
        "boltzmann"
    }

    fn conditional(&self, ctx: &CellContext<'_>) -> Result<Vec<f64>, MeasureError> {
        let sol = solve_boltzmann(ctx.child_values, ctx.parent_value, self.tol)
            .map_err(|e| ctx.infeasible(e.to_string()))?;
        Ok(sol.distribution.probs().to_vec())
    }
}

/// Forced probabilities on the support `{i, j}` (indices into the ascending
/// child list), or `None` if the parent value is outside `[a_i, a_j]`.
pub fn two_point(child_values: &[f64], parent: f64, i: usize, j: usize) -> Option<Vec<f64>> {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    let (ai, aj) = (*child_values.get(i)?, *child_values.get(j)?);
    let mut p = vec![0.0; child_values.len()];
    if i == j {
        if ai != parent {
            return None;
        }
        p[i] = 1.0;
        return Some(p);
    }
    if !(ai <= parent && parent <= aj) {
        return None;
    }
    let upper = (parent - ai) / (aj - ai);
    p[j] = upper;
    p[i] = (aj - parent) / (aj - ai);
    Some(p)
}

/// Two-point extreme conditionals. Cells listed in `pairs` use the given
/// support; other cells use the first feasible support in lexicographic
/// order (a singleton when the cell value equals a child value).
#[derive(Debug, Clone, Default)]
pub struct TwoPoint {
    pub pairs: BTreeMap<String, (usize, usize)>,
}

impl TwoPoint {
    pub fn lowest_feasible() -> Self {
        TwoPoint::default()
    }

    pub fn with_pairs(pairs: BTreeMap<String, (usize, usize)>) -> Self {
        TwoPoint { pairs }
    }
}

impl ConditionalRule for TwoPoint {
    fn name(&self) -> &str {
        "two-point"
    }

    fn conditional(&self, ctx: &CellContext<'_>) -> Result<Vec<f64>, MeasureError> {
        if let Some(&(i, j)) = self.pairs.get(ctx.id()) {
            return two_point(ctx.child_values, ctx.parent_value, i, j).ok_or_else(|| {
                ctx.infeasible(format!(
                    "value {} not bracketed by support ({i}, {j})",
                    ctx.parent_value
                ))
            });
        }
        cell_extremes(ctx.child_values, ctx.parent_value)
            .into_iter()
            .next()
            .map(|e| e.probs)
            .ok_or_else(|| ctx.infeasible("no feasible support"))
    }
}

/// The feasible conditional closest to uniform in Euclidean distance.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformFeasible;

impl ConditionalRule for UniformFeasible {
    fn name(&self) -> &str {
        "uniform-feasible"
    }

    fn conditional(&self, ctx: &CellContext<'_>) -> Result<Vec<f64>, MeasureError> {
        closest_to_uniform(ctx.child_values, ctx.parent_value)
            .ok_or_else(|| ctx.infeasible("value outside child range"))
    }
}

/// Euclidean projection of a vector onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Minimises `|p - uniform|^2` subject to feasibility, for ascending distinct
/// `values`. The minimiser is the simplex projection of `μ·values` for the
/// scalar `μ` matching the mean, which is monotone in `μ`; `μ` is bracketed
/// and bisected, then the active support is solved exactly.
pub fn closest_to_uniform(values: &[f64], target: f64) -> Option<Vec<f64>> {
    let k = values.len();
    let (lo, hi) = (values[0], values[k - 1]);
    if target < lo || target > hi {
        return None;
    }
    if k == 1 || target == lo || target == hi {
        let idx = if target == hi { k - 1 } else { 0 };
        let mut p = vec![0.0; k];
        p[idx] = 1.0;
        return Some(p);
    }
    let at = |mu: f64| project_simplex(&values.iter().map(|x| mu * x).collect::<Vec<_>>());
    let mean = |p: &[f64]| p.iter().zip(values).map(|(p, x)| p * x).sum::<f64>();

    let mut step = 1.0 / (hi - lo);
    let (mut a, mut b) = (-step, step);
    while mean(&at(a)) > target {
        step *= 2.0;
        a = -step;
    }
    step = 1.0 / (hi - lo);
    while mean(&at(b)) < target {
        step *= 2.0;
        b = step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if mean(&at(mid)) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    let approx = at(0.5 * (a + b));

    // Exact solve on the active support: p_i = ν + μ x_i for i in S.
    let support: Vec<usize> = (0..k).filter(|&i| approx[i] > 0.0).collect();
    if support.len() >= 2 {
        let n = support.len() as f64;
        let sx: f64 = support.iter().map(|&i| values[i]).sum();
        let sxx: f64 = support.iter().map(|&i| values[i] * values[i]).sum();
        let det = n * sxx - sx * sx;
        if det > 0.0 {
            let mu = (n * target - sx) / det;
            let nu = (1.0 - mu * sx) / n;
            let mut exact = vec![0.0; k];
            for &i in &support {
                exact[i] = nu + mu * values[i];
            }
            if exact.iter().all(|&p| p >= 0.0) {
                return Some(exact);
            }
        }
    }
    Some(approx)
}

/// User-supplied conditionals: cell id → child id → probability.
#[derive(Debug, Clone, Default)]
pub struct Explicit {
    pub table: BTreeMap<String, BTreeMap<String, f64>>,
}

impl Explicit {
    pub fn new(table: BTreeMap<String, BTreeMap<String, f64>>) -> Self {
        Explicit { table }
    }
}

impl ConditionalRule for Explicit {
    fn name(&self) -> &str {
        "explicit"
    }

    fn conditional(&self, ctx: &CellContext<'_>) -> Result<Vec<f64>, MeasureError> {
        let row = self
            .table
            .get(ctx.id())
            .ok_or_else(|| ctx.infeasible("no entry in explicit table"))?;
        let cell = ctx.tree.cell(ctx.cell);
        if let Some(unknown) = row.keys().find(|k| {
            !cell
                .children()
                .iter()
                .any(|&c| ctx.tree.cell(c).id() == k.as_str())
        }) {
            return Err(ctx.infeasible(format!("`{unknown}` is not a child")));
        }
        Ok(cell
            .children()
            .iter()
            .map(|&c| row.get(ctx.tree.cell(c).id()).copied().unwrap_or(0.0))
            .collect())
    }
}

/// Masses on every cell of one tree, indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMeasure {
    tree_hash: Arc<str>,
    masses: Vec<f64>,
}

impl TreeMeasure {
    /// Wraps raw masses after checking the measure invariants.
    pub fn from_masses(tree: &FiltrationTree, masses: Vec<f64>) -> Result<Self, MeasureError> {
        Self::from_masses_with_hash(tree, masses, tree.content_hash().into())
    }

    pub(crate) fn from_masses_with_hash(
        tree: &FiltrationTree,
        masses: Vec<f64>,
        tree_hash: Arc<str>,
    ) -> Result<Self, MeasureError> {
        if masses.len() != tree.len() {
            return Err(MeasureError::Invalid(format!(
                "{} masses for {} cells",
                masses.len(),
                tree.len()
            )));
        }
        let m = TreeMeasure { tree_hash, masses };
        if let Some(id) = tree
            .cells_in_order()
            .find(|&id| !(m.mass(id) >= -CONSISTENCY_TOL && m.mass(id) <= 1.0 + CONSISTENCY_TOL))
        {
            return Err(MeasureError::Invalid(format!(
                "mass {} of `{}` outside [0, 1]",
                m.mass(id),
                tree.cell(id).id()
            )));
        }
        let err = consistency_error(tree, &m);
        if err > CONSISTENCY_TOL {
            return Err(MeasureError::Invalid(format!(
                "consistency error {err} exceeds {CONSISTENCY_TOL}"
            )));
        }
        Ok(m)
    }

    pub fn mass(&self, id: NodeId) -> f64 {
        self.masses[id.index()]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn tree_hash(&self) -> &str {
        &self.tree_hash
    }

    /// Conditional distribution over the children of `cell`, if it has mass.
    pub fn conditional(&self, tree: &FiltrationTree, cell: NodeId) -> Option<Vec<f64>> {
        let m = self.mass(cell);
        if m <= 0.0 || tree.cell(cell).is_leaf() {
            return None;
        }
        Some(
            tree.cell(cell)
                .children()
                .iter()
                .map(|&c| self.mass(c) / m)
                .collect(),
        )
    }
}

/// Largest violation of `Σ level-1 = 1` and `mass(Q) = Σ mass(children)`.
pub fn consistency_error(tree: &FiltrationTree, measure: &TreeMeasure) -> f64 {
    let root_total: f64 = tree.roots().iter().map(|&r| measure.mass(r)).sum();
    tree.interior_cells()
        .map(|q| {
            let kids: f64 = tree
                .cell(q)
                .children()
                .iter()
                .map(|&c| measure.mass(c))
                .sum();
            (measure.mass(q) - kids).abs()
        })
        .fold((root_total - 1.0).abs(), f64::max)
}

/// Builds the measure `mass(Q_i) = p_i · mass(Q)` level by level.
///
/// `root_distribution`, when given, weights the level-1 cells in id order;
/// otherwise they are weighted uniformly.
pub fn build_measure(
    tree: &FiltrationTree,
    rule: &dyn ConditionalRule,
    root_distribution: Option<&ProbabilityVector>,
) -> Result<TreeMeasure, MeasureError> {
    let report = envelope(tree);
    if let Some(bad) = report.first_violation() {
        return Err(MeasureError::EnvelopeViolation(bad.to_string()));
    }
    let roots = tree.roots();
    let mut masses = vec![0.0; tree.len()];
    match root_distribution {
        Some(pv) => {
            if pv.len() != roots.len() {
                return Err(MeasureError::RootMismatch {
                    expected: roots.len(),
                    got: pv.len(),
                });
            }
            for (&r, &p) in roots.iter().zip(pv.probs()) {
                masses[r.index()] = p;
            }
        }
        None => {
            let w = 1.0 / roots.len() as f64;
            roots.iter().for_each(|r| masses[r.index()] = w);
        }
    }
    // Rules run on null cells too so the measure is defined everywhere.
    for q in tree.interior_cells() {
        let child_values = tree.child_values_of(q);
        let ctx = CellContext {
            tree,
            cell: q,
            child_values: &child_values,
            parent_value: tree.value(q),
        };
        let probs = rule.conditional(&ctx)?;
        check_feasible(&ctx, &probs)?;
        let parent_mass = masses[q.index()];
        for (&c, p) in tree.cell(q).children().iter().zip(probs) {
            masses[c.index()] = p * parent_mass;
        }
    }
    Ok(TreeMeasure {
        tree_hash: tree.content_hash().into(),
        masses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellError {
    pub id: String,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleReport {
    pub max_error: f64,
    pub cells: Vec<CellError>,
    /// Non-leaf cells of zero mass, where the conditional is undefined.
    pub skipped: Vec<String>,
}

/// `|Σ f(Q') mass(Q') - f(Q) mass(Q)|` at every non-leaf cell of positive mass.
pub fn check_martingale(tree: &FiltrationTree, measure: &TreeMeasure) -> MartingaleReport {
    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    let mut max_error: f64 = 0.0;
    for q in tree.interior_cells() {
        let mq = measure.mass(q);
        let id = tree.cell(q).id().to_string();
        if mq <= 0.0 {
            skipped.push(id);
            continue;
        }
        let weighted: f64 = tree
            .cell(q)
            .children()
            .iter()
            .map(|&c| tree.value(c) * measure.mass(c))
            .sum();
        let error = (weighted - tree.value(q) * mq).abs();
        max_error = max_error.max(error);
        cells.push(CellError { id, error });
    }
    MartingaleReport {
        max_error,
        cells,
        skipped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellEntropy {
    pub id: String,
    pub entropy: f64,
}

/// Entropy of the conditional at every non-leaf cell of positive mass.
pub fn measure_entropy_profile(tree: &FiltrationTree, measure: &TreeMeasure) -> Vec<CellEntropy> {
    tree.interior_cells()
        .filter_map(|q| {
            measure.conditional(tree, q).map(|p| CellEntropy {
                id: tree.cell(q).id().to_string(),
                entropy: boltzmann::entropy(&p),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `min m/p` over cells with positive `p`-mass; `None` if there are none.
    pub c: Option<f64>,
    /// `max m/p` over the same cells.
    pub d: Option<f64>,
    pub equivalent: bool,
    /// Cells where exactly one of the two measures vanishes.
    pub offending: Vec<String>,
}

/// Two-sided ratio bounds `C <= m(A)/p(A) <= D` over all cells, plus mutual
/// absolute continuity on the finite tree.
pub fn equivalence_bounds(
    tree: &FiltrationTree,
    m: &TreeMeasure,
    p: &TreeMeasure,
) -> EquivalenceReport {
    let mut c: Option<f64> = None;
    let mut d: Option<f64> = None;
    let mut offending = Vec::new();
    for q in tree.cells_in_order() {
        let (mq, pq) = (m.mass(q), p.mass(q));
        if (mq > 0.0) != (pq > 0.0) {
            offending.push(tree.cell(q).id().to_string());
        }
        if pq > 0.0 {
            let r = mq / pq;
            c = Some(c.map_or(r, |c| c.min(r)));
            d = Some(d.map_or(r, |d| d.max(r)));
        }
    }
    EquivalenceReport {
        c,
        d,
        equivalent: offending.is_empty(),
        offending,
    }
}

/// Support of one cell's extreme conditional: indices into the ascending
/// child list holding positive probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Support {
    Single(usize),
    Pair(usize, usize),
}

impl Support {
    fn key(self) -> (usize, usize) {
        match self {
            Support::Single(i) => (i, i),
            Support::Pair(i, j) => (i, j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellExtreme {
    pub support: Support,
    pub probs: Vec<f64>,
}

/// All extreme feasible conditionals of one cell: vectors with at most two
/// nonzero entries. Equal-value ties produce both singleton and pair
/// candidates; identical vectors are merged and labelled by their actual
/// support. Sorted by support.
pub fn cell_extremes(child_values: &[f64], parent: f64) -> Vec<CellExtreme> {
    let k = child_values.len();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        for j in i..k {
            if let Some(p) = two_point(child_values, parent, i, j) {
                candidates.push(p);
            }
        }
    }
    let mut out: Vec<CellExtreme> = Vec::new();
    for probs in candidates {
        let dup = out.iter().any(|e| {
            e.probs
                .iter()
                .zip(&probs)
                .all(|(a, b)| (a - b).abs() <= EXTREME_DEDUP_TOL)
        });
        if dup {
            continue;
        }
        let nz: Vec<usize> = (0..k).filter(|&i| probs[i] > EXTREME_DEDUP_TOL).collect();
        let support = match nz.as_slice() {
            [i] => Support::Single(*i),
            [i, j] => Support::Pair(*i, *j),
            _ => unreachable!("two-point vectors have one or two nonzero entries"),
        };
        out.push(CellExtreme { support, probs });
    }
    out.sort_by_key(|e| e.support.key());
    out
}

/// An extreme martingale measure's choice at every non-leaf cell, in
/// (level, id) order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeSpec {
    pub cells: Vec<(String, CellExtreme)>,
}

/// Lazy enumeration of extreme martingale measures.
pub struct ExtremeEnumeration<'t> {
    tree: &'t FiltrationTree,
    root: Vec<f64>,
    interior: Vec<NodeId>,
    options: Vec<Vec<CellExtreme>>,
    count: BigUint,
    /// Mixed-radix counter over `options`; `None` once exhausted.
    cursor: Option<Vec<usize>>,
    remaining: usize,
    tree_hash: Arc<str>,
}

impl ExtremeEnumeration<'_> {
    /// Exact number of extreme measures, independent of the cap.
    pub fn total(&self) -> &BigUint {
        &self.count
    }

    pub fn per_cell_options(&self) -> impl Iterator<Item = (&str, &[CellExtreme])> {
        self.interior
            .iter()
            .zip(&self.options)
            .map(|(&q, o)| (self.tree.cell(q).id(), o.as_slice()))
    }

    fn materialize(&self, choice: &[usize]) -> (ExtremeSpec, TreeMeasure) {
        let mut masses = vec![0.0; self.tree.len()];
        for (&r, &p) in self.tree.roots().iter().zip(&self.root) {
            masses[r.index()] = p;
        }
        let mut spec = Vec::with_capacity(self.interior.len());
        for ((&q, opts), &pick) in self.interior.iter().zip(&self.options).zip(choice) {
            let ext = &opts[pick];
            let mq = masses[q.index()];
            for (&c, p) in self.tree.cell(q).children().iter().zip(&ext.probs) {
                masses[c.index()] = p * mq;
            }
            spec.push((self.tree.cell(q).id().to_string(), ext.clone()));
        }
        (
            ExtremeSpec { cells: spec },
            TreeMeasure {
                tree_hash: self.tree_hash.clone(),
                masses,
            },
        )
    }
}

impl Iterator for ExtremeEnumeration<'_> {
    type Item = (ExtremeSpec, TreeMeasure);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        let choice = self.cursor.take()?;
        let item = self.materialize(&choice);
        self.remaining -= 1;
        // Advance, last cell fastest.
        let mut next = choice;
        let mut pos = next.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.options[pos].len() {
                self.cursor = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(item)
    }
}

/// Enumerates extreme martingale measures (every conditional supported on at
/// most two children), lazily and at most `cap` of them. The level-1 cells
/// are weighted uniformly, or by `root_distribution`.
pub fn enumerate_extremes<'t>(
    tree: &'t FiltrationTree,
    cap: usize,
    root_distribution: Option<&ProbabilityVector>,
) -> Result<ExtremeEnumeration<'t>, MeasureError> {
    if cap == 0 {
        return Err(MeasureError::ZeroCap);
    }
    if let Some(bad) = envelope(tree).first_violation() {
        return Err(MeasureError::EnvelopeViolation(bad.to_string()));
    }
    let roots = tree.roots();
    let root = match root_distribution {
        Some(pv) if pv.len() != roots.len() => {
            return Err(MeasureError::RootMismatch {
                expected: roots.len(),
                got: pv.len(),
            })
        }
        Some(pv) => pv.probs().to_vec(),
        None => vec![1.0 / roots.len() as f64; roots.len()],
    };
    let interior: Vec<NodeId> = tree.interior_cells().collect();
    let options: Vec<Vec<CellExtreme>> = interior
        .iter()
        .map(|&q| cell_extremes(&tree.child_values_of(q), tree.value(q)))
        .collect();
    let count = options
        .iter()
        .fold(BigUint::from(1u32), |acc, o| acc * BigUint::from(o.len()));
    Ok(ExtremeEnumeration {
        tree,
        root,
        cursor: Some(vec![0; interior.len()]),
        interior,
        options,
        count,
        remaining: cap,
        tree_hash: tree.content_hash().into(),
    })
}
