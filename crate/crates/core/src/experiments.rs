//! Finite-resolution numerical studies.
//!
//! * Pointwise convergence of martingales whose increments shrink
//!   geometrically ([`generate_equicontinuous`], [`convergence_report`]).
//! * Boltzmann distributions on shrinking ε-nets of a compact subset of the
//!   line and whether they settle down ([`net_convergence_study`]).
//! * The tilt field `g_n` (one λ per cell) and whether it is itself a
//!   measure-free martingale ([`lambda_field`]).
//!
//! The last two are open questions; these functions produce evidence only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::boltzmann::{self, solve_boltzmann, BoltzmannError, Lambda, ProbabilityVector};
use crate::tree::{EnvelopeRecord, EnvelopeReport, FiltrationTree, NodeId, TreeBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("target {alpha} not strictly inside the net range [{min}, {max}]")]
    Infeasible { alpha: f64, min: f64, max: f64 },
    #[error(transparent)]
    Boltzmann(#[from] BoltzmannError),
    #[error("tree is not a measure-free martingale: violation at cell `{0}`")]
    EnvelopeViolation(String),
}

/// Parameters of a random tree with per-level increment bound `c·r^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquicontinuousSpec {
    pub depth: usize,
    pub c: f64,
    pub r: f64,
    pub branching: usize,
    pub seed: u64,
    pub root_value: f64,
}

impl EquicontinuousSpec {
    pub fn new(depth: usize, c: f64, r: f64, branching: usize, seed: u64) -> Self {
        EquicontinuousSpec {
            depth,
            c,
            r,
            branching,
            seed,
            root_value: 0.0,
        }
    }

    /// Bound on the tail oscillation from level `n` on: `c·r^n / (1 - r)`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        self.c * self.r.powi(n as i32) / (1.0 - self.r)
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.depth == 0 {
            return Err(ExperimentError::Invalid("depth must be at least 1".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ExperimentError::Invalid(
                "increment bound c must be positive".into(),
            ));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(ExperimentError::Invalid(
                "decay ratio r must lie in (0, 1)".into(),
            ));
        }
        if self.branching == 0 {
            return Err(ExperimentError::Invalid(
                "branching must be at least 1".into(),
            ));
        }
        if !self.root_value.is_finite() {
            return Err(ExperimentError::Invalid("root value must be finite".into()));
        }
        Ok(())
    }
}

/// Children values of a level-`n` cell with value `v`: distinct, within
/// `[v - w, v + w]` for `w = c·r^n`, with `v` between their min and max.
fn place_children(rng: &mut ChaCha8Rng, v: f64, w: f64, b: usize) -> Vec<f64> {
    if b == 1 {
        return vec![v];
    }
    loop {
        let mut out = Vec::with_capacity(b);
        out.push(v - w * rng.random_range(0.0..1.0f64).max(f64::EPSILON).sqrt());
        out.push(v + w * rng.random_range(0.0..1.0f64).max(f64::EPSILON).sqrt());
        while out.len() < b {
            out.push(v + w * rng.random_range(-1.0..1.0));
        }
        let within = out.iter().all(|&x| (x - v).abs() <= w);
        let mut sorted = out.clone();
        sorted.sort_by(f64::total_cmp);
        let distinct = sorted.windows(2).all(|p| p[0] < p[1]);
        let brackets = sorted[0] <= v && v <= sorted[b - 1];
        if within && distinct && brackets {
            return out;
        }
    }
}

/// Random measure-free martingale tree with `|f_{n+1} - f_n| <= c·r^n`.
/// Deterministic in the seed. Ids are paths as in [`crate::lattice`].
pub fn generate_equicontinuous(
    spec: &EquicontinuousSpec,
) -> Result<FiltrationTree, ExperimentError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = TreeBuilder::new(spec.depth);
    b.cell("0", 1, None, spec.root_value);
    let mut frontier = vec![("0".to_string(), spec.root_value)];
    for n in 1..spec.depth {
        let w = spec.c * spec.r.powi(n as i32);
        let mut next = Vec::with_capacity(frontier.len() * spec.branching);
        for (id, v) in &frontier {
            for (k, cv) in place_children(&mut rng, *v, w, spec.branching)
                .into_iter()
                .enumerate()
            {
                let cid = format!("{id}.{k}");
                b.cell(cid.clone(), n + 1, Some(id), cv);
                next.push((cid, cv));
            }
        }
        frontier = next;
    }
    b.build()
        .map_err(|e| ExperimentError::Invalid(format!("generator produced an invalid tree: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomTrace {
    pub id: String,
    /// `f_1, ..., f_N` along the ancestor chain.
    pub path: Vec<f64>,
    /// `osc[n - 1] = max_{m >= n} |f_m - f_N|`.
    pub osc: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub atoms: Vec<AtomTrace>,
    /// `max_osc[n - 1]` is the maximum over atoms of `osc(n)`.
    pub max_osc: Vec<f64>,
    /// Least-squares ratio `ρ` in `max_osc(n) ≈ A·ρ^n`, over levels with
    /// positive oscillation; `None` with fewer than two such levels.
    pub fitted_ratio: Option<f64>,
}

/// Tail oscillation of `f_1..f_N` along every atom's ancestor chain.
pub fn convergence_report(tree: &FiltrationTree) -> ConvergenceReport {
    let depth = tree.depth();
    let mut max_osc = vec![0.0f64; depth];
    let atoms: Vec<AtomTrace> = tree
        .leaves()
        .iter()
        .map(|&leaf| {
            let path: Vec<f64> = tree
                .path_to(leaf)
                .into_iter()
                .map(|c| tree.value(c))
                .collect();
            let last = path[depth - 1];
            let mut osc = vec![0.0f64; depth];
            let mut running = 0.0f64;
            for n in (0..depth).rev() {
                running = running.max((path[n] - last).abs());
                osc[n] = running;
            }
            for (m, o) in max_osc.iter_mut().zip(&osc) {
                *m = m.max(*o);
            }
            AtomTrace {
                id: tree.cell(leaf).id().to_string(),
                path,
                osc,
            }
        })
        .collect();
    let fitted_ratio = fit_ratio(&max_osc);
    ConvergenceReport {
        atoms,
        max_osc,
        fitted_ratio,
    }
}

fn fit_ratio(osc: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = osc
        .iter()
        .enumerate()
        .filter(|(_, &o)| o > 0.0)
        .map(|(i, &o)| ((i + 1) as f64, o.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some((sxy / sxx).exp())
}

fn check_sample(sample: &[f64], epsilon: f64) -> Result<(), ExperimentError> {
    if sample.is_empty() {
        return Err(ExperimentError::Invalid("empty sample".into()));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(ExperimentError::Invalid("epsilon must be positive".into()));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(ExperimentError::Invalid("non-finite sample point".into()));
    }
    if sample.windows(2).any(|w| w[0] > w[1]) {
        return Err(ExperimentError::Invalid(
            "sample must be sorted ascending".into(),
        ));
    }
    Ok(())
}

/// Greedy left-to-right ε-net of a sorted sample: the first point, then every
/// point farther than `epsilon` from the last chosen one.
pub fn epsilon_net(sample: &[f64], epsilon: f64) -> Result<Vec<f64>, ExperimentError> {
    check_sample(sample, epsilon)?;
    let mut net = vec![sample[0]];
    for &x in &sample[1..] {
        if x - net[net.len() - 1] > epsilon {
            net.push(x);
        }
    }
    Ok(net)
}

/// Greedy ε-net grown outward from an anchor instead of the left end: the
/// anchor is the first sample point at or beyond `min + offset·ε`, and the
/// cover proceeds rightwards and leftwards from it.
pub fn epsilon_net_anchored(
    sample: &[f64],
    epsilon: f64,
    offset: f64,
) -> Result<Vec<f64>, ExperimentError> {
    check_sample(sample, epsilon)?;
    let start = sample[0] + offset * epsilon;
    let anchor = sample.partition_point(|&x| x < start).min(sample.len() - 1);
    let mut right = vec![sample[anchor]];
    for &x in &sample[anchor + 1..] {
        if x - right[right.len() - 1] > epsilon {
            right.push(x);
        }
    }
    let mut left: Vec<f64> = Vec::new();
    let mut last = sample[anchor];
    for &x in sample[..anchor].iter().rev() {
        if last - x > epsilon {
            left.push(x);
            last = x;
        }
    }
    left.reverse();
    left.extend(right);
    Ok(left)
}

/// Boltzmann distribution on an ε-net with a prescribed mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetDistribution {
    pub distribution: ProbabilityVector,
    pub epsilon: f64,
    pub alpha: f64,
    pub lambda: Lambda,
}

impl NetDistribution {
    pub fn support(&self) -> &[f64] {
        self.distribution.values()
    }

    pub fn distance(&self, other: &NetDistribution) -> Distances {
        distribution_distance(&self.distribution, &other.distribution)
    }
}

/// Solves the Boltzmann problem on `support`; `alpha` must lie strictly
/// between its min and max.
pub fn net_boltzmann(
    support: &[f64],
    alpha: f64,
    epsilon: f64,
) -> Result<NetDistribution, ExperimentError> {
    let (min, max) = support
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    if support.is_empty() || !(min < alpha && alpha < max) {
        return Err(ExperimentError::Infeasible { alpha, min, max });
    }
    let sol = solve_boltzmann(support, alpha, boltzmann::DEFAULT_TOL)?;
    Ok(NetDistribution {
        distribution: sol.distribution,
        epsilon,
        alpha,
        lambda: sol.lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distances {
    pub kolmogorov: f64,
    pub wasserstein1: f64,
}

/// Kolmogorov and Wasserstein-1 distances between two discrete distributions
/// on the line, computed exactly from their CDFs on the merged support.
pub fn distribution_distance(a: &ProbabilityVector, b: &ProbabilityVector) -> Distances {
    let mut events: Vec<(f64, f64)> = a
        .values()
        .iter()
        .zip(a.probs())
        .map(|(&x, &p)| (x, p))
        .chain(b.values().iter().zip(b.probs()).map(|(&x, &p)| (x, -p)))
        .collect();
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    // Track both CDFs separately so that the difference is exact at shared
    // points and symmetric in (a, b).
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut ks = 0.0f64;
    let mut w1 = 0.0f64;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            let w = events[i].1;
            if w >= 0.0 {
                fa += w;
            } else {
                fb -= w;
            }
            i += 1;
        }
        let gap = (fa - fb).abs();
        ks = ks.max(gap);
        if i < events.len() {
            w1 += gap * (events[i].0 - x);
        }
    }
    Distances {
        kolmogorov: ks,
        wasserstein1: w1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetStudyRow {
    pub epsilon: f64,
    pub net_size: usize,
    pub lambda: Lambda,
    /// Distance to the previous (coarser) ε row's distribution.
    pub to_previous: Option<Distances>,
    /// Largest distance to a jittered net's distribution at the same ε.
    pub cross_net: Option<Distances>,
}

/// Boltzmann distributions on greedy ε-nets for a decreasing ε sequence.
/// `jitters` are anchor offsets (in units of ε) for alternative nets compared
/// at equal ε.
pub fn net_convergence_study(
    sample: &[f64],
    alpha: f64,
    eps_sequence: &[f64],
    jitters: &[f64],
) -> Result<Vec<NetStudyRow>, ExperimentError> {
    if eps_sequence.is_empty() {
        return Err(ExperimentError::Invalid("empty epsilon sequence".into()));
    }
    if eps_sequence.windows(2).any(|w| w[0] <= w[1]) {
        return Err(ExperimentError::Invalid(
            "epsilon sequence must strictly decrease".into(),
        ));
    }
    let mut rows = Vec::with_capacity(eps_sequence.len());
    let mut previous: Option<NetDistribution> = None;
    for &eps in eps_sequence {
        let net = epsilon_net(sample, eps)?;
        let mu = net_boltzmann(&net, alpha, eps)?;
        let mut cross: Option<Distances> = None;
        for &j in jitters {
            let alt = epsilon_net_anchored(sample, eps, j)?;
            let d = mu.distance(&net_boltzmann(&alt, alpha, eps)?);
            cross = Some(match cross {
                None => d,
                Some(c) => Distances {
                    kolmogorov: c.kolmogorov.max(d.kolmogorov),
                    wasserstein1: c.wasserstein1.max(d.wasserstein1),
                },
            });
        }
        rows.push(NetStudyRow {
            epsilon: eps,
            net_size: net.len(),
            lambda: mu.lambda,
            to_previous: previous.as_ref().map(|p| p.distance(&mu)),
            cross_net: cross,
        });
        previous = Some(mu);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaEntry {
    pub id: String,
    pub level: usize,
    pub lambda: Lambda,
}

/// The Boltzmann tilt of every non-leaf cell, i.e. `g_n` on levels `1..N-1`.
///
/// Sibling tilts may coincide, so this is a function on the original cells
/// rather than a new [`FiltrationTree`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaField {
    pub entries: Vec<LambdaEntry>,
    #[serde(skip)]
    by_node: Vec<Option<Lambda>>,
}

impl LambdaField {
    pub fn get(&self, id: NodeId) -> Option<Lambda> {
        self.by_node[id.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaFieldReport {
    pub field: LambdaField,
    /// Envelope check of `g_n` against `g_{n+1}` on levels `1..N-2`.
    pub envelope: EnvelopeReport,
    /// Cells left out because they or a child carry an infinite tilt.
    pub excluded: Vec<String>,
}

/// Tilts come out of a root finder, so sibling ties are only equal up to its
/// accuracy.
pub const LAMBDA_SLACK: f64 = 1e-10;

fn slack(v: f64) -> f64 {
    LAMBDA_SLACK * v.abs().max(1.0)
}

pub fn lambda_field(tree: &FiltrationTree) -> Result<LambdaFieldReport, ExperimentError> {
    if let Some(bad) = crate::tree::envelope(tree).first_violation() {
        return Err(ExperimentError::EnvelopeViolation(bad.to_string()));
    }
    let mut by_node = vec![None; tree.len()];
    let mut entries = Vec::new();
    for q in tree.interior_cells() {
        let sol = solve_boltzmann(
            &tree.child_values_of(q),
            tree.value(q),
            boltzmann::DEFAULT_TOL,
        )?;
        by_node[q.index()] = Some(sol.lambda);
        entries.push(LambdaEntry {
            id: tree.cell(q).id().to_string(),
            level: tree.cell(q).level(),
            lambda: sol.lambda,
        });
    }
    let mut records = Vec::new();
    let mut excluded = Vec::new();
    let depth = tree.depth();
    if depth >= 3 {
        for n in 1..=depth - 2 {
            for &q in tree.level(n) {
                let own = by_node[q.index()].and_then(Lambda::finite);
                let kids: Option<Vec<f64>> = tree
                    .cell(q)
                    .children()
                    .iter()
                    .map(|&c| by_node[c.index()].and_then(Lambda::finite))
                    .collect();
                match (own, kids) {
                    (Some(v), Some(k)) => {
                        let min = k.iter().copied().fold(f64::INFINITY, f64::min);
                        let max = k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        records.push(EnvelopeRecord {
                            id: tree.cell(q).id().to_string(),
                            min,
                            max,
                            value: v,
                            ok: min - slack(v) <= v && v <= max + slack(v),
                        });
                    }
                    _ => excluded.push(tree.cell(q).id().to_string()),
                }
            }
        }
    }
    Ok(LambdaFieldReport {
        field: LambdaField { entries, by_node },
        envelope: EnvelopeReport::from_records(records),
        excluded,
    })
}
