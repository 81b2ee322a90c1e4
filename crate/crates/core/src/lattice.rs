//! Tree generators: multiplicative binomial/trinomial price lattices and
//! additive-increment trees.
//!
//! Lattices here do not recombine: each cell of the filtration tree is a
//! distinct price path, with children `S·d < S·m < S·u`.
//!
//! Cell ids are paths: the single level-1 cell is `"0"` and the `k`-th child
//! (ascending value) of cell `x` is `"x.k"`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{FiltrationTree, TreeBuilder, TreeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice: {0}")]
    Invalid(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Binomial,
    Trinomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    /// Number of time steps; the tree has `levels + 1` levels.
    pub levels: usize,
    pub s0: f64,
    pub up: f64,
    pub down: f64,
    /// Middle factor of a trinomial lattice.
    pub mid: Option<f64>,
}

impl LatticeSpec {
    pub fn binomial(levels: usize, s0: f64, up: f64, down: f64) -> Self {
        LatticeSpec {
            kind: LatticeKind::Binomial,
            levels,
            s0,
            up,
            down,
            mid: None,
        }
    }

    pub fn trinomial(levels: usize, s0: f64, up: f64, mid: f64, down: f64) -> Self {
        LatticeSpec {
            kind: LatticeKind::Trinomial,
            levels,
            s0,
            up,
            down,
            mid: Some(mid),
        }
    }

    /// `d <= 1 <= u`: exactly the condition under which every price is
    /// bracketed by its successors, i.e. the tree is a measure-free
    /// martingale.
    pub fn brackets(&self) -> bool {
        self.down <= 1.0 && 1.0 <= self.up
    }

    fn factors(&self) -> Result<Vec<f64>, LatticeError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.s0) || !ok(self.up) || !ok(self.down) {
            return Err(LatticeError::Invalid(
                "s0, up and down must be positive and finite".into(),
            ));
        }
        if self.down >= self.up {
            return Err(LatticeError::Invalid(
                "down factor must be below up factor".into(),
            ));
        }
        match (self.kind, self.mid) {
            (LatticeKind::Binomial, _) => Ok(vec![self.down, self.up]),
            (LatticeKind::Trinomial, Some(m)) if m > self.down && m < self.up => {
                Ok(vec![self.down, m, self.up])
            }
            (LatticeKind::Trinomial, Some(_)) => Err(LatticeError::Invalid(
                "middle factor must lie strictly between down and up".into(),
            )),
            (LatticeKind::Trinomial, None) => Err(LatticeError::Invalid(
                "trinomial lattice needs a middle factor".into(),
            )),
        }
    }

    pub fn generate(&self) -> Result<FiltrationTree, LatticeError> {
        let factors = self.factors()?;
        grow(
            self.levels + 1,
            self.s0,
            |v, k| v * factors[k],
            factors.len(),
        )
    }
}

/// Tree where each child of a cell with value `v` has value `v + δ_k`.
pub fn additive_tree(
    depth: usize,
    root: f64,
    increments: &[f64],
) -> Result<FiltrationTree, LatticeError> {
    if depth == 0 || increments.is_empty() {
        return Err(LatticeError::Invalid(
            "need depth >= 1 and at least one increment".into(),
        ));
    }
    let mut inc = increments.to_vec();
    inc.sort_by(f64::total_cmp);
    grow(depth, root, |v, k| v + inc[k], inc.len())
}

fn grow(
    depth: usize,
    root: f64,
    child: impl Fn(f64, usize) -> f64,
    branching: usize,
) -> Result<FiltrationTree, LatticeError> {
    if depth == 0 {
        return Err(LatticeError::Invalid("depth must be at least 1".into()));
    }
    let mut b = TreeBuilder::new(depth);
    b.cell("0", 1, None, root);
    let mut frontier = vec![("0".to_string(), root)];
    for level in 2..=depth {
        let mut next = Vec::with_capacity(frontier.len() * branching);
        for (id, v) in &frontier {
            for k in 0..branching {
                let cid = format!("{id}.{k}");
                let cv = child(*v, k);
                b.cell(cid.clone(), level, Some(id), cv);
                next.push((cid, cv));
            }
        }
        frontier = next;
    }
    Ok(b.build()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::envelope;

    #[test]
    fn binomial_cell_count_and_verification() {
        let t = LatticeSpec::binomial(3, 1.0, 2.0, 0.5).generate().unwrap();
        assert_eq!(t.len(), 15);
        assert_eq!(t.depth(), 4);
        assert!(envelope(&t).ok);
        assert_eq!(
            t.children_values("0").unwrap(),
            vec![("0.0", 0.5), ("0.1", 2.0)]
        );
    }

    #[test]
    fn non_bracketing_lattice_generates_but_fails_envelope() {
        let spec = LatticeSpec::binomial(2, 1.0, 2.0, 1.1);
        assert!(!spec.brackets());
        let t = spec.generate().unwrap();
        assert!(!envelope(&t).ok);
    }

    #[test]
    fn trinomial_counts() {
        let t = LatticeSpec::trinomial(2, 1.0, 1.5, 1.0, 0.5)
            .generate()
            .unwrap();
        assert_eq!(t.len(), 13);
        assert!(envelope(&t).ok);
    }

    #[test]
    fn invalid_specs() {
        assert!(LatticeSpec::binomial(2, -1.0, 2.0, 0.5).generate().is_err());
        assert!(LatticeSpec::binomial(2, 1.0, 0.5, 2.0).generate().is_err());
        assert!(LatticeSpec::trinomial(2, 1.0, 2.0, 3.0, 0.5)
            .generate()
            .is_err());
    }

    #[test]
    fn additive_symmetric() {
        let t = additive_tree(3, 0.0, &[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(t.len(), 13);
        assert_eq!(t.value(t.lookup("0.2.0").unwrap()), 0.0);
    }
}
