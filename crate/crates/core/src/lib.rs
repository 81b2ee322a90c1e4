//! Measure-free martingales on finite filtration trees.
//!
//! A sequence of finite-range functions is a *measure-free martingale* when
//! every value `f_n(Q)` lies between the smallest and largest value of
//! `f_{n+1}` on the refinement of `Q`. Such a sequence becomes a genuine
//! martingale under many probability measures; this crate builds them, picks
//! out the maximum-entropy (Boltzmann) one, enumerates the extreme ones, and
//! runs a few numerical studies around them.
//!
//! * [`tree`]: the filtration tree, its JSON format and the envelope check.
//! * [`boltzmann`]: the mean-constrained maximum-entropy solver.
//! * [`measures`]: martingale measures, conditional rules, extreme points,
//!   equivalence bounds.
//! * [`experiments`]: convergence, ε-net and tilt-field studies.
//! * [`lattice`]: binomial/trinomial price lattices and additive trees.
//! * [`io`]: measure documents and rule files.
//! * [`cli`]: the `mfmart` command line.

pub mod boltzmann;
pub mod cli;
pub mod experiments;
pub mod io;
pub mod lattice;
pub mod measures;
pub mod tree;

pub use boltzmann::{solve_boltzmann, BoltzmannSolution, Lambda, ProbabilityVector};
pub use measures::{build_measure, check_martingale, TreeMeasure};
pub use tree::{envelope, EnvelopeReport, FiltrationTree, NodeId};
