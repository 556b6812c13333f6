//! Sparse truth-table algebra for propositional knowledge compilation.
//!
//! A propositional formula over events `E1..EN` can be viewed as the set of
//! truth assignments that satisfy it. This crate manipulates such sets
//! directly, as sums of *t-objects*: partial assignments that fix a finite
//! set of events to 1 (the upper index set), a disjoint finite set to 0 (the
//! lower index set), and leave every other event free. A [`StateVector`] is a
//! multiset of t-objects and stands for the union of the partial assignments
//! it contains, with integer multiplicities tracked per row.
//!
//! The layers, bottom up:
//!
//! * [`tobject`]: single rows and their algebra (product, decomposition,
//!   orthogonal splitting).
//! * [`vector`]: state vectors and the set-level operations (product, union,
//!   set subtraction, subvectors, counting, event classification).
//! * [`reduction`]: row merging, the reduction heuristic, and order-driven
//!   canonical forms.
//! * [`dense`]: an exhaustive coordinate representation used as a
//!   cross-checking oracle at small universe sizes.
//! * [`formula`], [`parser`], [`dimacs`], [`compile`]: the logic frontend
//!   that turns formulas into state vectors.
//! * [`inference`]: knowledge bases, valid sets, information sets, and
//!   entailment queries.
//!
//! ```
//! use state_algebra::{Formula, KnowledgeBase, Verdict};
//!
//! let mut kb = KnowledgeBase::new();
//! kb.add_source("E1 -> E2\nE2 -> E3").unwrap();
//! let query: Formula = kb.parse_formula("E1 -> E3").unwrap();
//! let outcome = kb.query(&query, Default::default()).unwrap();
//! assert_eq!(outcome.verdict, Verdict::Entailed);
//! ```

pub mod compile;
pub mod dense;
pub mod dimacs;
pub mod formula;
pub mod inference;
pub mod parser;
pub mod reduction;
pub mod registry;
pub mod tobject;
pub mod var;
pub mod vector;

pub use compile::{compile, compile_clause_info, decompose_with_supplementaries, extend};
pub use compile::{CompileConfig, CompiledFormula};
pub use dense::DenseVector;
pub use dimacs::{parse_dimacs, DimacsCnf};
pub use formula::Formula;
pub use inference::{
    KbConfig, KnowledgeBase, QueryVerdict, Strategy, StepStats, ValidSetOpts, ValidSetTrace,
    Verdict,
};
pub use parser::{parse_formula, parse_program, ParseError};
pub use reduction::{
    atomic_reduce, canonicalize, multiply_canonical, reduce_heuristic, ReductionStats,
    VariableOrder,
};
pub use registry::{Registry, UnknownVars, VarKind};
pub use tobject::{OrthoSplit, Row, TObject};
pub use var::{IndexSet, VarId};
pub use vector::{EventStatus, OpCounters, Polarity, StateVector};

/// Errors shared across the algebra layers.
///
/// Parse errors carry positions in [`parser::ParseError`] and are wrapped
/// here when source text enters through a knowledge base; everything else is
/// a contract violation of one of the algebraic operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Decomposition by an index the row already fixes.
    #[error("index E{var} is already fixed in this row")]
    IndexAlreadyFixed { var: u32 },
    /// An operation that needs at least one row was given none.
    #[error("operation is undefined on an empty state vector")]
    EmptyVector,
    /// A universe of `n` events cannot host the indices in use.
    #[error("universe of {n} events is too small: E{var} is in use")]
    UniverseTooSmall { n: u32, var: u32 },
    /// The dense representation refuses universes past its cap.
    #[error("universe of {n} events exceeds the cap of {cap}")]
    UniverseTooLarge { n: u32, cap: u32 },
    /// Dense arithmetic on vectors from different universes.
    #[error("dense vectors live in different universes ({left} vs {right} events)")]
    UniverseMismatch { left: u32, right: u32 },
    /// A dense set operation was asked of a non-binary vector.
    #[error("dense vector has coordinates outside {{0,1}}")]
    NotBinary,
    /// Clause-only entry point handed a formula that is not a clause.
    #[error("formula is not a disjunction of literals")]
    NotAClause,
    /// Truth-table compilation refused a formula with too many variables.
    #[error("formula has {vars} variables, above the compile cap of {cap}")]
    CompileCapExceeded { vars: usize, cap: usize },
    /// An indicator event may not occur in the formula it abbreviates.
    #[error("indicator E{var} occurs in the formula it should indicate")]
    IndicatorCollision { var: u32 },
    /// A variable order listed the same event twice.
    #[error("variable order lists E{var} twice")]
    DuplicateInOrder { var: u32 },
    /// Two distinct names were bound to the same event id.
    #[error("name {name:?} conflicts with existing binding of E{existing}")]
    NameConflict { name: String, existing: u32 },
    /// Source text handed to a knowledge base failed to parse.
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;
