//! Formula-to-vector compilation.
//!
//! [`compile`] turns a formula into the state vector of its satisfying
//! assignments. Clauses take a fast path (the whole space minus the single
//! falsified block) and work at any width; everything else enumerates the
//! truth table over the formula's own variables, which is capped, and then
//! merges rows with the reduction heuristic. When greedy merging leaves more
//! rows than half the expansion — the heuristic carries no such guarantee —
//! the result is rebuilt canonically, which does.
//!
//! [`extend`] compiles `k <-> f` for a fresh indicator event `k`, the
//! standard trick for asking about `f` inside a larger vector without
//! recompiling it. [`decompose_with_supplementaries`] splits a formula that
//! is too wide to enumerate into capped pieces tied together by fresh
//! supplementary events.

use crate::formula::Formula;
use crate::reduction::{canonicalize, reduce_heuristic, VariableOrder};
use crate::registry::{Registry, VarKind};
use crate::tobject::{Row, TObject};
use crate::var::{IndexSet, VarId};
use crate::vector::StateVector;
use crate::{Error, Result};

/// Tunables for compilation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileConfig {
    /// Maximum number of distinct variables a single truth-table enumeration
    /// may cover. Clauses are exempt.
    pub cap: usize,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig { cap: 16 }
    }
}

/// A formula together with its compiled state vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledFormula {
    /// The formula the vector was built from. For [`extend`] this is the
    /// extended formula `k <-> f`, which is what `valid` describes.
    pub formula: Formula,
    /// Satisfying assignments, as pairwise-orthogonal binary rows.
    pub valid: StateVector,
    /// The excluded block, present only when the formula is a clause (a
    /// tautologous clause excludes nothing and gets an empty vector).
    pub info: Option<StateVector>,
    /// The indicator event, when built by [`extend`].
    pub indicator: Option<VarId>,
    /// Supplementary events this part defines, when built by
    /// [`decompose_with_supplementaries`].
    pub supplementary: IndexSet,
}

/// The single block of assignments a clause rules out.
///
/// Each positive literal goes to the lower index set and each negative
/// literal to the upper one: the row fixes every literal to false. A
/// tautologous clause (some event in both phases) excludes nothing and
/// yields `Null`; the empty clause excludes everything and yields the unit.
pub fn compile_clause_info(f: &Formula) -> Result<TObject> {
    let lits = f.clause_literals().ok_or(Error::NotAClause)?;
    Ok(info_from_literals(&lits))
}

fn info_from_literals(lits: &[(VarId, bool)]) -> TObject {
    let upper: IndexSet = lits.iter().filter(|(_, ph)| !ph).map(|(v, _)| *v).collect();
    let lower: IndexSet = lits.iter().filter(|(_, ph)| *ph).map(|(v, _)| *v).collect();
    TObject::new(upper, lower)
}

/// Compiles a formula into the vector of its satisfying assignments.
///
/// The result is binary with pairwise-orthogonal rows and never has more
/// than `max(1, 2^(k-1))` of them for `k` distinct variables. Enumeration
/// refuses formulas wider than [`CompileConfig::cap`]; clauses bypass it.
pub fn compile(f: &Formula, cfg: &CompileConfig) -> Result<CompiledFormula> {
    if let Some(lits) = f.clause_literals() {
        let info = info_from_literals(&lits);
        let valid = match info.as_row() {
            Some(row) => {
                StateVector::trivial().subtract_set(&StateVector::singleton(row.clone()))
            }
            None => StateVector::trivial(),
        };
        return Ok(CompiledFormula {
            formula: f.clone(),
            valid,
            info: Some(StateVector::from_tobjects([info])),
            indicator: None,
            supplementary: IndexSet::new(),
        });
    }

    let vars = f.vars();
    let k = vars.len();
    if k > cfg.cap || k >= 64 {
        return Err(Error::CompileCapExceeded {
            vars: k,
            cap: cfg.cap.min(63),
        });
    }
    let ids: Vec<VarId> = vars.iter().collect();
    let mut rows = Vec::new();
    for mask in 0u64..(1u64 << k) {
        let assign = |v: VarId| {
            let p = ids.binary_search(&v).expect("assignment covers vars(f)");
            mask >> p & 1 == 1
        };
        if f.eval(&assign) {
            let upper: IndexSet = ids
                .iter()
                .enumerate()
                .filter(|(p, _)| mask >> p & 1 == 1)
                .map(|(_, v)| *v)
                .collect();
            let lower = vars.difference(&upper);
            rows.push(Row::new(upper, lower).expect("disjoint by construction"));
        }
    }
    let (reduced, _) = reduce_heuristic(&StateVector::from_rows(rows));
    let bound = 1usize << k.saturating_sub(1);
    let valid = if reduced.len() > bound {
        canonicalize(&reduced, &VariableOrder::ascending(0))
    } else {
        reduced
    };
    Ok(CompiledFormula {
        formula: f.clone(),
        valid,
        info: None,
        indicator: None,
        supplementary: IndexSet::new(),
    })
}

/// Compiles `k <-> f` for an indicator event `k` not occurring in `f`.
pub fn extend(f: &Formula, k: VarId, cfg: &CompileConfig) -> Result<CompiledFormula> {
    if f.vars().contains(k) {
        return Err(Error::IndicatorCollision { var: k.get() });
    }
    let mut compiled = compile(&Formula::iff(Formula::var(k), f.clone()), cfg)?;
    compiled.indicator = Some(k);
    Ok(compiled)
}

/// Splits a formula too wide for one enumeration into capped parts.
///
/// Composite children of a wide connective are pulled out as definitions
/// `s <-> child` for fresh supplementary events, recursively; a connective
/// still too wide after that is chunked, again through fresh definitions.
/// Definitions come before the residual formula in the result, and each
/// carries the event it defines in `supplementary`. The conjunction of all
/// parts has the same assignments as the original once the supplementary
/// events are projected away.
pub fn decompose_with_supplementaries(
    f: &Formula,
    registry: &mut Registry,
    cfg: &CompileConfig,
) -> Result<Vec<CompiledFormula>> {
    let mut parts = Vec::new();
    let residual = lower_width(f, cfg.cap, registry, cfg, &mut parts)?;
    parts.push(compile(&residual, cfg)?);
    Ok(parts)
}

/// Rewrites `f` to use at most `budget` distinct variables, emitting
/// supplementary definitions for whatever gets pulled out.
fn lower_width(
    f: &Formula,
    budget: usize,
    registry: &mut Registry,
    cfg: &CompileConfig,
    parts: &mut Vec<CompiledFormula>,
) -> Result<Formula> {
    if f.vars().len() <= budget {
        return Ok(f.clone());
    }
    // Chunking replaces at least two children per round only when a
    // definition may span three or more variables.
    if budget < 3 || cfg.cap < 3 {
        return Err(Error::CompileCapExceeded {
            vars: f.vars().len(),
            cap: cfg.cap,
        });
    }
    match f {
        Formula::True | Formula::False | Formula::Var(_) => unreachable!("atoms fit any budget"),
        Formula::Not(inner) => Ok(Formula::not(lower_width(
            inner, budget, registry, cfg, parts,
        )?)),
        Formula::And(kids) | Formula::Or(kids) => {
            let conj = matches!(f, Formula::And(_));
            let mut flat = Vec::with_capacity(kids.len());
            for kid in kids {
                flat.push(atomize(kid, registry, cfg, parts)?);
            }
            // All children are now literals or constants; chunk a prefix into
            // a definition whenever the whole connective is still too wide.
            loop {
                let width = flat
                    .iter()
                    .fold(IndexSet::new(), |acc, kid| acc.union(&kid.vars()))
                    .len();
                if width <= budget {
                    break;
                }
                let mut taken = 0;
                let mut seen = IndexSet::new();
                for kid in &flat {
                    let next = seen.union(&kid.vars());
                    if next.len() > cfg.cap - 1 && taken >= 2 {
                        break;
                    }
                    seen = next;
                    taken += 1;
                }
                let group: Vec<Formula> = flat.drain(..taken).collect();
                let body = if conj {
                    Formula::and(group)
                } else {
                    Formula::or(group)
                };
                flat.insert(0, Formula::var(define(&body, registry, cfg, parts)?));
            }
            Ok(if conj {
                Formula::and(flat)
            } else {
                Formula::or(flat)
            })
        }
        Formula::Implies(a, b) => Ok(Formula::implies(
            atomize(a, registry, cfg, parts)?,
            atomize(b, registry, cfg, parts)?,
        )),
        Formula::Iff(a, b) => Ok(Formula::iff(
            atomize(a, registry, cfg, parts)?,
            atomize(b, registry, cfg, parts)?,
        )),
        Formula::Xor(a, b) => Ok(Formula::xor(
            atomize(a, registry, cfg, parts)?,
            atomize(b, registry, cfg, parts)?,
        )),
    }
}

/// Leaves literals and constants alone; replaces anything composite by a
/// fresh supplementary event, emitting its definition.
fn atomize(
    f: &Formula,
    registry: &mut Registry,
    cfg: &CompileConfig,
    parts: &mut Vec<CompiledFormula>,
) -> Result<Formula> {
    if f.is_literal() || matches!(f, Formula::True | Formula::False) {
        return Ok(f.clone());
    }
    Ok(Formula::var(define(f, registry, cfg, parts)?))
}

/// Emits `s <-> body` for a fresh supplementary `s` and returns `s`. The
/// body is narrowed first so the definition itself fits the cap.
fn define(
    body: &Formula,
    registry: &mut Registry,
    cfg: &CompileConfig,
    parts: &mut Vec<CompiledFormula>,
) -> Result<VarId> {
    let body = lower_width(body, cfg.cap - 1, registry, cfg, parts)?;
    let s = registry.fresh(VarKind::Supplementary);
    let mut def = compile(&Formula::iff(Formula::var(s), body), cfg)?;
    def.supplementary = IndexSet::singleton(s);
    parts.push(def);
    Ok(s)
}
