//! Knowledge bases and reasoning over compiled vectors.
//!
//! A [`KnowledgeBase`] owns a name registry and a list of compiled formulas.
//! Its *valid set* is the intersection of the parts' satisfying assignments,
//! built by folding vector products with simplification after every step;
//! the dual *information set* accumulates the excluded blocks instead.
//! Entailment questions are answered on the valid set by one of three
//! [`Strategy`]s, which always agree on the [`Verdict`]; they differ in what
//! intermediate objects they build and what a partial run can already tell.
//!
//! Formulas wider than the compile cap are split into parts tied together by
//! supplementary events. Those events are projected away again only *after*
//! intersection — [`KnowledgeBase::eliminate_supplementaries`] — because
//! projection and product do not commute; dropping them early loses the
//! coupling and can declare too much valid.

use std::fmt;

use serde::Serialize;

use crate::compile::{
    compile, decompose_with_supplementaries, extend, CompileConfig, CompiledFormula,
};
use crate::dimacs::parse_dimacs;
use crate::formula::Formula;
use crate::parser::{parse_formula, parse_program};
use crate::reduction::{canonicalize, reduce_heuristic, ReductionStats, VariableOrder};
use crate::registry::{Registry, UnknownVars, VarKind};
use crate::tobject::Row;
use crate::vector::{EventStatus, OpCounters, Polarity, StateVector};
use crate::Result;

/// How a query is decided. All strategies return the same verdict.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Extend the query with a fresh indicator event, multiply into the
    /// valid set, and classify the indicator column. One product, complete
    /// verdicts, and a witness for free.
    #[default]
    Indicator,
    /// Intersect the valid set with the query and with its negation and look
    /// at which intersection is empty.
    ValidIntersect,
    /// Compare cardinalities against the information set: the query is
    /// entailed when the excluded blocks cover every assignment falsifying
    /// it, refuted when they cover every assignment satisfying it.
    InfoCount,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Indicator => "indicator",
            Strategy::ValidIntersect => "valid-intersect",
            Strategy::InfoCount => "info-count",
        })
    }
}

/// Relation of a query to the premises.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// True in every premise state.
    Entailed,
    /// False in every premise state.
    Refuted,
    /// True in some premise states and false in others.
    Contingent,
    /// There are no premise states at all.
    PremiseUnsatisfiable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entailed => "entailed",
            Verdict::Refuted => "refuted",
            Verdict::Contingent => "contingent",
            Verdict::PremiseUnsatisfiable => "premise-unsatisfiable",
        })
    }
}

/// A verdict plus, when one came cheap, a block of premise states backing
/// it: satisfying the query for `Entailed`/`Contingent`, falsifying it for
/// `Refuted`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryVerdict {
    pub verdict: Verdict,
    pub witness: Option<Row>,
}

/// Knobs for building a valid set; `Default` is the plain sequential fold.
#[derive(Clone, Debug, Default)]
pub struct ValidSetOpts {
    /// Record per-step statistics in the trace.
    pub trace: bool,
    /// Run each step's pairwise products data-parallel. The result is
    /// byte-identical to the sequential fold.
    pub parallel: bool,
    /// Drop rows subsumed by other rows after each step. Sound for the
    /// underlying set; the fold keeps rows binary anyway, so this is mostly
    /// useful when feeding hand-built vectors through the pipeline.
    pub subsumption: bool,
    /// Reorder parts so that those sharing low events sit together before
    /// folding. Changes intermediate sizes, never the resulting set.
    pub cluster: bool,
    /// Canonicalize after every step (and therefore the result).
    pub canonical: bool,
    /// Event order for `canonical`; ascending ids when absent.
    pub order: Option<VariableOrder>,
    /// Fold at most this many parts, reporting whether any were left. This
    /// is how an unbounded stream of premises is consumed in slices.
    pub step_budget: Option<usize>,
}

/// One fold step of a valid-set construction.
#[derive(Clone, Debug, Serialize)]
pub struct StepStats {
    /// The formula whose vector was multiplied in.
    pub source: String,
    /// Accumulator rows before the step.
    pub rows_before: usize,
    /// Rows right after the product, before simplification.
    pub rows_product: usize,
    /// Accumulator rows after simplification.
    pub rows_after: usize,
    /// What the reduction pass did.
    pub reduction: ReductionStats,
}

/// Result of a valid-set construction.
#[derive(Clone, Debug, Serialize)]
pub struct ValidSetTrace {
    /// The intersection of the folded parts.
    pub result: StateVector,
    /// Per-step statistics, when requested.
    pub steps: Option<Vec<StepStats>>,
    /// Row-level work done across all steps.
    pub counters: OpCounters,
    /// True when a step budget ran out with parts still unconsumed.
    pub budget_exhausted: bool,
}

/// Behavior switches for a knowledge base.
#[derive(Clone, Debug, Default)]
pub struct KbConfig {
    /// Compilation limits for formulas entering the base.
    pub compile: CompileConfig,
    /// Whether parsing may mint events for unknown names.
    pub unknown_vars: UnknownVars,
    /// Whether DIMACS deviations are errors instead of warnings.
    pub dimacs_strict: bool,
}

/// A registry plus the compiled premises, with query entry points.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    registry: Registry,
    entries: Vec<CompiledFormula>,
    config: KbConfig,
}

impl KnowledgeBase {
    pub fn new() -> KnowledgeBase {
        KnowledgeBase::default()
    }

    pub fn with_config(config: KbConfig) -> KnowledgeBase {
        KnowledgeBase {
            registry: Registry::default(),
            entries: Vec::new(),
            config,
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    /// Mutable registry access, for pre-registering names or roles.
    pub fn registry_mut(&mut self) -> &mut Registry {
        &mut self.registry
    }

    pub fn config(&self) -> &KbConfig {
        &self.config
    }

    /// The compiled premises, in insertion order (decomposed parts included).
    pub fn entries(&self) -> &[CompiledFormula] {
        &self.entries
    }

    /// Parses one formula against this base's registry and policy, without
    /// adding it. This is how query texts should be read.
    pub fn parse_formula(&mut self, text: &str) -> Result<Formula> {
        Ok(parse_formula(
            text,
            &mut self.registry,
            self.config.unknown_vars,
        )?)
    }

    /// Parses newline- or `;`-separated formulas and adds each as a premise.
    pub fn add_source(&mut self, text: &str) -> Result<()> {
        let formulas = parse_program(text, &mut self.registry, self.config.unknown_vars)?;
        for f in &formulas {
            self.add_formula(f)?;
        }
        Ok(())
    }

    /// Compiles one premise into the base.
    ///
    /// Formulas wider than the compile cap are decomposed into parts over
    /// fresh supplementary events (clauses compile directly at any width).
    pub fn add_formula(&mut self, f: &Formula) -> Result<()> {
        let wide = f.vars().len() > self.config.compile.cap;
        if wide && f.clause_literals().is_none() {
            let parts = decompose_with_supplementaries(f, &mut self.registry, &self.config.compile)?;
            self.entries.extend(parts);
        } else {
            self.entries.push(compile(f, &self.config.compile)?);
        }
        Ok(())
    }

    /// Reads DIMACS CNF text, adding every clause. Returns the warnings the
    /// lenient reader tolerated (always empty under `dimacs_strict`).
    pub fn add_dimacs(&mut self, text: &str) -> Result<Vec<String>> {
        let cnf = parse_dimacs(text, self.config.dimacs_strict)?;
        self.registry.ensure_universe(cnf.num_vars);
        for clause in &cnf.clauses {
            self.add_formula(clause)?;
        }
        Ok(cnf.warnings)
    }

    /// Builds the valid set of all premises: the vector of assignments
    /// satisfying every one of them.
    pub fn valid_set(&self, opts: &ValidSetOpts) -> ValidSetTrace {
        self.valid_set_stream(&self.entries, opts)
    }

    /// [`valid_set`](Self::valid_set) over an explicit sequence of parts.
    ///
    /// With a step budget this consumes a prefix and reports whether parts
    /// were left over, so an effectively unbounded premise stream can be
    /// folded slice by slice (resume by seeding the next call's parts with
    /// the previous result).
    pub fn valid_set_stream<'a, I>(&self, parts: I, opts: &ValidSetOpts) -> ValidSetTrace
    where
        I: IntoIterator<Item = &'a CompiledFormula>,
    {
        let mut list: Vec<&CompiledFormula> = parts.into_iter().collect();
        if opts.cluster {
            // Stable sort: parts touching the same low events end up
            // adjacent, which tends to keep intermediate products narrow.
            list.sort_by_key(|p| {
                let piv = p.valid.pivot();
                (piv.min_id().map_or(u32::MAX, |v| v.get()), piv)
            });
        }
        let order = opts
            .canonical
            .then(|| opts.order.clone().unwrap_or_else(|| VariableOrder::ascending(0)));
        let mut acc = StateVector::trivial();
        let mut counters = OpCounters::default();
        let mut steps = opts.trace.then(Vec::new);
        let mut budget_exhausted = false;
        for (i, part) in list.iter().enumerate() {
            if opts.step_budget.is_some_and(|b| i >= b) {
                budget_exhausted = true;
                break;
            }
            let rows_before = acc.len();
            let product = acc.multiply_with(&part.valid, opts.parallel, &mut counters);
            let rows_product = product.len();
            let (mut next, reduction) = reduce_heuristic(&product);
            if opts.subsumption {
                next = next.absorb_subsumed();
            }
            if let Some(ord) = &order {
                next = canonicalize(&next, ord);
            }
            if let Some(steps) = steps.as_mut() {
                steps.push(StepStats {
                    source: part.formula.to_string(),
                    rows_before,
                    rows_product,
                    rows_after: next.len(),
                    reduction,
                });
            }
            acc = next;
            if acc.is_empty() {
                // Nothing can bring assignments back; the premises are
                // unsatisfiable and the remaining parts are irrelevant.
                break;
            }
        }
        ValidSetTrace {
            result: acc,
            steps,
            counters,
            budget_exhausted,
        }
    }

    /// Builds the information set: the union of the blocks the premises
    /// exclude, which is exactly the complement of the valid set.
    ///
    /// Each part contributes its stored excluded block when it is a clause
    /// and the complement of its valid set otherwise; the union accumulates
    /// as `acc + (part - acc)`, which keeps the rows pairwise orthogonal.
    pub fn information_set(&self, opts: &ValidSetOpts) -> Result<StateVector> {
        let mut counters = OpCounters::default();
        let mut acc = StateVector::empty();
        for part in &self.entries {
            let info = match &part.info {
                Some(info) => info.clone(),
                None => {
                    let n = part.valid.max_var().map_or(0, |v| v.get());
                    part.valid.complement(n)?
                }
            };
            let delta = info.subtract_set_with(&acc, opts.parallel, &mut counters);
            acc = acc.add(&delta);
        }
        Ok(acc)
    }

    /// Projects supplementary and indicator events out of a result vector.
    ///
    /// Must run on the *intersected* vector: projection does not commute
    /// with products, and eliminating per part before multiplying computes
    /// a different (larger) set.
    pub fn eliminate_supplementaries(&self, v: &StateVector) -> StateVector {
        let pivot = v.pivot();
        let hidden: Vec<_> = self
            .registry
            .hidden_vars()
            .iter()
            .filter(|h| pivot.contains(*h))
            .collect();
        if hidden.is_empty() {
            return v.clone();
        }
        let mut cur = v.clone();
        for h in hidden {
            cur = cur.remove_event(h);
        }
        // Projection can make rows overlap or repeat; rebuild a clean binary
        // form before handing the set back.
        let (reduced, _) = reduce_heuristic(&cur.orthogonalize());
        reduced
    }

    /// Number of assignments of the user events satisfying all premises.
    pub fn count_models(&self) -> Result<u128> {
        let valid = self.valid_set(&ValidSetOpts::default()).result;
        let projected = self.eliminate_supplementaries(&valid);
        projected.cardinality_over(&self.registry.user_vars())
    }

    /// Decides how `f` relates to the premises. See [`Strategy`] for the
    /// three ways of getting there; the verdict never depends on it.
    pub fn query(&self, f: &Formula, strategy: Strategy) -> Result<QueryVerdict> {
        let valid = self.valid_set(&ValidSetOpts::default()).result;
        self.query_with(&valid, f, strategy)
    }

    /// [`query`](Self::query) against a valid set the caller already built,
    /// so a batch of queries pays for the fold once.
    pub fn query_with(
        &self,
        valid: &StateVector,
        f: &Formula,
        strategy: Strategy,
    ) -> Result<QueryVerdict> {
        match strategy {
            Strategy::Indicator => self.query_indicator(valid, f),
            Strategy::ValidIntersect => self.query_valid_intersect(valid, f),
            Strategy::InfoCount => self.query_info_count(f),
        }
    }

    fn query_indicator(&self, valid: &StateVector, f: &Formula) -> Result<QueryVerdict> {
        let mut registry = self.registry.clone();
        if let Some(m) = f.vars().max_id() {
            registry.ensure_universe(m.get());
        }
        let k = registry.fresh(VarKind::Indicator);
        let ext = extend(f, k, &self.config.compile)?;
        let (product, _) = reduce_heuristic(&valid.multiply(&ext.valid));
        let verdict = match product.event_status(k) {
            EventStatus::IdenticallyTrue => Verdict::Entailed,
            EventStatus::IdenticallyFalse => Verdict::Refuted,
            EventStatus::Indefinite => Verdict::Contingent,
            EventStatus::EmptySpace => Verdict::PremiseUnsatisfiable,
        };
        let witness_side = match verdict {
            Verdict::Entailed | Verdict::Contingent => Some(Polarity::Upper),
            Verdict::Refuted => Some(Polarity::Lower),
            Verdict::PremiseUnsatisfiable => None,
        };
        let witness = witness_side.and_then(|side| {
            product
                .subvector(k, side)
                .rows()
                .first()
                .map(|(r, _)| r.without(k))
        });
        Ok(QueryVerdict { verdict, witness })
    }

    fn query_valid_intersect(&self, valid: &StateVector, f: &Formula) -> Result<QueryVerdict> {
        let q = compile(f, &self.config.compile)?.valid;
        let nq = compile(&Formula::not(f.clone()), &self.config.compile)?.valid;
        let (sat, _) = reduce_heuristic(&valid.multiply(&q));
        let (unsat, _) = reduce_heuristic(&valid.multiply(&nq));
        let (verdict, from) = match (sat.is_empty(), unsat.is_empty()) {
            (true, true) => (Verdict::PremiseUnsatisfiable, None),
            (false, true) => (Verdict::Entailed, Some(&sat)),
            (true, false) => (Verdict::Refuted, Some(&unsat)),
            (false, false) => (Verdict::Contingent, Some(&sat)),
        };
        let witness = from.and_then(|v| v.rows().first().map(|(r, _)| r.clone()));
        Ok(QueryVerdict { verdict, witness })
    }

    fn query_info_count(&self, f: &Formula) -> Result<QueryVerdict> {
        let n = self
            .registry
            .len()
            .max(f.vars().max_id().map_or(0, |v| v.get()));
        let info = self.information_set(&ValidSetOpts::default())?;
        let q = compile(f, &self.config.compile)?.valid;
        let nq = compile(&Formula::not(f.clone()), &self.config.compile)?.valid;
        let covered_q = info.multiply(&q).cardinality(n)? == q.cardinality(n)?;
        let covered_nq = info.multiply(&nq).cardinality(n)? == nq.cardinality(n)?;
        let verdict = match (covered_nq, covered_q) {
            (true, true) => Verdict::PremiseUnsatisfiable,
            (true, false) => Verdict::Entailed,
            (false, true) => Verdict::Refuted,
            (false, false) => Verdict::Contingent,
        };
        Ok(QueryVerdict {
            verdict,
            witness: None,
        })
    }

    /// True when `f` and `g` agree on every premise state (vacuously so when
    /// the premises are unsatisfiable).
    ///
    /// Both formulas get indicator events; the check is that no premise
    /// state sets the two indicators differently.
    pub fn equivalent_formulas(&self, f: &Formula, g: &Formula) -> Result<bool> {
        let mut registry = self.registry.clone();
        if let Some(m) = f.vars().max_id().max(g.vars().max_id()) {
            registry.ensure_universe(m.get());
        }
        let kf = registry.fresh(VarKind::Indicator);
        let kg = registry.fresh(VarKind::Indicator);
        let ef = extend(f, kf, &self.config.compile)?;
        let eg = extend(g, kg, &self.config.compile)?;
        let valid = self.valid_set(&ValidSetOpts::default()).result;
        let (both, _) = reduce_heuristic(&valid.multiply(&ef.valid).multiply(&eg.valid));
        let f_not_g = both
            .subvector(kf, Polarity::Upper)
            .subvector(kg, Polarity::Lower);
        let g_not_f = both
            .subvector(kg, Polarity::Upper)
            .subvector(kf, Polarity::Lower);
        Ok(f_not_g.is_empty() && g_not_f.is_empty())
    }
}
