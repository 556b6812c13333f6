//! Row merging, the reduction heuristic, and order-driven canonical forms.
//!
//! Two rows that are identical except for one event fixed to opposite values
//! cover exactly the assignment set of the merged row with that event freed;
//! replacing the pair by the merged row is [`atomic_reduce`]. Applied until
//! no pair qualifies, this shrinks a vector without touching any coordinate.
//! The result of the fixpoint depends on which pairs are merged first, so
//! [`reduce_heuristic`] is deterministic but not canonical.
//!
//! [`canonicalize`] computes the representation-independent normal form
//! under a [`VariableOrder`]: the unique result of expanding the underlying
//! set fully and then merging exhaustively index by index, from the last
//! event of the order back to the first. It is computed by cofactor
//! recursion instead of literal expansion, which keeps shared structure
//! shared, and it is a set-level operation: multiplicities do not survive.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::tobject::Row;
use crate::var::{IndexSet, VarId};
use crate::vector::StateVector;
use crate::{Error, Result};

/// Merges two rows differing only in one event fixed to opposite values.
///
/// Returns the merged row with that event deleted, or `None` when the pair
/// does not qualify. Summing the pair and the result cover the same
/// assignments with the same counts, so the rewrite is coordinate-exact.
pub fn atomic_reduce(a: &Row, b: &Row) -> Option<Row> {
    let up_only_a = a.upper().difference(b.upper());
    let up_only_b = b.upper().difference(a.upper());
    let low_only_a = a.lower().difference(b.lower());
    let low_only_b = b.lower().difference(a.lower());
    match (
        up_only_a.len(),
        up_only_b.len(),
        low_only_a.len(),
        low_only_b.len(),
    ) {
        (1, 0, 0, 1) if up_only_a.min_id() == low_only_b.min_id() => {
            Some(a.without(up_only_a.min_id().expect("len 1")))
        }
        (0, 1, 1, 0) if up_only_b.min_id() == low_only_a.min_id() => {
            Some(b.without(up_only_b.min_id().expect("len 1")))
        }
        _ => None,
    }
}

/// Work record of one [`reduce_heuristic`] run; serializes flat.
#[derive(Copy, Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStats {
    pub rows_in: u64,
    pub rows_out: u64,
    /// Candidate pairs examined while matching rows inside buckets.
    pub pairwise_checks: u64,
    /// Atomic merges applied, counting multiplicity batches unit by unit.
    pub reductions_applied: u64,
    /// Scan rounds until the fixpoint.
    pub rounds: u64,
}

/// Applies [`atomic_reduce`] greedily until no pair of rows qualifies.
///
/// Coordinate-exact: multiplicities are preserved, merging `min(m1, m2)`
/// units of a reducible pair at a time, and the row count never grows.
/// Candidate pairs are found by bucketing every row once per fixed event
/// under the key (event, row with that event deleted); two rows land in the
/// same bucket with opposite polarities exactly when they reduce, so each
/// round costs one bucket pass instead of a quadratic scan. Bucket order is
/// a sorted map, which makes the outcome and the counters deterministic.
pub fn reduce_heuristic(s: &StateVector) -> (StateVector, ReductionStats) {
    let mut stats = ReductionStats {
        rows_in: s.len() as u64,
        ..ReductionStats::default()
    };
    let mut current: Vec<(Row, u64)> = s.rows().to_vec();
    loop {
        stats.rounds += 1;
        let mut buckets: BTreeMap<(VarId, Row), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (idx, (row, _)) in current.iter().enumerate() {
            for v in row.upper().iter() {
                buckets.entry((v, row.without(v))).or_default().0.push(idx);
            }
            for v in row.lower().iter() {
                buckets.entry((v, row.without(v))).or_default().1.push(idx);
            }
        }
        let mut avail: Vec<u64> = current.iter().map(|(_, m)| *m).collect();
        let mut produced: Vec<(Row, u64)> = Vec::new();
        for ((_, merged), (ups, downs)) in &buckets {
            let (mut ui, mut di) = (0, 0);
            while ui < ups.len() && di < downs.len() {
                stats.pairwise_checks += 1;
                let take = avail[ups[ui]].min(avail[downs[di]]);
                if take > 0 {
                    avail[ups[ui]] -= take;
                    avail[downs[di]] -= take;
                    produced.push((merged.clone(), take));
                    stats.reductions_applied += take;
                }
                if avail[ups[ui]] == 0 {
                    ui += 1;
                }
                if avail[downs[di]] == 0 {
                    di += 1;
                }
            }
        }
        if produced.is_empty() {
            let out = StateVector::from_weighted(current);
            stats.rows_out = out.len() as u64;
            return (out, stats);
        }
        let mut next: Vec<(Row, u64)> = current
            .into_iter()
            .enumerate()
            .filter(|(idx, _)| avail[*idx] > 0)
            .map(|(idx, (row, _))| (row, avail[idx]))
            .collect();
        next.extend(produced);
        // Renormalize so the next round sees merged multiplicities.
        current = StateVector::from_weighted(next).rows().to_vec();
    }
}

/// Total order on events driving canonical forms.
///
/// Events missing from the explicit sequence sort after it in ascending id
/// order, so the order is total over any universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableOrder {
    seq: Vec<VarId>,
}

impl VariableOrder {
    /// Builds an order from an explicit sequence; ids may not repeat.
    pub fn new<I: IntoIterator<Item = VarId>>(seq: I) -> Result<VariableOrder> {
        let seq: Vec<VarId> = seq.into_iter().collect();
        let mut seen: Vec<VarId> = seq.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateInOrder { var: w[0].get() });
        }
        Ok(VariableOrder { seq })
    }

    /// Registration order: `E1 < E2 < ... < En`.
    pub fn ascending(n: u32) -> VariableOrder {
        VariableOrder {
            seq: (1..=n).filter_map(VarId::new).collect(),
        }
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.seq
    }

    /// Position in the order; unlisted ids follow the sequence.
    pub fn rank(&self, v: VarId) -> usize {
        self.seq
            .iter()
            .position(|s| *s == v)
            .unwrap_or(self.seq.len() + v.index())
    }

    /// The order-first member of a set.
    pub fn first_in(&self, set: &IndexSet) -> Option<VarId> {
        set.iter().min_by_key(|v| self.rank(*v))
    }
}

/// Normal form of the underlying assignment set under `order`.
///
/// Equivalent vectors canonicalize to the identical row list, whatever their
/// representation, and events the set does not depend on vanish from every
/// row. The form equals what literal full expansion followed by exhaustive
/// merging from the order-last event back to the order-first would produce.
/// Set-level: the result carries multiplicity 1 everywhere.
pub fn canonicalize(s: &StateVector, order: &VariableOrder) -> StateVector {
    let rows: Vec<Row> = s.rows().iter().map(|(r, _)| r.clone()).collect();
    StateVector::from_rows(canonical_rows(dedup_rows(rows), order))
}

/// Product followed by canonicalization under `order`.
///
/// The cofactor recursion reduces factors that only became reducible
/// through the product without ever expanding the full truth table.
pub fn multiply_canonical(
    s: &StateVector,
    q: &StateVector,
    order: &VariableOrder,
) -> StateVector {
    canonicalize(&s.multiply(q), order)
}

fn dedup_rows(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort_unstable();
    rows.dedup();
    rows
}

fn canonical_rows(rows: Vec<Row>, order: &VariableOrder) -> Vec<Row> {
    if rows.is_empty() {
        return rows;
    }
    // A row fixing nothing covers the whole remaining space.
    if rows.iter().any(Row::is_unit) {
        return vec![Row::unit()];
    }
    let pivot = rows
        .iter()
        .fold(IndexSet::new(), |acc, r| acc.union(&r.indices()));
    let v = order.first_in(&pivot).expect("rows fix at least one event");
    let mut cof_up = Vec::with_capacity(rows.len());
    let mut cof_down = Vec::with_capacity(rows.len());
    for r in rows {
        match r.polarity(v) {
            Some(true) => cof_up.push(r.without(v)),
            Some(false) => cof_down.push(r.without(v)),
            None => {
                cof_up.push(r.clone());
                cof_down.push(r);
            }
        }
    }
    let up = canonical_rows(dedup_rows(cof_up), order);
    let down = canonical_rows(dedup_rows(cof_down), order);
    // Rows present in both cofactors keep the event free; the rest fix it.
    let mut out = Vec::with_capacity(up.len() + down.len());
    let down_set: std::collections::BTreeSet<Row> = down.iter().cloned().collect();
    let up_set: std::collections::BTreeSet<Row> = up.iter().cloned().collect();
    for r in &up {
        if down_set.contains(r) {
            out.push(r.clone());
        } else {
            out.push(
                r.try_with_upper(v)
                    .into_row()
                    .expect("cofactor rows never mention the split event"),
            );
        }
    }
    for r in down {
        if !up_set.contains(&r) {
            out.push(
                r.try_with_lower(v)
                    .into_row()
                    .expect("cofactor rows never mention the split event"),
            );
        }
    }
    out
}
