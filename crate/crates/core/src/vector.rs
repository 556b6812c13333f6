//! State vectors: weighted sums of rows and their set-level operations.
//!
//! A [`StateVector`] is an ordered list of `(row, multiplicity)` pairs with
//! positive multiplicities and no Null rows; the empty list is the empty
//! set. Coordinate-wise, the vector assigns each total assignment the sum of
//! the multiplicities of the rows containing it, so rows may overlap and a
//! vector is *binary* only when they do not. Operations that are identities
//! on coordinates (product, sum, reduction) preserve multiplicities exactly;
//! operations defined on the underlying set only (set subtraction,
//! orthogonalization, canonical forms) return vectors with all
//! multiplicities 1 and say so in their docs.
//!
//! Rows are kept sorted by (number of fixed events, index sets) and equal
//! rows are merged by summing multiplicities, so equal vectors have equal
//! printed forms and every operation is deterministic, including under the
//! optional data-parallel execution paths.

use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tobject::{Row, TObject};
use crate::var::{IndexSet, VarId};
use crate::{Error, Result};

/// Which half of a decomposition a subvector keeps.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Polarity {
    /// Rows compatible with the event being 1.
    Upper,
    /// Rows compatible with the event being 0.
    Lower,
}

/// Classification of one event across a non-empty vector.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum EventStatus {
    /// Every assignment in the vector sets the event to 1.
    IdenticallyTrue,
    /// Every assignment in the vector sets the event to 0.
    IdenticallyFalse,
    /// The vector contains assignments with either value.
    Indefinite,
    /// The vector is empty; no event has a status.
    EmptySpace,
}

/// Work counters threaded through the pairwise operations.
#[derive(Copy, Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    /// Row-by-row products attempted (including those that came out Null).
    pub products: u64,
    /// Row-by-row orthogonal splits performed during set subtraction.
    pub subtractions: u64,
}

impl OpCounters {
    pub fn absorb(&mut self, other: OpCounters) {
        self.products += other.products;
        self.subtractions += other.subtractions;
    }
}

/// Weighted sum of rows; see the module docs for the invariants.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct StateVector {
    rows: Vec<(Row, u64)>,
}

impl StateVector {
    /// The empty vector: no rows, no assignments.
    pub fn empty() -> StateVector {
        StateVector { rows: Vec::new() }
    }

    /// The unit row alone: the whole space.
    pub fn trivial() -> StateVector {
        StateVector {
            rows: vec![(Row::unit(), 1)],
        }
    }

    /// Vector holding one row once.
    pub fn singleton(row: Row) -> StateVector {
        StateVector {
            rows: vec![(row, 1)],
        }
    }

    /// Builds from rows with multiplicity 1 each; equal rows merge.
    pub fn from_rows<I: IntoIterator<Item = Row>>(rows: I) -> StateVector {
        Self::from_weighted(rows.into_iter().map(|r| (r, 1)))
    }

    /// Builds from weighted rows; zero weights are dropped, equal rows merge.
    pub fn from_weighted<I: IntoIterator<Item = (Row, u64)>>(rows: I) -> StateVector {
        let mut rows: Vec<(Row, u64)> = rows.into_iter().filter(|(_, m)| *m > 0).collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Row, u64)> = Vec::with_capacity(rows.len());
        for (row, mult) in rows {
            match merged.last_mut() {
                Some((last, m)) if *last == row => *m += mult,
                _ => merged.push((row, mult)),
            }
        }
        StateVector { rows: merged }
    }

    /// Builds from row-or-Null values, dropping the Nulls.
    pub fn from_tobjects<I: IntoIterator<Item = TObject>>(items: I) -> StateVector {
        Self::from_rows(items.into_iter().filter_map(TObject::into_row))
    }

    pub fn rows(&self) -> &[(Row, u64)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest event id fixed anywhere in the vector.
    pub fn max_var(&self) -> Option<VarId> {
        self.rows.iter().filter_map(|(r, _)| r.max_var()).max()
    }

    /// Union of all index sets: the events the representation mentions.
    pub fn pivot(&self) -> IndexSet {
        self.rows
            .iter()
            .fold(IndexSet::new(), |acc, (r, _)| acc.union(&r.indices()))
    }

    /// Sum of multiplicities weighted by each row's share of a universe of
    /// `n` events: the total of all coordinates.
    pub fn coordinate_mass(&self, n: u32) -> Result<u128> {
        self.check_universe(n)?;
        Ok(self
            .rows
            .iter()
            .map(|(r, m)| (*m as u128) << (n as usize - r.fixed_count()))
            .sum())
    }

    fn check_universe(&self, n: u32) -> Result<()> {
        if let Some(v) = self.max_var() {
            if v.get() > n {
                return Err(Error::UniverseTooSmall { n, var: v.get() });
            }
        }
        if n >= 128 {
            // Counting results are u128; larger universes cannot be counted.
            return Err(Error::UniverseTooLarge { n, cap: 127 });
        }
        Ok(())
    }

    /// Pairwise product of all rows; multiplicities multiply.
    ///
    /// The result is the coordinate-wise product, so this is an exact
    /// operation, not just a set one. Exactly `len() * other.len()` row
    /// products are attempted.
    pub fn multiply(&self, other: &StateVector) -> StateVector {
        self.multiply_with(other, false, &mut OpCounters::default())
    }

    /// [`multiply`](Self::multiply) with counters and optional parallelism.
    /// The parallel path produces byte-identical results.
    pub fn multiply_with(
        &self,
        other: &StateVector,
        parallel: bool,
        counters: &mut OpCounters,
    ) -> StateVector {
        counters.products += self.rows.len() as u64 * other.rows.len() as u64;
        let combine = |(a, am): &(Row, u64), (b, bm): &(Row, u64)| {
            a.multiply(b).into_row().map(|r| (r, am * bm))
        };
        let pairs: Vec<(Row, u64)> = if parallel {
            self.rows
                .par_iter()
                .flat_map_iter(|a| other.rows.iter().filter_map(move |b| combine(a, b)))
                .collect()
        } else {
            self.rows
                .iter()
                .flat_map(|a| other.rows.iter().filter_map(move |b| combine(a, b)))
                .collect()
        };
        StateVector::from_weighted(pairs)
    }

    /// Multiset sum; coordinates add.
    pub fn add(&self, other: &StateVector) -> StateVector {
        StateVector::from_weighted(
            self.rows
                .iter()
                .chain(other.rows.iter())
                .map(|(r, m)| (r.clone(), *m)),
        )
    }

    /// Set difference: assignments of `self` not in `other`.
    ///
    /// The left operand is orthogonalized first, so the result is binary
    /// (pairwise-orthogonal rows, all multiplicities 1). When the pairwise
    /// product `self * other` has fewer rows than `other`, it is used as the
    /// subtrahend instead; the two subtractions remove the same assignments.
    pub fn subtract_set(&self, other: &StateVector) -> StateVector {
        self.subtract_set_with(other, false, &mut OpCounters::default())
    }

    pub fn subtract_set_with(
        &self,
        other: &StateVector,
        parallel: bool,
        counters: &mut OpCounters,
    ) -> StateVector {
        let mut acc: Vec<Row> = self.orthogonalize().rows.into_iter().map(|(r, _)| r).collect();
        if acc.is_empty() || other.is_empty() {
            return StateVector::from_rows(acc);
        }
        let product = self.multiply_with(other, parallel, counters);
        let subtrahend = if product.len() < other.len() {
            product
        } else {
            other.clone()
        };
        for (sub, _) in &subtrahend.rows {
            counters.subtractions += acc.len() as u64;
            acc = if parallel {
                acc.par_iter().flat_map_iter(|a| a.subtract(sub)).collect()
            } else {
                acc.iter().flat_map(|a| a.subtract(sub)).collect()
            };
            if acc.is_empty() {
                break;
            }
        }
        StateVector::from_rows(acc)
    }

    /// Product with a single event fixed to one value: rows fixed the other
    /// way drop, rows with the event free gain it. Multiplicities carry over.
    pub fn subvector(&self, i: VarId, polarity: Polarity) -> StateVector {
        StateVector::from_weighted(self.rows.iter().filter_map(|(r, m)| {
            let fixed = match polarity {
                Polarity::Upper => r.try_with_upper(i),
                Polarity::Lower => r.try_with_lower(i),
            };
            fixed.into_row().map(|r| (r, *m))
        }))
    }

    /// Rewrites the vector set-equivalently with pairwise-orthogonal rows.
    ///
    /// Each row is folded through subtraction of the rows accepted before
    /// it, so overlaps and duplicates disappear; the result is binary with
    /// all multiplicities 1.
    pub fn orthogonalize(&self) -> StateVector {
        let mut accepted: Vec<Row> = Vec::with_capacity(self.rows.len());
        for (row, _) in &self.rows {
            let mut pieces = vec![row.clone()];
            for a in &accepted {
                pieces = pieces.iter().flat_map(|p| p.subtract(a)).collect();
                if pieces.is_empty() {
                    break;
                }
            }
            accepted.extend(pieces);
        }
        StateVector::from_rows(accepted)
    }

    /// True when no two rows share an assignment.
    pub fn is_pairwise_orthogonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, (a, _))| {
            self.rows[i + 1..]
                .iter()
                .all(|(b, _)| a.multiply(b).is_null())
        })
    }

    /// Number of distinct assignments in a universe of `n` events.
    ///
    /// Orthogonalizes first unless the rows are already pairwise orthogonal,
    /// then sums `2^(n - fixed)` per row. Multiplicities never matter here.
    pub fn cardinality(&self, n: u32) -> Result<u128> {
        self.check_universe(n)?;
        let orth;
        let counted = if self.is_pairwise_orthogonal() {
            self
        } else {
            orth = self.orthogonalize();
            &orth
        };
        Ok(counted
            .rows
            .iter()
            .map(|(r, _)| 1u128 << (n as usize - r.fixed_count()))
            .sum())
    }

    /// [`cardinality`](Self::cardinality) over an explicit set of events
    /// rather than the contiguous universe `1..=n`. Every fixed event must
    /// belong to the universe.
    pub fn cardinality_over(&self, universe: &IndexSet) -> Result<u128> {
        let pivot = self.pivot();
        if let Some(outside) = pivot.iter().find(|v| !universe.contains(*v)) {
            return Err(Error::UniverseTooSmall {
                n: universe.len() as u32,
                var: outside.get(),
            });
        }
        if universe.len() >= 128 {
            return Err(Error::UniverseTooLarge {
                n: universe.len() as u32,
                cap: 127,
            });
        }
        let orth;
        let counted = if self.is_pairwise_orthogonal() {
            self
        } else {
            orth = self.orthogonalize();
            &orth
        };
        Ok(counted
            .rows
            .iter()
            .map(|(r, _)| 1u128 << (universe.len() - r.fixed_count()))
            .sum())
    }

    /// True when the vector's set of assignments does not depend on `i`.
    ///
    /// Compares the two cofactors with the event projected away; the vector
    /// must be non-empty for the question to make sense.
    pub fn is_free(&self, i: VarId) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::EmptyVector);
        }
        let up = self.subvector(i, Polarity::Upper).remove_event(i);
        let down = self.subvector(i, Polarity::Lower).remove_event(i);
        Ok(up.equivalent(&down))
    }

    /// Events of the pivot the vector actually depends on.
    pub fn support(&self) -> Result<IndexSet> {
        let mut out = Vec::new();
        for v in self.pivot().iter() {
            if !self.is_free(v)? {
                out.push(v);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Classifies one event across the vector; see [`EventStatus`].
    pub fn event_status(&self, i: VarId) -> EventStatus {
        if self.is_empty() {
            return EventStatus::EmptySpace;
        }
        let can_be_false = !self.subvector(i, Polarity::Lower).is_empty();
        let can_be_true = !self.subvector(i, Polarity::Upper).is_empty();
        match (can_be_true, can_be_false) {
            (true, false) => EventStatus::IdenticallyTrue,
            (false, true) => EventStatus::IdenticallyFalse,
            _ => EventStatus::Indefinite,
        }
    }

    /// Fixes `i` to 1 in every row, whatever it was. Set-level rewrite:
    /// rows that collide merge by multiplicity, but only the underlying set
    /// is meaningful afterwards.
    pub fn raise_index(&self, i: VarId) -> StateVector {
        StateVector::from_weighted(self.rows.iter().map(|(r, m)| (r.raised(i), *m)))
    }

    /// Fixes `i` to 0 in every row; the mirror of [`raise_index`](Self::raise_index).
    pub fn lower_index(&self, i: VarId) -> StateVector {
        StateVector::from_weighted(self.rows.iter().map(|(r, m)| (r.lowered(i), *m)))
    }

    /// Deletes `i` from every row, projecting the event away. Rows that
    /// become equal merge by summing multiplicities.
    pub fn remove_event(&self, i: VarId) -> StateVector {
        StateVector::from_weighted(self.rows.iter().map(|(r, m)| (r.without(i), *m)))
    }

    /// True when the vector describes `i` as a function of the other events:
    /// no assignment supports both values of `i` on the same remainder.
    pub fn is_boolean_function(&self, i: VarId) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::EmptyVector);
        }
        let down = self.subvector(i, Polarity::Lower).remove_event(i);
        let up = self.subvector(i, Polarity::Upper).remove_event(i);
        Ok(down.multiply(&up).is_empty())
    }

    /// Set equality: both differences are empty.
    pub fn equivalent(&self, other: &StateVector) -> bool {
        self.subtract_set(other).is_empty() && other.subtract_set(self).is_empty()
    }

    /// Everything outside the vector, over a universe of `n` events.
    ///
    /// `n` only validates that the universe covers the indices in use; the
    /// resulting rows are universe-independent.
    pub fn complement(&self, n: u32) -> Result<StateVector> {
        self.check_universe(n)?;
        Ok(StateVector::trivial().subtract_set(self))
    }

    /// Drops rows contained in another row. Set-level rewrite: the result
    /// has all multiplicities 1.
    pub fn absorb_subsumed(&self) -> StateVector {
        let keep: Vec<Row> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, (r, _))| {
                !self
                    .rows
                    .iter()
                    .enumerate()
                    .any(|(j, (other, _))| j != *i && r != other && r.is_subset_of(other))
            })
            .map(|(_, (r, _))| r.clone())
            .collect();
        StateVector::from_rows(keep)
    }

    /// Pattern block over `n` events: one row per line, `x<mult>` suffix on
    /// multiplicities above 1. Parsing the block back yields an equal vector.
    pub fn to_pattern_block(&self, n: u32) -> Result<String> {
        let mut out = String::new();
        for (row, mult) in &self.rows {
            out.push_str(&row.to_pattern(n)?);
            if *mult > 1 {
                out.push('x');
                out.push_str(&mult.to_string());
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses a pattern block, returning the vector and the detected width.
    /// Lines must share one width; blank lines and `#` comments are skipped.
    pub fn parse_pattern_block(
        text: &str,
    ) -> std::result::Result<(StateVector, u32), BlockParseError> {
        let mut rows = Vec::new();
        let mut width: Option<u32> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (pattern, mult) = match line.split_once('x') {
                Some((p, m)) => {
                    let mult: u64 = m.trim().parse().map_err(|_| BlockParseError {
                        line: lineno + 1,
                        message: format!("bad multiplicity {m:?}"),
                    })?;
                    (p.trim(), mult)
                }
                None => (line, 1),
            };
            let (row, w) = Row::parse_pattern(pattern).map_err(|e| BlockParseError {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            match width {
                None => width = Some(w),
                Some(expect) if expect != w => {
                    return Err(BlockParseError {
                        line: lineno + 1,
                        message: format!("row width {w} differs from {expect}"),
                    });
                }
                _ => {}
            }
            if mult == 0 {
                return Err(BlockParseError {
                    line: lineno + 1,
                    message: "multiplicity must be at least 1".into(),
                });
            }
            rows.push((row, mult));
        }
        Ok((StateVector::from_weighted(rows), width.unwrap_or(0)))
    }
}

/// Parse failure in a pattern block, with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct BlockParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (row, mult)) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *mult > 1 {
                write!(f, "{mult}*")?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            upper: &'a IndexSet,
            lower: &'a IndexSet,
            multiplicity: u64,
        }
        let mut seq = serializer.serialize_seq(Some(self.rows.len()))?;
        for (row, mult) in &self.rows {
            seq.serialize_element(&Entry {
                upper: row.upper(),
                lower: row.lower(),
                multiplicity: *mult,
            })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry {
            upper: IndexSet,
            lower: IndexSet,
            #[serde(default = "one")]
            multiplicity: u64,
        }
        fn one() -> u64 {
            1
        }
        let entries = Vec::<Entry>::deserialize(deserializer)?;
        let mut rows = Vec::with_capacity(entries.len());
        for e in entries {
            let row = Row::new(e.upper, e.lower)
                .ok_or_else(|| serde::de::Error::custom("upper and lower index sets overlap"))?;
            rows.push((row, e.multiplicity));
        }
        Ok(StateVector::from_weighted(rows))
    }
}
