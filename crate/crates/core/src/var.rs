//! Event identifiers and sorted index sets.
//!
//! Events are numbered from 1 (`E1`, `E2`, ...). An [`IndexSet`] is a sorted,
//! duplicate-free list of event ids; every row of the algebra is a pair of
//! such sets. Keeping the sets sorted makes unions, differences and subset
//! tests single merge passes, and makes every printed form deterministic.

use std::fmt;
use std::num::NonZeroU32;

use serde::{Deserialize, Deserializer, Serialize};

/// Identifier of a single event, numbered from 1.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(NonZeroU32);

impl VarId {
    /// Creates an id; `None` for 0, which is reserved as a DIMACS terminator.
    pub fn new(id: u32) -> Option<Self> {
        NonZeroU32::new(id).map(VarId)
    }

    /// The numeric id, starting at 1.
    pub fn get(self) -> u32 {
        self.0.get()
    }

    /// Zero-based position, used for bit layouts and name tables.
    pub fn index(self) -> usize {
        (self.0.get() - 1) as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

/// Sorted, duplicate-free set of event ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<VarId>);

impl IndexSet {
    /// The empty set.
    pub fn new() -> Self {
        IndexSet(Vec::new())
    }

    /// Set holding a single id.
    pub fn singleton(v: VarId) -> Self {
        IndexSet(vec![v])
    }

    /// Set holding `1..=n`.
    pub fn full(n: u32) -> Self {
        IndexSet((1..=n).filter_map(VarId::new).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    /// Largest id in the set. (Named to stay clear of `Ord::max`, which
    /// by-value method resolution would pick over an inherent `max(&self)`.)
    pub fn max_id(&self) -> Option<VarId> {
        self.0.last().copied()
    }

    /// Smallest id in the set.
    pub fn min_id(&self) -> Option<VarId> {
        self.0.first().copied()
    }

    /// True if the two sets share at least one id.
    pub fn overlaps(&self, other: &IndexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Merge of both sets.
    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        IndexSet(out)
    }

    /// Ids of `self` not present in `other`.
    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|v| !other.contains(*v)).collect())
    }

    /// True if every id of `self` occurs in `other`.
    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        let mut j = 0;
        for v in &self.0 {
            while j < other.0.len() && other.0[j] < *v {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != *v {
                return false;
            }
        }
        true
    }

    /// Copy with `v` inserted.
    pub fn with(&self, v: VarId) -> IndexSet {
        match self.0.binary_search(&v) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut out = self.0.clone();
                out.insert(pos, v);
                IndexSet(out)
            }
        }
    }

    /// Copy with `v` removed.
    pub fn without(&self, v: VarId) -> IndexSet {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                let mut out = self.0.clone();
                out.remove(pos);
                IndexSet(out)
            }
            Err(_) => self.clone(),
        }
    }
}

impl FromIterator<VarId> for IndexSet {
    fn from_iter<T: IntoIterator<Item = VarId>>(iter: T) -> Self {
        let mut v: Vec<VarId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<VarId>::deserialize(deserializer)?;
        Ok(raw.into_iter().collect())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v.get())?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
