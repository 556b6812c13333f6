//! Single rows of the algebra and their products and splits.
//!
//! A [`Row`] fixes its upper indices to 1 and its lower indices to 0 and
//! leaves every other event free; it denotes the set of all total
//! assignments compatible with those constraints. A [`TObject`] additionally
//! admits [`TObject::Null`], the empty set, which absorbs products. Null is a
//! regular value of the algebra, not an error: the product of two rows that
//! fix some event to opposite values is Null.
//!
//! Rows print in two interchangeable text forms: a compact form listing the
//! index sets (`t^{1,4}_{3,6}`, the unit row is `t`, Null is `0`) and a
//! pattern form over an explicit universe width (`1-0` fixes E1=1, E3=0 and
//! leaves E2 free).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::var::{IndexSet, VarId};
use crate::{Error, Result};

/// A single row: a partial assignment with disjoint upper and lower sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Row {
    upper: IndexSet,
    lower: IndexSet,
}

/// A row or the empty set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TObject {
    /// The empty set of assignments; absorbing under product.
    Null,
    Row(Row),
}

/// Result of splitting a row against another: the part inside `other` and
/// the pairwise-orthogonal remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoSplit {
    /// `self · other`; Null when the two rows are orthogonal.
    pub parallel: TObject,
    /// Pairwise-orthogonal rows covering `self` minus `other`.
    pub perpendicular: Vec<Row>,
}

impl Row {
    /// Builds a row; `None` if the two sets overlap (that value is Null).
    pub fn new(upper: IndexSet, lower: IndexSet) -> Option<Row> {
        if upper.overlaps(&lower) {
            None
        } else {
            Some(Row { upper, lower })
        }
    }

    /// The unit row fixing nothing; it denotes the whole space.
    pub fn unit() -> Row {
        Row {
            upper: IndexSet::new(),
            lower: IndexSet::new(),
        }
    }

    /// Events fixed to 1.
    pub fn upper(&self) -> &IndexSet {
        &self.upper
    }

    /// Events fixed to 0.
    pub fn lower(&self) -> &IndexSet {
        &self.lower
    }

    /// Number of fixed events.
    pub fn fixed_count(&self) -> usize {
        self.upper.len() + self.lower.len()
    }

    pub fn is_unit(&self) -> bool {
        self.upper.is_empty() && self.lower.is_empty()
    }

    /// Both index sets merged.
    pub fn indices(&self) -> IndexSet {
        self.upper.union(&self.lower)
    }

    /// Largest event id fixed by the row.
    pub fn max_var(&self) -> Option<VarId> {
        match (self.upper.max_id(), self.lower.max_id()) {
            (a, None) => a,
            (None, b) => b,
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    /// `Some(true)` if fixed to 1, `Some(false)` if fixed to 0, else `None`.
    pub fn polarity(&self, v: VarId) -> Option<bool> {
        if self.upper.contains(v) {
            Some(true)
        } else if self.lower.contains(v) {
            Some(false)
        } else {
            None
        }
    }

    /// Product of two rows: the intersection of the assignment sets.
    /// Null exactly when some event is fixed to opposite values.
    pub fn multiply(&self, other: &Row) -> TObject {
        TObject::new(
            self.upper.union(&other.upper),
            self.lower.union(&other.lower),
        )
    }

    /// Copy with `v` fixed to 1; Null if `v` is already fixed to 0.
    pub fn try_with_upper(&self, v: VarId) -> TObject {
        if self.lower.contains(v) {
            TObject::Null
        } else {
            TObject::Row(Row {
                upper: self.upper.with(v),
                lower: self.lower.clone(),
            })
        }
    }

    /// Copy with `v` fixed to 0; Null if `v` is already fixed to 1.
    pub fn try_with_lower(&self, v: VarId) -> TObject {
        if self.upper.contains(v) {
            TObject::Null
        } else {
            TObject::Row(Row {
                upper: self.upper.clone(),
                lower: self.lower.with(v),
            })
        }
    }

    /// Splits the row into the two halves fixing a free event either way.
    ///
    /// The two results partition `self`, so summing them is an identity
    /// transformation. Decomposing by an index the row already fixes is a
    /// contract violation, not a no-op.
    pub fn decompose(&self, i: VarId) -> Result<(Row, Row)> {
        if self.upper.contains(i) || self.lower.contains(i) {
            return Err(Error::IndexAlreadyFixed { var: i.get() });
        }
        Ok((
            Row {
                upper: self.upper.with(i),
                lower: self.lower.clone(),
            },
            Row {
                upper: self.upper.clone(),
                lower: self.lower.with(i),
            },
        ))
    }

    /// True if every assignment of `self` is also one of `other`.
    ///
    /// A row shrinks as its index sets grow, so this is containment of
    /// `other`'s constraints in `self`'s.
    pub fn is_subset_of(&self, other: &Row) -> bool {
        other.upper.is_subset_of(&self.upper) && other.lower.is_subset_of(&self.lower)
    }

    /// Splits `self` into the part inside `other` and an orthogonal cover of
    /// the remainder.
    ///
    /// The difference indices (events `other` fixes but `self` leaves free)
    /// are peeled one at a time: lower-side differences in ascending id
    /// order, then upper-side differences in ascending id order. The k-th
    /// emitted row agrees with `other` on the first k-1 difference indices
    /// and disagrees on the k-th, which makes the emitted rows pairwise
    /// orthogonal and orthogonal to `other`. Rows that would fix an event
    /// both ways vanish (they are Null) and are not emitted, so the
    /// remainder has at most one row per difference index.
    pub fn orthogonalize(&self, other: &Row) -> OrthoSplit {
        let nu = other.lower.difference(&self.lower);
        let gamma = other.upper.difference(&self.upper);
        let mut perpendicular = Vec::with_capacity(nu.len() + gamma.len());
        let mut agree = self.clone();
        let steps = nu
            .iter()
            .map(|v| (v, false))
            .chain(gamma.iter().map(|v| (v, true)))
            .collect::<Vec<_>>();
        for (v, other_fixes_true) in steps {
            let disagree = if other_fixes_true {
                agree.try_with_lower(v)
            } else {
                agree.try_with_upper(v)
            };
            if let TObject::Row(r) = disagree {
                perpendicular.push(r);
            }
            agree = match if other_fixes_true {
                agree.try_with_upper(v)
            } else {
                agree.try_with_lower(v)
            } {
                TObject::Row(r) => r,
                // Agreement became contradictory: every later term is Null.
                TObject::Null => break,
            };
        }
        OrthoSplit {
            parallel: self.multiply(other),
            perpendicular,
        }
    }

    /// Assignments of `self` outside `other`, as pairwise-orthogonal rows.
    pub fn subtract(&self, other: &Row) -> Vec<Row> {
        self.orthogonalize(other).perpendicular
    }

    /// Moves `v` to the upper set (fixes it to 1), whatever it was before.
    pub fn raised(&self, v: VarId) -> Row {
        Row {
            upper: self.upper.with(v),
            lower: self.lower.without(v),
        }
    }

    /// Moves `v` to the lower set (fixes it to 0), whatever it was before.
    pub fn lowered(&self, v: VarId) -> Row {
        Row {
            upper: self.upper.without(v),
            lower: self.lower.with(v),
        }
    }

    /// Deletes `v` from both index sets (projects the event away).
    pub fn without(&self, v: VarId) -> Row {
        Row {
            upper: self.upper.without(v),
            lower: self.lower.without(v),
        }
    }

    /// Pattern form over a universe of `n` events: one character per event,
    /// `1`/`0` for fixed, `-` for free.
    pub fn to_pattern(&self, n: u32) -> Result<String> {
        if let Some(max) = self.max_var() {
            if max.get() > n {
                return Err(Error::UniverseTooSmall {
                    n,
                    var: max.get(),
                });
            }
        }
        let mut out = String::with_capacity(n as usize);
        for i in 1..=n {
            let v = VarId::new(i).expect("ids start at 1");
            out.push(match self.polarity(v) {
                Some(true) => '1',
                Some(false) => '0',
                None => '-',
            });
        }
        Ok(out)
    }

    /// Parses a pattern such as `1-0`, returning the row and its width.
    pub fn parse_pattern(text: &str) -> std::result::Result<(Row, u32), PatternError> {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut width = 0u32;
        for (pos, ch) in text.chars().enumerate() {
            width += 1;
            let v = VarId::new(pos as u32 + 1).expect("ids start at 1");
            match ch {
                '1' => upper.push(v),
                '0' => lower.push(v),
                '-' => {}
                other => return Err(PatternError::BadChar { pos, ch: other }),
            }
        }
        Ok((
            Row {
                upper: upper.into_iter().collect(),
                lower: lower.into_iter().collect(),
            },
            width,
        ))
    }
}

/// Rows order by how many events they fix, then by their index sets; this is
/// the display order of every state vector.
impl Ord for Row {
    fn cmp(&self, other: &Row) -> Ordering {
        self.fixed_count()
            .cmp(&other.fixed_count())
            .then_with(|| self.upper.cmp(&other.upper))
            .then_with(|| self.lower.cmp(&other.lower))
    }
}

impl PartialOrd for Row {
    fn partial_cmp(&self, other: &Row) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "t");
        }
        write!(f, "t")?;
        if !self.upper.is_empty() {
            write!(f, "^{}", self.upper)?;
        }
        if !self.lower.is_empty() {
            write!(f, "_{}", self.lower)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Row", 2)?;
        s.serialize_field("upper", &self.upper)?;
        s.serialize_field("lower", &self.lower)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Row {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct RawRow {
            upper: IndexSet,
            lower: IndexSet,
        }
        let raw = RawRow::deserialize(deserializer)?;
        Row::new(raw.upper, raw.lower)
            .ok_or_else(|| serde::de::Error::custom("upper and lower index sets overlap"))
    }
}

impl TObject {
    /// Normalizing constructor: overlapping index sets yield Null.
    pub fn new(upper: IndexSet, lower: IndexSet) -> TObject {
        match Row::new(upper, lower) {
            Some(r) => TObject::Row(r),
            None => TObject::Null,
        }
    }

    /// The unit element of the product.
    pub fn unit() -> TObject {
        TObject::Row(Row::unit())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, TObject::Null)
    }

    pub fn as_row(&self) -> Option<&Row> {
        match self {
            TObject::Null => None,
            TObject::Row(r) => Some(r),
        }
    }

    pub fn into_row(self) -> Option<Row> {
        match self {
            TObject::Null => None,
            TObject::Row(r) => Some(r),
        }
    }

    /// Product with Null absorbing.
    pub fn multiply(&self, other: &TObject) -> TObject {
        match (self, other) {
            (TObject::Row(a), TObject::Row(b)) => a.multiply(b),
            _ => TObject::Null,
        }
    }
}

impl From<Row> for TObject {
    fn from(r: Row) -> TObject {
        TObject::Row(r)
    }
}

impl fmt::Display for TObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TObject::Null => write!(f, "0"),
            TObject::Row(r) => write!(f, "{r}"),
        }
    }
}

/// Error from the compact or pattern text forms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("unexpected character {ch:?} at position {pos}")]
    BadChar { pos: usize, ch: char },
    #[error("malformed row literal {text:?}")]
    BadCompact { text: String },
    #[error("event id 0 is not valid")]
    ZeroId,
    #[error("index E{var} occurs in both index sets")]
    OverlappingSets { var: u32 },
}

/// Parses the compact form: `t`, `0`, `t^{1,4}`, `t_{3}`, `t^{1,4}_{3,6}`.
impl FromStr for TObject {
    type Err = PatternError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let text = s.trim();
        if text == "0" {
            return Ok(TObject::Null);
        }
        let bad = || PatternError::BadCompact {
            text: text.to_string(),
        };
        let rest = text.strip_prefix('t').ok_or_else(bad)?;
        let (upper, rest) = parse_braced_set(rest, '^').map_err(|_| bad())?;
        let (lower, rest) = parse_braced_set(rest, '_').map_err(|_| bad())?;
        if !rest.is_empty() {
            return Err(bad());
        }
        if upper.overlaps(&lower) {
            let shared = upper
                .iter()
                .find(|v| lower.contains(*v))
                .expect("overlap reported");
            return Err(PatternError::OverlappingSets { var: shared.get() });
        }
        Ok(TObject::new(upper, lower))
    }
}

fn parse_braced_set(input: &str, marker: char) -> std::result::Result<(IndexSet, &str), ()> {
    let Some(rest) = input.strip_prefix(marker) else {
        return Ok((IndexSet::new(), input));
    };
    let rest = rest.strip_prefix('{').ok_or(())?;
    let end = rest.find('}').ok_or(())?;
    let body = &rest[..end];
    let mut ids = Vec::new();
    for part in body.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let n: u32 = part.parse().map_err(|_| ())?;
        ids.push(VarId::new(n).ok_or(())?);
    }
    Ok((ids.into_iter().collect(), &rest[end + 1..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId::new(n).unwrap()
    }

    fn row(upper: &[u32], lower: &[u32]) -> Row {
        Row::new(
            upper.iter().map(|n| v(*n)).collect(),
            lower.iter().map(|n| v(*n)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn product_unions_disjoint_index_sets() {
        let a = row(&[1], &[2]);
        let b = row(&[5], &[6]);
        assert_eq!(a.multiply(&b), TObject::Row(row(&[1, 5], &[2, 6])));
    }

    #[test]
    fn product_with_conflicting_index_is_null() {
        let a = row(&[3], &[2]);
        let b = row(&[5], &[2, 3]);
        assert_eq!(a.multiply(&b), TObject::Null);
    }

    #[test]
    fn unit_is_identity_and_null_absorbs() {
        let a = TObject::Row(row(&[1, 4], &[3]));
        assert_eq!(TObject::unit().multiply(&a), a);
        assert_eq!(a.multiply(&TObject::unit()), a);
        assert_eq!(a.multiply(&TObject::Null), TObject::Null);
        assert_eq!(TObject::Null.multiply(&TObject::Null), TObject::Null);
    }

    #[test]
    fn rows_are_idempotent_under_product() {
        let a = row(&[1, 7], &[2]);
        assert_eq!(a.multiply(&a), TObject::Row(a.clone()));
    }

    #[test]
    fn decompose_splits_a_free_index() {
        let a = row(&[1], &[]);
        let (up, down) = a.decompose(v(2)).unwrap();
        assert_eq!(up, row(&[1, 2], &[]));
        assert_eq!(down, row(&[1], &[2]));
    }

    #[test]
    fn decompose_rejects_fixed_index() {
        assert_eq!(
            row(&[1], &[]).decompose(v(1)),
            Err(Error::IndexAlreadyFixed { var: 1 })
        );
        assert_eq!(
            row(&[], &[2]).decompose(v(2)),
            Err(Error::IndexAlreadyFixed { var: 2 })
        );
    }

    #[test]
    fn subset_follows_index_containment() {
        assert!(row(&[1, 2], &[3]).is_subset_of(&row(&[1], &[])));
        assert!(!row(&[1], &[]).is_subset_of(&row(&[1, 2], &[])));
        assert!(row(&[], &[]).is_subset_of(&row(&[], &[])));
    }

    #[test]
    fn orthogonalize_peels_lower_differences_first() {
        // unit against t^{1}_{2}: remainder is t^{2} then t_{1,2}.
        let split = Row::unit().orthogonalize(&row(&[1], &[2]));
        assert_eq!(split.parallel, TObject::Row(row(&[1], &[2])));
        assert_eq!(split.perpendicular, vec![row(&[2], &[]), row(&[], &[1, 2])]);
    }

    #[test]
    fn orthogonalize_orthogonal_rows_returns_self() {
        let split = row(&[1], &[]).orthogonalize(&row(&[], &[1]));
        assert_eq!(split.parallel, TObject::Null);
        assert_eq!(split.perpendicular, vec![row(&[1], &[])]);
    }

    #[test]
    fn orthogonalize_subset_has_empty_remainder() {
        let split = row(&[1, 2], &[3]).orthogonalize(&row(&[1], &[]));
        assert_eq!(split.parallel, TObject::Row(row(&[1, 2], &[3])));
        assert!(split.perpendicular.is_empty());
    }

    #[test]
    fn orthogonalize_generic_shape() {
        // a free on {1,2,3,4}; b fixes 1,2 up and 3,4 down:
        // remainder peels 3,4 (lower) then 1,2 (upper).
        let a = Row::unit();
        let b = row(&[1, 2], &[3, 4]);
        let split = a.orthogonalize(&b);
        assert_eq!(
            split.perpendicular,
            vec![
                row(&[3], &[]),
                row(&[4], &[3]),
                row(&[], &[1, 3, 4]),
                row(&[1], &[2, 3, 4]),
            ]
        );
        // The pieces are pairwise orthogonal and orthogonal to b.
        for (i, p) in split.perpendicular.iter().enumerate() {
            assert!(p.multiply(&b).is_null());
            for q in &split.perpendicular[i + 1..] {
                assert!(p.multiply(q).is_null());
            }
        }
    }

    #[test]
    fn compact_form_round_trips() {
        for text in ["t", "0", "t^{1,4}", "t_{3,6}", "t^{1,4}_{3,6}"] {
            let parsed: TObject = text.parse().unwrap();
            assert_eq!(parsed.to_string(), text);
        }
        assert!("t^{1}_{1}".parse::<TObject>().is_err());
        assert!("x^{1}".parse::<TObject>().is_err());
    }

    #[test]
    fn pattern_form_round_trips() {
        let (r, width) = Row::parse_pattern("1-0-").unwrap();
        assert_eq!(width, 4);
        assert_eq!(r, row(&[1], &[3]));
        assert_eq!(r.to_pattern(4).unwrap(), "1-0-");
        assert_eq!(
            r.to_pattern(2),
            Err(Error::UniverseTooSmall { n: 2, var: 3 })
        );
    }
}
