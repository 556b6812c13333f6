//! Exhaustive coordinate representation, used as a cross-checking oracle.
//!
//! A [`DenseVector`] over a universe of `n` events stores one integer
//! coordinate per total assignment, 2^n in all. Expanding a state vector
//! into this form and comparing coordinates is the ground truth every sparse
//! operation is checked against: sparse products must match coordinate-wise
//! products, set subtraction must match binary subtraction, and so on. The
//! representation is exponential by construction, so it is capped at
//! [`DEFAULT_CAP`] events unless a caller opts into a larger cap explicitly.
//!
//! Bit layout, fixed for portability of serialized dumps: assignment `k`
//! gives event `Ei` the value of bit `i-1` of `k`. The helpers
//! [`DenseVector::coord_for`] and [`DenseVector::dump`] present coordinates
//! by assignment pattern so callers never need to reconstruct the layout.

use serde::Serialize;

use crate::formula::Formula;
use crate::tobject::{Row, TObject};
use crate::var::VarId;
use crate::vector::StateVector;
use crate::{Error, Result};

/// Largest universe the dense form accepts without an explicit override.
pub const DEFAULT_CAP: u32 = 16;

/// One integer coordinate per total assignment over `n` events.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DenseVector {
    n: u32,
    coords: Vec<i64>,
}

fn check_cap(n: u32, cap: u32) -> Result<()> {
    if n > cap {
        Err(Error::UniverseTooLarge { n, cap })
    } else {
        Ok(())
    }
}

fn check_universe(n: u32, max_var: Option<VarId>) -> Result<()> {
    if let Some(v) = max_var {
        if v.get() > n {
            return Err(Error::UniverseTooSmall { n, var: v.get() });
        }
    }
    Ok(())
}

impl DenseVector {
    /// All-zero vector over `n` events.
    pub fn zeros(n: u32) -> Result<DenseVector> {
        Self::zeros_capped(n, DEFAULT_CAP)
    }

    /// All-zero vector with an explicit cap override.
    pub fn zeros_capped(n: u32, cap: u32) -> Result<DenseVector> {
        check_cap(n, cap)?;
        Ok(DenseVector {
            n,
            coords: vec![0; 1usize << n],
        })
    }

    /// Expands a single row: +1 on every assignment the row contains.
    pub fn expand_row(row: &Row, n: u32) -> Result<DenseVector> {
        Self::expand_row_capped(row, n, DEFAULT_CAP)
    }

    pub fn expand_row_capped(row: &Row, n: u32, cap: u32) -> Result<DenseVector> {
        check_cap(n, cap)?;
        check_universe(n, row.max_var())?;
        let mut out = DenseVector {
            n,
            coords: vec![0; 1usize << n],
        };
        out.accumulate_row(row, 1);
        Ok(out)
    }

    /// Expands a row-or-Null; Null expands to all zeros.
    pub fn expand_tobject(t: &TObject, n: u32) -> Result<DenseVector> {
        match t {
            TObject::Null => Self::zeros(n),
            TObject::Row(r) => Self::expand_row(r, n),
        }
    }

    /// Expands a state vector, weighting each row by its multiplicity.
    pub fn expand(v: &StateVector, n: u32) -> Result<DenseVector> {
        Self::expand_capped(v, n, DEFAULT_CAP)
    }

    pub fn expand_capped(v: &StateVector, n: u32, cap: u32) -> Result<DenseVector> {
        check_cap(n, cap)?;
        check_universe(n, v.max_var())?;
        let mut out = DenseVector {
            n,
            coords: vec![0; 1usize << n],
        };
        for (row, mult) in v.rows() {
            out.accumulate_row(row, *mult as i64);
        }
        Ok(out)
    }

    fn accumulate_row(&mut self, row: &Row, weight: i64) {
        for k in 0..self.coords.len() {
            if row_matches(row, k) {
                self.coords[k] += weight;
            }
        }
    }

    /// Truth table of a formula as a binary dense vector.
    ///
    /// Evaluates the syntax tree directly on every assignment; it shares no
    /// code with the sparse compilation path, which is the point.
    pub fn truth_table(f: &Formula, n: u32) -> Result<DenseVector> {
        Self::truth_table_capped(f, n, DEFAULT_CAP)
    }

    pub fn truth_table_capped(f: &Formula, n: u32, cap: u32) -> Result<DenseVector> {
        check_cap(n, cap)?;
        check_universe(n, f.vars().max_id())?;
        let coords = (0..1usize << n)
            .map(|k| f.eval(&|v: VarId| k >> v.index() & 1 == 1) as i64)
            .collect();
        Ok(DenseVector { n, coords })
    }

    /// Universe size.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Coordinate of the assignment described by a pattern such as `011`.
    ///
    /// The pattern must be total: one `0` or `1` per event, `E1` first.
    pub fn coord_for(&self, pattern: &str) -> Result<i64> {
        let bits: Vec<bool> = pattern
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::NotBinary),
            })
            .collect::<Result<_>>()?;
        if bits.len() != self.n as usize {
            return Err(Error::UniverseMismatch {
                left: self.n,
                right: bits.len() as u32,
            });
        }
        let k = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, b)| acc | (*b as usize) << i);
        Ok(self.coords[k])
    }

    fn check_same_universe(&self, other: &DenseVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::UniverseMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Coordinate-wise sum.
    pub fn add(&self, other: &DenseVector) -> Result<DenseVector> {
        self.check_same_universe(other)?;
        Ok(DenseVector {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Coordinate-wise difference.
    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector> {
        self.check_same_universe(other)?;
        Ok(DenseVector {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Coordinate-wise product; this is what the sparse row product means.
    pub fn mul(&self, other: &DenseVector) -> Result<DenseVector> {
        self.check_same_universe(other)?;
        Ok(DenseVector {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, k: i64) -> DenseVector {
        DenseVector {
            n: self.n,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// Clamps every positive coordinate to 1; negative coordinates to 0.
    pub fn binary_project(&self) -> DenseVector {
        DenseVector {
            n: self.n,
            coords: self.coords.iter().map(|c| (*c >= 1) as i64).collect(),
        }
    }

    /// True when every coordinate is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.coords.iter().all(|c| *c == 0 || *c == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    fn require_binary(&self) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(Error::NotBinary)
        }
    }

    /// Set intersection of two binary vectors.
    pub fn set_intersect(&self, other: &DenseVector) -> Result<DenseVector> {
        self.require_binary()?;
        other.require_binary()?;
        self.mul(other)
    }

    /// Set union of two binary vectors: `a + b - a*b`.
    pub fn set_union(&self, other: &DenseVector) -> Result<DenseVector> {
        self.require_binary()?;
        other.require_binary()?;
        self.add(other)?.sub(&self.mul(other)?)
    }

    /// Set difference of two binary vectors: `a - a*b`.
    pub fn set_subtract(&self, other: &DenseVector) -> Result<DenseVector> {
        self.require_binary()?;
        other.require_binary()?;
        self.sub(&self.mul(other)?)
    }

    /// Number of assignments with a positive coordinate.
    pub fn count_states(&self) -> u64 {
        self.coords.iter().filter(|c| **c >= 1).count() as u64
    }

    /// Flip-invariance test: the event is free when toggling it never
    /// changes a coordinate. Defined on binary vectors only.
    pub fn free_by_definition(&self, i: VarId) -> Result<bool> {
        self.require_binary()?;
        check_universe(self.n, Some(i))?;
        let bit = 1usize << i.index();
        Ok((0..self.coords.len()).all(|k| self.coords[k] == self.coords[k ^ bit]))
    }

    /// One line per assignment: the pattern, a space, the coordinate.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for k in 0..self.coords.len() {
            for i in 0..self.n {
                out.push(if k >> i & 1 == 1 { '1' } else { '0' });
            }
            out.push(' ');
            out.push_str(&self.coords[k].to_string());
            out.push('\n');
        }
        out
    }
}

fn row_matches(row: &Row, k: usize) -> bool {
    row.upper().iter().all(|v| k >> v.index() & 1 == 1)
        && row.lower().iter().all(|v| k >> v.index() & 1 == 0)
}

/// The 2^n rows that fix every event of the universe, in assignment order.
///
/// They are pairwise orthogonal and sum to the unit row's expansion; each
/// expands to exactly one coordinate.
pub fn pure_state_basis(n: u32) -> Result<Vec<Row>> {
    check_cap(n, DEFAULT_CAP)?;
    let mut out = Vec::with_capacity(1usize << n);
    for k in 0..1usize << n {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for i in 1..=n {
            let v = VarId::new(i).expect("ids start at 1");
            if k >> v.index() & 1 == 1 {
                upper.push(v);
            } else {
                lower.push(v);
            }
        }
        out.push(
            Row::new(upper.into_iter().collect(), lower.into_iter().collect())
                .expect("disjoint by construction"),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::StateVector;

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

    fn vector(rows: &[(&str, u64)]) -> StateVector {
        StateVector::from_weighted(rows.iter().map(|(p, m)| {
            let (r, _) = Row::parse_pattern(p).unwrap();
            (r, *m)
        }))
    }

    #[test]
    fn expand_counts_each_assignment_once_per_row() {
        // {00, 11} over two events: coordinates 1,0,0,1 by pattern.
        let s = vector(&[("00", 1), ("11", 1)]);
        let d = DenseVector::expand(&s, 2).unwrap();
        for (pattern, want) in [("00", 1), ("01", 0), ("10", 0), ("11", 1)] {
            assert_eq!(d.coord_for(pattern).unwrap(), want, "pattern {pattern}");
        }
    }

    #[test]
    fn expand_adds_overlapping_rows() {
        // {01, 10, -1}: the assignment 01 is counted twice.
        let s = vector(&[("01", 1), ("10", 1), ("-1", 1)]);
        let d = DenseVector::expand(&s, 2).unwrap();
        for (pattern, want) in [("00", 0), ("01", 2), ("10", 1), ("11", 1)] {
            assert_eq!(d.coord_for(pattern).unwrap(), want, "pattern {pattern}");
        }
        assert!(!d.is_binary());
        assert!(d.binary_project().is_binary());
        assert_eq!(d.count_states(), 3);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            DenseVector::zeros(17),
            Err(Error::UniverseTooLarge { n: 17, cap: 16 })
        );
        assert!(DenseVector::zeros_capped(17, 20).is_ok());
    }

    #[test]
    fn arithmetic_requires_matching_universe() {
        let a = DenseVector::zeros(2).unwrap();
        let b = DenseVector::zeros(3).unwrap();
        assert_eq!(a.add(&b), Err(Error::UniverseMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn set_ops_reject_non_binary_vectors() {
        let s = vector(&[("-1", 1), ("1-", 1)]); // assignment 11 counted twice
        let d = DenseVector::expand(&s, 2).unwrap();
        let b = d.binary_project();
        assert_eq!(d.set_union(&b), Err(Error::NotBinary));
        assert!(b.set_union(&b).is_ok());
    }

    #[test]
    fn pure_states_partition_the_space() {
        let basis = pure_state_basis(3).unwrap();
        assert_eq!(basis.len(), 8);
        let mut sum = DenseVector::zeros(3).unwrap();
        for r in &basis {
            assert_eq!(r.fixed_count(), 3);
            sum = sum.add(&DenseVector::expand_row(r, 3).unwrap()).unwrap();
        }
        let unit = DenseVector::expand_row(&Row::unit(), 3).unwrap();
        assert_eq!(sum, unit);
        // Pairwise orthogonal.
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                assert!(a.multiply(b).is_null());
            }
        }
    }

    #[test]
    fn single_event_row_is_sum_of_half_the_pure_states() {
        // t^{1} over three events = the four pure states with E1 = 1.
        let lhs = DenseVector::expand_row(&row(&[1], &[]), 3).unwrap();
        let mut rhs = DenseVector::zeros(3).unwrap();
        for r in pure_state_basis(3).unwrap() {
            if r.upper().contains(v(1)) {
                rhs = rhs.add(&DenseVector::expand_row(&r, 3).unwrap()).unwrap();
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn free_by_definition_detects_trivial_columns() {
        let s = vector(&[("1-", 1), ("0-", 1)]);
        let d = DenseVector::expand(&s, 2).unwrap();
        assert!(d.free_by_definition(v(2)).unwrap());
        assert!(d.free_by_definition(v(1)).unwrap()); // whole space: E1 free too
        let t = DenseVector::expand(&vector(&[("1-", 1)]), 2).unwrap();
        assert!(!t.free_by_definition(v(1)).unwrap());
        assert!(t.free_by_definition(v(2)).unwrap());
    }

    #[test]
    fn dump_lists_one_coordinate_per_line() {
        let d = DenseVector::expand(&vector(&[("10", 1)]), 2).unwrap();
        assert_eq!(d.dump(), "00 0\n10 1\n01 0\n11 0\n");
    }
}
