//! Propositional formula syntax trees.
//!
//! The tree mirrors the surface syntax: conjunction and disjunction are
//! n-ary, the other connectives binary. Evaluation is direct structural
//! recursion and is deliberately the only semantics in this module; the
//! translation to state vectors lives in [`crate::compile`], so the two can
//! be checked against each other.

use std::fmt;

use crate::var::{IndexSet, VarId};

/// A propositional formula over events.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    True,
    False,
    Var(VarId),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(v: VarId) -> Formula {
        Formula::Var(v)
    }

    /// By-value builder, named in parallel with the other constructors.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula::Or(parts)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    /// Events occurring in the tree.
    pub fn vars(&self) -> IndexSet {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => out.push(*v),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_vars(out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Evaluates under a total assignment.
    pub fn eval(&self, assign: &impl Fn(VarId) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(v) => assign(*v),
            Formula::Not(f) => !f.eval(assign),
            Formula::And(fs) => fs.iter().all(|f| f.eval(assign)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(assign)),
            Formula::Implies(a, b) => !a.eval(assign) || b.eval(assign),
            Formula::Iff(a, b) => a.eval(assign) == b.eval(assign),
            Formula::Xor(a, b) => a.eval(assign) != b.eval(assign),
        }
    }

    /// `Some((event, phase))` when the formula is a bare or negated event.
    pub fn as_literal(&self) -> Option<(VarId, bool)> {
        match self {
            Formula::Var(v) => Some((*v, true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Var(v) => Some((*v, false)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Literal view of a clause: a disjunction of literals, a single
    /// literal, or the empty clause `false`. `None` for anything else.
    pub fn clause_literals(&self) -> Option<Vec<(VarId, bool)>> {
        match self {
            Formula::False => Some(Vec::new()),
            Formula::Or(parts) => parts.iter().map(Formula::as_literal).collect(),
            other => other.as_literal().map(|lit| vec![lit]),
        }
    }

    /// True for bare events and negated bare events.
    pub fn is_literal(&self) -> bool {
        self.as_literal().is_some()
    }

    /// Depth of connective nesting; literals and constants are 0.
    pub fn depth(&self) -> u32 {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => 0,
            Formula::Not(f) => {
                if self.is_literal() {
                    0
                } else {
                    1 + f.depth()
                }
            }
            Formula::And(fs) | Formula::Or(fs) => {
                1 + fs.iter().map(Formula::depth).max().unwrap_or(0)
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}

impl std::ops::BitAnd for Formula {
    type Output = Formula;
    fn bitand(self, rhs: Formula) -> Formula {
        Formula::And(vec![self, rhs])
    }
}

impl std::ops::BitOr for Formula {
    type Output = Formula;
    fn bitor(self, rhs: Formula) -> Formula {
        Formula::Or(vec![self, rhs])
    }
}

impl std::ops::Not for Formula {
    type Output = Formula;
    fn not(self) -> Formula {
        Formula::not(self)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Formula {
    // Precedence levels, loosest first: iff, implies, or, xor, and, not.
    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::Xor(..) => 4,
            Formula::And(..) => 5,
            _ => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.prec();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Var(v) => write!(f, "{v}")?,
            Formula::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_prec(f, 6)?;
            }
            Formula::And(parts) => fmt_nary(f, parts, " & ", prec)?,
            Formula::Or(parts) => fmt_nary(f, parts, " | ", prec)?,
            Formula::Implies(a, b) => {
                a.fmt_prec(f, prec + 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, prec)?;
            }
            Formula::Iff(a, b) => {
                a.fmt_prec(f, prec + 1)?;
                write!(f, " <-> ")?;
                b.fmt_prec(f, prec + 1)?;
            }
            Formula::Xor(a, b) => {
                a.fmt_prec(f, prec + 1)?;
                write!(f, " ^ ")?;
                b.fmt_prec(f, prec + 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn fmt_nary(f: &mut fmt::Formatter<'_>, parts: &[Formula], sep: &str, prec: u8) -> fmt::Result {
    if parts.is_empty() {
        // Empty conjunction is true, empty disjunction false.
        return write!(f, "{}", if sep.contains('&') { "true" } else { "false" });
    }
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        p.fmt_prec(f, prec + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId::new(n).unwrap()
    }

    #[test]
    fn eval_covers_all_connectives() {
        let f = Formula::iff(
            Formula::var(v(1)),
            Formula::xor(
                Formula::implies(Formula::var(v(2)), Formula::var(v(3))),
                Formula::not(Formula::var(v(2))),
            ),
        );
        // E2=1, E3=0: implies is false, not-E2 is false, xor false; E1 must be 0.
        assert!(f.eval(&|x| x.get() == 2));
        assert!(!f.eval(&|x| x.get() != 3));
    }

    #[test]
    fn clause_views() {
        let clause = Formula::or(vec![
            Formula::var(v(1)),
            Formula::not(Formula::var(v(3))),
        ]);
        assert_eq!(
            clause.clause_literals(),
            Some(vec![(v(1), true), (v(3), false)])
        );
        assert_eq!(Formula::var(v(2)).clause_literals(), Some(vec![(v(2), true)]));
        assert_eq!(Formula::False.clause_literals(), Some(vec![]));
        assert_eq!(
            Formula::and(vec![Formula::var(v(1))]).clause_literals(),
            None
        );
        assert_eq!(
            Formula::or(vec![Formula::var(v(1)), Formula::True]).clause_literals(),
            None
        );
    }

    #[test]
    fn display_round_trips_precedence() {
        let f = Formula::implies(
            Formula::or(vec![
                Formula::and(vec![Formula::var(v(1)), Formula::var(v(2))]),
                Formula::var(v(3)),
            ]),
            Formula::var(v(4)),
        );
        assert_eq!(f.to_string(), "E1 & E2 | E3 -> E4");
        let g = Formula::and(vec![
            Formula::var(v(1)),
            Formula::or(vec![Formula::var(v(2)), Formula::var(v(3))]),
        ]);
        assert_eq!(g.to_string(), "E1 & (E2 | E3)");
    }
}
